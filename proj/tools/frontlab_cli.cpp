#include "frontlab/acceptance.hpp"
#include "frontlab/config.hpp"
#include "frontlab/error.hpp"
#include "frontlab/io.hpp"
#include "frontlab/scenario.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct CommonFlags {
    std::string config;
    std::string out = "out";
    int jobs = 1;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_config = true)
{
    auto* opt = cmd->add_option("--config", f.config, "scenario file");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", f.seed, "seed recorded in the report");
}

int report(const frontlab::RunOutcome& out)
{
    const auto& r = out.report;
    std::cout << r.value("experiment", std::string("?")) << ' ' << r.value("scenario", std::string("?")) << ": "
              << (r.value("pass", false) ? "PASS" : "FAIL");
    if (r.contains("summary")) std::cout << ' ' << r["summary"].dump();
    std::cout << '\n';
    if (r.contains("error")) std::cerr << "error: " << r["error"].value("message", std::string()) << '\n';
    return out.exit_code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"frontlab: reaction-diffusion front experiments"};
    app.require_subcommand(1);

    const std::vector<std::string> experiments{"profile", "minspeed", "switch", "periodic", "certify", "criteria"};
    std::vector<CommonFlags> flags(experiments.size());
    std::vector<CLI::App*> cmds;
    for (std::size_t i = 0; i < experiments.size(); ++i) {
        auto* cmd = app.add_subcommand(experiments[i], "run a " + experiments[i] + " scenario");
        add_common(cmd, flags[i]);
        cmds.push_back(cmd);
    }

    CommonFlags sweep_flags;
    std::string axis;
    std::vector<double> values;
    auto* sweep = app.add_subcommand("sweep", "run a scenario over a list of values of one numeric key");
    add_common(sweep, sweep_flags);
    sweep->add_option("--axis", axis, "dotted key, e.g. analysis.c1")->required();
    sweep->add_option("--values", values, "comma-separated values")->required()->delimiter(',');

    CommonFlags accept_flags;
    std::vector<int> only;
    auto* accept = app.add_subcommand("accept", "run the acceptance suite");
    add_common(accept, accept_flags, false);
    accept->add_option("--only", only, "criterion numbers")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : frontlab::kExitUsage;
    }

    try {
        for (std::size_t i = 0; i < cmds.size(); ++i) {
            if (!cmds[i]->parsed()) continue;
            frontlab::RunOptions opts;
            opts.out_dir = flags[i].out;
            opts.seed = flags[i].seed;
            opts.jobs = flags[i].jobs;
            opts.experiment = frontlab::parse_experiment(experiments[i]);
            return report(frontlab::run_scenario_file(flags[i].config, opts));
        }
        if (sweep->parsed()) {
            nlohmann::json base;
            try {
                base = frontlab::load_config(sweep_flags.config);
            } catch (const frontlab::Error& e) {
                std::cerr << "error: " << e.what() << '\n';
                return frontlab::kExitUsage;
            }
            frontlab::SweepOptions opts;
            opts.axis = axis;
            opts.values = values;
            opts.jobs = sweep_flags.jobs;
            opts.out_dir = sweep_flags.out;
            opts.base_dir = std::filesystem::path(sweep_flags.config).parent_path();
            opts.seed = sweep_flags.seed;
            const auto out = frontlab::run_sweep(base, opts);
            if (out.report.contains("cells")) {
                for (const auto& row : out.report["cells"]) {
                    std::cout << axis << " = " << row["value"].get<double>() << ": "
                              << (row["pass"].get<bool>() ? "PASS" : "FAIL") << " exit " << row["exit_code"];
                    if (row.contains("summary")) std::cout << ' ' << row["summary"].dump();
                    std::cout << '\n';
                }
            } else if (out.report.contains("error")) {
                std::cerr << "error: " << out.report["error"]["message"].get<std::string>() << '\n';
            }
            return out.exit_code;
        }
        if (accept->parsed()) {
            frontlab::AcceptanceOptions opts;
            opts.only = only;
            if (accept_flags.seed) opts.seed = *accept_flags.seed;
            const auto results = frontlab::run_acceptance(opts);
            bool all = true;
            for (const auto& r : results) {
                std::cout << frontlab::format_line(r) << '\n';
                all = all && r.pass;
            }
            frontlab::write_json(std::filesystem::path(accept_flags.out) / "acceptance.json", frontlab::to_json(results));
            return all ? frontlab::kExitPass : frontlab::kExitCheckFailure;
        }
    } catch (const frontlab::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return frontlab::is_usage_error(e.kind()) ? frontlab::kExitUsage : frontlab::kExitNumerical;
    }
    return frontlab::kExitUsage;
}
