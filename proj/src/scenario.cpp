#include "frontlab/scenario.hpp"

#include "frontlab/certify.hpp"
#include "frontlab/config.hpp"
#include "frontlab/error.hpp"
#include "frontlab/interface.hpp"
#include "frontlab/io.hpp"
#include "frontlab/periodiclab.hpp"
#include "frontlab/profile.hpp"
#include "frontlab/speedlaw.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <future>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

namespace frontlab {

using nlohmann::json;

Experiment parse_experiment(const std::string& name)
{
    if (name == "profile") return Experiment::Profile;
    if (name == "minspeed") return Experiment::MinSpeed;
    if (name == "switch") return Experiment::Switch;
    if (name == "periodic") return Experiment::Periodic;
    if (name == "certify") return Experiment::Certify;
    if (name == "criteria") return Experiment::Criteria;
    fail(ErrorKind::Config,
         "unknown experiment '" + name + "' (expected profile, minspeed, switch, periodic, certify, criteria)");
}

std::string to_string(Experiment e)
{
    switch (e) {
    case Experiment::Profile: return "profile";
    case Experiment::MinSpeed: return "minspeed";
    case Experiment::Switch: return "switch";
    case Experiment::Periodic: return "periodic";
    case Experiment::Certify: return "certify";
    case Experiment::Criteria: return "criteria";
    }
    return "profile";
}

Nonlinearity nonlinearity_from_config(const json& node, const std::filesystem::path& base_dir)
{
    if (!node.is_object()) fail(ErrorKind::Config, "nonlinearity must be a table");
    const std::string family = get_string(node, "family");
    if (family == "tabulated") {
        if (const json* file = find_path(node, "file")) {
            std::filesystem::path p = file->get<std::string>();
            if (p.is_relative()) p = base_dir / p;
            return Nonlinearity::tabulated_file(p);
        }
        const json& s = require_path(node, "s");
        const json& f = require_path(node, "f");
        return Nonlinearity::tabulated(s.get<std::vector<double>>(), f.get<std::vector<double>>());
    }
    std::vector<double> params;
    if (const json* p = find_path(node, "params")) {
        if (!p->is_array()) fail(ErrorKind::Config, "params must be an array of numbers");
        for (const auto& v : *p) {
            if (!v.is_number()) fail(ErrorKind::Config, "params must be an array of numbers");
            params.push_back(v.get<double>());
        }
    }
    return Nonlinearity::from_spec(family, params);
}

SolverConfig solver_from_config(const json& root)
{
    SolverConfig cfg;
    cfg.dx = get_number(root, "solver.dx");
    cfg.dt = get_number(root, "solver.dt", 0.0);
    cfg.scheme = parse_scheme(get_string(root, "solver.scheme", "imex_be"));
    cfg.half_width_left = get_number(root, "solver.half_width_left", cfg.half_width_left);
    cfg.half_width_right = get_number(root, "solver.half_width_right", 0.0);
    cfg.window_policy = parse_window_policy(get_string(root, "solver.window", "follow"));
    cfg.follow_level = get_number(root, "solver.follow_level", cfg.follow_level);
    cfg.shift_fraction = get_number(root, "solver.shift_fraction", cfg.shift_fraction);
    cfg.boundary = parse_boundary(get_string(root, "solver.boundary", "exponential_tail"));
    cfg.snapshot_stride = static_cast<long>(get_number(root, "solver.snapshot_stride", 25));
    if (const json* levels = find_path(root, "solver.track_levels")) {
        cfg.track_levels = levels->get<std::vector<double>>();
    } else {
        cfg.track_levels = {0.1, 0.5, 0.9};
    }
    return cfg;
}

namespace {

struct Context {
    const json& config;
    const RunOptions& opts;
};

struct ExperimentResult {
    json result;
    json summary;
    bool pass = false;
    std::optional<Trajectory> trajectory;
    std::optional<FrontProfile> profile;
};

Nonlinearity single_nonlinearity(const Context& ctx)
{
    if (const json* f = find_path(ctx.config, "reaction.f")) return nonlinearity_from_config(*f, ctx.opts.base_dir);
    return nonlinearity_from_config(require_path(ctx.config, "reaction.f1"), ctx.opts.base_dir);
}

SwitchSetup switch_setup(const Context& ctx)
{
    SwitchSetup st;
    st.f1 = nonlinearity_from_config(require_path(ctx.config, "reaction.f1"), ctx.opts.base_dir);
    const json* f2 = find_path(ctx.config, "reaction.f2");
    st.f2 = f2 != nullptr ? nonlinearity_from_config(*f2, ctx.opts.base_dir) : st.f1;
    st.t1 = get_number(ctx.config, "reaction.t1", 0.0);
    st.t2 = get_number(ctx.config, "reaction.t2", st.t1 + 10.0);
    st.blend = parse_blend(get_string(ctx.config, "reaction.blend", "smoothstep"));
    st.c1 = get_number(ctx.config, "analysis.c1");
    st.burn_in = get_number(ctx.config, "analysis.burn_in", 50.0);
    st.t_end = get_number(ctx.config, "analysis.t_end", st.t2 + 200.0);
    st.tolerance = get_number(ctx.config, "analysis.tolerance", 0.05);
    st.solver = solver_from_config(ctx.config);
    return st;
}

json speed_json(const SpeedEstimate& e)
{
    json j{{"c_hat", e.c_hat}, {"ci_halfwidth", e.ci_halfwidth}, {"t_lo", e.t_lo}, {"t_hi", e.t_hi},
           {"log_correction_used", e.log_correction_used}};
    if (e.log_correction_used) j["log_coefficient"] = e.log_coefficient;
    return j;
}

ExperimentResult run_profile(const Context& ctx)
{
    const Nonlinearity f = single_nonlinearity(ctx);
    const double c = get_number(ctx.config, "analysis.c");
    const double tol = get_number(ctx.config, "analysis.tol", 1e-4);
    const FrontProfile p = solve_profile(f, c, tol);
    ExperimentResult out;
    out.result = {{"family", f.name()},
                  {"c", p.c},
                  {"points", p.size()},
                  {"xi_min", p.xi_min},
                  {"xi_max", p.xi_max()},
                  {"dxi", p.dxi},
                  {"fitted_lambda", p.fitted_lambda},
                  {"fitted_amplitude", p.fitted_amplitude},
                  {"degenerate_tail", p.degenerate_tail},
                  {"residual", p.residual},
                  {"tol", tol}};
    out.pass = p.residual <= tol;
    if (f.family() != Family::Bistable && f.family() != Family::Tabulated) {
        const auto kpp = is_kpp(f);
        if (kpp.is_kpp) {
            const double d = derivative_at_zero(f).value;
            const double cstar = 2.0 * std::sqrt(d);
            if (c >= cstar) out.result["expected_lambda"] = decay_exponent(d, cstar, c);
        }
    }
    if (f.family() == Family::Bistable) {
        // Closed form 1 / (1 + exp(xi / sqrt 2)) at c = (1 - 2a) / sqrt 2.
        const double a = f.params().at(0);
        if (std::abs(c - (1.0 - 2.0 * a) / std::sqrt(2.0)) < 1e-12) {
            double err = 0.0;
            for (Eigen::Index i = 0; i < p.size(); ++i) {
                err = std::max(err, std::abs(p.phi(i) - 1.0 / (1.0 + std::exp(p.xi(i) / std::sqrt(2.0)))));
            }
            out.result["closed_form_error"] = err;
            out.pass = out.pass && err <= 1e-4;
        }
    }
    out.summary = {{"c", c}, {"fitted_lambda", p.fitted_lambda}, {"residual", p.residual}};
    out.profile = p;
    return out;
}

ExperimentResult run_minspeed(const Context& ctx)
{
    const Nonlinearity f = single_nonlinearity(ctx);
    const double tol = get_number(ctx.config, "analysis.tol", 1e-6);
    const MinimalSpeed ms = minimal_speed(f, tol);
    ExperimentResult out;
    out.result = {{"family", f.name()},
                  {"cstar", ms.cstar},
                  {"kpp_bound", ms.kpp_bound},
                  {"at_linear_bound", ms.at_linear_bound},
                  {"iterations", ms.iterations},
                  {"numeric", !is_kpp(f).is_kpp},
                  {"tol", tol}};
    out.pass = ms.cstar >= ms.kpp_bound * (1.0 - tol) - tol;
    out.summary = {{"cstar", ms.cstar}, {"kpp_bound", ms.kpp_bound}};
    const double t_end = get_number(ctx.config, "analysis.t_end", 0.0);
    if (t_end > 0.0) {
        SolverConfig cfg = solver_from_config(ctx.config);
        if (find_path(ctx.config, "solver.boundary") == nullptr) cfg.boundary = Boundary::DirichletLimits;
        const double d = derivative_at_zero(f).value;
        const double lambda = decay_exponent(d, ms.cstar, ms.cstar);
        if (!(cfg.dt > 0.0)) cfg.dt = default_time_step(f.lipschitz());
        if (!(cfg.half_width_right > 0.0)) cfg.half_width_right = default_right_half_width(lambda);
        cfg.tail_rate = lambda;
        const FrontProfile p = solve_profile(f, ms.cstar);
        Trajectory traj = evolve(init_from_profile(p, 0.0, -cfg.half_width_left, cfg.half_width_right, cfg.dx),
                                 ReactionTerm::time_independent(f), t_end, cfg);
        const double burn_in = get_number(ctx.config, "analysis.burn_in", 50.0);
        const double tolerance = get_number(ctx.config, "analysis.tolerance", 0.03);
        const InterfaceTrack late = traj.track(0.5).slice(burn_in, t_end);
        const SpeedEstimate est = global_mean_speed(late, {std::min(10.0, (t_end - burn_in) / 4.0), true, 0.0});
        const double rel = std::abs(est.c_hat - ms.cstar) / ms.cstar;
        out.result["evolution"] = {{"t_end", t_end}, {"burn_in", burn_in}, {"speed", speed_json(est)},
                                   {"relative_error", rel}, {"tolerance", tolerance}};
        out.pass = out.pass && rel <= tolerance;
        out.summary["measured"] = est.c_hat;
        out.trajectory = std::move(traj);
    }
    return out;
}

ExperimentResult run_switch(const Context& ctx)
{
    SwitchSetup st = switch_setup(ctx);
    st.keep_trajectory = ctx.opts.write_artifacts;
    ExperimentResult out;
    std::vector<Blend> extra;
    if (const json* blends = find_path(ctx.config, "analysis.blends")) {
        for (const auto& b : *blends) {
            const Blend bl = parse_blend(b.get<std::string>());
            if (bl != st.blend) extra.push_back(bl);
        }
    }
    std::vector<std::future<SwitchReport>> pending;
    for (Blend bl : extra) {
        SwitchSetup other = st;
        other.blend = bl;
        other.keep_trajectory = false;
        pending.push_back(std::async(ctx.opts.jobs > 1 ? std::launch::async : std::launch::deferred,
                                     [other] { return run_switch_experiment(other); }));
    }
    SwitchReport rep = run_switch_experiment(st);
    out.result = to_json(rep);
    out.pass = rep.pass;
    out.summary = {{"c1", st.c1},
                   {"c2_predicted", rep.prediction.c2_predicted},
                   {"measured", rep.measured},
                   {"relative_error", rep.relative_error},
                   {"branch", to_string(rep.prediction.branch)}};
    if (!pending.empty()) {
        json runs = json::array();
        double lo = rep.measured;
        double hi = rep.measured;
        runs.push_back({{"blend", to_string(st.blend)}, {"measured", rep.measured}});
        for (std::size_t k = 0; k < pending.size(); ++k) {
            const SwitchReport r = pending[k].get();
            runs.push_back({{"blend", to_string(extra[k])}, {"measured", r.measured}});
            lo = std::min(lo, r.measured);
            hi = std::max(hi, r.measured);
        }
        const double spread = (hi - lo) / lo;
        const double blend_tol = get_number(ctx.config, "analysis.blend_tolerance", 0.02);
        out.result["gap_independence"] = {{"runs", runs}, {"relative_spread", spread}, {"tolerance", blend_tol},
                                          {"pass", spread <= blend_tol}};
        out.pass = out.pass && spread <= blend_tol;
        out.summary["blend_spread"] = spread;
    }
    if (rep.trajectory) out.trajectory = std::move(*rep.trajectory);
    return out;
}

ExperimentResult run_periodic(const Context& ctx)
{
    PulsatingSetup st;
    st.period = get_number(ctx.config, "medium.period", 2.0);
    st.diffusivity_amplitude = get_number(ctx.config, "medium.diffusivity_amplitude", 0.0);
    st.rate_amplitude = get_number(ctx.config, "medium.rate_amplitude", 0.5);
    st.t_end = get_number(ctx.config, "analysis.t_end", 200.0);
    st.burn_in = get_number(ctx.config, "analysis.burn_in", 100.0);
    st.min_gap = get_number(ctx.config, "analysis.min_gap", 10.0);
    st.shift = get_number(ctx.config, "analysis.shift", 0.0);
    st.solver = solver_from_config(ctx.config);
    if (find_path(ctx.config, "solver.boundary") == nullptr) st.solver.boundary = Boundary::DirichletLimits;
    if (find_path(ctx.config, "solver.snapshot_stride") == nullptr) st.solver.snapshot_stride = 5;
    if (!(st.solver.half_width_right > 0.0)) st.solver.half_width_right = 150.0;
    const double residual_tol = get_number(ctx.config, "analysis.residual_tol", 1e-2);

    std::optional<std::future<PulsatingRun>> twin;
    const json* twin_shift = find_path(ctx.config, "analysis.twin_shift");
    if (twin_shift != nullptr) {
        PulsatingSetup other = st;
        other.shift = twin_shift->get<double>();
        twin = std::async(ctx.opts.jobs > 1 ? std::launch::async : std::launch::deferred,
                          [other] { return run_pulsating(other); });
    }
    PulsatingRun run = run_pulsating(st);
    ExperimentResult out;
    out.result = {{"report", to_json(run.report)}, {"speed", speed_json(run.speed)}, {"residual_tol", residual_tol}};
    out.pass = run.report.residual <= residual_tol;
    out.summary = {{"c_hat", run.report.c_hat}, {"residual", run.report.residual}};
    if (twin) {
        const PulsatingRun b = twin->get();
        const double diff = std::abs(run.report.c_hat - b.report.c_hat);
        const bool agree = diff <= run.report.ci_halfwidth + b.report.ci_halfwidth;
        out.result["twin"] = {{"shift", twin_shift->get<double>()}, {"report", to_json(b.report)},
                              {"speed_difference", diff}, {"speeds_agree", agree}};
        out.pass = out.pass && agree && b.report.residual <= residual_tol;
        out.summary["twin_speed_difference"] = diff;
    }
    out.trajectory = std::move(run.trajectory);
    return out;
}

ExperimentResult run_certify(const Context& ctx)
{
    SwitchSetup st = switch_setup(ctx);
    st.keep_trajectory = true;
    st.burn_in = get_number(ctx.config, "analysis.burn_in", 10.0);
    st.t_end = get_number(ctx.config, "analysis.t_end", st.t2 + 60.0);
    const double eps = get_number(ctx.config, "analysis.eps", 0.1);
    const double mono_burn_in = get_number(ctx.config, "analysis.monotonicity_burn_in", 10.0);
    SwitchReport rep = run_switch_experiment(st);
    const Trajectory& traj = *rep.trajectory;
    const ReactionTerm r = ReactionTerm::time_switched(st.f1, st.f2, st.t1, st.t2, st.blend);
    const double dx = traj.snapshots.front().dx;

    EnvelopeCertificate env = supersolution_envelope(traj, r, rep.prediction.lambda_1c1, eps);
    heat_lower_bound(traj, r, env);
    const OrderingReport ord = ordering_check(traj);
    const MonotonicityReport mono = time_monotonicity_check(traj, r, 10.0 * dx * dx, mono_burn_in);
    ExperimentResult out;
    json checks = json::array();
    checks.push_back({{"name", "supersolution_envelope"}, {"residual", env.violation_sup},
                      {"threshold", env.threshold}, {"pass", env.violation_sup <= env.threshold}});
    checks.push_back({{"name", "heat_lower_bound"}, {"residual", env.heat_bound_violation},
                      {"threshold", env.threshold}, {"pass", env.heat_bound_violation <= env.threshold}});
    checks.push_back({{"name", "explicit_heat_bound"}, {"residual", env.closed_form_violation},
                      {"threshold", 1e-8}, {"pass", env.closed_form_violation <= 1e-8}});
    checks.push_back({{"name", "ordering"}, {"residual", std::max(-ord.min_u, ord.max_u - 1.0)},
                      {"threshold", 0.0}, {"pass", ord.pass}});
    checks.push_back({{"name", "time_monotonicity"}, {"residual", mono.max_negative_increment},
                      {"threshold", mono.tol}, {"status", to_string(mono.status)},
                      {"pass", mono.status != CheckStatus::Fail}});
    out.pass = env.pass && ord.pass && mono.status != CheckStatus::Fail;

    if (const json* offset = find_path(ctx.config, "analysis.comparison_offset")) {
        const double shift = offset->get<double>();
        const double c = get_number(ctx.config, "analysis.comparison_c", st.c1);
        const double span = get_number(ctx.config, "analysis.comparison_t_end", 10.0);
        const ReactionTerm homogeneous = ReactionTerm::time_independent(st.f1);
        SolverConfig cfg = st.solver;
        if (!(cfg.dt > 0.0)) cfg.dt = default_time_step(homogeneous.lipschitz());
        const double lambda = decay_exponent(derivative_at_zero(st.f1).value, 2.0 * std::sqrt(derivative_at_zero(st.f1).value), c);
        if (!(cfg.half_width_right > 0.0)) cfg.half_width_right = default_right_half_width(lambda);
        cfg.tail_rate = lambda;
        cfg.snapshot_stride = 5;
        const FrontProfile p = solve_profile(st.f1, c);
        auto run = [&](double x0) {
            return evolve(init_from_profile(p, x0, x0 - cfg.half_width_left, x0 + cfg.half_width_right, cfg.dx),
                          homogeneous, span, cfg);
        };
        const Trajectory a = run(0.0);
        const Trajectory b = run(-shift);
        const double expected = shift / c;
        const ShiftComparison cmp = shift_comparison(a, b, 0.0, 2.0 * expected, 1e-6);
        const double rel = std::abs(cmp.T - expected) / expected;
        const bool ok = rel <= 0.01 && cmp.sup_distance <= 10.0 * dx * dx;
        checks.push_back({{"name", "shift_comparison"}, {"T", cmp.T}, {"expected_T", expected},
                          {"relative_error", rel}, {"sup_distance", cmp.sup_distance},
                          {"contact_residual", cmp.contact_residual}, {"monotone_in_T", cmp.monotone_in_T},
                          {"threshold", 10.0 * dx * dx}, {"pass", ok}});
        out.pass = out.pass && ok;
    }
    out.result = {{"envelope", to_json(env)},
                  {"ordering", to_json(ord)},
                  {"time_monotonicity", to_json(mono)},
                  {"checks", checks},
                  {"switch", to_json(rep)}};
    out.summary = {{"violation_sup", env.violation_sup}, {"heat_bound_violation", env.heat_bound_violation},
                   {"max_negative_increment", mono.max_negative_increment}};
    out.trajectory = std::move(*rep.trajectory);
    return out;
}

ExperimentResult run_criteria(const Context& ctx)
{
    SwitchSetup st = switch_setup(ctx);
    st.keep_trajectory = true;
    st.solver.track_levels = {0.1, 0.5, 0.9};
    std::vector<double> levels{0.1, 0.5, 0.9};
    if (const json* l = find_path(ctx.config, "analysis.levels")) levels = l->get<std::vector<double>>();
    const double radius = get_number(ctx.config, "analysis.radius", 10.0);
    const double bound = get_number(ctx.config, "analysis.distance_bound", 40.0);
    const double eps = get_number(ctx.config, "analysis.eps", 1e-3);
    SwitchReport rep = run_switch_experiment(st);
    const Trajectory& traj = *rep.trajectory;
    const CriteriaReport cr = verify_transition_criteria(traj, traj.track(0.5), levels, radius, bound, eps);
    const double dx = traj.snapshots.front().dx;
    const InvasionCheck inv = invasion_check(traj.track(0.5), 10.0 * dx * dx);
    auto criteria_json = [](const CriteriaReport& c) {
        json lv = json::array();
        for (const auto& l : c.levels) {
            lv.push_back({{"level", l.level}, {"max_distance", l.max_distance}, {"attained", l.attained}});
        }
        return json{{"levels", lv},        {"inf_u", c.inf_u},
                    {"sup_u", c.sup_u},    {"distance_bound", c.distance_bound},
                    {"radius", c.radius},  {"eps", c.eps},
                    {"bounded_levels", c.bounded_levels}, {"nondegenerate", c.nondegenerate},
                    {"vacuous", c.vacuous}, {"pass", c.pass}};
    };
    ExperimentResult out;
    out.result = {{"criteria", criteria_json(cr)},
                  {"invasion", {{"invasion", inv.invasion}, {"monotone", inv.monotone}, {"range", inv.range},
                                {"threshold", inv.threshold}}}};
    out.pass = cr.pass && inv.invasion;
    if (get_bool(ctx.config, "analysis.flattening_check", true)) {
        const Trajectory flat = synthetic_flattening(st.t_end - st.t1, 1.0, 1000.0, 0.5, levels);
        const CriteriaReport fc = verify_transition_criteria(flat, flat.track(0.5), levels, radius, bound, eps);
        out.result["flattening"] = criteria_json(fc);
        out.result["flattening_rejected"] = !fc.bounded_levels;
        out.pass = out.pass && !fc.bounded_levels;
    }
    out.summary = {{"pass", cr.pass}, {"inf_u", cr.inf_u}, {"sup_u", cr.sup_u}};
    out.trajectory = std::move(*rep.trajectory);
    return out;
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

void write_artifacts(const ExperimentResult& r, const json& config, const std::filesystem::path& dir)
{
    if (r.trajectory) {
        write_track_csv(dir / "track.csv", *r.trajectory);
        const double every = get_number(config, "output.snapshot_every", 10.0);
        write_snapshots_csv(dir / "snapshots" / "snapshots.csv", *r.trajectory, every);
        write_snapshots_text(dir / "snapshots" / "snapshots.txt", *r.trajectory, every);
        write_shifts_jsonl(dir / "snapshots" / "shifts.jsonl", *r.trajectory);
    }
    if (r.profile) write_profile(dir / "profile.txt", *r.profile);
}

} // namespace

RunOutcome run_scenario(const json& config, const RunOptions& opts)
{
    RunOutcome out;
    json& rep = out.report;
    rep["scenario"] = config.is_object() ? config.value("name", std::string("unnamed")) : "unnamed";
    rep["seed"] = opts.seed.value_or(config.is_object() ? config.value("seed", std::uint64_t{0}) : 0);
    rep["config"] = config;
    try {
        Experiment exp = opts.experiment.value_or(Experiment::Profile);
        if (const json* e = find_path(config, "experiment")) {
            const Experiment named = parse_experiment(e->get<std::string>());
            if (opts.experiment && *opts.experiment != named) {
                fail(ErrorKind::Config, "config describes a '" + to_string(named) + "' experiment, not '"
                                            + to_string(*opts.experiment) + "'");
            }
            exp = named;
        } else if (!opts.experiment) {
            fail(ErrorKind::Config, "missing required key 'experiment'");
        }
        rep["experiment"] = to_string(exp);
        const Context ctx{config, opts};
        if (exp != Experiment::Periodic && exp != Experiment::Profile && exp != Experiment::MinSpeed) {
            (void)get_number(config, "solver.dx");
        }
        ExperimentResult r;
        switch (exp) {
        case Experiment::Profile: r = run_profile(ctx); break;
        case Experiment::MinSpeed: r = run_minspeed(ctx); break;
        case Experiment::Switch: r = run_switch(ctx); break;
        case Experiment::Periodic: r = run_periodic(ctx); break;
        case Experiment::Certify: r = run_certify(ctx); break;
        case Experiment::Criteria: r = run_criteria(ctx); break;
        }
        rep["result"] = std::move(r.result);
        rep["summary"] = std::move(r.summary);
        rep["pass"] = r.pass;
        out.exit_code = r.pass ? kExitPass : kExitCheckFailure;
        if (opts.write_artifacts && !opts.out_dir.empty()) write_artifacts(r, config, opts.out_dir);
    } catch (const Error& e) {
        rep["pass"] = false;
        rep["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
        out.exit_code = is_usage_error(e.kind()) ? kExitUsage : kExitNumerical;
    } catch (const nlohmann::json::exception& e) {
        rep["pass"] = false;
        rep["error"] = {{"kind", "config"}, {"message", e.what()}};
        out.exit_code = kExitUsage;
    }
    rep["exit_code"] = out.exit_code;
    rep["meta"] = {{"timestamp", utc_timestamp()}};
    if (!opts.out_dir.empty()) write_json(opts.out_dir / "report.json", rep);
    return out;
}

RunOutcome run_scenario_file(const std::filesystem::path& path, RunOptions opts)
{
    json config;
    try {
        config = load_config(path);
    } catch (const Error& e) {
        RunOutcome out;
        out.exit_code = kExitUsage;
        out.report = {{"scenario", path.string()},
                      {"pass", false},
                      {"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}},
                      {"exit_code", kExitUsage}};
        if (!opts.out_dir.empty()) write_json(opts.out_dir / "report.json", out.report);
        return out;
    }
    if (opts.base_dir.empty()) opts.base_dir = path.parent_path();
    return run_scenario(config, opts);
}

RunOutcome run_sweep(const json& base, const SweepOptions& opts)
{
    RunOutcome out;
    if (opts.axis.empty() || opts.values.empty()) {
        out.exit_code = kExitUsage;
        out.report = {{"error", {{"kind", "config"}, {"message", "sweep needs an axis and at least one value"}}}};
        return out;
    }
    const json* current = find_path(base, opts.axis);
    if (current != nullptr && !current->is_number()) {
        out.exit_code = kExitUsage;
        out.report = {{"error", {{"kind", "config"}, {"message", "sweep axis '" + opts.axis + "' is not numeric"}}}};
        return out;
    }
    const std::size_t n = opts.values.size();
    std::vector<RunOutcome> cells(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            json cfg = base;
            set_path(cfg, opts.axis, opts.values[i]);
            RunOptions ro;
            ro.base_dir = opts.base_dir;
            ro.seed = opts.seed;
            if (!opts.out_dir.empty()) {
                std::ostringstream name;
                name << "cell_" << std::setw(3) << std::setfill('0') << i;
                ro.out_dir = opts.out_dir / name.str();
            }
            cells[i] = run_scenario(cfg, ro);
        }
    };
    const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(n)));
    std::vector<std::thread> threads;
    for (int j = 1; j < jobs; ++j) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();

    json rows = json::array();
    int worst = kExitPass;
    for (std::size_t i = 0; i < n; ++i) {
        json row{{"index", i}, {"value", opts.values[i]}, {"exit_code", cells[i].exit_code},
                 {"pass", cells[i].report.value("pass", false)}};
        if (cells[i].report.contains("summary")) row["summary"] = cells[i].report["summary"];
        if (cells[i].report.contains("error")) row["error"] = cells[i].report["error"];
        rows.push_back(std::move(row));
        worst = std::max(worst, cells[i].exit_code);
    }
    out.exit_code = worst;
    out.report = {{"scenario", base.value("name", std::string("unnamed"))},
                  {"axis", opts.axis},
                  {"cells", rows},
                  {"exit_code", worst},
                  {"meta", {{"timestamp", utc_timestamp()}}}};
    if (!opts.out_dir.empty()) write_json(opts.out_dir / "sweep.json", out.report);
    return out;
}

} // namespace frontlab
