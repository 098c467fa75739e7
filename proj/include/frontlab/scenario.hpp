#pragma once

#include "frontlab/reaction.hpp"
#include "frontlab/solver.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace frontlab {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

enum class Experiment { Profile, MinSpeed, Switch, Periodic, Certify, Criteria };
Experiment parse_experiment(const std::string& name);
std::string to_string(Experiment e);

/// Builds a nonlinearity from a table with `family` and `params` (or `file`
/// for tabulated data, resolved against base_dir).
Nonlinearity nonlinearity_from_config(const nlohmann::json& node, const std::filesystem::path& base_dir = {});
/// Reads the [solver] table. solver.dx is required.
SolverConfig solver_from_config(const nlohmann::json& root);

struct RunOptions {
    std::filesystem::path out_dir;
    std::filesystem::path base_dir;   // for relative file references
    std::optional<std::uint64_t> seed;
    std::optional<Experiment> experiment; // overrides / must match the config
    bool write_artifacts = true;
    int jobs = 1;
};

struct RunOutcome {
    int exit_code = kExitPass;
    nlohmann::json report;
};

/// Runs one scenario. Errors are recorded in the report and mapped to exit
/// codes (2 for configuration problems, 3 for numerical failures).
RunOutcome run_scenario(const nlohmann::json& config, const RunOptions& opts);
RunOutcome run_scenario_file(const std::filesystem::path& path, RunOptions opts);

struct SweepOptions {
    std::string axis;
    std::vector<double> values;
    int jobs = 1;
    std::filesystem::path out_dir;
    std::filesystem::path base_dir;
    std::optional<std::uint64_t> seed;
};

/// Runs the base scenario once per axis value, concurrently, and aggregates
/// the per-cell summaries into one table. Cell failures do not stop the sweep.
RunOutcome run_sweep(const nlohmann::json& base, const SweepOptions& opts);

} // namespace frontlab
