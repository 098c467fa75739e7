#pragma once

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace frontlab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    nlohmann::json data;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20240601;
    /// Criteria to run (1..10); empty means all.
    std::vector<int> only;
};

/// Runs the acceptance criteria in order. Exceptions inside a criterion are
/// reported as failures of that criterion.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});

/// "criterion N [PASS|FAIL] name: detail"
std::string format_line(const CriterionResult& r);

nlohmann::json to_json(const std::vector<CriterionResult>& results);

} // namespace frontlab
