#pragma once

#include "frontlab/interface.hpp"
#include "frontlab/profile.hpp"
#include "frontlab/reaction.hpp"
#include "frontlab/solver.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace frontlab {

enum class SpeedBranch { SubcriticalDecay, SupercriticalDecay };
std::string to_string(SpeedBranch b);

struct SwitchPrediction {
    double c1 = 0.0;
    double cstar1 = 0.0;
    double cstar2 = 0.0;
    double fprime1 = 0.0;
    double fprime2 = 0.0;
    double lambda_1c1 = 0.0;
    double lambda_2_star_minus = 0.0;
    SpeedBranch branch = SpeedBranch::SupercriticalDecay;
    double c2_predicted = 0.0;
    /// Minimal speeds come from closed forms for KPP nonlinearities and from
    /// bisection otherwise.
    bool cstar1_numeric = false;
    bool cstar2_numeric = false;
    /// Largest change of c2 when a numeric c1* moves by its bisection tolerance.
    double cstar1_sensitivity = 0.0;
};

/// c2 = lambda + f2'(0) / lambda while the inherited tail rate lambda is below
/// the slow root of f2's minimal front, otherwise c2 = c2*.
SwitchPrediction predict_c2(const Nonlinearity& f1, const Nonlinearity& f2, double c1, double speed_tol = 1e-6);

/// Same law from scalar data (all inputs known).
SwitchPrediction predict_c2(double fprime1, double cstar1, double fprime2, double cstar2, double c1);

struct SwitchSetup {
    Nonlinearity f1 = Nonlinearity::logistic(1.0);
    Nonlinearity f2 = Nonlinearity::logistic(2.0);
    double c1 = 2.5;
    double t1 = 0.0;
    double t2 = 10.0;
    Blend blend = Blend::Smoothstep;
    double t_end = 210.0;
    double burn_in = 50.0;
    double tolerance = 0.05;
    /// Solver settings. dt <= 0 or half_width_right <= 0 select the defaults;
    /// the boundary tail rate is always the inherited lambda_1c1.
    SolverConfig solver;
    bool keep_trajectory = false;
};

/// Default solver settings for a switch run: exponential-tail boundary, dt
/// from the Lipschitz constant, right half width from the tail scale.
SolverConfig switch_solver_defaults();

struct ProfileResidual {
    double t = 0.0;
    double sup_residual = 0.0;
};

struct SwitchReport {
    SwitchPrediction prediction;
    double measured = 0.0;        // estimator matching the branch
    double window_slope = 0.0;
    double aitken = 0.0;
    SpeedEstimate global;
    std::optional<SpeedEstimate> log_corrected;
    double relative_error = 0.0;
    double tolerance = 0.05;
    bool pass = false;
    double tail_lambda_at_t2 = 0.0;
    std::vector<ProfileResidual> residual_trend;
    bool residual_decreasing = false;
    double t1 = 0.0;
    double t2 = 0.0;
    double t_end = 0.0;
    double burn_in = 0.0;
    Blend blend = Blend::Smoothstep;
    SchemeDiagnostics diagnostics;
    InterfaceTrack track;
    std::optional<Trajectory> trajectory;
};

/// Evolves the c1 front of f1 through the switch and measures the late speed.
SwitchReport run_switch_experiment(const SwitchSetup& setup);

/// Tail rate of u fitted on nodes with lo <= u <= hi.
double fitted_tail_rate(const FieldState& s, double lo = 1e-14, double hi = 1e-8);

struct ExamplePair {
    Nonlinearity f1;
    Nonlinearity f2;
    double cstar1 = 0.0;
    double cstar2 = 0.0;
    bool cstar1_exceeds_cstar2 = false;
    KppCheck f1_kpp;
};

/// f2 logistic with rate f2_rate and f1 = (f2_rate / 2) s (1 - s) plus a C1
/// hump of height mass / eps near s = 1 - eps. Requires sqrt(2 mass) > c2*.
ExamplePair construct_example_pair(double mass, double eps, double f2_rate = 1.0);

nlohmann::json to_json(const SwitchPrediction& p);
nlohmann::json to_json(const SwitchReport& r);

} // namespace frontlab
