#pragma once

#include "frontlab/interface.hpp"
#include "frontlab/solver.hpp"

#include "json.hpp"

namespace frontlab {

struct PulsatingReport {
    double L = 2.0;
    double c_hat = 0.0;
    double ci_halfwidth = 0.0;
    double residual = 0.0;
    double gamma = 1.0;
    double burn_in = 0.0;
    long compared_pairs = 0;
};

/// sup |u(t + L / c_hat, x) - u(t, x - L)| over snapshots with t >= burn_in.
/// The x - L shift must be a whole number of cells; the later time is
/// interpolated between stored snapshots.
PulsatingReport pulsating_identity_check(const Trajectory& traj, double L, double c_hat, double burn_in);

struct PulsatingSetup {
    double period = 2.0;
    double diffusivity_amplitude = 0.0;
    double rate_amplitude = 0.5;
    double shift = 0.0;        // initial front position
    double t_end = 200.0;
    double burn_in = 100.0;
    double min_gap = 10.0;
    SolverConfig solver;
};

/// Dirichlet limits, dt from the Lipschitz constant, dense snapshots.
SolverConfig periodic_solver_defaults();

struct PulsatingRun {
    SpeedEstimate speed;
    PulsatingReport report;
    Trajectory trajectory;
};

/// Evolves the logistic minimal-speed profile through a sinusoidal medium and
/// checks the pulsating identity after burn-in.
PulsatingRun run_pulsating(const PulsatingSetup& setup);

struct TwinReport {
    PulsatingReport a;
    PulsatingReport b;
    double speed_difference = 0.0;
    bool speeds_agree = false;
};

/// Runs the same medium from two initial shifts.
TwinReport pulsating_twin_runs(const PulsatingSetup& setup, double shift_a, double shift_b);

nlohmann::json to_json(const PulsatingReport& r);
nlohmann::json to_json(const TwinReport& r);

} // namespace frontlab
