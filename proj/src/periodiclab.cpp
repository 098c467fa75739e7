#include "frontlab/periodiclab.hpp"

#include "frontlab/error.hpp"
#include "frontlab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace frontlab {

PulsatingReport pulsating_identity_check(const Trajectory& traj, double L, double c_hat, double burn_in)
{
    if (traj.snapshots.empty()) fail(ErrorKind::InsufficientData, "trajectory has no snapshots");
    if (!(L > 0.0) || !(c_hat > 0.0)) fail(ErrorKind::InvalidInput, "period and speed must be positive");
    const double dx = traj.snapshots.front().dx;
    const double cells_real = L / dx;
    const auto cells = static_cast<std::int64_t>(std::llround(cells_real));
    if (std::abs(cells_real - static_cast<double>(cells)) > 1e-9 * cells_real) {
        fail(ErrorKind::InvalidInput, "the period must be a whole number of cells");
    }
    PulsatingReport rep;
    rep.L = L;
    rep.c_hat = c_hat;
    rep.burn_in = burn_in;
    const double lag = L / c_hat;
    FieldState later;
    for (const FieldState& s : traj.snapshots) {
        if (s.t < burn_in - 1e-12) continue;
        if (!traj.interpolate(s.t + lag, later)) continue;
        bool any = false;
        for (Eigen::Index i = 0; i < later.size(); ++i) {
            const Eigen::Index j = s.local_index(later.origin + i - cells);
            if (j < 0) continue;
            rep.residual = std::max(rep.residual, std::abs(later.u(i) - s.u(j)));
            any = true;
        }
        if (any) ++rep.compared_pairs;
    }
    if (rep.compared_pairs == 0) fail(ErrorKind::InsufficientData, "no snapshot pair overlaps after burn-in");
    return rep;
}

SolverConfig periodic_solver_defaults()
{
    SolverConfig cfg;
    cfg.dt = 0.0;
    cfg.boundary = Boundary::DirichletLimits;
    cfg.snapshot_stride = 5;
    return cfg;
}

PulsatingRun run_pulsating(const PulsatingSetup& setup)
{
    if (!(setup.t_end > setup.burn_in)) fail(ErrorKind::InvalidInput, "t_end must exceed burn_in");
    const PeriodicMedium medium =
        PeriodicMedium::sinusoidal(setup.period, setup.diffusivity_amplitude, setup.rate_amplitude);
    SolverConfig cfg = setup.solver;
    if (!(cfg.dt > 0.0)) cfg.dt = default_time_step(medium.lipschitz);
    const FrontProfile start = solve_profile(Nonlinearity::logistic(1.0), 2.0);
    FieldState s0 = init_from_profile(start, setup.shift, setup.shift - cfg.half_width_left,
                                      setup.shift + cfg.half_width_right, cfg.dx);
    PulsatingRun run;
    run.trajectory = evolve_periodic(std::move(s0), medium, setup.t_end, cfg);
    const InterfaceTrack late = run.trajectory.track(cfg.follow_level).slice(setup.burn_in, setup.t_end);
    run.speed = global_mean_speed(late, {setup.min_gap});
    run.report = pulsating_identity_check(run.trajectory, setup.period, run.speed.c_hat, setup.burn_in);
    run.report.ci_halfwidth = run.speed.ci_halfwidth;
    return run;
}

TwinReport pulsating_twin_runs(const PulsatingSetup& setup, double shift_a, double shift_b)
{
    PulsatingSetup sa = setup;
    PulsatingSetup sb = setup;
    sa.shift = shift_a;
    sb.shift = shift_b;
    auto fb = std::async(std::launch::async, [&sb] { return run_pulsating(sb).report; });
    TwinReport rep;
    rep.a = run_pulsating(sa).report;
    rep.b = fb.get();
    rep.speed_difference = std::abs(rep.a.c_hat - rep.b.c_hat);
    rep.speeds_agree = rep.speed_difference <= rep.a.ci_halfwidth + rep.b.ci_halfwidth;
    return rep;
}

nlohmann::json to_json(const PulsatingReport& r)
{
    return {{"L", r.L},
            {"c_hat", r.c_hat},
            {"ci_halfwidth", r.ci_halfwidth},
            {"residual", r.residual},
            {"gamma", r.gamma},
            {"burn_in", r.burn_in},
            {"compared_pairs", r.compared_pairs}};
}

nlohmann::json to_json(const TwinReport& r)
{
    return {{"a", to_json(r.a)},
            {"b", to_json(r.b)},
            {"speed_difference", r.speed_difference},
            {"speeds_agree", r.speeds_agree}};
}

} // namespace frontlab
