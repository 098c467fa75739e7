#include "frontlab/speedlaw.hpp"

#include "frontlab/error.hpp"
#include "frontlab/regression.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace frontlab {

std::string to_string(SpeedBranch b)
{
    return b == SpeedBranch::SubcriticalDecay ? "subcritical_decay" : "supercritical_decay";
}

SwitchPrediction predict_c2(double fprime1, double cstar1, double fprime2, double cstar2, double c1)
{
    if (!(fprime1 > 0.0) || !(fprime2 > 0.0)) fail(ErrorKind::DegenerateDerivative, "f'(0) must be positive");
    SwitchPrediction p;
    p.c1 = c1;
    p.cstar1 = cstar1;
    p.cstar2 = cstar2;
    p.fprime1 = fprime1;
    p.fprime2 = fprime2;
    p.lambda_1c1 = decay_exponent(fprime1, cstar1, c1);
    p.lambda_2_star_minus = decay_exponent(fprime2, cstar2, cstar2, ExponentBranch::Minus);
    if (p.lambda_1c1 < p.lambda_2_star_minus) {
        p.branch = SpeedBranch::SubcriticalDecay;
        p.c2_predicted = p.lambda_1c1 + fprime2 / p.lambda_1c1;
    } else {
        p.branch = SpeedBranch::SupercriticalDecay;
        p.c2_predicted = cstar2;
    }
    return p;
}

SwitchPrediction predict_c2(const Nonlinearity& f1, const Nonlinearity& f2, double c1, double speed_tol)
{
    const double d1 = derivative_at_zero(f1).value;
    const double d2 = derivative_at_zero(f2).value;
    auto speed_of = [&](const Nonlinearity& f, double d, bool& numeric) {
        if (is_kpp(f).is_kpp) {
            numeric = false;
            return 2.0 * std::sqrt(d);
        }
        numeric = true;
        return minimal_speed(f, speed_tol).cstar;
    };
    bool n1 = false;
    bool n2 = false;
    const double cs1 = speed_of(f1, d1, n1);
    const double cs2 = speed_of(f2, d2, n2);
    if (c1 < cs1 - speed_tol * std::max(1.0, cs1)) {
        std::ostringstream msg;
        msg << "c1 = " << c1 << " is below the minimal speed " << cs1;
        fail(ErrorKind::OutOfRange, msg.str());
    }
    SwitchPrediction p = predict_c2(d1, cs1, d2, cs2, std::max(c1, cs1));
    p.c1 = c1;
    p.cstar1_numeric = n1;
    p.cstar2_numeric = n2;
    if (n1) {
        for (double k : {1.0 - speed_tol, 1.0 + speed_tol}) {
            const double cs = std::max(cs1 * k, 2.0 * std::sqrt(d1));
            const double moved = predict_c2(d1, cs, d2, cs2, std::max(c1, cs)).c2_predicted;
            p.cstar1_sensitivity = std::max(p.cstar1_sensitivity, std::abs(moved - p.c2_predicted));
        }
    }
    return p;
}

SolverConfig switch_solver_defaults()
{
    SolverConfig cfg;
    cfg.dt = 0.0;
    cfg.half_width_right = 0.0;
    cfg.boundary = Boundary::ExponentialTail;
    cfg.snapshot_stride = 25;
    cfg.track_levels = {0.1, 0.5, 0.9};
    return cfg;
}

double fitted_tail_rate(const FieldState& s, double lo, double hi)
{
    std::vector<double> xs;
    std::vector<double> ys;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const double v = s.u(i);
        if (v >= lo && v <= hi) {
            xs.push_back(s.x(i));
            ys.push_back(std::log(v));
        }
    }
    if (xs.size() < 6) fail(ErrorKind::TailResolution, "too few tail nodes to fit a decay rate");
    return -fit_line<double>(xs, ys).slope;
}

namespace {

double profile_residual(const FieldState& s, const FrontProfile& p, double xt)
{
    double r = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) r = std::max(r, std::abs(s.u(i) - p.value(s.x(i) - xt)));
    return r;
}

} // namespace

SwitchReport run_switch_experiment(const SwitchSetup& setup)
{
    if (!(setup.t2 > setup.t1)) fail(ErrorKind::InvalidInput, "t2 must exceed t1");
    if (!(setup.t_end > setup.t2 + setup.burn_in)) fail(ErrorKind::InvalidInput, "t_end must exceed t2 + burn_in");
    SwitchReport rep;
    rep.prediction = predict_c2(setup.f1, setup.f2, setup.c1);
    rep.tolerance = setup.tolerance;
    rep.t1 = setup.t1;
    rep.t2 = setup.t2;
    rep.t_end = setup.t_end;
    rep.burn_in = setup.burn_in;
    rep.blend = setup.blend;
    const double lambda = rep.prediction.lambda_1c1;

    const ReactionTerm r = ReactionTerm::time_switched(setup.f1, setup.f2, setup.t1, setup.t2, setup.blend);
    SolverConfig cfg = setup.solver;
    if (!(cfg.dt > 0.0)) cfg.dt = default_time_step(r.lipschitz());
    if (!(cfg.half_width_right > 0.0)) cfg.half_width_right = default_right_half_width(lambda);
    if (cfg.boundary == Boundary::ExponentialTail) cfg.tail_rate = lambda;

    const FrontProfile phi1 = solve_profile(setup.f1, setup.c1);
    FieldState s0 = init_from_profile(phi1, 0.0, -cfg.half_width_left, cfg.half_width_right, cfg.dx, setup.t1);

    Trajectory traj = evolve(std::move(s0), r, setup.t2, cfg);
    rep.tail_lambda_at_t2 = fitted_tail_rate(traj.final_state());
    if (std::abs(rep.tail_lambda_at_t2 - lambda) > 0.1 * lambda) {
        std::ostringstream msg;
        msg << "tail rate at t2 is " << rep.tail_lambda_at_t2 << ", inherited rate is " << lambda;
        fail(ErrorKind::TailResolution, msg.str());
    }
    traj.append(evolve(traj.final_state(), r, setup.t_end, cfg));
    rep.diagnostics = traj.diagnostics;
    rep.track = traj.track(0.5);

    const double lo = setup.t2 + setup.burn_in;
    const InterfaceTrack late = rep.track.slice(lo, setup.t_end);
    const double min_gap = std::min(10.0, (setup.t_end - lo) / 4.0);
    rep.global = global_mean_speed(late, {min_gap});
    const AitkenSpeed ait = late_speed(rep.track, lo, setup.t_end);
    rep.window_slope = ait.window_slope;
    rep.aitken = ait.extrapolated;
    rep.measured = rep.global.c_hat;
    if (rep.prediction.branch == SpeedBranch::SupercriticalDecay) {
        // The new front is pulled at c2*, which carries a logarithmic delay.
        rep.log_corrected = global_mean_speed(late, {min_gap, true, setup.t2});
        rep.measured = rep.log_corrected->c_hat;
    }
    rep.relative_error = std::abs(rep.measured - rep.prediction.c2_predicted) / rep.prediction.c2_predicted;
    rep.pass = rep.relative_error <= setup.tolerance;

    // Distance to the translated f2 front at the predicted speed.
    try {
        const FrontProfile phi2 = solve_profile(setup.f2, rep.prediction.c2_predicted);
        for (const FieldState* snap : traj.snapshots_between(lo, setup.t_end)) {
            const auto hit = find_level(*snap, 0.5);
            if (!hit) continue;
            if (!rep.residual_trend.empty() && snap->t < rep.residual_trend.back().t + 10.0 - 1e-9) continue;
            rep.residual_trend.push_back({snap->t, profile_residual(*snap, phi2, hit->canonical)});
        }
        if (rep.residual_trend.size() >= 2) {
            rep.residual_decreasing = rep.residual_trend.back().sup_residual <= rep.residual_trend.front().sup_residual;
        }
    } catch (const Error&) {
        rep.residual_trend.clear();
    }
    if (setup.keep_trajectory) rep.trajectory = std::move(traj);
    return rep;
}

ExamplePair construct_example_pair(double mass, double eps, double f2_rate)
{
    if (!(f2_rate > 0.0)) fail(ErrorKind::InvalidInput, "f2 rate must be positive");
    ExamplePair pair{Nonlinearity::hump(0.5 * f2_rate, mass, eps), Nonlinearity::logistic(f2_rate), 0.0, 0.0, false, {}};
    pair.cstar2 = 2.0 * std::sqrt(f2_rate);
    if (!(std::sqrt(2.0 * mass) > pair.cstar2)) {
        std::ostringstream msg;
        msg << "sqrt(2 M) = " << std::sqrt(2.0 * mass) << " must exceed c2* = " << pair.cstar2;
        fail(ErrorKind::InvalidInput, msg.str());
    }
    for (int i = 1; i < 4000; ++i) {
        const double s = i / 4000.0;
        if (!(pair.f1(s) > 0.0)) fail(ErrorKind::Construction, "hump nonlinearity is not positive on (0,1)");
    }
    pair.cstar1 = minimal_speed(pair.f1, 1e-5).cstar;
    pair.cstar1_exceeds_cstar2 = pair.cstar1 > pair.cstar2;
    pair.f1_kpp = is_kpp(pair.f1);
    return pair;
}

nlohmann::json to_json(const SwitchPrediction& p)
{
    return {{"c1", p.c1},
            {"cstar1", p.cstar1},
            {"cstar2", p.cstar2},
            {"cstar1_numeric", p.cstar1_numeric},
            {"cstar2_numeric", p.cstar2_numeric},
            {"cstar1_sensitivity", p.cstar1_sensitivity},
            {"fprime1_0", p.fprime1},
            {"fprime2_0", p.fprime2},
            {"lambda_1c1", p.lambda_1c1},
            {"lambda_2_star_minus", p.lambda_2_star_minus},
            {"branch", to_string(p.branch)},
            {"c2_predicted", p.c2_predicted}};
}

namespace {

nlohmann::json to_json(const SpeedEstimate& e)
{
    nlohmann::json j{{"c_hat", e.c_hat},
                     {"ci_halfwidth", e.ci_halfwidth},
                     {"t_lo", e.t_lo},
                     {"t_hi", e.t_hi},
                     {"log_correction_used", e.log_correction_used}};
    if (e.log_correction_used) j["log_coefficient"] = e.log_coefficient;
    return j;
}

} // namespace

nlohmann::json to_json(const SwitchReport& r)
{
    nlohmann::json trend = nlohmann::json::array();
    for (const auto& p : r.residual_trend) trend.push_back({{"t", p.t}, {"sup_residual", p.sup_residual}});
    nlohmann::json j{{"prediction", to_json(r.prediction)},
                     {"t1", r.t1},
                     {"t2", r.t2},
                     {"t_end", r.t_end},
                     {"burn_in", r.burn_in},
                     {"blend", to_string(r.blend)},
                     {"measured", r.measured},
                     {"window_slope", r.window_slope},
                     {"aitken", r.aitken},
                     {"global", to_json(r.global)},
                     {"relative_error", r.relative_error},
                     {"tolerance", r.tolerance},
                     {"pass", r.pass},
                     {"tail_lambda_at_t2", r.tail_lambda_at_t2},
                     {"profile_residual_trend", trend},
                     {"profile_residual_decreasing", r.residual_decreasing},
                     {"steps", r.diagnostics.steps},
                     {"overshoot_events", r.diagnostics.overshoot_events},
                     {"max_overshoot", r.diagnostics.max_overshoot}};
    if (r.log_corrected) j["log_corrected"] = to_json(*r.log_corrected);
    return j;
}

} // namespace frontlab
