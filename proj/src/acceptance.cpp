#include "frontlab/acceptance.hpp"

#include "frontlab/certify.hpp"
#include "frontlab/error.hpp"
#include "frontlab/interface.hpp"
#include "frontlab/periodiclab.hpp"
#include "frontlab/profile.hpp"
#include "frontlab/speedlaw.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>

namespace frontlab {

namespace {

using nlohmann::json;

std::string fmt(const char* pattern, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, a);
    return buf;
}

/// Flagship pair: logistic rate 1 switching to rate 2 over [0, 10], c1 = 2.5.
SwitchSetup flagship(Blend blend)
{
    SwitchSetup st;
    st.f1 = Nonlinearity::logistic(1.0);
    st.f2 = Nonlinearity::logistic(2.0);
    st.c1 = 2.5;
    st.t1 = 0.0;
    st.t2 = 10.0;
    st.t_end = 210.0;
    st.burn_in = 50.0;
    st.blend = blend;
    st.solver = switch_solver_defaults();
    st.solver.dx = 0.05;
    return st;
}

class Runner {
public:
    explicit Runner(const AcceptanceOptions& opts) : opts_(opts) {}

    const SwitchReport& flagship_run()
    {
        if (!flagship_) {
            SwitchSetup st = flagship(Blend::Smoothstep);
            st.keep_trajectory = true;
            flagship_ = run_switch_experiment(st);
        }
        return *flagship_;
    }

    CriterionResult c1()
    {
        CriterionResult r{1, "KPP minimal speed", false, "", {}, 0.0};
        const Nonlinearity f = Nonlinearity::logistic(1.0);
        const MinimalSpeed ms = minimal_speed(f, 1e-3);
        const bool speed_ok = std::abs(ms.cstar - 2.0) <= 0.005 * 2.0;

        SolverConfig cfg;
        cfg.boundary = Boundary::DirichletLimits;
        cfg.dt = default_time_step(f.lipschitz());
        cfg.half_width_right = 150.0;
        const FrontProfile p = solve_profile(f, 2.0);
        const Trajectory traj = evolve(init_from_profile(p, 0.0, -cfg.half_width_left, cfg.half_width_right, cfg.dx),
                                       ReactionTerm::time_independent(f), 200.0, cfg);
        const SpeedEstimate est = global_mean_speed(traj.track().slice(50.0, 200.0), {10.0, true, 0.0});
        const double rel = std::abs(est.c_hat - 2.0) / 2.0;
        r.pass = speed_ok && rel <= 0.03;
        r.detail = "c* = " + fmt("%.6f", ms.cstar) + " (tol 0.5%), evolved speed " + fmt("%.5f", est.c_hat)
            + " (rel err " + fmt("%.3g", rel) + ", tol 3%)";
        r.data = {{"cstar", ms.cstar}, {"evolved_speed", est.c_hat}, {"relative_error", rel},
                  {"log_coefficient", est.log_coefficient}};
        return r;
    }

    CriterionResult c2()
    {
        CriterionResult r{2, "decay-exponent law", true, "", json::array(), 0.0};
        const Nonlinearity f = Nonlinearity::logistic(1.0);
        std::ostringstream detail;
        for (double c : {2.25, 2.5, 3.0}) {
            const FrontProfile p = solve_profile(f, c);
            const auto [lo, hi] = default_tail_window(p);
            const TailFit fit = fit_tail(p, lo, hi);
            const double target = decay_exponent(1.0, 2.0, c);
            const double rel = std::abs(fit.lambda - target) / target;
            r.pass = r.pass && rel <= 0.01;
            detail << "c=" << c << ": fit " << fmt("%.6f", fit.lambda) << " vs " << fmt("%.6f", target) << "; ";
            r.data.push_back({{"c", c}, {"fitted", fit.lambda}, {"target", target}, {"relative_error", rel}});
        }
        r.detail = detail.str() + "tol 1%";
        return r;
    }

    CriterionResult c3()
    {
        CriterionResult r{3, "flagship speed switch", false, "", {}, 0.0};
        const SwitchReport& main = flagship_run();
        std::vector<double> speeds{main.measured};
        json runs = json::array({{{"blend", "smoothstep"}, {"measured", main.measured}}});
        for (Blend b : {Blend::Linear, Blend::HoldFirst}) {
            const SwitchReport other = run_switch_experiment(flagship(b));
            speeds.push_back(other.measured);
            runs.push_back({{"blend", to_string(b)}, {"measured", other.measured}});
        }
        // truncation check: same run on a window twice as wide
        SwitchSetup wide = flagship(Blend::Smoothstep);
        wide.solver.half_width_left = 2.0 * flagship(Blend::Smoothstep).solver.half_width_left;
        wide.solver.half_width_right = 2.0 * default_right_half_width(main.prediction.lambda_1c1);
        const double wide_speed = run_switch_experiment(wide).measured;
        const double lo = *std::min_element(speeds.begin(), speeds.end());
        const double hi = *std::max_element(speeds.begin(), speeds.end());
        const double spread = (hi - lo) / lo;
        const bool exact = std::abs(main.prediction.c2_predicted - 4.5) <= 1e-12;
        r.pass = exact && main.relative_error <= 0.05 && spread <= 0.02;
        r.detail = "predicted " + fmt("%.12g", main.prediction.c2_predicted) + ", measured "
            + fmt("%.5f", main.measured) + " (rel err " + fmt("%.3g", main.relative_error)
            + ", tol 5%), blend spread " + fmt("%.3g", spread) + " (tol 2%), doubled window changes it by "
            + fmt("%.2g", std::abs(wide_speed - main.measured) / main.measured);
        r.data = {{"predicted", main.prediction.c2_predicted}, {"measured", main.measured},
                  {"aitken", main.aitken}, {"relative_error", main.relative_error},
                  {"blend_runs", runs}, {"blend_spread", spread},
                  {"window_sensitivity", {{"half_width_left", wide.solver.half_width_left},
                                          {"half_width_right", wide.solver.half_width_right},
                                          {"measured", wide_speed},
                                          {"relative_change", std::abs(wide_speed - main.measured) / main.measured}}}};
        return r;
    }

    CriterionResult c4()
    {
        CriterionResult r{4, "slow-down branch", false, "", {}, 0.0};
        SwitchSetup st = flagship(Blend::Smoothstep);
        st.f2 = Nonlinearity::logistic(0.25);
        st.c1 = 2.0;
        const SwitchReport rep = run_switch_experiment(st);
        const bool exact = std::abs(rep.prediction.c2_predicted - 1.0) <= 1e-12;
        // lambda_1c1 = lambda_2^{*,-} = 1/2 at c1 = 1/2 + 1/(1/2)
        const Nonlinearity f1 = Nonlinearity::logistic(1.0);
        const Nonlinearity f2 = Nonlinearity::logistic(0.25);
        const double c_cross = 2.5;
        const double delta = 1e-9;
        const double jump = std::abs(predict_c2(f1, f2, c_cross + delta).c2_predicted
                                     - predict_c2(f1, f2, c_cross - delta).c2_predicted);
        double max_step = 0.0;
        double floor_gap = 0.0;
        double prev = predict_c2(f1, f2, 2.0).c2_predicted;
        for (int k = 1; k <= 200; ++k) {
            const double c = 2.0 + k * 0.005;
            const SwitchPrediction p = predict_c2(f1, f2, c);
            max_step = std::max(max_step, std::abs(p.c2_predicted - prev));
            floor_gap = std::min(floor_gap, p.c2_predicted - p.cstar2);
            prev = p.c2_predicted;
        }
        r.pass = exact && rep.relative_error <= 0.05 && jump < 1e-6 && floor_gap >= 0.0;
        r.detail = "predicted " + fmt("%.12g", rep.prediction.c2_predicted) + ", measured " + fmt("%.5f", rep.measured)
            + " (rel err " + fmt("%.3g", rep.relative_error) + ", tol 5%), jump at crossover " + fmt("%.3g", jump);
        r.data = {{"predicted", rep.prediction.c2_predicted}, {"measured", rep.measured},
                  {"plain_slope", rep.global.c_hat}, {"relative_error", rep.relative_error},
                  {"crossover_jump", jump}, {"ladder_max_step", max_step}};
        return r;
    }

    static EnvelopeCertificate envelope_at(double dx)
    {
        const SwitchSetup st = flagship(Blend::Smoothstep);
        const ReactionTerm rt = ReactionTerm::time_switched(st.f1, st.f2, st.t1, st.t2, st.blend);
        const double lambda = decay_exponent(1.0, 2.0, st.c1);
        SolverConfig cfg = st.solver;
        cfg.dx = dx;
        cfg.dt = default_time_step(rt.lipschitz());
        cfg.half_width_right = default_right_half_width(lambda);
        cfg.tail_rate = lambda;
        cfg.snapshot_stride = 10;
        const FrontProfile p = solve_profile(st.f1, st.c1);
        const Trajectory traj =
            evolve(init_from_profile(p, 0.0, -cfg.half_width_left, cfg.half_width_right, dx), rt, st.t2, cfg);
        EnvelopeCertificate cert = supersolution_envelope(traj, rt, lambda, 0.1);
        heat_lower_bound(traj, rt, cert);
        return cert;
    }

    CriterionResult c5()
    {
        CriterionResult r{5, "envelope sandwich", false, "", {}, 0.0};
        const EnvelopeCertificate coarse = envelope_at(0.05);
        const EnvelopeCertificate fine = envelope_at(0.025);
        // Both residuals are scheme error; they must also shrink by 4 under refinement
        // (a zero residual stays zero).
        const double floor = 1e-14;
        const bool bounds = coarse.pass && fine.pass;
        const bool refine = fine.violation_sup <= 0.25 * coarse.violation_sup + floor
            && fine.heat_bound_violation <= 0.25 * coarse.heat_bound_violation + floor;
        r.pass = bounds && refine;
        r.detail = "super " + fmt("%.3g", coarse.violation_sup) + " -> " + fmt("%.3g", fine.violation_sup) + ", heat "
            + fmt("%.3g", coarse.heat_bound_violation) + " -> " + fmt("%.3g", fine.heat_bound_violation)
            + " (tol 10 dx^2 = " + fmt("%.3g", coarse.threshold) + "), explicit bound slack "
            + fmt("%.3g", std::max(coarse.closed_form_violation, fine.closed_form_violation));
        r.data = {{"coarse", to_json(coarse)}, {"fine", to_json(fine)}};
        return r;
    }

    CriterionResult c6()
    {
        CriterionResult r{6, "transition criteria", false, "", {}, 0.0};
        const Trajectory& traj = *flagship_run().trajectory;
        const std::vector<double> levels{0.1, 0.5, 0.9};
        const CriteriaReport rep = verify_transition_criteria(traj, traj.track(0.5), levels, 10.0, 40.0, 1e-3);
        const Trajectory flat = synthetic_flattening(210.0, 1.0, 1000.0, 0.5, levels);
        const CriteriaReport fr = verify_transition_criteria(flat, flat.track(0.5), levels, 10.0, 40.0, 1e-3);
        double dmax = 0.0;
        for (const auto& l : rep.levels) dmax = std::max(dmax, l.max_distance);
        double fmax = 0.0;
        for (const auto& l : fr.levels) fmax = std::max(fmax, l.max_distance);
        r.pass = rep.pass && !rep.vacuous && !fr.bounded_levels;
        r.detail = "flagship max level distance " + fmt("%.4g", dmax) + " (< 40), u near x_t in ["
            + fmt("%.3g", rep.inf_u) + ", 1 - " + fmt("%.3g", 1.0 - rep.sup_u) + "]; flattening distance "
            + fmt("%.4g", fmax) + (fr.bounded_levels ? " (not rejected)" : " (rejected)");
        r.data = {{"max_distance", dmax}, {"inf_u", rep.inf_u}, {"sup_u", rep.sup_u},
                  {"flattening_max_distance", fmax}};
        return r;
    }

    CriterionResult c7()
    {
        CriterionResult r{7, "time monotonicity", false, "", {}, 0.0};
        const SwitchReport& main = flagship_run();
        const SwitchSetup st = flagship(Blend::Smoothstep);
        const ReactionTerm rt = ReactionTerm::time_switched(st.f1, st.f2, st.t1, st.t2, st.blend);
        const double dx = st.solver.dx;
        const MonotonicityReport m = time_monotonicity_check(*main.trajectory, rt, 10.0 * dx * dx, 10.0);
        r.pass = m.status == CheckStatus::Pass;
        r.detail = "max negative increment " + fmt("%.3g", m.max_negative_increment) + " (tol "
            + fmt("%.3g", m.tol) + "), status " + to_string(m.status);
        r.data = to_json(m);
        return r;
    }

    CriterionResult c8()
    {
        CriterionResult r{8, "comparison up to shift", false, "", {}, 0.0};
        const Nonlinearity f = Nonlinearity::logistic(1.0);
        const double c = 2.5;
        const double offset = 5.0;
        const ReactionTerm rt = ReactionTerm::time_independent(f);
        SolverConfig cfg;
        cfg.boundary = Boundary::ExponentialTail;
        cfg.tail_rate = decay_exponent(1.0, 2.0, c);
        cfg.dt = default_time_step(rt.lipschitz());
        cfg.half_width_left = 40.0;
        cfg.half_width_right = 100.0;
        cfg.snapshot_stride = 5;
        const FrontProfile p = solve_profile(f, c);
        auto run = [&](double x0) {
            return evolve(init_from_profile(p, x0, x0 - cfg.half_width_left, x0 + cfg.half_width_right, cfg.dx), rt,
                          12.0, cfg);
        };
        const Trajectory a = run(0.0);
        const Trajectory b = run(-offset);
        const double expected = offset / c;
        const ShiftComparison cmp = shift_comparison(a, b, 0.0, 4.0, 1e-6);
        const double rel = std::abs(cmp.T - expected) / expected;
        const double tol = 10.0 * cfg.dx * cfg.dx;
        r.pass = rel <= 0.01 && cmp.sup_distance <= tol;
        r.detail = "T = " + fmt("%.5f", cmp.T) + " vs 5/c = " + fmt("%.5f", expected) + " (rel err "
            + fmt("%.3g", rel) + ", tol 1%), sup distance " + fmt("%.3g", cmp.sup_distance) + " (tol "
            + fmt("%.3g", tol) + ")";
        r.data = to_json(cmp);
        return r;
    }

    CriterionResult c9()
    {
        CriterionResult r{9, "pulsating identity", false, "", {}, 0.0};
        PulsatingSetup st;
        st.period = 2.0;
        st.rate_amplitude = 0.5;
        st.t_end = 200.0;
        st.burn_in = 100.0;
        st.solver = periodic_solver_defaults();
        const TwinReport tw = pulsating_twin_runs(st, 0.0, 0.5);
        const double residual = std::max(tw.a.residual, tw.b.residual);
        r.pass = residual <= 1e-2 && tw.speeds_agree;
        r.detail = "residual " + fmt("%.3g", residual) + " (tol 1e-2), speeds " + fmt("%.6f", tw.a.c_hat) + " / "
            + fmt("%.6f", tw.b.c_hat) + " (diff " + fmt("%.3g", tw.speed_difference) + ", ci "
            + fmt("%.3g", tw.a.ci_halfwidth + tw.b.ci_halfwidth) + ")";
        r.data = to_json(tw);
        return r;
    }

    CriterionResult c10()
    {
        CriterionResult r{10, "speed invariance under interface re-choice", true, "", json::array(), 0.0};
        const double c = 2.5;
        const int n = 100001;
        InterfaceTrack base;
        for (int i = 0; i < n; ++i) base.push(i, c * i, 1, 0.0, 0.0);
        const SpeedOptions opts{1e4};
        const double reference = global_mean_speed(base, opts).c_hat;
        std::mt19937_64 rng(opts_.seed);
        std::uniform_real_distribution<double> unif(-10.0, 10.0);
        const std::vector<std::pair<std::string, std::function<double(double)>>> perturbations{
            {"uniform", [&](double) { return unif(rng); }},
            {"sine", [](double t) { return 10.0 * std::sin(t); }},
            {"square", [](double t) { return std::sin(t / 1000.0) >= 0.0 ? 10.0 : -10.0; }},
            {"step", [](double t) { return t < 5e4 ? -10.0 : 10.0; }},
        };
        double worst = 0.0;
        for (const auto& [name, delta] : perturbations) {
            InterfaceTrack tr = base;
            for (std::size_t i = 0; i < tr.size(); ++i) tr.x[i] += delta(tr.t[i]);
            const double d = std::abs(global_mean_speed(tr, opts).c_hat - reference);
            worst = std::max(worst, d);
            r.data.push_back({{"perturbation", name}, {"speed_change", d}});
        }
        r.pass = worst < 1e-3;
        r.detail = "largest speed change " + fmt("%.3g", worst) + " over 4 bounded perturbations (tol 1e-3)";
        return r;
    }

private:
    const AcceptanceOptions& opts_;
    std::optional<SwitchReport> flagship_;
};

} // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts)
{
    Runner runner(opts);
    const std::vector<std::pair<const char*, CriterionResult (Runner::*)()>> table{
        {"KPP minimal speed", &Runner::c1},
        {"decay-exponent law", &Runner::c2},
        {"flagship speed switch", &Runner::c3},
        {"slow-down branch", &Runner::c4},
        {"envelope sandwich", &Runner::c5},
        {"transition criteria", &Runner::c6},
        {"time monotonicity", &Runner::c7},
        {"comparison up to shift", &Runner::c8},
        {"pulsating identity", &Runner::c9},
        {"speed invariance under interface re-choice", &Runner::c10},
    };
    std::vector<CriterionResult> out;
    for (std::size_t k = 0; k < table.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), id) == opts.only.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = (runner.*table[k].second)();
        } catch (const std::exception& e) {
            r = {id, table[k].first, false, std::string("error: ") + e.what(), {}, 0.0};
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_line(const CriterionResult& r)
{
    std::ostringstream out;
    out << "criterion " << r.id << " [" << (r.pass ? "PASS" : "FAIL") << "] " << r.name << ": " << r.detail;
    return out.str();
}

json to_json(const std::vector<CriterionResult>& results)
{
    json arr = json::array();
    for (const auto& r : results) {
        arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"data", r.data}});
    }
    return arr;
}

} // namespace frontlab
