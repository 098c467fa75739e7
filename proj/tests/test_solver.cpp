#include "doctest.h"

#include "frontlab/error.hpp"
#include "frontlab/interface.hpp"
#include "frontlab/solver.hpp"

#include <cmath>
#include <random>

using namespace frontlab;

namespace {

ErrorKind kind_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::InvalidInput;
}

SolverConfig fixed_config(Boundary b)
{
    SolverConfig cfg;
    cfg.dx = 0.1;
    cfg.dt = 0.01;
    cfg.boundary = b;
    cfg.window_policy = WindowPolicy::Fixed;
    cfg.snapshot_stride = 10;
    return cfg;
}

double max_abs(const Eigen::VectorXd& v)
{
    return v.cwiseAbs().maxCoeff();
}

} // namespace

TEST_SUITE("solver")
{
    TEST_CASE("homogeneous states are invariant")
    {
        const auto r = ReactionTerm::time_switched(Nonlinearity::logistic(1), Nonlinearity::logistic(3), 0.2, 0.6);
        for (Scheme scheme : {Scheme::ImexBe, Scheme::ImexCn}) {
            auto cfg = fixed_config(Boundary::NeumannZero);
            cfg.scheme = scheme;
            const auto zero = evolve(init_from_function([](double) { return 0.0; }, -5, 5, 0.1), r, 1.0, cfg);
            CHECK(max_abs(zero.final_state().u) == 0.0);
            const auto one = evolve(init_from_function([](double) { return 1.0; }, -5, 5, 0.1), r, 1.0, cfg);
            CHECK(max_abs(one.final_state().u.array() - 1.0) <= 1e-14);
        }
    }

    TEST_CASE("pure diffusion conserves mass under zero-flux boundaries")
    {
        const auto zero = ReactionTerm::time_independent(
            Nonlinearity::custom("zero", [](double) { return 0.0; }, 1.0));
        for (Scheme scheme : {Scheme::ImexBe, Scheme::ImexCn}) {
            auto cfg = fixed_config(Boundary::NeumannZero);
            cfg.scheme = scheme;
            const auto s0 = init_from_function([](double x) { return 0.5 * std::exp(-x * x); }, -10, 10, 0.1);
            const auto traj = evolve(s0, zero, 5.0, cfg);
            CHECK(traj.final_state().u.sum() == doctest::Approx(s0.u.sum()).epsilon(1e-10));
            CHECK(traj.final_state().u.maxCoeff() < s0.u.maxCoeff());
        }
    }

    TEST_CASE("pure diffusion leaves a symmetric front in place")
    {
        const auto zero = ReactionTerm::time_independent(
            Nonlinearity::custom("zero", [](double) { return 0.0; }, 1.0));
        auto cfg = fixed_config(Boundary::DirichletLimits);
        const auto s0 = init_from_function([](double x) { return 0.5 * std::erfc(x); }, -20, 20, 0.1);
        const auto traj = evolve(s0, zero, 5.0, cfg);
        CHECK(std::abs(traj.track().x.back()) < 1e-9);
    }

    TEST_CASE("traveling wave keeps its speed")
    {
        const double c = 2.5;
        const auto r = ReactionTerm::time_independent(Nonlinearity::logistic());
        const auto p = solve_profile(Nonlinearity::logistic(), c);
        SolverConfig cfg;
        cfg.dx = 0.05;
        cfg.dt = 0.01;
        cfg.half_width_left = 60;
        cfg.half_width_right = 80;
        cfg.boundary = Boundary::ExponentialTail;
        cfg.tail_rate = decay_exponent(1, 2, c);
        const auto s0 = init_from_profile(p, 0.0, -60, 80, cfg.dx);
        const auto traj = evolve(s0, r, 50.0, cfg);
        const auto est = global_mean_speed(traj.track(), {10.0, false, 0.0});
        CHECK(est.c_hat == doctest::Approx(c).epsilon(0.01));
        CHECK_FALSE(traj.shifts.empty());
    }

    TEST_CASE("window shifts keep the lattice bookkeeping exact")
    {
        const auto r = ReactionTerm::time_independent(Nonlinearity::logistic());
        SolverConfig cfg;
        cfg.dx = 0.1;
        cfg.dt = 0.02;
        cfg.half_width_left = 20;
        cfg.half_width_right = 40;
        cfg.snapshot_stride = 5;
        const auto s0 = init_from_function([](double x) { return 1.0 / (1.0 + std::exp(2 * x)); }, -20, 40, 0.1);
        const auto traj = evolve(s0, r, 30.0, cfg);
        REQUIRE(traj.shifts.size() >= 3);
        std::int64_t origin = s0.origin;
        for (const auto& sh : traj.shifts) {
            origin += sh.cells;
            CHECK(sh.origin_after == origin);
        }
        CHECK(traj.final_state().origin == origin);
        CHECK(traj.final_state().size() == s0.size());
        const auto& tr = traj.track();
        for (std::size_t i = 1; i < tr.size(); ++i) {
            CHECK(tr.x[i] - tr.x[i - 1] < 0.2);
            CHECK(tr.x[i] - tr.x[i - 1] > -1e-9);
        }
    }

    TEST_CASE("property: solutions stay in [0,1] and respect ordering")
    {
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 8; ++trial) {
            const auto r = ReactionTerm::time_switched(Nonlinearity::logistic(0.5 + 2 * u(rng)),
                                                       Nonlinearity::logistic(0.5 + 2 * u(rng)), 0.2, 0.8,
                                                       static_cast<Blend>(trial % 3));
            auto cfg = fixed_config(Boundary::DirichletLimits);
            cfg.scheme = trial % 2 ? Scheme::ImexCn : Scheme::ImexBe;
            cfg.dt = 0.02;
            const double slope = 0.5 + 3 * u(rng);
            const double gap = 0.1 + 2 * u(rng);
            const auto lo = init_from_function([&](double x) { return 1.0 / (1.0 + std::exp(slope * x)); }, -15, 15,
                                               0.1);
            const auto hi = init_from_function([&](double x) { return 1.0 / (1.0 + std::exp(slope * (x - gap))); },
                                               -15, 15, 0.1);
            const auto a = evolve(lo, r, 2.0, cfg);
            const auto b = evolve(hi, r, 2.0, cfg);
            REQUIRE(a.snapshots.size() == b.snapshots.size());
            for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
                const auto& ua = a.snapshots[k].u;
                const auto& ub = b.snapshots[k].u;
                CHECK((ub - ua).minCoeff() >= -1e-12);
                CHECK(ua.minCoeff() >= 0.0);
                CHECK(ub.maxCoeff() <= 1.0);
            }
        }
    }

    TEST_CASE("periodic solver with constant coefficients reproduces the homogeneous one")
    {
        const auto r = ReactionTerm::time_independent(Nonlinearity::logistic());
        const auto medium = PeriodicMedium::sinusoidal(2.0, 0.0, 0.0);
        SolverConfig cfg;
        cfg.dx = 0.05;
        cfg.dt = 0.01;
        cfg.half_width_left = 20;
        cfg.half_width_right = 40;
        const auto s0 = init_from_function([](double x) { return 1.0 / (1.0 + std::exp(x)); }, -20, 40, 0.05);
        const auto a = evolve(s0, r, 5.0, cfg);
        const auto b = evolve_periodic(s0, medium, 5.0, cfg);
        CHECK(a.final_state().origin == b.final_state().origin);
        CHECK(max_abs(a.final_state().u - b.final_state().u) <= 1e-13);
    }

    TEST_CASE("Crank-Nicolson is more accurate than backward Euler in time")
    {
        const auto r = ReactionTerm::time_independent(Nonlinearity::logistic());
        auto run = [&](Scheme scheme, double dt) {
            auto cfg = fixed_config(Boundary::DirichletLimits);
            cfg.scheme = scheme;
            cfg.dt = dt;
            const auto s0 = init_from_function([](double x) { return 1.0 / (1.0 + std::exp(x)); }, -15, 25, 0.1);
            return evolve(s0, r, 2.0, cfg).final_state().u;
        };
        const auto reference = run(Scheme::ImexCn, 0.00125);
        const double be = max_abs(run(Scheme::ImexBe, 0.02) - reference);
        const double cn = max_abs(run(Scheme::ImexCn, 0.02) - reference);
        const double cn_half = max_abs(run(Scheme::ImexCn, 0.01) - reference);
        CHECK(cn < be);
        CHECK(cn / cn_half > 3.0);
    }

    TEST_CASE("narrow windows and invalid configurations are rejected")
    {
        const auto p = solve_profile(Nonlinearity::logistic(), 2.5);
        CHECK(kind_of([&] { init_from_profile(p, 0.0, -1, 1, 0.05); }) == ErrorKind::WindowTooNarrow);
        SolverConfig cfg;
        cfg.dx = 0.0;
        CHECK(kind_of([&] { cfg.validate(1.0); }) == ErrorKind::Config);
        cfg.dx = 0.05;
        cfg.dt = 0.5;
        CHECK(kind_of([&] { cfg.validate(4.0); }) == ErrorKind::Config);
        cfg.dt = 0.01;
        cfg.boundary = Boundary::ExponentialTail;
        CHECK(kind_of([&] { cfg.validate(1.0); }) == ErrorKind::Config);
        CHECK(kind_of([] { parse_boundary("periodic"); }) == ErrorKind::Config);
        CHECK(parse_boundary(to_string(Boundary::NeumannZero)) == Boundary::NeumannZero);
    }

    TEST_CASE("front that collapses is reported")
    {
        // bistable with a high threshold retreats; a narrow bump dies out
        const auto r = ReactionTerm::time_independent(Nonlinearity::bistable(0.9));
        auto cfg = fixed_config(Boundary::NeumannZero);
        cfg.window_policy = WindowPolicy::FollowLevel;
        cfg.half_width_left = 5;
        cfg.half_width_right = 5;
        const auto s0 = init_from_function([](double x) { return 0.6 * std::exp(-x * x); }, -5, 5, 0.1);
        CHECK(kind_of([&] { evolve(s0, r, 20.0, cfg); }) == ErrorKind::FrontLost);
    }

    TEST_CASE("default step and window helpers")
    {
        CHECK(default_time_step(1.0) == 0.01);
        CHECK(default_time_step(100.0) == doctest::Approx(0.005));
        CHECK(default_right_half_width(0.5) == 160.0);
        CHECK(default_right_half_width(2.0) == 150.0);
    }
}
