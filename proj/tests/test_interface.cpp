#include "doctest.h"

#include "frontlab/error.hpp"
#include "frontlab/interface.hpp"

#include <cmath>
#include <numbers>
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

FieldState sample(const std::function<double(double)>& u, double lo, double hi, double dx, double t = 0.0)
{
    FieldState s;
    s.t = t;
    s.dx = dx;
    s.origin = std::llround(lo / dx);
    const auto last = std::llround(hi / dx);
    s.u.resize(last - s.origin + 1);
    for (Eigen::Index i = 0; i < s.size(); ++i) s.u(i) = u(s.x(i));
    return s;
}

InterfaceTrack make_track(double t0, double t1, double dt, const std::function<double(double)>& x)
{
    InterfaceTrack tr;
    const auto n = std::llround((t1 - t0) / dt);
    for (long long k = 0; k <= n; ++k) {
        const double t = t0 + k * dt;
        tr.push(t, x(t), 1, x(t) - 50, x(t) + 50);
    }
    return tr;
}

struct BruteFit {
    double c = 0.0;
    double ratio = 0.0; // sum |dt| / sum dt^2
};

// O(n^2) pair enumeration, independent of the prefix-sum implementation.
BruteFit brute_pairwise(const InterfaceTrack& tr, double gap)
{
    double num = 0.0;
    double den = 0.0;
    double abs_dt = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        for (std::size_t j = i + 1; j < tr.size(); ++j) {
            const double dt = tr.t[j] - tr.t[i];
            if (dt < gap) continue;
            num += dt * (tr.x[j] - tr.x[i]);
            den += dt * dt;
            abs_dt += dt;
        }
    }
    return {num / den, abs_dt / den};
}

// Rigid traveling wave 1 / (1 + exp(x - c t)) on a window following the front.
Trajectory rigid_wave(double c, double t_end, double dt)
{
    Trajectory traj;
    InterfaceTrack tr;
    tr.level = 0.5;
    for (double t = 0.0; t <= t_end + 1e-9; t += dt) {
        const double centre = std::round(c * t);
        auto s = sample([&](double x) { return 1.0 / (1.0 + std::exp(x - c * t)); }, centre - 30, centre + 30, 0.1, t);
        const auto hit = level_position(s, 0.5);
        tr.push(t, hit.canonical, 1, s.x_left(), s.x_right());
        traj.snapshots.push_back(std::move(s));
    }
    traj.tracks.push_back(tr);
    return traj;
}

} // namespace

TEST_SUITE("interface")
{
    TEST_CASE("level position of a linear profile")
    {
        const auto s = sample([](double x) { return 1.0 - x / 10.0; }, 0, 10, 0.1);
        CHECK(level_position(s, 0.5).canonical == doctest::Approx(5.0).epsilon(1e-12));
        CHECK(level_position(s, 0.25).canonical == doctest::Approx(7.5).epsilon(1e-12));
    }

    TEST_CASE("constant profile has no crossing")
    {
        const auto s = sample([](double) { return 0.3; }, 0, 10, 0.1);
        CHECK(kind_of([&] { level_position(s, 0.5); }) == ErrorKind::NoCrossing);
        CHECK_FALSE(find_level(s, 0.5).has_value());
        CHECK(kind_of([&] { level_position(s, 1.5); }) == ErrorKind::InvalidInput);
    }

    TEST_CASE("rightmost downward crossing is canonical")
    {
        const auto s = sample([](double x) { return 0.5 - 0.4 * std::sin(2 * std::numbers::pi * (x - 2) / 5); },
                              0.013, 8.013, 0.01);
        const auto hit = level_position(s, 0.5);
        REQUIRE(hit.downward.size() == 2);
        REQUIRE(hit.upward.size() == 1);
        CHECK(hit.downward[0] == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(hit.downward[1] == doctest::Approx(7.0).epsilon(1e-6));
        CHECK(hit.upward[0] == doctest::Approx(4.5).epsilon(1e-6));
        CHECK(hit.canonical == doctest::Approx(7.0).epsilon(1e-6));
    }

    TEST_CASE("levels of a monotone front are ordered")
    {
        const auto s = sample([](double x) { return 1.0 / (1.0 + std::exp(x)); }, -20, 20, 0.05);
        const double x9 = level_position(s, 0.9).canonical;
        const double x5 = level_position(s, 0.5).canonical;
        const double x1 = level_position(s, 0.1).canonical;
        CHECK(x9 < x5);
        CHECK(x5 < x1);
        CHECK(x1 == doctest::Approx(std::log(9.0)).epsilon(1e-3));
    }

    TEST_CASE("oscillating track has mean speed 3")
    {
        const auto tr = make_track(0, 2000, 0.5, [](double t) { return 3 * t + std::sin(t); });
        const auto est = global_mean_speed(tr, {50.0});
        CHECK(std::abs(est.c_hat - 3.0) < 1e-3);
        CHECK(std::abs(est.c_hat - 3.0) <= est.ci_halfwidth);
    }

    TEST_CASE("prefix-sum estimator agrees with brute force pairs")
    {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<double> noise(401);
        for (auto& v : noise) v = u(rng);
        InterfaceTrack tr;
        for (int k = 0; k <= 400; ++k) {
            const double t = 10 + 0.25 * k;
            tr.push(t, 1.7 * t + noise[k], 1, 0, 0);
        }
        const auto est = global_mean_speed(tr, {7.0});
        const auto ref = brute_pairwise(tr, 7.0);
        CHECK(est.c_hat == doctest::Approx(ref.c).epsilon(1e-10));
    }

    TEST_CASE("property: bounded perturbations move the estimate at most range * ratio")
    {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            const double c = 4 * u(rng) - 1;
            const double gap = 2 + 8 * u(rng);
            const double amp = 0.1 + 2 * u(rng);
            const int n = 150 + static_cast<int>(150 * u(rng));
            InterfaceTrack base;
            InterfaceTrack pert;
            double pmin = 0.0;
            double pmax = 0.0;
            for (int k = 0; k < n; ++k) {
                const double t = 0.3 * k;
                const double p = amp * (2 * u(rng) - 1);
                pmin = std::min(pmin, p);
                pmax = std::max(pmax, p);
                base.push(t, c * t, 1, 0, 0);
                pert.push(t, c * t + p, 1, 0, 0);
            }
            const auto a = global_mean_speed(base, {gap});
            const auto b = global_mean_speed(pert, {gap});
            const auto ref = brute_pairwise(pert, gap);
            CHECK(a.c_hat == doctest::Approx(c).epsilon(1e-9));
            CHECK(std::abs(b.c_hat - a.c_hat) <= (pmax - pmin) * ref.ratio + 1e-12);
        }
    }

    TEST_CASE("two-speed track is split")
    {
        const auto tr = make_track(0, 200, 0.5, [](double t) { return t < 100 ? 2 * t : 200 + 4 * (t - 100); });
        const auto split = speed_split(tr, 10.0);
        CHECK_FALSE(split.single_speed);
        CHECK(split.early.c_hat == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(split.late.c_hat == doctest::Approx(4.0).epsilon(1e-6));
        const auto one = make_track(0, 200, 0.5, [](double t) { return 2 * t + 0.3 * std::sin(t); });
        CHECK(speed_split(one, 10.0).single_speed);
    }

    TEST_CASE("log-corrected fit recovers the logarithmic delay")
    {
        const auto tr = make_track(20, 400, 0.5, [](double t) { return 2 * t - 1.5 * std::log(t) + 3; });
        SpeedOptions opts{20.0, true, 0.0};
        const auto est = global_mean_speed(tr, opts);
        CHECK(est.log_correction_used);
        CHECK(est.c_hat == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(est.log_coefficient == doctest::Approx(1.5).epsilon(1e-7));
    }

    TEST_CASE("too short a track")
    {
        const auto tr = make_track(0, 20, 0.5, [](double t) { return t; });
        CHECK(kind_of([&] { global_mean_speed(tr, {10.0}); }) == ErrorKind::InsufficientData);
        InterfaceTrack two;
        two.push(0, 0, 1, 0, 0);
        two.push(1, 1, 1, 0, 0);
        CHECK(kind_of([&] { global_mean_speed(two, {0.1}); }) == ErrorKind::InsufficientData);
    }

    TEST_CASE("late speed extrapolation")
    {
        const auto tr = make_track(0, 400, 0.1, [](double t) { return 2 * t - 1.5 * std::log(1 + t); });
        const auto late = late_speed(tr, 100, 400);
        CHECK(late.window_slope < 2.0);
        CHECK(std::abs(late.extrapolated - 2.0) <= std::abs(late.window_slope - 2.0));
    }

    TEST_CASE("invasion")
    {
        CHECK(invasion_check(make_track(0, 100, 0.5, [](double t) { return 2 * t; }), 1e-9).invasion);
        CHECK_FALSE(invasion_check(make_track(0, 100, 0.5, [](double t) { return std::sin(t); }), 1e-9).invasion);
        CHECK_FALSE(invasion_check(make_track(0, 100, 0.5, [](double) { return 4.0; }), 1e-9).invasion);
        const auto two = make_track(0, 100, 0.5, [](double t) { return t < 50 ? t : 50 + 3 * (t - 50); });
        const auto inv = invasion_check(two, 1e-9);
        CHECK(inv.invasion);
        CHECK(inv.monotone);
        const auto back = make_track(0, 100, 0.5, [](double t) { return -2 * t; });
        CHECK_FALSE(invasion_check(back, 1e-9).monotone);
    }

    TEST_CASE("rigid wave satisfies the transition criteria")
    {
        const auto traj = rigid_wave(2.0, 20.0, 0.5);
        const auto rep = verify_transition_criteria(traj, traj.tracks[0], {0.1, 0.5, 0.9}, 5.0, 40.0);
        CHECK(rep.pass);
        CHECK_FALSE(rep.vacuous);
        CHECK(rep.levels[0].max_distance == doctest::Approx(std::log(9.0)).epsilon(1e-3));
        CHECK(rep.sup_u < 1.0);
        CHECK(rep.inf_u > 0.0);
    }

    TEST_CASE("flattening front fails the transition criteria")
    {
        const auto traj = synthetic_flattening(100.0, 1.0, 600.0, 0.1);
        const auto rep = verify_transition_criteria(traj, traj.track(0.5), {0.1, 0.5, 0.9}, 10.0, 40.0);
        CHECK_FALSE(rep.bounded_levels);
        CHECK_FALSE(rep.pass);
        CHECK(rep.levels[0].max_distance == doctest::Approx(101 * std::log(9.0)).epsilon(1e-3));
        CHECK_FALSE(invasion_check(traj.track(0.5), 1e-9).invasion);
    }
}
