#include "doctest.h"

#include "frontlab/certify.hpp"
#include "frontlab/error.hpp"

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
    s.u.resize(std::llround(hi / dx) - s.origin + 1);
    for (Eigen::Index i = 0; i < s.size(); ++i) s.u(i) = u(s.x(i));
    return s;
}

/// Snapshots of u(t, x) on a fixed window at times t0, t0 + dt, ..., t1.
Trajectory synthetic(const std::function<double(double, double)>& u, double t0, double t1, double dt, double lo,
                     double hi, double dx)
{
    Trajectory traj;
    const auto n = std::llround((t1 - t0) / dt);
    for (long long k = 0; k <= n; ++k) {
        const double t = t0 + k * dt;
        traj.snapshots.push_back(sample([&](double x) { return u(t, x); }, lo, hi, dx, t));
    }
    return traj;
}

double logistic_front(double z)
{
    return 1.0 / (1.0 + std::exp(z));
}

} // namespace

TEST_SUITE("certify")
{
    TEST_CASE("envelope of an exact exponential")
    {
        const auto r = ReactionTerm::time_independent(Nonlinearity::logistic());
        const auto traj = synthetic([](double t, double x) { return std::min(std::exp(-0.5 * (x - 2.5 * t)), 1.0); },
                                    0, 4, 0.5, -10, 40, 0.05);
        const auto cert = supersolution_envelope(traj, r, 0.6, 0.1);
        CHECK(cert.M == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(cert.alpha == doctest::Approx(2.5).epsilon(1e-9));
        CHECK(cert.C_eps == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(cert.violation_sup <= 1e-12);
        CHECK(cert.pass);
        CHECK(cert.checked_snapshots == 9);
    }

    TEST_CASE("envelope catches a front that outruns it")
    {
        const auto r = ReactionTerm::time_independent(Nonlinearity::logistic());
        const auto traj = synthetic([](double t, double x) { return std::min(std::exp(-0.5 * (x - 4.0 * t)), 1.0); },
                                    0, 4, 0.5, -10, 40, 0.05);
        CHECK_FALSE(supersolution_envelope(traj, r, 0.6, 0.1).pass);
    }

    TEST_CASE("eps outside (0, lambda)")
    {
        const auto r = ReactionTerm::time_independent(Nonlinearity::logistic());
        const auto traj = synthetic([](double, double x) { return logistic_front(x); }, 0, 1, 0.5, -10, 10, 0.1);
        CHECK(kind_of([&] { supersolution_envelope(traj, r, 0.5, 0.0); }) == ErrorKind::InvalidEps);
        CHECK(kind_of([&] { supersolution_envelope(traj, r, 0.5, 0.5); }) == ErrorKind::InvalidEps);
        EnvelopeCertificate cert;
        cert.lambda = 0.5;
        cert.eps = 0.7;
        CHECK(kind_of([&] { heat_lower_bound(traj, r, cert); }) == ErrorKind::InvalidEps);
    }

    TEST_CASE("amplitude fits")
    {
        const auto s = sample([](double x) { return std::min(2.0 * std::exp(-0.5 * x), 1.0); }, -10, 30, 0.1);
        CHECK(fit_upper_amplitude(s, 0.5) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(fit_lower_amplitude(s, 0.5) == doctest::Approx(2.0).epsilon(1e-12));
        // binding node is the first one below 1/2, at x = 2.8
        CHECK(fit_lower_amplitude(s, 0.6) == doctest::Approx(2.0 * std::exp(0.1 * 2.8)).epsilon(1e-12));
    }

    TEST_CASE("heat kernel integrates to one")
    {
        for (double tau : {0.1, 1.0, 10.0}) {
            CHECK(heat_kernel_mass(tau, 0.05, 60.0) == doctest::Approx(1.0).epsilon(1e-10));
        }
        CHECK(heat_kernel(1.0, 0.0) == doctest::Approx(1.0 / std::sqrt(4 * std::numbers::pi)));
    }

    TEST_CASE("constant data are preserved away from the right edge")
    {
        const auto s = sample([](double) { return 0.5; }, -50, 50, 0.1);
        const auto out = heat_convolve(s, 1.0);
        for (Eigen::Index i = 0; i < out.size(); ++i) {
            if (out.x(i) < 30) CHECK(out.u(i) == doctest::Approx(0.5).epsilon(1e-12));
        }
        CHECK(out.t == doctest::Approx(1.0));
    }

    TEST_CASE("closed-form heat evolution matches the numerical convolution")
    {
        const double C = 3.0;
        const double nu = 0.8;
        const double tau = 1.5;
        const double dx = 0.01;
        const auto s = sample([&](double x) { return std::min(C * std::exp(-nu * x), 0.5); }, -30, 30, dx);
        const auto out = heat_convolve(s, tau, nu);
        double err = 0.0;
        for (Eigen::Index i = 0; i < out.size(); ++i) {
            err = std::max(err, std::abs(out.u(i) - heat_lower_profile(C, nu, tau, out.x(i))));
        }
        CHECK(err < 1e-4);
        CHECK(heat_lower_profile(C, nu, 0.0, 0.0) == doctest::Approx(0.5));
    }

    TEST_CASE("property: explicit exponential bound on the heat lower profile")
    {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            const double C = 0.6 + 10 * u(rng);
            const double nu = 0.1 + 2 * u(rng);
            const double tau = 0.05 + 20 * u(rng);
            const double x_eps = std::log(2 * C) / nu;
            const double reach = std::sqrt(4 * tau);
            const double factor = 2 * C * std::exp(-1 - nu * reach) / std::sqrt(std::numbers::pi);
            for (int k = 0; k < 20; ++k) {
                const double x = x_eps + reach + 30 * u(rng);
                const double lower = heat_lower_profile(C, nu, tau, x);
                CHECK(lower >= factor * std::exp(-nu * x) * (1 - 1e-12));
            }
        }
    }

    TEST_CASE("explicit bound certificate from the initial data")
    {
        const auto r = ReactionTerm::time_switched(Nonlinearity::logistic(1), Nonlinearity::logistic(2), 0, 2);
        const auto traj = synthetic(
            [](double t, double x) {
                const double base = logistic_front(x);
                return t == 0.0 ? base : std::min(1.0, base * std::exp(0.5 * t) + 0.05 * t);
            },
            0, 2, 2, -30, 60, 0.05);
        EnvelopeCertificate cert;
        cert.lambda = 1.0;
        cert.eps = 0.2;
        heat_lower_bound(traj, r, cert);
        CHECK(cert.C_prime > 0.0);
        CHECK(cert.closed_form_violation <= 1e-8);
    }

    TEST_CASE("ordering flags equilibria")
    {
        const auto zero = synthetic([](double, double) { return 0.0; }, 0, 1, 0.5, -5, 5, 0.1);
        const auto rep = ordering_check(zero);
        CHECK(rep.equilibrium);
        CHECK_FALSE(rep.pass);
        const auto front = synthetic([](double t, double x) { return logistic_front(x - 2 * t); }, 0, 1, 0.5, -5, 5, 0.1);
        const auto ok = ordering_check(front);
        CHECK_FALSE(ok.equilibrium);
        CHECK(ok.pass);
        CHECK(ok.min_u > 0.0);
    }

    TEST_CASE("time monotonicity")
    {
        const auto up = ReactionTerm::time_switched(Nonlinearity::logistic(1), Nonlinearity::logistic(2), 0, 1);
        const auto down = ReactionTerm::time_switched(Nonlinearity::logistic(2), Nonlinearity::logistic(1), 0, 1);
        const auto grow = synthetic([](double t, double x) { return logistic_front(x - 2 * t); }, 0, 5, 0.5, -20, 20, 0.1);
        const auto shrink = synthetic([](double t, double x) { return logistic_front(x + t); }, 0, 5, 0.5, -20, 20, 0.1);
        CHECK(time_monotonicity_check(grow, up, 1e-12).status == CheckStatus::Pass);
        const auto bad = time_monotonicity_check(shrink, up, 1e-12);
        CHECK(bad.status == CheckStatus::Fail);
        CHECK(bad.max_negative_increment > 0.01);
        CHECK(time_monotonicity_check(grow, down, 1e-12).status == CheckStatus::Skipped);
        CHECK(to_string(CheckStatus::Skipped) == "skipped");
    }

    TEST_CASE("shift comparison of translated fronts")
    {
        const double c = 2.5;
        const auto a = synthetic([&](double t, double x) { return logistic_front(x - c * t); }, 0, 10, 0.1, -20, 60,
                                 0.1);
        const auto self = shift_comparison(a, a, 0, 4);
        CHECK(self.T == doctest::Approx(0.0));
        CHECK(self.sup_distance == 0.0);

        // b trails a by 5 length units, i.e. 2 time units
        const auto b = synthetic([&](double t, double x) { return logistic_front(x + 5 - c * t); }, 0, 14, 0.1, -20,
                                 60, 0.1);
        const auto cmp = shift_comparison(a, b, 0, 4);
        CHECK(cmp.T == doctest::Approx(2.0).epsilon(1e-3));
        CHECK(cmp.monotone_in_T);
        CHECK(cmp.sup_distance < 1e-5);
    }

    TEST_CASE("faster front cannot be dominated by a bounded shift")
    {
        const auto a = synthetic([](double t, double x) { return logistic_front(x - 3.0 * t); }, 0, 50, 1, -20, 200,
                                 0.1);
        const auto b = synthetic([](double t, double x) { return logistic_front(x - 2.5 * t); }, 0, 60, 1, -20, 200,
                                 0.1);
        CHECK(kind_of([&] { shift_comparison(a, b, 0, 4); }) == ErrorKind::NoComparison);
    }
}
