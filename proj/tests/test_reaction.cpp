#include "doctest.h"

#include "frontlab/error.hpp"
#include "frontlab/reaction.hpp"

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

// Brute-force sup of f(t,s)/s on a finer grid than the library uses.
double dense_sup_ratio(const ReactionTerm& r, int nt, int ns)
{
    double best = 0.0;
    for (int i = 0; i <= nt; ++i) {
        const double t = r.t1() + (r.t2() - r.t1()) * i / nt;
        for (int j = 1; j <= ns; ++j) {
            const double s = std::pow(10.0, -8.0 * (1.0 - static_cast<double>(j) / ns));
            best = std::max(best, r.eval(t, s) / s);
        }
    }
    return best;
}

} // namespace

TEST_SUITE("reaction")
{
    TEST_CASE("logistic evaluates directly")
    {
        const auto r = ReactionTerm::time_switched(Nonlinearity::logistic(1), Nonlinearity::logistic(4), 0, 10);
        CHECK(r.eval(-5.0, 0.5) == doctest::Approx(0.25));
        CHECK(r.eval(15.0, 0.5) == doctest::Approx(1.0));
    }

    TEST_CASE("linear blend at the midpoint")
    {
        const auto r = ReactionTerm::time_switched(Nonlinearity::logistic(1), Nonlinearity::logistic(4), 0, 10,
                                                   Blend::Linear);
        // 0.5 * 0.25 + 0.5 * 1.0
        CHECK(r.eval(5.0, 0.5) == doctest::Approx(0.625).epsilon(1e-14));
    }

    TEST_CASE("fixed points are exact zeros for every family")
    {
        const std::vector<Nonlinearity> fs{Nonlinearity::logistic(3), Nonlinearity::power_kpp(0.5),
                                           Nonlinearity::bistable(0.3), Nonlinearity::hump(0.5, 4, 0.05)};
        for (const auto& f : fs) {
            CHECK(f(0.0) == 0.0);
            CHECK(f(1.0) == 0.0);
        }
        const auto r = ReactionTerm::time_switched(fs[0], fs[1], 1, 2, Blend::Smoothstep);
        for (double t : {0.0, 1.3, 1.7, 5.0}) {
            CHECK(r.eval(t, 0.0) == 0.0);
            CHECK(r.eval(t, 1.0) == 0.0);
        }
    }

    TEST_CASE("out-of-band and non-finite arguments are rejected")
    {
        const auto r = ReactionTerm::time_independent(Nonlinearity::logistic());
        CHECK(kind_of([&] { r.eval(0.0, std::nan("")); }) == ErrorKind::InvalidInput);
        CHECK(kind_of([&] { r.eval(INFINITY, 0.5); }) == ErrorKind::InvalidInput);
        CHECK(kind_of([&] { r.eval(0.0, 1.0 + 1e-6); }) == ErrorKind::InvalidInput);
        // inside the clip band values are clamped
        CHECK(r.eval(0.0, -1e-9) == 0.0);
        CHECK(r.eval(0.0, 1.0 + 1e-9) == 0.0);
    }

    TEST_CASE("analytic derivatives at zero")
    {
        CHECK(derivative_at_zero(Nonlinearity::logistic(1)).value == 1.0);
        CHECK(derivative_at_zero(Nonlinearity::logistic(4)).value == 4.0);
        CHECK(derivative_at_zero(Nonlinearity::logistic(4)).analytic);
    }

    TEST_CASE("tabulated derivative by Richardson refinement")
    {
        std::vector<double> s;
        std::vector<double> f;
        for (int i = 0; i <= 10000; ++i) {
            const double x = i * 1e-4;
            s.push_back(x);
            f.push_back(x * (1 - x) * (1 + x));
        }
        const auto d = derivative_at_zero(Nonlinearity::tabulated(s, f));
        CHECK_FALSE(d.analytic);
        CHECK(d.value == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(d.error_estimate < 1e-6);
    }

    TEST_CASE("tabulated data without samples near zero")
    {
        const auto f = Nonlinearity::tabulated({0.0, 0.5, 1.0}, {0.0, 0.25, 0.0});
        CHECK(kind_of([&] { derivative_at_zero(f); }) == ErrorKind::UnresolvableDerivative);
    }

    TEST_CASE("degenerate derivative is an error")
    {
        const auto f = Nonlinearity::custom("cubic", [](double s) { return s * s * (1 - s); });
        CHECK(kind_of([&] { derivative_at_zero(f); }) == ErrorKind::DegenerateDerivative);
        CHECK(kind_of([&] { is_kpp(f); }) == ErrorKind::DegenerateDerivative);
    }

    TEST_CASE("custom derivative by Richardson refinement")
    {
        const auto f = Nonlinearity::custom("sin", [](double s) { return std::sin(3 * s) * (1 - s); });
        CHECK(derivative_at_zero(f).value == doctest::Approx(3.0).epsilon(1e-8));
    }

    TEST_CASE("KPP checks")
    {
        const auto k = is_kpp(Nonlinearity::logistic());
        CHECK(k.is_kpp);
        CHECK(k.max_violation == 0.0);
        CHECK(is_kpp(Nonlinearity::power_kpp(1.0)).is_kpp);
        CHECK(is_kpp(Nonlinearity::power_kpp(-0.5)).is_kpp);
        CHECK(kind_of([] { is_kpp(Nonlinearity::bistable(0.3)); }) == ErrorKind::DegenerateDerivative);
    }

    TEST_CASE("hump nonlinearity is not KPP; violation peaks at the apex")
    {
        const double eps = 0.05;
        const auto f = Nonlinearity::hump(0.5, 4.0, eps);
        const auto k = is_kpp(f);
        CHECK_FALSE(k.is_kpp);
        const double apex = 1.0 - eps;
        const double oracle = f(apex) - 0.5 * apex;
        CHECK(oracle > 0.0);
        CHECK(k.max_violation >= oracle * (1 - 1e-3));
        CHECK(f(apex) == doctest::Approx(0.5 * apex * eps + 4.0 / eps * hump_shape(0.0, 0.25)));
        // dominates the tent (M/eps)(1 - |s - 1 + eps| / eps) scaled by (1 - eta/2)
        for (int i = 0; i <= 200; ++i) {
            const double s = 1 - 2 * eps + i * eps / 100.0;
            const double tent = 4.0 / eps * std::max(0.0, 1 - std::abs(s - 1 + eps) / eps);
            CHECK(f(s) >= (1 - 0.125) * tent - 1e-12);
        }
    }

    TEST_CASE("sup ratio")
    {
        const auto same = ReactionTerm::time_switched(Nonlinearity::logistic(), Nonlinearity::logistic(), 0, 1);
        CHECK(same.sup_ratio() == doctest::Approx(1.0).epsilon(1e-12));
        const auto up = ReactionTerm::time_switched(Nonlinearity::logistic(1), Nonlinearity::logistic(4), 0, 1,
                                                    Blend::Linear);
        CHECK(up.sup_ratio() == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(up.sup_ratio() >= dense_sup_ratio(up, 1000, 2000) - 1e-9);
        const auto hold = ReactionTerm::time_switched(Nonlinearity::logistic(3), Nonlinearity::logistic(1), 0, 1,
                                                      Blend::HoldFirst);
        CHECK(hold.sup_ratio() == doctest::Approx(3.0).epsilon(1e-12));
    }

    TEST_CASE("blend weights")
    {
        for (Blend b : {Blend::Linear, Blend::Smoothstep, Blend::HoldFirst}) {
            const auto r = ReactionTerm::time_switched(Nonlinearity::logistic(1), Nonlinearity::logistic(2), 2, 4, b);
            CHECK(r.weight(2.0) == 1.0);
            CHECK(r.weight(4.0) == 0.0);
            CHECK(r.weight(1.0) == 1.0);
            CHECK(r.weight(9.0) == 0.0);
            CHECK(parse_blend(to_string(b)) == b);
        }
        const auto lin = ReactionTerm::time_switched(Nonlinearity::logistic(1), Nonlinearity::logistic(2), 2, 4,
                                                     Blend::Linear);
        CHECK(lin.weight(2.5) == doctest::Approx(0.75));
        const auto smooth = ReactionTerm::time_switched(Nonlinearity::logistic(1), Nonlinearity::logistic(2), 2, 4,
                                                        Blend::Smoothstep);
        CHECK(smooth.weight(3.0) == doctest::Approx(0.5));
        CHECK(kind_of([] { parse_blend("cubic"); }) == ErrorKind::Config);
    }

    TEST_CASE("property: nonnegative, pinned, piecewise time-independent")
    {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        for (int trial = 0; trial < 50; ++trial) {
            const double r1 = 0.1 + 3 * u01(rng);
            const double r2 = 0.1 + 3 * u01(rng);
            const double a = -0.9 + 1.9 * u01(rng);
            const double t1 = -5 + 10 * u01(rng);
            const double t2 = t1 + 0.1 + 5 * u01(rng);
            const Blend b = static_cast<Blend>(trial % 3);
            const auto r = ReactionTerm::time_switched(Nonlinearity::logistic(r1), Nonlinearity::power_kpp(a), t1,
                                                       t2, b);
            for (int k = 0; k < 40; ++k) {
                const double t = t1 - 10 + (t2 - t1 + 20) * u01(rng);
                const double s = u01(rng);
                CHECK(r.eval(t, s) >= 0.0);
                CHECK(r.eval(t, 0.0) == 0.0);
                CHECK(r.eval(t, 1.0) == 0.0);
                if (t <= t1) CHECK(r.eval(t, s) == r.eval(t1 - 1.0, s));
                if (t >= t2) CHECK(r.eval(t, s) == r.eval(t2 + 1.0, s));
            }
            const double d1 = r.derivative_at_zero(Branch::F1).value;
            const double d2 = r.derivative_at_zero(Branch::F2).value;
            CHECK(r.sup_ratio(101) >= std::max(d1, d2) - 1e-12);
        }
    }

    TEST_CASE("time monotonicity of a switched reaction")
    {
        const auto up = ReactionTerm::time_switched(Nonlinearity::logistic(1), Nonlinearity::logistic(2), 0, 1);
        const auto down = ReactionTerm::time_switched(Nonlinearity::logistic(2), Nonlinearity::logistic(1), 0, 1);
        CHECK(up.nondecreasing_in_time());
        CHECK_FALSE(down.nondecreasing_in_time());
    }

    TEST_CASE("family construction from configuration names")
    {
        CHECK(Nonlinearity::from_spec("logistic", {2.0})(0.5) == doctest::Approx(0.5));
        CHECK(Nonlinearity::from_spec("power_kpp", {1.0})(0.5) == doctest::Approx(0.375));
        CHECK(kind_of([] { Nonlinearity::from_spec("power_kpp", {1.5}); }) == ErrorKind::InvalidInput);
        CHECK(kind_of([] { Nonlinearity::from_spec("quartic", {}); }) == ErrorKind::Config);
    }
}
