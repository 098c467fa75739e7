#include "frontlab/profile.hpp"

#include "frontlab/error.hpp"
#include "frontlab/regression.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

namespace frontlab {

namespace {

using State = Eigen::Vector2d;

template <typename Rhs>
State rk4(const Rhs& rhs, const State& y, double h)
{
    const State k1 = rhs(y);
    const State k2 = rhs(y + 0.5 * h * k1);
    const State k3 = rhs(y + 0.5 * h * k2);
    const State k4 = rhs(y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct RawShot {
    bool admissible = false;
    bool exhausted = false;
    std::string reason;
    double left_rate = 0.0;
    std::vector<double> phi;
    std::vector<double> dphi;
};

double slope_at_one(const Nonlinearity& f)
{
    if (f.family() == Family::Tabulated || f.family() == Family::Custom) {
        const double h = 1e-6;
        return (f(1.0) - f(1.0 - h)) / h;
    }
    return f.slope(1.0);
}

RawShot shoot(const Nonlinearity& f, double c, const ShootingOptions& opts, bool record)
{
    RawShot shot;
    const double d1 = slope_at_one(f);
    if (!(d1 < 0.0)) {
        fail(ErrorKind::ConvergenceFailure,
             "f'(1) = " + std::to_string(d1) + " must be negative for the unstable-manifold start");
    }
    const double mu = 0.5 * (-c + std::sqrt(c * c - 4.0 * d1));
    shot.left_rate = mu;

    const double rate = std::abs(c) + 2.0 * std::sqrt(std::max(f.lipschitz(), std::abs(d1)));
    const int substeps = std::max(1, static_cast<int>(std::ceil(opts.dxi * rate / 0.05)));
    const double h = opts.dxi / substeps;

    auto push = [&](double p, double dp) {
        if (record) {
            shot.phi.push_back(p);
            shot.dphi.push_back(dp);
        }
    };

    // Phase A: v = 1 - phi, v'' = -c v' + f(1 - v).
    auto rhs_a = [&](const State& y) {
        return State(y(1), -c * y(1) + f(1.0 - y(0)));
    };
    State y(opts.start_offset, mu * opts.start_offset);
    long points = 0;
    push(1.0 - y(0), -y(1));
    while (y(0) < 0.5) {
        for (int k = 0; k < substeps; ++k) y = rk4(rhs_a, y, h);
        if (!std::isfinite(y(0)) || !std::isfinite(y(1))) {
            shot.reason = "non-finite state near phi = 1";
            return shot;
        }
        if (y(1) <= 0.0) {
            shot.reason = "phi' vanished before phi = 1/2";
            return shot;
        }
        push(1.0 - y(0), -y(1));
        if (++points > opts.max_points) {
            shot.exhausted = true;
            shot.reason = "phase near phi = 1 did not reach phi = 1/2";
            return shot;
        }
    }

    // Phase B: l = ln phi, z = phi'/phi, z' = -z^2 - c z - f(phi)/phi.
    auto rhs_b = [&](const State& s) {
        const double phi = std::exp(s(0));
        return State(s(1), -s(1) * s(1) - c * s(1) - f(phi) / phi);
    };
    const double z_big = 4.0 * std::abs(c) + 10.0 + 2.0 * std::sqrt(f.lipschitz());
    State s(std::log(1.0 - y(0)), -y(1) / (1.0 - y(0)));
    const double log_stop = std::log(opts.stop_value);
    while (s(0) > log_stop) {
        for (int k = 0; k < substeps; ++k) {
            s = rk4(rhs_b, s, h);
            if (!(s(1) > -z_big)) break;
        }
        if (!std::isfinite(s(0)) || !(s(1) > -z_big)) {
            shot.reason = "trajectory crosses phi = 0";
            return shot;
        }
        if (s(1) >= 0.0) {
            shot.reason = "phi' changes sign";
            return shot;
        }
        if (s(1) > -1e-9) {
            // creeping into an interior zero of f instead of decaying
            shot.reason = "phi stalls at an interior equilibrium";
            return shot;
        }
        const double phi = std::exp(s(0));
        push(phi, s(1) * phi);
        if (++points > opts.max_points) {
            shot.exhausted = true;
            shot.reason = "tail did not decay to the stop value";
            return shot;
        }
    }

    // Linear regime: the Riccati equation for z is autonomous with rate g.
    const double phi_stop = std::exp(s(0));
    const double g = f(phi_stop) / phi_stop;
    double disc = c * c - 4.0 * g;
    if (disc < 0.0 && disc > -1e-10 * std::max(1.0, c * c)) disc = 0.0;
    if (disc < 0.0) {
        shot.reason = "speed below the linear spreading bound; tail oscillates";
        return shot;
    }
    const double lambda_plus = 0.5 * (c + std::sqrt(disc));
    if (g > 0.0) {
        shot.admissible = s(1) > -lambda_plus - 1e-9 * lambda_plus;
        if (!shot.admissible) shot.reason = "tail steeper than the fast decay rate; crosses phi = 0";
    } else {
        // Only the exact heteroclinic survives when 0 is not unstable.
        shot.admissible = std::abs(s(1) + lambda_plus) <= 0.05 * lambda_plus;
        if (!shot.admissible) shot.reason = "trajectory misses the saddle at phi = 0";
    }
    return shot;
}

double hermite(double p0, double d0, double p1, double d1, double h, double t)
{
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * p1
        + (t3 - t2) * h * d1;
}

double hermite_slope(double p0, double d0, double p1, double d1, double h, double t)
{
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * p0 + (-6 * t2 + 6 * t) * p1) / h + (3 * t2 - 4 * t + 1) * d0
        + (3 * t2 - 2 * t) * d1;
}

FrontProfile build_profile(const Nonlinearity& f, double c, const RawShot& shot, double dxi)
{
    const auto& phi = shot.phi;
    const auto& dphi = shot.dphi;
    const std::size_t n = phi.size();
    std::size_t k = 0;
    while (k + 1 < n && !(phi[k] >= 0.5 && phi[k + 1] < 0.5)) ++k;
    if (k + 1 >= n) fail(ErrorKind::ConvergenceFailure, "profile never crosses 1/2");

    // Root of the Hermite interpolant on [k, k+1].
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hermite(phi[k], dphi[k], phi[k + 1], dphi[k + 1], dxi, mid) >= 0.5) lo = mid; else hi = mid;
    }
    const double xi0 = (static_cast<double>(k) + 0.5 * (lo + hi)) * dxi;
    const double raw_end = static_cast<double>(n - 1) * dxi;
    const long j_min = static_cast<long>(std::ceil(-xi0 / dxi - 1e-12));
    const long j_max = static_cast<long>(std::floor((raw_end - xi0) / dxi + 1e-12));

    FrontProfile p;
    p.c = c;
    p.dxi = dxi;
    p.xi_min = static_cast<double>(j_min) * dxi;
    p.left_rate = shot.left_rate;
    const long count = j_max - j_min + 1;
    p.phi.resize(count);
    p.dphi.resize(count);
    for (long j = j_min; j <= j_max; ++j) {
        const double raw = xi0 + static_cast<double>(j) * dxi;
        auto cell = static_cast<std::size_t>(std::floor(raw / dxi));
        cell = std::min(cell, n - 2);
        const double t = std::clamp(raw / dxi - static_cast<double>(cell), 0.0, 1.0);
        const auto idx = j - j_min;
        p.phi(idx) = hermite(phi[cell], dphi[cell], phi[cell + 1], dphi[cell + 1], dxi, t);
        p.dphi(idx) = hermite_slope(phi[cell], dphi[cell], phi[cell + 1], dphi[cell + 1], dxi, t);
    }
    // exact normalization at the grid point xi = 0
    p.phi(-j_min) = 0.5;

    double res = 0.0;
    for (Eigen::Index i = 1; i + 1 < p.size(); ++i) {
        const double d2 = (p.phi(i + 1) - 2.0 * p.phi(i) + p.phi(i - 1)) / (dxi * dxi);
        const double d1 = (p.phi(i + 1) - p.phi(i - 1)) / (2.0 * dxi);
        res = std::max(res, std::abs(d2 + c * d1 + f(p.phi(i))));
    }
    p.residual = res;

    const auto [wlo, whi] = default_tail_window(p);
    if (whi > wlo + 5.0 * dxi) {
        const TailFit tail = fit_tail(p, wlo, whi);
        p.fitted_lambda = tail.lambda;
        p.fitted_amplitude = tail.amplitude;
        p.degenerate_tail = tail.degenerate_tail;
    }
    return p;
}

} // namespace

double FrontProfile::value(double x) const
{
    if (x <= xi_min) {
        return 1.0 - (1.0 - phi(0)) * std::exp(left_rate * (x - xi_min));
    }
    const Eigen::Index last = size() - 1;
    if (x >= xi_max()) {
        // C^1 continuation with the local log-slope at the end of the grid
        const double rate = -dphi(last) / phi(last);
        return phi(last) * std::exp(-rate * (x - xi_max()));
    }
    const double pos = (x - xi_min) / dxi;
    auto cell = static_cast<Eigen::Index>(std::floor(pos));
    cell = std::min(cell, last - 1);
    const double t = pos - static_cast<double>(cell);
    return hermite(phi(cell), dphi(cell), phi(cell + 1), dphi(cell + 1), dxi, t);
}

double decay_exponent(double fprime0, double cstar, double c, ExponentBranch branch)
{
    if (!std::isfinite(fprime0) || !std::isfinite(cstar) || !std::isfinite(c)) {
        fail(ErrorKind::InvalidInput, "decay_exponent arguments must be finite");
    }
    const double tol = 1e-9 * std::max(1.0, std::abs(c));
    if (c < cstar - tol) {
        fail(ErrorKind::OutOfRange, "speed " + std::to_string(c) + " below minimal speed " + std::to_string(cstar));
    }
    const double disc_star = cstar * cstar - 4.0 * fprime0;
    if (disc_star < -1e-9 * std::max(1.0, cstar * cstar)) {
        fail(ErrorKind::InconsistentInputs, "cstar^2 < 4 f'(0)");
    }
    const bool at_minimal = std::abs(c - cstar) <= tol;
    if (at_minimal && branch == ExponentBranch::Auto) {
        return 0.5 * (cstar + std::sqrt(std::max(0.0, disc_star)));
    }
    const double speed = at_minimal ? cstar : c;
    return 0.5 * (speed - std::sqrt(std::max(0.0, speed * speed - 4.0 * fprime0)));
}

bool admits_monotone_front(const Nonlinearity& f, double c, const ShootingOptions& opts)
{
    const RawShot shot = shoot(f, c, opts, false);
    if (shot.exhausted) fail(ErrorKind::ConvergenceFailure, shot.reason);
    return shot.admissible;
}

FrontProfile solve_profile(const Nonlinearity& f, double c, double tol, const ShootingOptions& opts)
{
    if (!(std::isfinite(c) && c > 0.0)) fail(ErrorKind::InvalidInput, "profile speed must be positive");
    ShootingOptions o = opts;
    if (f.slope(0.0) <= 0.0 || (f.analytic_derivative_at_zero() && *f.analytic_derivative_at_zero() <= 0.0)) {
        // 0 is not unstable: the heteroclinic is a saddle connection, stop before it diverges
        o.stop_value = std::max(o.stop_value, 1e-6);
    }
    for (int attempt = 0; attempt < 4; ++attempt) {
        const RawShot shot = shoot(f, c, o, true);
        if (shot.exhausted) fail(ErrorKind::ConvergenceFailure, shot.reason);
        if (!shot.admissible) {
            fail(ErrorKind::NoMonotoneFront, "speed " + std::to_string(c) + ": " + shot.reason);
        }
        FrontProfile p = build_profile(f, c, shot, o.dxi);
        if (p.residual <= tol) return p;
        if (attempt == 3) {
            std::ostringstream msg;
            msg << "ODE residual " << p.residual << " exceeds tolerance " << tol << " at dxi = " << o.dxi;
            fail(ErrorKind::ConvergenceFailure, msg.str());
        }
        o.dxi *= 0.5;
    }
    fail(ErrorKind::ConvergenceFailure, "unreachable");
}

MinimalSpeed minimal_speed(const Nonlinearity& f, double tol)
{
    const double d0 = derivative_at_zero(f).value;
    MinimalSpeed result;
    result.kpp_bound = 2.0 * std::sqrt(d0);
    if (admits_monotone_front(f, result.kpp_bound)) {
        result.cstar = result.kpp_bound;
        result.at_linear_bound = true;
        return result;
    }
    // Any front with speed 2 sqrt(sup f(s)/s) exists.
    double ratio = d0;
    for (int i = 1; i <= 4000; ++i) {
        const double s = i / 4000.0;
        ratio = std::max(ratio, f(s) / s);
    }
    double lo = result.kpp_bound;
    double hi = 2.0 * std::sqrt(ratio) * (1.0 + 1e-6) + 1e-9;
    int expansions = 0;
    while (!admits_monotone_front(f, hi)) {
        if (++expansions > 3) {
            fail(ErrorKind::BracketFailure, "no admissible speed found up to " + std::to_string(hi));
        }
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (admits_monotone_front(f, mid)) hi = mid; else lo = mid;
        ++result.iterations;
    }
    result.cstar = hi;
    return result;
}

TailFit fit_exponential_tail(std::span<const double> xi, std::span<const double> phi)
{
    const std::size_t n = xi.size();
    if (n < 6) fail(ErrorKind::InvalidWindow, "tail window holds fewer than 6 samples");
    std::vector<double> logs(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(phi[i] > 0.0)) fail(ErrorKind::InvalidWindow, "tail window contains non-positive values");
        logs[i] = std::log(phi[i]);
    }
    const auto fit = fit_line<double>(xi, logs);
    TailFit tail;
    tail.lambda = -fit.slope;
    tail.amplitude = std::exp(fit.intercept);
    tail.r_squared = fit.r_squared;

    // Curvature: slope change between the two halves of the window.
    const std::size_t half = n / 2;
    const auto first = fit_line<double>(xi.subspan(0, half), std::span<const double>(logs).subspan(0, half));
    const auto second = fit_line<double>(xi.subspan(half), std::span<const double>(logs).subspan(half));
    tail.curvature_statistic = std::abs(second.slope - first.slope);
    tail.noise_level = std::hypot(first.slope_stderr, second.slope_stderr);
    tail.degenerate_tail =
        tail.curvature_statistic > std::max(3.0 * tail.noise_level, 1e-3 * std::abs(tail.lambda));
    return tail;
}

TailFit fit_tail(const FrontProfile& p, double lo, double hi)
{
    std::vector<double> xs;
    std::vector<double> ys;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double x = p.xi(i);
        if (x < lo || x > hi) continue;
        if (p.phi(i) >= 0.05) fail(ErrorKind::InvalidWindow, "tail window reaches phi >= 0.05");
        xs.push_back(x);
        ys.push_back(p.phi(i));
    }
    return fit_exponential_tail(xs, ys);
}

std::pair<double, double> default_tail_window(const FrontProfile& p)
{
    const double floor = std::max(1e-10, 10.0 * p.phi(p.size() - 1));
    double lo = p.xi_max();
    double hi = p.xi_min;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p.phi(i) <= 1e-3 && p.phi(i) >= floor) {
            lo = std::min(lo, p.xi(i));
            hi = std::max(hi, p.xi(i));
        }
    }
    return {lo, hi};
}

} // namespace frontlab
