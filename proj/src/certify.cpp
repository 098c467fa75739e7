#include "frontlab/certify.hpp"

#include "frontlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace frontlab {

namespace {

/// Upper normal tail 1 - Phi(z), accurate for large z.
double normal_q(double z)
{
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

/// Phi(b) - Phi(a) for a <= b without cancellation in the upper tail.
double normal_mass(double a, double b)
{
    if (a > 0.0) return normal_q(a) - normal_q(b);
    return normal_cdf(b) - normal_cdf(a);
}

FieldState state_at(const Trajectory& traj, double t, const char* what)
{
    FieldState s;
    if (!traj.interpolate(t, s)) {
        std::ostringstream msg;
        msg << "trajectory does not cover " << what << " = " << t;
        fail(ErrorKind::InvalidInput, msg.str());
    }
    return s;
}

} // namespace

double fit_upper_amplitude(const FieldState& s, double rate)
{
    double c = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) c = std::max(c, s.u(i) * std::exp(rate * s.x(i)));
    return c;
}

double fit_lower_amplitude(const FieldState& s, double rate)
{
    double c = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s.u(i) < 0.5) c = std::min(c, s.u(i) * std::exp(rate * s.x(i)));
    }
    if (!std::isfinite(c)) fail(ErrorKind::InvalidInput, "u never drops below 1/2 on the window");
    return c;
}

EnvelopeCertificate supersolution_envelope(const Trajectory& traj, const ReactionTerm& r, double lambda, double eps)
{
    if (!(eps > 0.0 && eps < lambda)) {
        std::ostringstream msg;
        msg << "eps = " << eps << " must lie in (0, " << lambda << ")";
        fail(ErrorKind::InvalidEps, msg.str());
    }
    if (traj.snapshots.empty()) fail(ErrorKind::InvalidInput, "trajectory has no snapshots");
    EnvelopeCertificate cert;
    cert.lambda = lambda;
    cert.eps = eps;
    cert.M = r.kind() == ReactionKind::TimeSwitched ? r.sup_ratio() : ReactionTerm::time_switched(r.f1(), r.f1(), 0.0, 1.0, Blend::Linear).sup_ratio();
    const double t1 = r.kind() == ReactionKind::TimeSwitched ? r.t1() : traj.snapshots.front().t;
    const double t2 = r.kind() == ReactionKind::TimeSwitched ? r.t2() : traj.snapshots.back().t;
    const double rate = lambda - eps;
    cert.alpha = rate + cert.M / rate;
    cert.threshold = 10.0 * traj.snapshots.front().dx * traj.snapshots.front().dx;

    const FieldState start = state_at(traj, t1, "t1");
    cert.C_eps = fit_upper_amplitude(start, rate);
    for (const FieldState* s : traj.snapshots_between(t1, t2)) {
        const double shift = cert.alpha * (s->t - t1);
        for (Eigen::Index i = 0; i < s->size(); ++i) {
            const double bar = std::min(cert.C_eps * std::exp(-rate * (s->x(i) - shift)), 1.0);
            cert.violation_sup = std::max(cert.violation_sup, s->u(i) - bar);
        }
        ++cert.checked_snapshots;
    }
    cert.pass = cert.violation_sup <= cert.threshold;
    return cert;
}

double heat_lower_profile(double C, double nu, double tau, double x)
{
    const double x_eps = std::log(2.0 * C) / nu;
    if (tau <= 0.0) return std::min(C * std::exp(-nu * x), 0.5);
    const double sigma = std::sqrt(2.0 * tau);
    const double plateau = 0.5 * normal_cdf((x_eps - x) / sigma);
    const double weight = normal_cdf((x - 2.0 * nu * tau - x_eps) / sigma);
    if (weight == 0.0) return plateau;
    return plateau + C * std::exp(-nu * x + nu * nu * tau) * weight;
}

void heat_lower_bound(const Trajectory& traj, const ReactionTerm& r, EnvelopeCertificate& cert)
{
    if (!(cert.eps > 0.0 && cert.eps < cert.lambda)) fail(ErrorKind::InvalidEps, "eps must lie in (0, lambda)");
    const double t1 = r.kind() == ReactionKind::TimeSwitched ? r.t1() : traj.snapshots.front().t;
    const double t2 = r.kind() == ReactionKind::TimeSwitched ? r.t2() : traj.snapshots.back().t;
    const double nu = cert.lambda + cert.eps;
    const double tau = t2 - t1;
    const FieldState start = state_at(traj, t1, "t1");
    const FieldState end = state_at(traj, t2, "t2");
    cert.C_prime = fit_lower_amplitude(start, nu);
    cert.x_eps = std::log(2.0 * cert.C_prime) / nu;
    const double reach = std::sqrt(4.0 * tau);
    const double factor = 2.0 * cert.C_prime * std::exp(-1.0 - nu * reach) / std::sqrt(std::numbers::pi);
    cert.heat_bound_violation = 0.0;
    cert.closed_form_violation = 0.0;
    for (Eigen::Index i = 0; i < end.size(); ++i) {
        const double x = end.x(i);
        const double lower = heat_lower_profile(cert.C_prime, nu, tau, x);
        cert.heat_bound_violation = std::max(cert.heat_bound_violation, lower - end.u(i));
        if (x >= cert.x_eps + reach) {
            const double bound = factor * std::exp(-nu * x);
            if (bound > 0.0) cert.closed_form_violation = std::max(cert.closed_form_violation, (bound - lower) / bound);
        }
    }
    cert.pass = cert.violation_sup <= cert.threshold && cert.heat_bound_violation <= cert.threshold
        && cert.closed_form_violation <= 1e-8;
}

double heat_kernel(double tau, double z)
{
    return std::exp(-z * z / (4.0 * tau)) / std::sqrt(4.0 * std::numbers::pi * tau);
}

double heat_kernel_mass(double tau, double dx, double half_width)
{
    if (!(tau > 0.0 && dx > 0.0)) fail(ErrorKind::InvalidInput, "tau and dx must be positive");
    const double sigma = std::sqrt(2.0 * tau);
    const auto k_max = static_cast<long>(std::floor(half_width / dx));
    double mass = 0.0;
    for (long k = -k_max; k <= k_max; ++k) {
        const double z = static_cast<double>(k) * dx;
        mass += normal_mass((z - 0.5 * dx) / sigma, (z + 0.5 * dx) / sigma);
    }
    return mass;
}

FieldState heat_convolve(const FieldState& s, double tau, double tail_rate)
{
    if (!(tau > 0.0)) fail(ErrorKind::InvalidInput, "tau must be positive");
    const double sigma = std::sqrt(2.0 * tau);
    const Eigen::Index n = s.size();
    const double left_edge = s.x(0) - 0.5 * s.dx;
    const double right_edge = s.x(n - 1) + 0.5 * s.dx;
    FieldState out = s;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double xi = s.x(i);
        double v = s.u(0) * normal_cdf((left_edge - xi) / sigma);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double y = s.x(j);
            v += s.u(j) * normal_mass((y - 0.5 * s.dx - xi) / sigma, (y + 0.5 * s.dx - xi) / sigma);
        }
        if (tail_rate > 0.0) {
            const double rho = tail_rate;
            // E[g(xi + Z); xi + Z > right_edge] for g(y) = u(n-1) exp(-rho (y - x_right))
            const double shifted = (xi - right_edge - 2.0 * rho * tau) / sigma;
            v += s.u(n - 1) * std::exp(-rho * (xi - s.x(n - 1)) + rho * rho * tau) * normal_cdf(shifted);
        }
        out.u(i) = v;
    }
    out.t = s.t + tau;
    return out;
}

OrderingReport ordering_check(const Trajectory& traj)
{
    OrderingReport rep;
    bool first = true;
    double seen = 0.0;
    rep.equilibrium = true;
    for (const FieldState& s : traj.snapshots) {
        for (Eigen::Index i = 1; i + 1 < s.size(); ++i) {
            const double v = s.u(i);
            if (first) {
                rep.min_u = rep.max_u = seen = v;
                first = false;
            }
            rep.min_u = std::min(rep.min_u, v);
            rep.max_u = std::max(rep.max_u, v);
            if (v != seen) rep.equilibrium = false;
            if (v == 0.0 || v == 1.0) ++rep.saturated_nodes;
        }
    }
    rep.overshoot_events = traj.diagnostics.overshoot_events;
    rep.max_overshoot = traj.diagnostics.max_overshoot;
    // u = 1 in double precision is the rounding of 1 - O(1e-17), not a violation.
    rep.pass = !rep.equilibrium && rep.min_u > 0.0 && rep.max_u <= 1.0 && rep.max_overshoot <= kClipBand;
    return rep;
}

std::string to_string(CheckStatus s)
{
    switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
    }
    return "skipped";
}

MonotonicityReport time_monotonicity_check(const Trajectory& traj, const ReactionTerm& r, double tol, double burn_in)
{
    MonotonicityReport rep;
    rep.tol = tol;
    rep.burn_in = burn_in;
    if (r.kind() == ReactionKind::TimeSwitched && !r.nondecreasing_in_time()) {
        rep.status = CheckStatus::Skipped;
        rep.note = "f is not nondecreasing in time; hypothesis not met";
        return rep;
    }
    if (traj.snapshots.size() < 2) {
        rep.note = "fewer than two snapshots";
        return rep;
    }
    const double t_start = traj.snapshots.front().t + burn_in;
    for (std::size_t k = 0; k + 1 < traj.snapshots.size(); ++k) {
        const FieldState& a = traj.snapshots[k];
        const FieldState& b = traj.snapshots[k + 1];
        if (a.t < t_start - 1e-12) continue;
        for (Eigen::Index i = 0; i < b.size(); ++i) {
            const Eigen::Index j = a.local_index(b.origin + i);
            if (j < 0) continue;
            const double dec = a.u(j) - b.u(i);
            if (dec > rep.max_negative_increment) {
                rep.max_negative_increment = dec;
                rep.t_at_max = b.t;
            }
        }
    }
    rep.status = rep.max_negative_increment <= tol ? CheckStatus::Pass : CheckStatus::Fail;
    return rep;
}

namespace {

struct GapStats {
    double min_gap = std::numeric_limits<double>::infinity();
    double max_abs = 0.0;
    long count = 0;
};

GapStats gap_at(const Trajectory& a, const Trajectory& b, double T)
{
    GapStats g;
    FieldState other;
    const double b_lo = b.snapshots.front().t;
    const double b_hi = b.snapshots.back().t;
    for (const FieldState& s : a.snapshots) {
        const double tb = s.t + T;
        if (tb < b_lo - 1e-9 || tb > b_hi + 1e-9) continue;
        if (!b.interpolate(tb, other)) continue;
        bool any = false;
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            const Eigen::Index j = other.local_index(s.origin + i);
            if (j < 0) continue;
            const double d = other.u(j) - s.u(i);
            g.min_gap = std::min(g.min_gap, d);
            g.max_abs = std::max(g.max_abs, std::abs(d));
            any = true;
        }
        if (any) ++g.count;
    }
    return g;
}

} // namespace

ShiftComparison shift_comparison(const Trajectory& a, const Trajectory& b, double T_lo, double T_hi, double tol,
                                 int grid_points)
{
    if (a.snapshots.empty() || b.snapshots.empty()) fail(ErrorKind::InvalidInput, "empty trajectory");
    if (!(T_hi >= T_lo) || grid_points < 2) fail(ErrorKind::InvalidInput, "invalid T search range");
    if (std::abs(a.snapshots.front().dx - b.snapshots.front().dx) > 1e-15) {
        fail(ErrorKind::InvalidInput, "trajectories must share the lattice spacing");
    }
    ShiftComparison out;
    auto ok = [&](const GapStats& g) { return g.count > 0 && g.min_gap >= -tol; };
    int first_pass = -1;
    for (int k = 0; k < grid_points; ++k) {
        const double T = T_lo + (T_hi - T_lo) * k / (grid_points - 1);
        const GapStats g = gap_at(a, b, T);
        out.T_grid.push_back(T);
        out.min_gap_on_grid.push_back(g.count > 0 ? g.min_gap : std::numeric_limits<double>::quiet_NaN());
        if (ok(g)) {
            if (first_pass < 0) first_pass = k;
        } else if (first_pass >= 0) {
            out.monotone_in_T = false;
        }
    }
    if (first_pass < 0) {
        std::ostringstream msg;
        msg << "no time shift in [" << T_lo << ", " << T_hi << "] orders the trajectories; smallest gaps:";
        for (std::size_t k = 0; k < out.T_grid.size(); k += std::max<std::size_t>(1, out.T_grid.size() / 5)) {
            msg << " T=" << out.T_grid[k] << ":" << out.min_gap_on_grid[k];
        }
        fail(ErrorKind::NoComparison, msg.str());
    }
    double hi = out.T_grid[first_pass];
    if (first_pass > 0) {
        double lo = out.T_grid[first_pass - 1];
        const double width = 1e-7 * std::max(1.0, std::abs(hi));
        while (hi - lo > width) {
            const double mid = 0.5 * (lo + hi);
            if (ok(gap_at(a, b, mid))) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    const GapStats g = gap_at(a, b, hi);
    out.T = hi;
    out.contact_residual = g.min_gap;
    out.sup_distance = g.max_abs;
    out.compared_snapshots = g.count;
    return out;
}

nlohmann::json to_json(const EnvelopeCertificate& c)
{
    return {{"lambda", c.lambda},
            {"eps", c.eps},
            {"M", c.M},
            {"alpha", c.alpha},
            {"C_eps", c.C_eps},
            {"C_prime", c.C_prime},
            {"x_eps", c.x_eps},
            {"violation_sup", c.violation_sup},
            {"heat_bound_violation", c.heat_bound_violation},
            {"closed_form_violation", c.closed_form_violation},
            {"checked_snapshots", c.checked_snapshots},
            {"threshold", c.threshold},
            {"pass", c.pass}};
}

nlohmann::json to_json(const OrderingReport& r)
{
    return {{"min_u", r.min_u},
            {"max_u", r.max_u},
            {"saturated_nodes", r.saturated_nodes},
            {"overshoot_events", r.overshoot_events},
            {"max_overshoot", r.max_overshoot},
            {"equilibrium", r.equilibrium},
            {"pass", r.pass}};
}

nlohmann::json to_json(const MonotonicityReport& r)
{
    return {{"status", to_string(r.status)},
            {"max_negative_increment", r.max_negative_increment},
            {"t_at_max", r.t_at_max},
            {"tol", r.tol},
            {"burn_in", r.burn_in},
            {"note", r.note}};
}

nlohmann::json to_json(const ShiftComparison& s)
{
    return {{"T", s.T},
            {"contact_residual", s.contact_residual},
            {"sup_distance", s.sup_distance},
            {"monotone_in_T", s.monotone_in_T},
            {"compared_snapshots", s.compared_snapshots}};
}

} // namespace frontlab
