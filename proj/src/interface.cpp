#include "frontlab/interface.hpp"

#include "frontlab/error.hpp"
#include "frontlab/regression.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace frontlab {

std::optional<LevelCrossings> find_level(const FieldState& s, double level)
{
    LevelCrossings out;
    for (Eigen::Index i = 0; i + 1 < s.size(); ++i) {
        const double a = s.u(i) - level;
        const double b = s.u(i + 1) - level;
        if (a >= 0.0 && b < 0.0) {
            out.downward.push_back(s.x(i) + s.dx * a / (a - b));
        } else if (a < 0.0 && b >= 0.0) {
            out.upward.push_back(s.x(i) + s.dx * a / (a - b));
        }
    }
    if (out.downward.empty()) return std::nullopt;
    out.canonical = out.downward.back();
    return out;
}

LevelCrossings level_position(const FieldState& s, double level)
{
    if (!(level > 0.0 && level < 1.0)) fail(ErrorKind::InvalidInput, "level must lie in (0,1)");
    auto hit = find_level(s, level);
    if (!hit) {
        std::ostringstream msg;
        msg << "u never crosses " << level << " downward at t = " << s.t;
        fail(ErrorKind::NoCrossing, msg.str());
    }
    return *hit;
}

namespace {

struct Samples {
    std::vector<double> t;
    std::vector<double> x;
};

Samples finite_samples(const InterfaceTrack& track)
{
    Samples s;
    for (std::size_t i = 0; i < track.size(); ++i) {
        if (std::isfinite(track.x[i]) && std::isfinite(track.t[i])) {
            s.t.push_back(track.t[i]);
            s.x.push_back(track.x[i]);
        }
    }
    return s;
}

/// Pairwise least squares x_j - x_i ~ sum_k beta_k (g_k(t_j) - g_k(t_i)) over
/// all pairs with t_j - t_i >= gap. Pair sums come from prefix sums, so the
/// cost is linear in the number of samples.
template <int K>
SpeedEstimate pairwise_fit(const Samples& s, double gap, const std::array<std::vector<double>, K>& reg)
{
    const std::size_t n = s.t.size();
    // prefix sums of a_k, x, a_k a_l, a_k x, t
    using LD = long double;
    std::array<LD, K> pa{};
    LD px = 0;
    std::array<std::array<LD, K>, K> paa{};
    std::array<LD, K> pax{};
    LD pt = 0;
    std::array<std::array<LD, K>, K> normal{};
    std::array<LD, K> rhs{};
    LD sum_abs_dt = 0;
    LD sum_dt2 = 0;
    std::size_t p = 0;
    std::size_t pairs = 0;
    for (std::size_t j = 0; j < n; ++j) {
        while (p < j && s.t[j] - s.t[p] >= gap) {
            for (int a = 0; a < K; ++a) {
                pa[a] += reg[a][p];
                pax[a] += reg[a][p] * static_cast<LD>(s.x[p]);
                for (int b = 0; b < K; ++b) paa[a][b] += reg[a][p] * static_cast<LD>(reg[b][p]);
            }
            px += s.x[p];
            pt += s.t[p];
            ++p;
        }
        if (p == 0) continue;
        const auto m = static_cast<LD>(p);
        for (int a = 0; a < K; ++a) {
            const LD aj = reg[a][j];
            for (int b = 0; b < K; ++b) {
                const LD bj = reg[b][j];
                normal[a][b] += m * aj * bj - aj * pa[b] - bj * pa[a] + paa[a][b];
            }
            const LD xj = s.x[j];
            rhs[a] += m * aj * xj - aj * px - xj * pa[a] + pax[a];
        }
        const LD tj = s.t[j];
        sum_abs_dt += m * tj - pt;
        pairs += p;
    }
    if (pairs == 0) fail(ErrorKind::InsufficientData, "no sample pairs separated by the minimum gap");
    // sum of dt^2 over pairs equals normal[0][0] when regressor 0 is t
    sum_dt2 = normal[0][0];

    std::array<double, K> beta{};
    if constexpr (K == 1) {
        beta[0] = static_cast<double>(rhs[0] / normal[0][0]);
    } else {
        Eigen::Matrix2d A;
        Eigen::Vector2d b;
        for (int a = 0; a < 2; ++a) {
            b(a) = static_cast<double>(rhs[a]);
            for (int c = 0; c < 2; ++c) A(a, c) = static_cast<double>(normal[a][c]);
        }
        const Eigen::Vector2d sol = A.colPivHouseholderQr().solve(b);
        beta[0] = sol(0);
        beta[1] = sol(1);
    }
    double rmin = std::numeric_limits<double>::infinity();
    double rmax = -rmin;
    for (std::size_t i = 0; i < n; ++i) {
        double r = s.x[i];
        for (int a = 0; a < K; ++a) r -= beta[a] * reg[a][i];
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
    }
    SpeedEstimate est;
    est.c_hat = beta[0];
    est.ci_halfwidth = (rmax - rmin) * static_cast<double>(sum_abs_dt / sum_dt2);
    est.t_lo = s.t.front();
    est.t_hi = s.t.back();
    if constexpr (K == 2) {
        est.log_correction_used = true;
        est.log_coefficient = -beta[1];
    }
    return est;
}

} // namespace

SpeedEstimate global_mean_speed(const InterfaceTrack& track, const SpeedOptions& opts)
{
    if (!(opts.min_gap > 0.0)) fail(ErrorKind::InvalidInput, "min_gap must be positive");
    const Samples s = finite_samples(track);
    if (s.t.size() < 3) fail(ErrorKind::InsufficientData, "track has fewer than 3 samples");
    const double span = s.t.back() - s.t.front();
    if (span < 3.0 * opts.min_gap) {
        std::ostringstream msg;
        msg << "track span " << span << " is shorter than 3 * min_gap = " << 3.0 * opts.min_gap;
        fail(ErrorKind::InsufficientData, msg.str());
    }
    // Centre time so the pair sums stay well conditioned.
    const double t_mid = 0.5 * (s.t.front() + s.t.back());
    std::vector<double> tc(s.t.size());
    for (std::size_t i = 0; i < tc.size(); ++i) tc[i] = s.t[i] - t_mid;
    if (!opts.log_correction) {
        return pairwise_fit<1>(s, opts.min_gap, {tc});
    }
    if (!(s.t.front() > opts.log_origin)) {
        fail(ErrorKind::InvalidInput, "log correction needs all sample times after log_origin");
    }
    std::vector<double> lg(s.t.size());
    for (std::size_t i = 0; i < lg.size(); ++i) lg[i] = std::log(s.t[i] - opts.log_origin);
    return pairwise_fit<2>(s, opts.min_gap, {tc, lg});
}

SpeedSplit speed_split(const InterfaceTrack& track, double min_gap, std::optional<double> t_split)
{
    const Samples s = finite_samples(track);
    if (s.t.size() < 6) fail(ErrorKind::InsufficientData, "track too short to split");
    const double split = t_split.value_or(0.5 * (s.t.front() + s.t.back()));
    SpeedSplit out;
    out.early = global_mean_speed(track.slice(s.t.front(), split), {min_gap});
    out.late = global_mean_speed(track.slice(split, s.t.back()), {min_gap});
    const double diff = std::abs(out.early.c_hat - out.late.c_hat);
    const double scale = std::max({std::abs(out.early.c_hat), std::abs(out.late.c_hat), 1e-12});
    out.single_speed = diff <= out.early.ci_halfwidth + out.late.ci_halfwidth + 1e-3 * scale;
    return out;
}

AitkenSpeed late_speed(const InterfaceTrack& track, double t_lo, double t_hi, int windows)
{
    if (windows < 3) fail(ErrorKind::InvalidInput, "Aitken extrapolation needs at least 3 windows");
    const InterfaceTrack part = track.slice(t_lo, t_hi);
    const Samples s = finite_samples(part);
    if (s.t.size() < static_cast<std::size_t>(2 * windows)) {
        fail(ErrorKind::InsufficientData, "too few samples for the requested sub-windows");
    }
    AitkenSpeed out;
    {
        const auto fit = fit_line<double>(s.t, s.x);
        out.window_slope = fit.slope;
    }
    const double lo = s.t.front();
    const double width = (s.t.back() - lo) / windows;
    for (int w = 0; w < windows; ++w) {
        std::vector<double> tt;
        std::vector<double> xx;
        for (std::size_t i = 0; i < s.t.size(); ++i) {
            if (s.t[i] >= lo + w * width - 1e-12 && s.t[i] <= lo + (w + 1) * width + 1e-12) {
                tt.push_back(s.t[i]);
                xx.push_back(s.x[i]);
            }
        }
        if (tt.size() < 2) fail(ErrorKind::InsufficientData, "empty Aitken sub-window");
        out.slopes.push_back(fit_line<double>(tt, xx).slope);
    }
    const std::size_t m = out.slopes.size();
    const double s0 = out.slopes[m - 3];
    const double s1 = out.slopes[m - 2];
    const double s2 = out.slopes[m - 1];
    const double denom = s2 - 2.0 * s1 + s0;
    // Without geometric convergence the delta^2 formula is meaningless; keep the last slope.
    const double ratio = (s1 - s0) != 0.0 ? (s2 - s1) / (s1 - s0) : 0.0;
    if (std::abs(denom) > 1e-14 && ratio > 0.0 && ratio < 1.0) {
        out.extrapolated = s2 - (s2 - s1) * (s2 - s1) / denom;
    } else {
        out.extrapolated = s2;
    }
    return out;
}

CriteriaReport verify_transition_criteria(const Trajectory& traj, const InterfaceTrack& track,
                                          const std::vector<double>& levels, double radius, double distance_bound,
                                          double eps)
{
    if (!(radius >= 0.0)) fail(ErrorKind::InvalidInput, "radius must be nonnegative");
    if (traj.snapshots.empty()) fail(ErrorKind::InvalidInput, "trajectory has no snapshots");
    CriteriaReport rep;
    rep.radius = radius;
    rep.distance_bound = distance_bound;
    rep.eps = eps;
    for (double level : levels) rep.levels.push_back({level, 0.0, false});
    bool any_state = false;
    for (const FieldState& s : traj.snapshots) {
        const auto centre = find_level(s, track.level);
        if (!centre) continue;
        const double xt = centre->canonical;
        for (auto& ld : rep.levels) {
            const auto hit = find_level(s, ld.level);
            if (!hit) continue;
            ld.attained = true;
            for (double x : hit->downward) ld.max_distance = std::max(ld.max_distance, std::abs(x - xt));
            for (double x : hit->upward) ld.max_distance = std::max(ld.max_distance, std::abs(x - xt));
        }
        // inf/sup of u over |x - x_t| <= radius, endpoints by interpolation
        double lo = s.value_at(xt - radius);
        double hi = s.value_at(xt + radius);
        double inf_u = std::min(lo, hi);
        double sup_u = std::max(lo, hi);
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            if (std::abs(s.x(i) - xt) <= radius) {
                inf_u = std::min(inf_u, s.u(i));
                sup_u = std::max(sup_u, s.u(i));
            }
        }
        if (!any_state) {
            rep.inf_u = inf_u;
            rep.sup_u = sup_u;
            any_state = true;
        } else {
            rep.inf_u = std::min(rep.inf_u, inf_u);
            rep.sup_u = std::max(rep.sup_u, sup_u);
        }
    }
    if (!any_state) fail(ErrorKind::NoCrossing, "no snapshot crosses the canonical level");
    rep.bounded_levels = true;
    for (const auto& ld : rep.levels) {
        if (!ld.attained) rep.vacuous = true;
        if (ld.max_distance >= distance_bound) rep.bounded_levels = false;
    }
    rep.nondegenerate = rep.inf_u > eps && rep.sup_u < 1.0 - eps;
    rep.pass = rep.bounded_levels && rep.nondegenerate;
    return rep;
}

Trajectory synthetic_flattening(double t_end, double dt, double half_width, double dx,
                                const std::vector<double>& levels)
{
    if (!(t_end > 0.0 && dt > 0.0 && half_width > 0.0 && dx > 0.0)) {
        fail(ErrorKind::InvalidInput, "synthetic flattening needs positive t_end, dt, half_width, dx");
    }
    Trajectory traj;
    for (double level : levels) {
        InterfaceTrack tr;
        tr.level = level;
        traj.tracks.push_back(std::move(tr));
    }
    const auto steps = static_cast<long>(std::llround(t_end / dt));
    const auto half_cells = static_cast<std::int64_t>(std::llround(half_width / dx));
    for (long k = 0; k <= steps; ++k) {
        FieldState s;
        s.t = static_cast<double>(k) * dt;
        s.dx = dx;
        s.origin = -half_cells;
        s.u.resize(2 * half_cells + 1);
        for (Eigen::Index i = 0; i < s.size(); ++i) s.u(i) = 1.0 / (1.0 + std::exp(s.x(i) / (1.0 + s.t)));
        for (auto& tr : traj.tracks) {
            const auto hit = find_level(s, tr.level);
            tr.push(s.t, hit ? hit->canonical : std::numeric_limits<double>::quiet_NaN(),
                    hit ? static_cast<int>(hit->downward.size()) : 0, s.x_left(), s.x_right());
        }
        traj.snapshots.push_back(std::move(s));
    }
    return traj;
}

InvasionCheck invasion_check(const InterfaceTrack& track, double tol)
{
    const Samples s = finite_samples(track);
    if (s.t.empty()) fail(ErrorKind::InvalidInput, "invasion check needs a nonempty track");
    InvasionCheck out;
    out.monotone = true;
    double running_max = s.x.front();
    for (double x : s.x) {
        if (x < running_max - tol) out.monotone = false;
        running_max = std::max(running_max, x);
    }
    out.range = s.x.back() - s.x.front();
    const double span = s.t.back() - s.t.front();
    if (s.t.size() >= 2 && span > 0.0) {
        const double c = fit_line<double>(s.t, s.x).slope;
        out.threshold = 0.2 * std::abs(c) * span;
    }
    out.invasion = out.monotone && out.range > 0.0 && out.range > out.threshold;
    return out;
}

} // namespace frontlab
