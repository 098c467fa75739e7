#include "frontlab/field.hpp"

#include "frontlab/error.hpp"

#include <algorithm>
#include <cmath>

namespace frontlab {

double FieldState::value_at(double xq) const
{
    const double pos = xq / dx - static_cast<double>(origin);
    if (pos <= 0.0) return u(0);
    if (pos >= static_cast<double>(size() - 1)) return u(size() - 1);
    const auto i = static_cast<Eigen::Index>(std::floor(pos));
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * u(i) + w * u(i + 1);
}

InterfaceTrack InterfaceTrack::slice(double lo, double hi) const
{
    InterfaceTrack out;
    out.level = level;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= lo && t[i] <= hi) out.push(t[i], x[i], multiplicity[i], window_left[i], window_right[i]);
    }
    return out;
}

const InterfaceTrack& Trajectory::track(double level) const
{
    for (const auto& tr : tracks) {
        if (std::abs(tr.level - level) < 1e-12) return tr;
    }
    fail(ErrorKind::InvalidInput, "trajectory has no track at level " + std::to_string(level));
}

void Trajectory::append(Trajectory&& later)
{
    if (later.snapshots.empty()) return;
    std::size_t skip = 0;
    if (!snapshots.empty() && later.snapshots.front().t <= snapshots.back().t) skip = 1;
    snapshots.insert(snapshots.end(), std::make_move_iterator(later.snapshots.begin() + static_cast<long>(skip)),
                     std::make_move_iterator(later.snapshots.end()));
    if (tracks.empty()) {
        tracks = std::move(later.tracks);
    } else {
        for (std::size_t k = 0; k < tracks.size() && k < later.tracks.size(); ++k) {
            auto& mine = tracks[k];
            const auto& other = later.tracks[k];
            for (std::size_t i = 0; i < other.size(); ++i) {
                if (!mine.empty() && other.t[i] <= mine.t.back()) continue;
                mine.push(other.t[i], other.x[i], other.multiplicity[i], other.window_left[i], other.window_right[i]);
            }
        }
    }
    shifts.insert(shifts.end(), later.shifts.begin(), later.shifts.end());
    diagnostics.steps += later.diagnostics.steps;
    diagnostics.overshoot_events += later.diagnostics.overshoot_events;
    diagnostics.max_overshoot = std::max(diagnostics.max_overshoot, later.diagnostics.max_overshoot);
}

std::vector<const FieldState*> Trajectory::snapshots_between(double lo, double hi) const
{
    std::vector<const FieldState*> out;
    for (const auto& s : snapshots) {
        if (s.t >= lo - 1e-12 && s.t <= hi + 1e-12) out.push_back(&s);
    }
    return out;
}

bool Trajectory::interpolate(double t, FieldState& out) const
{
    if (snapshots.empty()) return false;
    const double tol = 1e-9;
    if (t < snapshots.front().t - tol || t > snapshots.back().t + tol) return false;
    auto it = std::lower_bound(snapshots.begin(), snapshots.end(), t,
                               [](const FieldState& s, double value) { return s.t < value; });
    if (it == snapshots.end()) it = std::prev(snapshots.end());
    if (std::abs(it->t - t) <= tol) {
        out = *it;
        return true;
    }
    if (it == snapshots.begin()) {
        out = *it;
        return true;
    }
    const FieldState& b = *it;
    const FieldState& a = *std::prev(it);
    const double w = (t - a.t) / (b.t - a.t);
    const std::int64_t lo = std::max(a.origin, b.origin);
    const std::int64_t hi = std::min(a.origin + a.size(), b.origin + b.size());
    if (hi <= lo) return false;
    out.t = t;
    out.dx = a.dx;
    out.origin = lo;
    out.u.resize(hi - lo);
    for (std::int64_t k = lo; k < hi; ++k) {
        out.u(k - lo) = (1.0 - w) * a.u(k - a.origin) + w * b.u(k - b.origin);
    }
    return true;
}

} // namespace frontlab
