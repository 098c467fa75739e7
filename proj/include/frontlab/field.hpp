#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace frontlab {

/// Solution snapshot on a window of the global lattice x_k = k dx.
///
/// Node i sits at lattice index origin + i, so window shifts are integer
/// bookkeeping and absolute positions are recovered exactly.
struct FieldState {
    double t = 0.0;
    double dx = 0.05;
    std::int64_t origin = 0;
    Eigen::VectorXd u;

    Eigen::Index size() const { return u.size(); }
    double x(Eigen::Index i) const { return static_cast<double>(origin + i) * dx; }
    double x_left() const { return x(0); }
    double x_right() const { return x(size() - 1); }
    /// Node index holding lattice index k, or -1 when outside the window.
    Eigen::Index local_index(std::int64_t k) const
    {
        const std::int64_t i = k - origin;
        return (i >= 0 && i < size()) ? static_cast<Eigen::Index>(i) : -1;
    }
    /// Linear interpolation in x, clamped to the edge values outside the window.
    double value_at(double x) const;
};

/// Time series of level positions x_t(level) with window bounds.
struct InterfaceTrack {
    double level = 0.5;
    std::vector<double> t;
    std::vector<double> x;
    std::vector<int> multiplicity;
    std::vector<double> window_left;
    std::vector<double> window_right;

    std::size_t size() const { return t.size(); }
    bool empty() const { return t.empty(); }
    void push(double time, double pos, int mult, double left, double right)
    {
        t.push_back(time);
        x.push_back(pos);
        multiplicity.push_back(mult);
        window_left.push_back(left);
        window_right.push_back(right);
    }
    /// Restriction to samples with t in [lo, hi].
    InterfaceTrack slice(double lo, double hi) const;
};

struct WindowShift {
    double t = 0.0;
    std::int64_t cells = 0;
    std::int64_t origin_after = 0;
};

struct SchemeDiagnostics {
    long steps = 0;
    long overshoot_events = 0;
    double max_overshoot = 0.0;
};

/// Recorded history of a run: strided snapshots, per-step level tracks and
/// window-shift events.
struct Trajectory {
    std::vector<FieldState> snapshots;
    std::vector<InterfaceTrack> tracks;
    std::vector<WindowShift> shifts;
    SchemeDiagnostics diagnostics;

    /// Track at the given level (the canonical 1/2 level by default).
    const InterfaceTrack& track(double level = 0.5) const;
    const FieldState& final_state() const { return snapshots.back(); }
    /// Appends a continuation whose first snapshot duplicates our last one.
    void append(Trajectory&& later);
    /// Snapshots with t in [lo, hi].
    std::vector<const FieldState*> snapshots_between(double lo, double hi) const;
    /// Field at time t by linear interpolation between bracketing snapshots,
    /// restricted to their common nodes. Returns false when t is out of range.
    bool interpolate(double t, FieldState& out) const;
};

} // namespace frontlab
