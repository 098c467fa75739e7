#pragma once

#include "frontlab/field.hpp"

#include <optional>
#include <vector>

namespace frontlab {

struct LevelCrossings {
    /// Rightmost downward crossing.
    double canonical = 0.0;
    std::vector<double> downward;
    std::vector<double> upward;
};

/// Crossings of u = level by linear interpolation; throws NoCrossing when no
/// downward crossing exists.
LevelCrossings level_position(const FieldState& s, double level);
/// Non-throwing variant.
std::optional<LevelCrossings> find_level(const FieldState& s, double level);

struct SpeedOptions {
    double min_gap = 10.0;
    bool log_correction = false;
    /// x_t = c t - k log(t - log_origin) + b when log_correction is set.
    double log_origin = 0.0;
};

struct SpeedEstimate {
    double c_hat = 0.0;
    double ci_halfwidth = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    bool log_correction_used = false;
    double log_coefficient = 0.0;
};

/// Least-squares slope from all sample pairs with |t - s| >= min_gap.
///
/// The half-width bounds the effect of any perturbation no larger than the
/// observed residual range: |delta c| <= range * sum|dt| / sum dt^2.
SpeedEstimate global_mean_speed(const InterfaceTrack& track, const SpeedOptions& opts);

struct SpeedSplit {
    SpeedEstimate early;
    SpeedEstimate late;
    bool single_speed = true;
};

/// Compares estimates on the two halves of the track (split at t_split, or the
/// midpoint of the sampled range).
SpeedSplit speed_split(const InterfaceTrack& track, double min_gap, std::optional<double> t_split = std::nullopt);

struct AitkenSpeed {
    double window_slope = 0.0;
    double extrapolated = 0.0;
    std::vector<double> slopes;
};

/// Sub-window slopes over [t_lo, t_hi] and their Aitken delta^2 limit.
AitkenSpeed late_speed(const InterfaceTrack& track, double t_lo, double t_hi, int windows = 8);

struct LevelDistance {
    double level = 0.0;
    double max_distance = 0.0;
    bool attained = false;
};

struct CriteriaReport {
    std::vector<LevelDistance> levels;
    double inf_u = 1.0;
    double sup_u = 0.0;
    double distance_bound = 0.0;
    double radius = 0.0;
    double eps = 1e-3;
    bool bounded_levels = false;  // sup{|x - x_t| : u(t,x) = level} proxy
    bool nondegenerate = false;   // inf/sup of u near x_t proxy
    bool vacuous = false;         // some level never attained
    bool pass = false;
};

/// Level-set boundedness and interface non-degeneracy checks over all
/// snapshots, with x_t the canonical crossing of track.level.
CriteriaReport verify_transition_criteria(const Trajectory& traj, const InterfaceTrack& track,
                                          const std::vector<double>& levels, double radius,
                                          double distance_bound, double eps = 1e-3);

struct InvasionCheck {
    bool invasion = false;
    bool monotone = false;
    double range = 0.0;
    double threshold = 0.0;
};

/// Snapshots of u(t,x) = 1 / (1 + exp(x / (1 + t))), a front that flattens
/// instead of propagating. Tracks at the given levels are sampled per snapshot.
Trajectory synthetic_flattening(double t_end, double dt, double half_width, double dx,
                                const std::vector<double>& levels = {0.1, 0.5, 0.9});

/// x_t nondecreasing up to tol and diverging: range > 20% of |c_hat| * span.
InvasionCheck invasion_check(const InterfaceTrack& track, double tol);

} // namespace frontlab
