#pragma once

#include "frontlab/field.hpp"
#include "frontlab/reaction.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace frontlab {

struct EnvelopeCertificate {
    double lambda = 0.0;        // inherited tail rate
    double eps = 0.0;
    double M = 0.0;             // sup f(t,s)/s over the switch interval
    double alpha = 0.0;         // envelope speed
    double C_eps = 0.0;         // upper amplitude for rate lambda - eps
    double C_prime = 0.0;       // lower amplitude for rate lambda + eps
    double x_eps = 0.0;         // C' exp(-(lambda + eps) x_eps) = 1/2
    double violation_sup = 0.0;
    double heat_bound_violation = 0.0;
    double closed_form_violation = 0.0; // relative slack of the explicit bound
    long checked_snapshots = 0;
    double threshold = 0.0;
    bool pass = false;
};

/// Upper amplitude: smallest C with u(x) <= min(C exp(-rate x), 1) at every node.
double fit_upper_amplitude(const FieldState& s, double rate);
/// Lower amplitude: largest C with min(C exp(-rate x), 1/2) <= u(x) at every node.
double fit_lower_amplitude(const FieldState& s, double rate);

/// Checks u <= min(C exp(-(lambda - eps)(x - alpha (t - t1))), 1) on [t1, t2].
EnvelopeCertificate supersolution_envelope(const Trajectory& traj, const ReactionTerm& r, double lambda, double eps);

/// Heat evolution over time tau of min(C exp(-nu x), 1/2), in closed form.
double heat_lower_profile(double C, double nu, double tau, double x);

/// Adds the heat lower-bound comparison at t2 and the explicit exponential
/// bound on x >= x_eps + sqrt(4 (t2 - t1)) to the certificate.
void heat_lower_bound(const Trajectory& traj, const ReactionTerm& r, EnvelopeCertificate& cert);

/// Heat kernel (4 pi tau)^(-1/2) exp(-z^2 / (4 tau)).
double heat_kernel(double tau, double z);
/// Mass of the heat kernel over cells [z - dx/2, z + dx/2] centred on the
/// lattice |z| <= half_width, computed with exact cell integrals.
double heat_kernel_mass(double tau, double dx, double half_width);
/// Heat evolution of piecewise-constant cell data with exact cell weights.
/// Outside the window the data continue as u(0) on the left and as
/// u(n-1) exp(-tail_rate (x - x_right)) on the right (0 when tail_rate <= 0).
FieldState heat_convolve(const FieldState& s, double tau, double tail_rate = 0.0);

struct OrderingReport {
    double min_u = 1.0;
    double max_u = 0.0;
    long saturated_nodes = 0;   // interior nodes that round to exactly 0 or 1
    long overshoot_events = 0;
    double max_overshoot = 0.0;
    bool equilibrium = false;   // every interior node takes the same value
    bool pass = false;
};

/// Range of u over interior nodes of all snapshots.
OrderingReport ordering_check(const Trajectory& traj);

enum class CheckStatus { Pass, Fail, Skipped };
std::string to_string(CheckStatus s);

struct MonotonicityReport {
    CheckStatus status = CheckStatus::Skipped;
    double max_negative_increment = 0.0;
    double t_at_max = 0.0;
    double tol = 0.0;
    double burn_in = 0.0;
    std::string note;
};

/// Largest decrease of u between consecutive snapshots after burn_in.
/// Skipped when f is not nondecreasing in time.
MonotonicityReport time_monotonicity_check(const Trajectory& traj, const ReactionTerm& r, double tol,
                                           double burn_in = 0.0);

struct ShiftComparison {
    double T = 0.0;
    double contact_residual = 0.0; // min over (t, x) of u_B(t + T) - u_A(t)
    double sup_distance = 0.0;     // max over (t, x) of |u_B(t + T) - u_A(t)|
    bool monotone_in_T = true;
    long compared_snapshots = 0;
    std::vector<double> T_grid;
    std::vector<double> min_gap_on_grid;
};

/// Smallest T in [T_lo, T_hi] with u_B(t + T, x) >= u_A(t, x) - tol over all
/// snapshots of A for which t + T lies in B's range.
ShiftComparison shift_comparison(const Trajectory& a, const Trajectory& b, double T_lo, double T_hi,
                                 double tol = 1e-6, int grid_points = 41);

nlohmann::json to_json(const EnvelopeCertificate& c);
nlohmann::json to_json(const OrderingReport& r);
nlohmann::json to_json(const MonotonicityReport& r);
nlohmann::json to_json(const ShiftComparison& s);

} // namespace frontlab
