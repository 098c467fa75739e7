#pragma once

#include "frontlab/field.hpp"
#include "frontlab/profile.hpp"
#include "frontlab/reaction.hpp"

#include <functional>
#include <string>
#include <vector>

namespace frontlab {

enum class Scheme { ImexBe, ImexCn };
enum class WindowPolicy { FollowLevel, Fixed };
/// DirichletLimits pins u = 1 left and u = 0 right. ExponentialTail pins u = 1
/// left and imposes u_x = -tail_rate u on the right, which is exact for an
/// exponential tail in the linear regime.
enum class Boundary { DirichletLimits, NeumannZero, ExponentialTail };

Scheme parse_scheme(const std::string& name);
WindowPolicy parse_window_policy(const std::string& name);
Boundary parse_boundary(const std::string& name);
std::string to_string(Scheme s);
std::string to_string(Boundary b);

struct SolverConfig {
    double dx = 0.05;
    double dt = 0.01;
    Scheme scheme = Scheme::ImexBe;
    double half_width_left = 80.0;
    double half_width_right = 150.0;
    WindowPolicy window_policy = WindowPolicy::FollowLevel;
    double follow_level = 0.5;
    double shift_fraction = 0.25;
    Boundary boundary = Boundary::DirichletLimits;
    double tail_rate = 0.0;
    long snapshot_stride = 25;
    std::vector<double> track_levels{0.5};

    /// Throws Config unless dx, dt > 0 and dt * lipschitz < 1.
    void validate(double lipschitz) const;
};

/// min(0.01, 0.5 / Lip(f)).
double default_time_step(double lipschitz);
/// max(150, 80 / lambda): room for the resolved exponential tail.
double default_right_half_width(double tail_rate);

/// Samples phi(x - shift) on the lattice window [x_left, x_right].
FieldState init_from_profile(const FrontProfile& p, double shift, double x_left, double x_right, double dx,
                             double t0 = 0.0, double edge_tol = 1e-6);
FieldState init_from_function(const std::function<double(double)>& u0, double x_left, double x_right,
                              double dx, double t0 = 0.0);

/// One IMEX step on a fixed window.
FieldState step(const FieldState& s, const ReactionTerm& r, const SolverConfig& cfg);

using Observer = std::function<void(const FieldState&)>;

Trajectory evolve(FieldState s, const ReactionTerm& r, double t_end, const SolverConfig& cfg,
                  const Observer& observer = {});

/// L-periodic medium for u_t = (a(x) u_x)_x + f(x,u).
struct PeriodicMedium {
    double period = 2.0;
    std::function<double(double)> diffusivity;
    std::function<double(double, double)> reaction;
    double lipschitz = 1.0;

    /// a(x) = 1 + diffusivity_amplitude sin(2 pi x / L),
    /// f(x,u) = (1 + rate_amplitude sin(2 pi x / L)) u (1 - u).
    static PeriodicMedium sinusoidal(double period, double diffusivity_amplitude, double rate_amplitude);
};

Trajectory evolve_periodic(FieldState s, const PeriodicMedium& medium, double t_end, const SolverConfig& cfg,
                           const Observer& observer = {});

} // namespace frontlab
