#pragma once

#include "frontlab/reaction.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <utility>

namespace frontlab {

/// Monotone traveling-wave profile phi(xi), phi(-inf) = 1, phi(+inf) = 0, stored
/// on a uniform grid with phi(0) = 1/2.
struct FrontProfile {
    double c = 0.0;
    double xi_min = 0.0;
    double dxi = 0.01;
    Eigen::VectorXd phi;
    Eigen::VectorXd dphi;
    /// 1 - phi ~ (1 - phi(xi_min)) exp(left_rate (xi - xi_min)) to the left of the grid.
    double left_rate = 0.0;
    double fitted_lambda = 0.0;
    double fitted_amplitude = 0.0;
    bool degenerate_tail = false;
    double residual = 0.0;

    Eigen::Index size() const { return phi.size(); }
    double xi(Eigen::Index i) const { return xi_min + static_cast<double>(i) * dxi; }
    double xi_max() const { return xi(size() - 1); }
    /// Cubic Hermite interpolation on the grid, exponential extension outside it.
    double value(double xi) const;
};

enum class ExponentBranch { Auto, Minus };

/// Decay rate of exp(-lambda xi) tails: roots of lambda^2 - c lambda + f'(0) = 0.
/// Auto selects the minus root for c > cstar and the plus root for c = cstar.
double decay_exponent(double fprime0, double cstar, double c, ExponentBranch branch = ExponentBranch::Auto);

struct ShootingOptions {
    double dxi = 0.01;
    double start_offset = 1e-10;   // 1 - phi at the first grid point
    double stop_value = 1e-12;     // phi at which the linear regime takes over
    long max_points = 4'000'000;
};

/// Whether a monotone front with speed c exists, decided by shooting along the
/// unstable manifold of (1,0) and, once phi is in the linear regime, by the
/// fixed points of the Riccati equation for phi'/phi.
bool admits_monotone_front(const Nonlinearity& f, double c, const ShootingOptions& opts = {});

FrontProfile solve_profile(const Nonlinearity& f, double c, double tol = 1e-4,
                           const ShootingOptions& opts = {});

struct MinimalSpeed {
    double cstar = 0.0;
    double kpp_bound = 0.0;       // 2 sqrt(f'(0))
    bool at_linear_bound = false; // cstar equals the linear bound (pulled front)
    int iterations = 0;
};

/// Smallest admissible speed by bisection to relative width tol.
MinimalSpeed minimal_speed(const Nonlinearity& f, double tol = 1e-6);

struct TailFit {
    double lambda = 0.0;
    double amplitude = 0.0;
    double r_squared = 0.0;
    bool degenerate_tail = false;
    double curvature_statistic = 0.0;
    double noise_level = 0.0;
};

/// Log-linear fit phi ~ A exp(-lambda xi) over grid points with xi in [lo, hi].
TailFit fit_tail(const FrontProfile& p, double lo, double hi);
/// Same fit on raw samples.
TailFit fit_exponential_tail(std::span<const double> xi, std::span<const double> phi);
/// Window where 1e-10 <= phi <= 1e-3 (clipped to the stored grid).
std::pair<double, double> default_tail_window(const FrontProfile& p);

} // namespace frontlab
