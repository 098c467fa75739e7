#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace frontlab {

/// Overshoot band tolerated outside [0,1] before a state value is rejected.
inline constexpr double kClipBand = 1e-8;

enum class Family { Logistic, PowerKpp, Bistable, Hump, Tabulated, Custom };

/// A one-dimensional nonlinearity s -> f(s) on [0,1].
///
/// Shipped families:
///   logistic   r s (1-s)                       params [r]
///   power_kpp  s (1-s) (1 + a s),  -1 < a <= 1 params [a]
///   bistable   s (1-s) (s - a),    0 < a < 1   params [a]
///   hump       r s (1-s) + (M/eps) g((s-1+eps)/eps)  params [r, M, eps, eta]
///   tabulated  piecewise-linear through (s_i, f_i) samples spanning [0,1]
/// where g is a C^1 tent of unit height with support [-1-eta, 1].
class Nonlinearity {
public:
    static Nonlinearity logistic(double rate = 1.0);
    static Nonlinearity power_kpp(double a);
    static Nonlinearity bistable(double a);
    static Nonlinearity hump(double base_rate, double mass, double eps, double eta = 0.25);
    static Nonlinearity tabulated(std::vector<double> s, std::vector<double> f);
    static Nonlinearity tabulated_file(const std::filesystem::path& path);
    static Nonlinearity custom(std::string name, std::function<double(double)> fn,
                               std::optional<double> fprime0 = std::nullopt);
    /// Builds from a configuration name ("logistic", "power_kpp", ...) and its parameters.
    static Nonlinearity from_spec(const std::string& family, const std::vector<double>& params);

    double operator()(double s) const;
    /// df/ds; analytic where the family provides it, central difference otherwise.
    double slope(double s) const;
    std::optional<double> analytic_derivative_at_zero() const;
    double lipschitz() const;

    Family family() const { return family_; }
    const std::string& name() const { return name_; }
    const std::vector<double>& params() const { return params_; }
    const std::vector<double>& table_s() const { return table_s_; }

private:
    Nonlinearity() = default;

    Family family_ = Family::Logistic;
    std::string name_;
    std::vector<double> params_;
    std::vector<double> table_s_;
    std::vector<double> table_f_;
    std::function<double(double)> custom_;
    std::optional<double> custom_fprime0_;
};

/// Hump shape used by Nonlinearity::hump; exposed for tests.
double hump_shape(double y, double eta);

struct DerivativeEstimate {
    double value = 0.0;
    double error_estimate = 0.0;
    bool analytic = false;
};

/// f'(0) of a 1D nonlinearity: analytic when known, otherwise one-sided
/// differences refined by Richardson extrapolation. Throws
/// DegenerateDerivative when the result is not positive.
DerivativeEstimate derivative_at_zero(const Nonlinearity& f);

struct KppCheck {
    bool is_kpp = false;
    double max_violation = 0.0;
    double argmax = 0.0;
};

/// Checks f(s) <= f'(0) s on a uniform grid of the given resolution.
KppCheck is_kpp(const Nonlinearity& f, int grid_resolution = 2001, double tol = 1e-12);

enum class ReactionKind { TimeIndependent, TimeSwitched };
enum class Blend { Linear, Smoothstep, HoldFirst };
enum class Branch { F1, F2 };

Blend parse_blend(const std::string& name);
std::string to_string(Blend blend);

/// f(t,s): f1 for t <= t1, f2 for t >= t2, a convex blend w(t) f1 + (1-w(t)) f2 between.
class ReactionTerm {
public:
    static ReactionTerm time_independent(Nonlinearity f);
    static ReactionTerm time_switched(Nonlinearity f1, Nonlinearity f2, double t1, double t2,
                                      Blend blend = Blend::Smoothstep);

    double eval(double t, double s) const;
    /// Weight of f1 at time t.
    double weight(double t) const;

    ReactionKind kind() const { return kind_; }
    Blend blend() const { return blend_; }
    double t1() const { return t1_; }
    double t2() const { return t2_; }
    const Nonlinearity& branch(Branch which) const { return which == Branch::F1 ? f1_ : f2_; }
    const Nonlinearity& f1() const { return f1_; }
    const Nonlinearity& f2() const { return f2_; }

    DerivativeEstimate derivative_at_zero(Branch which) const;
    KppCheck is_kpp(Branch which, int grid_resolution = 2001) const;
    /// sup over [t1,t2] x (0,1] of f(t,s)/s on a 401 x 401 grid plus the s -> 0 limits.
    double sup_ratio(int grid = 401) const;
    double lipschitz() const;
    /// True when f(t,s) is nondecreasing in t on a sample grid.
    bool nondecreasing_in_time(int grid = 201) const;

private:
    ReactionTerm(ReactionKind kind, Nonlinearity f1, Nonlinearity f2, double t1, double t2, Blend blend);

    ReactionKind kind_;
    Nonlinearity f1_;
    Nonlinearity f2_;
    double t1_;
    double t2_;
    Blend blend_;
};

} // namespace frontlab
