#include "frontlab/reaction.hpp"

#include "frontlab/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace frontlab {

namespace {

void require(bool ok, const std::string& what)
{
    if (!ok) fail(ErrorKind::InvalidInput, what);
}

double interpolate_table(const std::vector<double>& s, const std::vector<double>& f, double x)
{
    if (x <= s.front()) return f.front();
    if (x >= s.back()) return f.back();
    const auto it = std::upper_bound(s.begin(), s.end(), x);
    const auto i = static_cast<std::size_t>(it - s.begin()) - 1;
    const double w = (x - s[i]) / (s[i + 1] - s[i]);
    return (1.0 - w) * f[i] + w * f[i + 1];
}

// Richardson table for D(h) = f(h)/h with h halving; D(h) = f'(0) + a1 h + a2 h^2 + ...
DerivativeEstimate richardson(const std::vector<double>& h, const std::vector<double>& d)
{
    const std::size_t n = d.size();
    std::vector<std::vector<double>> table(n);
    for (std::size_t k = 0; k < n; ++k) {
        table[k].push_back(d[k]);
        for (std::size_t j = 1; j <= k; ++j) {
            // Neville: polynomial extrapolation in h to h = 0
            const double p = h[k - j] / h[k];
            table[k].push_back((p * table[k][j - 1] - table[k - 1][j - 1]) / (p - 1.0));
        }
    }
    DerivativeEstimate est;
    est.value = table[n - 1][n - 1];
    est.error_estimate = n > 1 ? std::abs(table[n - 1][n - 1] - table[n - 2][n - 2]) : 0.0;
    return est;
}

} // namespace

double hump_shape(double y, double eta)
{
    if (y <= -1.0 - eta || y >= 1.0) return 0.0;
    if (y < -1.0 + eta) {
        const double z = y + 1.0 + eta;
        return z * z / (4.0 * eta);
    }
    if (y <= -eta) return 1.0 + y;
    if (y < eta) return 1.0 - 0.5 * eta - y * y / (2.0 * eta);
    return 1.0 - y;
}

namespace {

double hump_shape_slope(double y, double eta)
{
    if (y <= -1.0 - eta || y >= 1.0) return 0.0;
    if (y < -1.0 + eta) return (y + 1.0 + eta) / (2.0 * eta);
    if (y <= -eta) return 1.0;
    if (y < eta) return -y / eta;
    return -1.0;
}

} // namespace

Nonlinearity Nonlinearity::logistic(double rate)
{
    require(std::isfinite(rate) && rate > 0.0, "logistic rate must be positive");
    Nonlinearity f;
    f.family_ = Family::Logistic;
    f.name_ = "logistic";
    f.params_ = {rate};
    return f;
}

Nonlinearity Nonlinearity::power_kpp(double a)
{
    require(std::isfinite(a) && a > -1.0 && a <= 1.0, "power_kpp requires -1 < a <= 1");
    Nonlinearity f;
    f.family_ = Family::PowerKpp;
    f.name_ = "power_kpp";
    f.params_ = {a};
    return f;
}

Nonlinearity Nonlinearity::bistable(double a)
{
    require(std::isfinite(a) && a > 0.0 && a < 1.0, "bistable threshold must lie in (0,1)");
    Nonlinearity f;
    f.family_ = Family::Bistable;
    f.name_ = "bistable";
    f.params_ = {a};
    return f;
}

Nonlinearity Nonlinearity::hump(double base_rate, double mass, double eps, double eta)
{
    if (!(base_rate > 0.0 && mass > 0.0 && eps > 0.0 && eta > 0.0 && eta <= 0.5)) {
        fail(ErrorKind::Construction, "hump requires base_rate, mass, eps > 0 and 0 < eta <= 0.5");
    }
    if (eps * (2.0 + eta) >= 1.0) {
        fail(ErrorKind::Construction, "hump support must stay inside (0,1]; reduce eps");
    }
    Nonlinearity f;
    f.family_ = Family::Hump;
    f.name_ = "hump";
    f.params_ = {base_rate, mass, eps, eta};
    return f;
}

Nonlinearity Nonlinearity::tabulated(std::vector<double> s, std::vector<double> values)
{
    require(s.size() == values.size() && s.size() >= 2, "tabulated nonlinearity needs matching columns");
    for (std::size_t i = 0; i < s.size(); ++i) {
        require(std::isfinite(s[i]) && std::isfinite(values[i]), "tabulated values must be finite");
        if (i > 0) require(s[i] > s[i - 1], "tabulated abscissae must be strictly increasing");
    }
    require(std::abs(s.front()) <= 1e-12 && std::abs(s.back() - 1.0) <= 1e-12,
            "tabulated abscissae must span [0,1]");
    Nonlinearity f;
    f.family_ = Family::Tabulated;
    f.name_ = "tabulated";
    f.table_s_ = std::move(s);
    f.table_f_ = std::move(values);
    return f;
}

Nonlinearity Nonlinearity::tabulated_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open tabulated nonlinearity file " + path.string());
    std::vector<double> s;
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        double a = 0.0;
        double b = 0.0;
        if (!(row >> a)) continue;
        if (!(row >> b)) {
            fail(ErrorKind::Config, path.string() + ":" + std::to_string(line_no) + ": expected two columns");
        }
        s.push_back(a);
        values.push_back(b);
    }
    return tabulated(std::move(s), std::move(values));
}

Nonlinearity Nonlinearity::custom(std::string name, std::function<double(double)> fn,
                                  std::optional<double> fprime0)
{
    Nonlinearity f;
    f.family_ = Family::Custom;
    f.name_ = std::move(name);
    f.custom_ = std::move(fn);
    f.custom_fprime0_ = fprime0;
    return f;
}

Nonlinearity Nonlinearity::from_spec(const std::string& family, const std::vector<double>& p)
{
    auto need = [&](std::size_t n) {
        if (p.size() != n) {
            fail(ErrorKind::Config, "family '" + family + "' expects " + std::to_string(n) + " params");
        }
    };
    if (family == "logistic") {
        if (p.empty()) return logistic(1.0);
        need(1);
        return logistic(p[0]);
    }
    if (family == "power_kpp") {
        need(1);
        return power_kpp(p[0]);
    }
    if (family == "bistable") {
        need(1);
        return bistable(p[0]);
    }
    if (family == "hump") {
        if (p.size() == 3) return hump(p[0], p[1], p[2]);
        need(4);
        return hump(p[0], p[1], p[2], p[3]);
    }
    fail(ErrorKind::Config, "unknown nonlinearity family '" + family + "'");
}

double Nonlinearity::operator()(double s) const
{
    switch (family_) {
    case Family::Logistic: return params_[0] * s * (1.0 - s);
    case Family::PowerKpp: return s * (1.0 - s) * (1.0 + params_[0] * s);
    case Family::Bistable: return s * (1.0 - s) * (s - params_[0]);
    case Family::Hump: {
        const double r = params_[0];
        const double mass = params_[1];
        const double eps = params_[2];
        const double eta = params_[3];
        return r * s * (1.0 - s) + (mass / eps) * hump_shape((s - 1.0 + eps) / eps, eta);
    }
    case Family::Tabulated: return interpolate_table(table_s_, table_f_, s);
    case Family::Custom: return custom_(s);
    }
    return 0.0;
}

double Nonlinearity::slope(double s) const
{
    switch (family_) {
    case Family::Logistic: return params_[0] * (1.0 - 2.0 * s);
    case Family::PowerKpp: {
        const double a = params_[0];
        // d/ds [s + (a-1) s^2 - a s^3]
        return 1.0 + 2.0 * (a - 1.0) * s - 3.0 * a * s * s;
    }
    case Family::Bistable: {
        const double a = params_[0];
        // d/ds [-s^3 + (1+a) s^2 - a s]
        return -3.0 * s * s + 2.0 * (1.0 + a) * s - a;
    }
    case Family::Hump: {
        const double eps = params_[2];
        return params_[0] * (1.0 - 2.0 * s)
            + (params_[1] / (eps * eps)) * hump_shape_slope((s - 1.0 + eps) / eps, params_[3]);
    }
    case Family::Tabulated:
    case Family::Custom: {
        const double h = 1e-6;
        const double lo = std::max(0.0, s - h);
        const double hi = std::min(1.0, s + h);
        return ((*this)(hi) - (*this)(lo)) / (hi - lo);
    }
    }
    return 0.0;
}

std::optional<double> Nonlinearity::analytic_derivative_at_zero() const
{
    switch (family_) {
    case Family::Logistic: return params_[0];
    case Family::PowerKpp: return 1.0;
    case Family::Bistable: return -params_[0];
    case Family::Hump: return params_[0];
    case Family::Tabulated: return std::nullopt;
    case Family::Custom: return custom_fprime0_;
    }
    return std::nullopt;
}

double Nonlinearity::lipschitz() const
{
    if (family_ == Family::Tabulated) {
        double lip = 0.0;
        for (std::size_t i = 0; i + 1 < table_s_.size(); ++i) {
            lip = std::max(lip, std::abs((table_f_[i + 1] - table_f_[i]) / (table_s_[i + 1] - table_s_[i])));
        }
        return lip;
    }
    constexpr int n = 4000;
    double lip = 0.0;
    for (int i = 0; i <= n; ++i) {
        lip = std::max(lip, std::abs(slope(static_cast<double>(i) / n)));
    }
    return lip;
}

DerivativeEstimate derivative_at_zero(const Nonlinearity& f)
{
    DerivativeEstimate est;
    if (auto exact = f.analytic_derivative_at_zero()) {
        est.value = *exact;
        est.analytic = true;
    } else if (f.family() == Family::Tabulated) {
        // Sample-exact differences at h = s_m, s_2m, s_4m, ... on the leading uniform run.
        const auto& s = f.table_s();
        if (s.size() < 5 || s[1] > 0.05) {
            fail(ErrorKind::UnresolvableDerivative, "tabulated nonlinearity has no samples near 0");
        }
        const double spacing = s[1] - s[0];
        std::vector<double> hs;
        std::vector<double> ds;
        for (std::size_t m = 8; m >= 1; m /= 2) {
            if (m >= s.size()) continue;
            if (std::abs(s[m] - static_cast<double>(m) * spacing) > 1e-9 * spacing || s[m] > 0.05) continue;
            hs.push_back(s[m]);
            ds.push_back((f(s[m]) - f(0.0)) / s[m]);
        }
        if (hs.size() < 2) {
            fail(ErrorKind::UnresolvableDerivative, "tabulated nonlinearity is not uniformly sampled near 0");
        }
        est = richardson(hs, ds);
    } else {
        std::vector<double> hs;
        std::vector<double> ds;
        for (double h = 1e-2; hs.size() < 6; h *= 0.5) {
            hs.push_back(h);
            ds.push_back((f(h) - f(0.0)) / h);
        }
        est = richardson(hs, ds);
    }
    // rounding leaves a residue of order 1e-16 / h when f'(0) vanishes
    if (!(est.value > 1e-10) || (!est.analytic && !(est.value > 10.0 * est.error_estimate))) {
        fail(ErrorKind::DegenerateDerivative,
             f.name() + ": f'(0) = " + std::to_string(est.value) + " is not positive");
    }
    return est;
}

KppCheck is_kpp(const Nonlinearity& f, int grid_resolution, double tol)
{
    const double d0 = derivative_at_zero(f).value;
    KppCheck check;
    for (int i = 1; i < grid_resolution; ++i) {
        const double s = static_cast<double>(i) / (grid_resolution - 1);
        const double violation = f(s) - d0 * s;
        if (violation > check.max_violation) {
            check.max_violation = violation;
            check.argmax = s;
        }
    }
    check.is_kpp = check.max_violation <= tol;
    return check;
}

Blend parse_blend(const std::string& name)
{
    if (name == "linear") return Blend::Linear;
    if (name == "smoothstep") return Blend::Smoothstep;
    if (name == "hold_first") return Blend::HoldFirst;
    fail(ErrorKind::Config, "unknown blend '" + name + "' (expected linear, smoothstep, hold_first)");
}

std::string to_string(Blend blend)
{
    switch (blend) {
    case Blend::Linear: return "linear";
    case Blend::Smoothstep: return "smoothstep";
    case Blend::HoldFirst: return "hold_first";
    }
    return "linear";
}

ReactionTerm::ReactionTerm(ReactionKind kind, Nonlinearity f1, Nonlinearity f2, double t1, double t2,
                           Blend blend)
    : kind_(kind), f1_(std::move(f1)), f2_(std::move(f2)), t1_(t1), t2_(t2), blend_(blend)
{
}

ReactionTerm ReactionTerm::time_independent(Nonlinearity f)
{
    Nonlinearity copy = f;
    return ReactionTerm(ReactionKind::TimeIndependent, std::move(f), std::move(copy), 0.0, 0.0,
                        Blend::Linear);
}

ReactionTerm ReactionTerm::time_switched(Nonlinearity f1, Nonlinearity f2, double t1, double t2,
                                         Blend blend)
{
    if (!(std::isfinite(t1) && std::isfinite(t2) && t1 < t2)) {
        fail(ErrorKind::InvalidInput, "switch times must satisfy t1 < t2");
    }
    return ReactionTerm(ReactionKind::TimeSwitched, std::move(f1), std::move(f2), t1, t2, blend);
}

double ReactionTerm::weight(double t) const
{
    if (kind_ == ReactionKind::TimeIndependent || t <= t1_) return 1.0;
    if (t >= t2_) return 0.0;
    const double x = (t - t1_) / (t2_ - t1_);
    switch (blend_) {
    case Blend::Linear: return 1.0 - x;
    case Blend::Smoothstep: return 1.0 - x * x * (3.0 - 2.0 * x);
    case Blend::HoldFirst: return 1.0;
    }
    return 1.0;
}

double ReactionTerm::eval(double t, double s) const
{
    if (!std::isfinite(t) || !std::isfinite(s)) {
        fail(ErrorKind::InvalidInput, "reaction evaluated at a non-finite point");
    }
    if (s < -kClipBand || s > 1.0 + kClipBand) {
        fail(ErrorKind::InvalidInput, "state value " + std::to_string(s) + " outside the clip band");
    }
    const double v = std::clamp(s, 0.0, 1.0);
    const double w = weight(t);
    if (w == 1.0) return f1_(v);
    if (w == 0.0) return f2_(v);
    return w * f1_(v) + (1.0 - w) * f2_(v);
}

DerivativeEstimate ReactionTerm::derivative_at_zero(Branch which) const
{
    return frontlab::derivative_at_zero(branch(which));
}

KppCheck ReactionTerm::is_kpp(Branch which, int grid_resolution) const
{
    return frontlab::is_kpp(branch(which), grid_resolution);
}

double ReactionTerm::sup_ratio(int grid) const
{
    const double d1 = frontlab::derivative_at_zero(f1_).value;
    const double d2 = frontlab::derivative_at_zero(f2_).value;
    const int nt = kind_ == ReactionKind::TimeSwitched ? grid : 1;
    double best = 0.0;
    for (int i = 0; i < nt; ++i) {
        const double t = nt == 1 ? t1_ : t1_ + (t2_ - t1_) * i / (nt - 1);
        const double w = weight(t);
        // s -> 0 limit of f(t,s)/s
        best = std::max(best, w * d1 + (1.0 - w) * d2);
        for (int j = 1; j < grid; ++j) {
            const double s = static_cast<double>(j) / (grid - 1);
            best = std::max(best, eval(t, s) / s);
        }
    }
    if (kind_ == ReactionKind::TimeSwitched && blend_ == Blend::HoldFirst) {
        // the jump to f2 happens at t2 itself
        best = std::max(best, d2);
        for (int j = 1; j < grid; ++j) {
            const double s = static_cast<double>(j) / (grid - 1);
            best = std::max(best, f2_(s) / s);
        }
    }
    return best;
}

double ReactionTerm::lipschitz() const
{
    // convex blends cannot exceed the larger endpoint constant
    return std::max(f1_.lipschitz(), f2_.lipschitz());
}

bool ReactionTerm::nondecreasing_in_time(int grid) const
{
    if (kind_ == ReactionKind::TimeIndependent) return true;
    for (int j = 0; j < grid; ++j) {
        const double s = static_cast<double>(j) / (grid - 1);
        if (f2_(s) < f1_(s) - 1e-14) return false;
    }
    return true;
}

} // namespace frontlab
