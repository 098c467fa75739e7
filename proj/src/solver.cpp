#include "frontlab/solver.hpp"

#include "frontlab/error.hpp"
#include "frontlab/interface.hpp"
#include "frontlab/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace frontlab {

Scheme parse_scheme(const std::string& name)
{
    if (name == "imex_be") return Scheme::ImexBe;
    if (name == "imex_cn") return Scheme::ImexCn;
    fail(ErrorKind::Config, "unknown scheme '" + name + "' (expected imex_be, imex_cn)");
}

WindowPolicy parse_window_policy(const std::string& name)
{
    if (name == "follow") return WindowPolicy::FollowLevel;
    if (name == "fixed") return WindowPolicy::Fixed;
    fail(ErrorKind::Config, "unknown window policy '" + name + "' (expected follow, fixed)");
}

Boundary parse_boundary(const std::string& name)
{
    if (name == "dirichlet") return Boundary::DirichletLimits;
    if (name == "neumann") return Boundary::NeumannZero;
    if (name == "exponential_tail") return Boundary::ExponentialTail;
    fail(ErrorKind::Config, "unknown boundary '" + name + "' (expected dirichlet, neumann, exponential_tail)");
}

std::string to_string(Scheme s)
{
    return s == Scheme::ImexBe ? "imex_be" : "imex_cn";
}

std::string to_string(Boundary b)
{
    switch (b) {
    case Boundary::DirichletLimits: return "dirichlet";
    case Boundary::NeumannZero: return "neumann";
    case Boundary::ExponentialTail: return "exponential_tail";
    }
    return "dirichlet";
}

void SolverConfig::validate(double lipschitz) const
{
    if (!(dx > 0.0) || !std::isfinite(dx)) fail(ErrorKind::Config, "solver.dx must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::Config, "solver.dt must be positive");
    if (!(dt * lipschitz < 1.0)) {
        std::ostringstream msg;
        msg << "solver.dt * Lip(f) = " << dt * lipschitz << " must be < 1 for a monotone reaction step";
        fail(ErrorKind::Config, msg.str());
    }
    if (!(half_width_left > 0.0 && half_width_right > 0.0)) {
        fail(ErrorKind::Config, "window half widths must be positive");
    }
    if (!(follow_level > 0.0 && follow_level < 1.0)) fail(ErrorKind::Config, "follow level must lie in (0,1)");
    if (!(shift_fraction > 0.0 && shift_fraction < 1.0)) fail(ErrorKind::Config, "shift fraction must lie in (0,1)");
    if (boundary == Boundary::ExponentialTail && !(tail_rate > 0.0)) {
        fail(ErrorKind::Config, "exponential_tail boundary needs a positive tail rate");
    }
    if (snapshot_stride < 1) fail(ErrorKind::Config, "snapshot stride must be >= 1");
    for (double level : track_levels) {
        if (!(level > 0.0 && level < 1.0)) fail(ErrorKind::Config, "track levels must lie in (0,1)");
    }
}

double default_time_step(double lipschitz)
{
    return lipschitz > 0.0 ? std::min(0.01, 0.5 / lipschitz) : 0.01;
}

double default_right_half_width(double tail_rate)
{
    return tail_rate > 0.0 ? std::max(150.0, 80.0 / tail_rate) : 150.0;
}

namespace {

FieldState make_window(double x_left, double x_right, double dx, double t0)
{
    if (!(dx > 0.0) || !(x_right > x_left)) fail(ErrorKind::InvalidInput, "window must satisfy x_left < x_right");
    FieldState s;
    s.t = t0;
    s.dx = dx;
    s.origin = static_cast<std::int64_t>(std::llround(x_left / dx));
    const auto last = static_cast<std::int64_t>(std::llround(x_right / dx));
    s.u.resize(static_cast<Eigen::Index>(last - s.origin + 1));
    return s;
}

using RateFn = std::function<void(double t, const FieldState&, Eigen::VectorXd&)>;
using DiffusivityFn = std::function<double(double)>;

/// Shared IMEX kernel for the homogeneous and periodic equations.
class Integrator {
public:
    Integrator(const SolverConfig& cfg, RateFn rates, DiffusivityFn diffusivity)
        : cfg_(cfg), rates_(std::move(rates)), diffusivity_(std::move(diffusivity))
    {
    }

    void prepare(const FieldState& s)
    {
        const Eigen::Index n = s.size();
        if (n < 4) fail(ErrorKind::InvalidInput, "window needs at least 4 nodes");
        if (n == factored_size_ && origin_ == s.origin) return;
        if (n == factored_size_ && !diffusivity_) return;
        origin_ = s.origin;
        factored_size_ = n;
        a_half_ = Eigen::VectorXd::Ones(n + 1);
        if (diffusivity_) {
            for (Eigen::Index i = 0; i <= n; ++i) a_half_(i) = diffusivity_(s.x(i) - 0.5 * s.dx);
        }
        // Spatial operator K (times dx^2): row i couples i-1, i, i+1.
        k_lower_ = Eigen::VectorXd::Zero(n);
        k_diag_ = Eigen::VectorXd::Zero(n);
        k_upper_ = Eigen::VectorXd::Zero(n);
        for (Eigen::Index i = 1; i + 1 < n; ++i) {
            k_lower_(i) = a_half_(i);
            k_upper_(i) = a_half_(i + 1);
            k_diag_(i) = -(a_half_(i) + a_half_(i + 1));
        }
        if (cfg_.boundary == Boundary::NeumannZero) {
            k_diag_(0) = -a_half_(1);
            k_upper_(0) = a_half_(1);
            k_lower_(n - 1) = a_half_(n - 1);
            k_diag_(n - 1) = -a_half_(n - 1);
        } else if (cfg_.boundary == Boundary::ExponentialTail) {
            const double rho = std::exp(-cfg_.tail_rate * s.dx);
            k_lower_(n - 1) = a_half_(n - 1);
            k_diag_(n - 1) = -(a_half_(n - 1) + a_half_(n) * (1.0 - rho));
        }
        const double theta = cfg_.scheme == Scheme::ImexBe ? 1.0 : 0.5;
        const double beta = theta * cfg_.dt / (s.dx * s.dx);
        Eigen::VectorXd lower = -beta * k_lower_;
        Eigen::VectorXd upper = -beta * k_upper_;
        Eigen::VectorXd diag = Eigen::VectorXd::Ones(n) - beta * k_diag_;
        if (pinned_left()) {
            diag(0) = 1.0;
            upper(0) = 0.0;
        }
        if (pinned_right()) {
            diag(n - 1) = 1.0;
            lower(n - 1) = 0.0;
        }
        factor_.factor(lower, diag, upper);
        rate_.resize(n);
        work_.resize(n);
    }

    void advance(FieldState& s, SchemeDiagnostics& diag)
    {
        prepare(s);
        const double dt = cfg_.dt;
        const Eigen::Index n = s.size();
        if (cfg_.scheme == Scheme::ImexBe) {
            rates_(s.t, s, rate_);
            s.u += dt * rate_;
        } else {
            heun(s, 0.5 * dt);
            const double beta = 0.5 * dt / (s.dx * s.dx);
            work_ = s.u + beta * tridiagonal_multiply<double>(k_lower_, k_diag_, k_upper_, s.u);
            s.u = work_;
        }
        if (pinned_left()) s.u(0) = 1.0;
        if (pinned_right()) s.u(n - 1) = 0.0;
        factor_.solve_in_place(s.u);
        if (cfg_.scheme == Scheme::ImexCn) {
            FieldState mid = s;
            mid.t = s.t + 0.5 * dt;
            heun(mid, 0.5 * dt);
            s.u = mid.u;
        }
        s.t += dt;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double v = s.u(i);
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "non-finite value at t = " << s.t << ", x = " << s.x(i);
                fail(ErrorKind::BlowUp, msg.str());
            }
            const double over = std::max(-v, v - 1.0);
            if (over > kClipBand) {
                ++diag.overshoot_events;
                diag.max_overshoot = std::max(diag.max_overshoot, over);
            }
            s.u(i) = std::clamp(v, 0.0, 1.0);
        }
        ++diag.steps;
    }

    /// Moves the window by whole cells; entered cells come from the boundary
    /// states (1 on the left, the extrapolated exponential tail on the right).
    void shift(FieldState& s, std::int64_t cells) const
    {
        const Eigen::Index n = s.size();
        if (cells == 0) return;
        Eigen::VectorXd next(n);
        if (cells > 0) {
            const auto k = static_cast<Eigen::Index>(std::min<std::int64_t>(cells, n));
            next.head(n - k) = s.u.tail(n - k);
            double base = 0.0;
            double rho = 0.0;
            Eigen::Index anchor = n - 1;
            if (cfg_.boundary == Boundary::ExponentialTail) {
                base = s.u(n - 1);
                rho = std::exp(-cfg_.tail_rate * s.dx);
            } else {
                anchor = n - 2;
                const Eigen::Index m = std::max<Eigen::Index>(2, std::min<Eigen::Index>(100, n / 10));
                const double a = s.u(anchor - m);
                const double b = s.u(anchor);
                base = b;
                if (a > 0.0 && b > 0.0) rho = std::min(1.0, std::pow(b / a, 1.0 / static_cast<double>(m)));
            }
            // old index q maps to new index q - k
            for (Eigen::Index q = anchor + 1; q < n + k; ++q) {
                if (q - k < 0) continue;
                double v = base * std::pow(rho, static_cast<double>(q - anchor));
                if (v < 1e-300) v = 0.0;
                next(q - k) = v;
            }
        } else {
            const auto k = static_cast<Eigen::Index>(std::min<std::int64_t>(-cells, n));
            next.tail(n - k) = s.u.head(n - k);
            const double fill = cfg_.boundary == Boundary::NeumannZero ? s.u(0) : 1.0;
            next.head(k).setConstant(fill);
        }
        s.u = std::move(next);
        s.origin += cells;
        if (pinned_left()) s.u(0) = 1.0;
        if (pinned_right()) s.u(n - 1) = 0.0;
    }

private:
    bool pinned_left() const { return cfg_.boundary != Boundary::NeumannZero; }
    bool pinned_right() const { return cfg_.boundary == Boundary::DirichletLimits; }

    void heun(FieldState& s, double h)
    {
        const Eigen::Index n = s.size();
        rates_(s.t, s, rate_);
        FieldState probe = s;
        probe.u = (s.u + h * rate_).cwiseMax(0.0).cwiseMin(1.0);
        probe.t = s.t + h;
        rates_(probe.t, probe, work_);
        s.u += 0.5 * h * (rate_ + work_);
        if (pinned_left()) s.u(0) = 1.0;
        if (pinned_right()) s.u(n - 1) = 0.0;
    }

    const SolverConfig& cfg_;
    RateFn rates_;
    DiffusivityFn diffusivity_;
    Eigen::Index factored_size_ = -1;
    std::int64_t origin_ = 0;
    Eigen::VectorXd a_half_;
    Eigen::VectorXd k_lower_;
    Eigen::VectorXd k_diag_;
    Eigen::VectorXd k_upper_;
    TridiagonalFactor<double> factor_;
    Eigen::VectorXd rate_;
    Eigen::VectorXd work_;
};

RateFn homogeneous_rates(const ReactionTerm& r)
{
    return [&r](double t, const FieldState& s, Eigen::VectorXd& out) {
        const double w = r.weight(t);
        const Nonlinearity& f1 = r.f1();
        const Nonlinearity& f2 = r.f2();
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            const double v = std::clamp(s.u(i), 0.0, 1.0);
            if (w == 1.0) {
                out(i) = f1(v);
            } else if (w == 0.0) {
                out(i) = f2(v);
            } else {
                out(i) = w * f1(v) + (1.0 - w) * f2(v);
            }
        }
    };
}

void record_tracks(const FieldState& s, const SolverConfig& cfg, std::vector<InterfaceTrack>& tracks)
{
    for (auto& tr : tracks) {
        const auto hit = find_level(s, tr.level);
        const double pos = hit ? hit->canonical : std::numeric_limits<double>::quiet_NaN();
        const int mult = hit ? static_cast<int>(hit->downward.size()) : 0;
        tr.push(s.t, pos, mult, s.x_left(), s.x_right());
    }
    (void)cfg;
}

Trajectory run(FieldState s, double t_end, const SolverConfig& cfg, Integrator& integrator, const Observer& observer)
{
    if (!(t_end > s.t)) fail(ErrorKind::InvalidInput, "t_end must exceed the initial time");
    const double t0 = s.t;
    const auto steps = static_cast<long>(std::llround((t_end - t0) / cfg.dt));
    if (steps < 1) fail(ErrorKind::InvalidInput, "t_end - t is shorter than one time step");

    Trajectory traj;
    std::vector<double> levels = cfg.track_levels;
    if (std::find_if(levels.begin(), levels.end(), [&](double l) { return std::abs(l - cfg.follow_level) < 1e-12; })
        == levels.end()) {
        levels.push_back(cfg.follow_level);
    }
    for (double level : levels) {
        InterfaceTrack tr;
        tr.level = level;
        traj.tracks.push_back(std::move(tr));
    }
    record_tracks(s, cfg, traj.tracks);
    traj.snapshots.push_back(s);
    if (observer) observer(s);

    const double margin = cfg.shift_fraction * std::min(cfg.half_width_left, cfg.half_width_right);
    for (long k = 1; k <= steps; ++k) {
        integrator.advance(s, traj.diagnostics);
        s.t = t0 + static_cast<double>(k) * cfg.dt;
        record_tracks(s, cfg, traj.tracks);
        if (cfg.window_policy == WindowPolicy::FollowLevel) {
            const auto hit = find_level(s, cfg.follow_level);
            if (!hit) {
                std::ostringstream msg;
                msg << "level " << cfg.follow_level << " lost at t = " << s.t;
                fail(ErrorKind::FrontLost, msg.str());
            }
            const double target = s.x_left() + cfg.half_width_left;
            const double drift = hit->canonical - target;
            if (std::abs(drift) > margin) {
                const auto cells = static_cast<std::int64_t>(std::llround(drift / s.dx));
                integrator.shift(s, cells);
                traj.shifts.push_back({s.t, cells, s.origin});
            }
        }
        if (k % cfg.snapshot_stride == 0 || k == steps) {
            traj.snapshots.push_back(s);
            if (observer) observer(s);
        }
    }
    return traj;
}

} // namespace

FieldState init_from_profile(const FrontProfile& p, double shift, double x_left, double x_right, double dx,
                             double t0, double edge_tol)
{
    FieldState s = make_window(x_left, x_right, dx, t0);
    for (Eigen::Index i = 0; i < s.size(); ++i) s.u(i) = p.value(s.x(i) - shift);
    if (s.u(0) < 1.0 - edge_tol || s.u(s.size() - 1) > edge_tol) {
        std::ostringstream msg;
        msg << "window [" << x_left << ", " << x_right << "] leaves edge values " << s.u(0) << ", "
            << s.u(s.size() - 1) << " outside tolerance " << edge_tol;
        fail(ErrorKind::WindowTooNarrow, msg.str());
    }
    return s;
}

FieldState init_from_function(const std::function<double(double)>& u0, double x_left, double x_right, double dx,
                              double t0)
{
    FieldState s = make_window(x_left, x_right, dx, t0);
    for (Eigen::Index i = 0; i < s.size(); ++i) s.u(i) = u0(s.x(i));
    return s;
}

FieldState step(const FieldState& s, const ReactionTerm& r, const SolverConfig& cfg)
{
    cfg.validate(r.lipschitz());
    Integrator integrator(cfg, homogeneous_rates(r), {});
    FieldState next = s;
    SchemeDiagnostics diag;
    integrator.advance(next, diag);
    return next;
}

Trajectory evolve(FieldState s, const ReactionTerm& r, double t_end, const SolverConfig& cfg, const Observer& observer)
{
    cfg.validate(r.lipschitz());
    Integrator integrator(cfg, homogeneous_rates(r), {});
    return run(std::move(s), t_end, cfg, integrator, observer);
}

PeriodicMedium PeriodicMedium::sinusoidal(double period, double diffusivity_amplitude, double rate_amplitude)
{
    if (!(period > 0.0)) fail(ErrorKind::InvalidInput, "period must be positive");
    if (!(std::abs(diffusivity_amplitude) < 1.0) || !(std::abs(rate_amplitude) < 1.0)) {
        fail(ErrorKind::InvalidInput, "sinusoidal amplitudes must be below 1 in magnitude");
    }
    PeriodicMedium m;
    m.period = period;
    const double k = 2.0 * std::numbers::pi / period;
    m.diffusivity = [=](double x) { return 1.0 + diffusivity_amplitude * std::sin(k * x); };
    m.reaction = [=](double x, double u) { return (1.0 + rate_amplitude * std::sin(k * x)) * u * (1.0 - u); };
    m.lipschitz = 1.0 + std::abs(rate_amplitude);
    return m;
}

Trajectory evolve_periodic(FieldState s, const PeriodicMedium& medium, double t_end, const SolverConfig& cfg,
                           const Observer& observer)
{
    cfg.validate(medium.lipschitz);
    for (int i = 0; i < 256; ++i) {
        const double a = medium.diffusivity(medium.period * i / 256.0);
        if (!(a > 0.0)) fail(ErrorKind::InvalidInput, "diffusivity must stay positive");
    }
    RateFn rates = [&medium](double, const FieldState& st, Eigen::VectorXd& out) {
        for (Eigen::Index i = 0; i < st.size(); ++i) {
            out(i) = medium.reaction(st.x(i), std::clamp(st.u(i), 0.0, 1.0));
        }
    };
    Integrator integrator(cfg, std::move(rates), medium.diffusivity);
    return run(std::move(s), t_end, cfg, integrator, observer);
}

} // namespace frontlab
