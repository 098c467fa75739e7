#pragma once

#include <Eigen/Dense>

#include <cassert>

namespace frontlab {

/// LU factorization of a tridiagonal matrix without pivoting (Thomas algorithm).
///
/// The implicit diffusion matrices assembled by the solver are strictly
/// diagonally dominant M-matrices, so the factorization is stable and reusable
/// across every step that keeps the same window and coefficients.
template <typename Scalar>
class TridiagonalFactor {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    TridiagonalFactor() = default;

    /// lower(i) couples row i to i-1 (lower(0) unused); upper(i) couples i to i+1.
    TridiagonalFactor(const Vector& lower, const Vector& diag, const Vector& upper)
    {
        factor(lower, diag, upper);
    }

    void factor(const Vector& lower, const Vector& diag, const Vector& upper)
    {
        const Eigen::Index n = diag.size();
        assert(lower.size() == n && upper.size() == n);
        lower_ = lower;
        inv_pivot_.resize(n);
        upper_prime_.resize(n);
        Scalar pivot = diag(0);
        inv_pivot_(0) = Scalar(1) / pivot;
        upper_prime_(0) = upper(0) * inv_pivot_(0);
        for (Eigen::Index i = 1; i < n; ++i) {
            pivot = diag(i) - lower(i) * upper_prime_(i - 1);
            inv_pivot_(i) = Scalar(1) / pivot;
            upper_prime_(i) = upper(i) * inv_pivot_(i);
        }
    }

    Eigen::Index size() const { return inv_pivot_.size(); }

    /// Solves in place.
    void solve_in_place(Vector& rhs) const
    {
        const Eigen::Index n = size();
        assert(rhs.size() == n);
        rhs(0) *= inv_pivot_(0);
        for (Eigen::Index i = 1; i < n; ++i) {
            rhs(i) = (rhs(i) - lower_(i) * rhs(i - 1)) * inv_pivot_(i);
        }
        for (Eigen::Index i = n - 2; i >= 0; --i) {
            rhs(i) -= upper_prime_(i) * rhs(i + 1);
        }
    }

    Vector solve(Vector rhs) const
    {
        solve_in_place(rhs);
        return rhs;
    }

private:
    Vector lower_;
    Vector inv_pivot_;
    Vector upper_prime_;
};

/// y = T x for a tridiagonal T stored as three diagonals.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> tridiagonal_multiply(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& lower,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& diag,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& upper,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x)
{
    const Eigen::Index n = diag.size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Scalar v = diag(i) * x(i);
        if (i > 0) v += lower(i) * x(i - 1);
        if (i + 1 < n) v += upper(i) * x(i + 1);
        y(i) = v;
    }
    return y;
}

} // namespace frontlab
