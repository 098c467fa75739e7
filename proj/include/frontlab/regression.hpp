#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>

namespace frontlab {

template <typename Scalar>
struct LineFit {
    Scalar slope{};
    Scalar intercept{};
    Scalar r_squared{};
    Scalar slope_stderr{};
    Scalar residual_rms{};
};

/// Ordinary least squares y = slope * x + intercept.
template <typename Scalar>
LineFit<Scalar> fit_line(std::span<const Scalar> x, std::span<const Scalar> y)
{
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::Map<const Eigen::Array<Scalar, Eigen::Dynamic, 1>> xs(x.data(), n);
    Eigen::Map<const Eigen::Array<Scalar, Eigen::Dynamic, 1>> ys(y.data(), n);
    const Scalar xm = xs.mean();
    const Scalar ym = ys.mean();
    const auto dx = (xs - xm).eval();
    const auto dy = (ys - ym).eval();
    const Scalar sxx = dx.square().sum();
    const Scalar sxy = (dx * dy).sum();
    const Scalar syy = dy.square().sum();

    LineFit<Scalar> fit;
    fit.slope = sxy / sxx;
    fit.intercept = ym - fit.slope * xm;
    const Scalar ssr = (dy - fit.slope * dx).square().sum();
    fit.r_squared = syy > Scalar(0) ? Scalar(1) - ssr / syy : Scalar(1);
    fit.residual_rms = std::sqrt(ssr / Scalar(n));
    fit.slope_stderr = n > 2 ? std::sqrt(ssr / Scalar(n - 2) / sxx) : Scalar(0);
    return fit;
}

/// Least squares with an explicit design matrix; columns are regressors.
template <typename Derived, typename Vec>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> least_squares(
    const Eigen::MatrixBase<Derived>& design, const Eigen::MatrixBase<Vec>& target)
{
    return design.colPivHouseholderQr().solve(target);
}

} // namespace frontlab
