#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace ctlp {

/// Truncated Fourier basis [1, cos(wt), sin(wt), ..., cos(Nwt), sin(Nwt)].
struct FourierBasis {
  int N = 0;
  double omega = 1.0;  // fundamental frequency in rad/s, 2*pi/period

  Eigen::Index size() const { return 2 * static_cast<Eigen::Index>(N) + 1; }
  double period() const;
  Eigen::VectorXd eval(double t) const;
};

/// Coefficient matrix W with one row per output component and 2N+1 columns;
/// the series value at t is W * basis.eval(t). The constant column stores
/// a0/2 directly, so evaluation needs no special case.
struct FourierCoefficients {
  Eigen::MatrixXd W;
  FourierBasis basis;

  Eigen::Index dim() const { return W.rows(); }
  Eigen::VectorXd eval(double t) const { return W * basis.eval(t); }
};

/// Fourier coefficients of a T-periodic vector function by composite
/// trapezoid quadrature on a uniform grid over one period.
FourierCoefficients coefficients_by_quadrature(
    const std::function<Eigen::VectorXd(double)>& f, const FourierBasis& basis,
    int quad_points);

struct FourierFit {
  FourierCoefficients coeffs;
  double sigma_min_scaled = 0.0;  // sigma_min(U^T U) / sample count
};

/// Over-determined least-squares fit of samples (t_i, y_i) onto the basis.
/// `values` holds one sample per row. Throws RankDeficient when the scaled
/// Gram matrix falls below alpha.
FourierFit fit_least_squares(const std::vector<double>& times,
                             const Eigen::MatrixXd& values,
                             const FourierBasis& basis, double alpha = 1e-6);

}  // namespace ctlp
