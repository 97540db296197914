#include "ctlp/fourier.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>

#include "ctlp/errors.hpp"

namespace ctlp {

double FourierBasis::period() const { return 2.0 * std::numbers::pi / omega; }

Eigen::VectorXd FourierBasis::eval(double t) const {
  Eigen::VectorXd f(size());
  f[0] = 1.0;
  for (int k = 1; k <= N; ++k) {
    f[2 * k - 1] = std::cos(k * omega * t);
    f[2 * k] = std::sin(k * omega * t);
  }
  return f;
}

FourierCoefficients coefficients_by_quadrature(
    const std::function<Eigen::VectorXd(double)>& f, const FourierBasis& basis,
    int quad_points) {
  if (quad_points < 8 * basis.size()) {
    throw InsufficientQuadrature(
        "coefficients_by_quadrature: need at least 8(2N+1) = " +
        std::to_string(8 * basis.size()) + " points, got " +
        std::to_string(quad_points));
  }
  const double T = basis.period();
  const double dt = T / quad_points;
  // For periodic integrands the trapezoid rule on [0, T) collapses to the
  // midpoint-free rectangle sum, which is spectrally accurate.
  const Eigen::VectorXd y0 = f(0.0);
  const Eigen::Index d = y0.size();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, basis.size());
  acc += y0 * basis.eval(0.0).transpose();
  for (int i = 1; i < quad_points; ++i) {
    const double t = i * dt;
    acc += f(t) * basis.eval(t).transpose();
  }
  acc *= dt / T;
  // Constant column already equals a0/2; harmonic columns need the factor 2.
  acc.rightCols(basis.size() - 1) *= 2.0;
  return FourierCoefficients{acc, basis};
}

FourierFit fit_least_squares(const std::vector<double>& times,
                             const Eigen::MatrixXd& values,
                             const FourierBasis& basis, double alpha) {
  const auto count = static_cast<Eigen::Index>(times.size());
  if (values.rows() != count) {
    throw DimensionMismatch("fit_least_squares: " + std::to_string(count) +
                            " sample times but " + std::to_string(values.rows()) +
                            " sample rows");
  }
  Eigen::MatrixXd U(count, basis.size());
  for (Eigen::Index i = 0; i < count; ++i) {
    U.row(i) = basis.eval(times[static_cast<std::size_t>(i)]).transpose();
  }
  const Eigen::MatrixXd gram = U.transpose() * U;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const double sigma = es.eigenvalues().minCoeff() / static_cast<double>(count);
  if (!(sigma >= alpha)) {
    throw RankDeficient("fit_least_squares: sigma_min(U^T U)/count = " +
                        std::to_string(sigma) + " below alpha = " +
                        std::to_string(alpha));
  }
  const Eigen::MatrixXd Wt = U.completeOrthogonalDecomposition().solve(values);
  return FourierFit{FourierCoefficients{Wt.transpose(), basis}, sigma};
}

}  // namespace ctlp
