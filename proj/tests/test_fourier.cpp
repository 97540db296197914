#include "ctlp/fourier.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "ctlp/errors.hpp"
#include "doctest.h"

using namespace ctlp;

namespace {
constexpr double kPi = std::numbers::pi;

Eigen::VectorXd scalar1(double v) {
  Eigen::VectorXd out(1);
  out << v;
  return out;
}
}  // namespace

TEST_SUITE("fourier") {

TEST_CASE("basis ordering and values") {
  const FourierBasis b{2, 1.0};
  CHECK(b.size() == 5);

  Eigen::VectorXd f0 = b.eval(0.0);
  CHECK(f0[0] == 1.0);
  CHECK(f0[1] == 1.0);
  CHECK(f0[2] == 0.0);
  CHECK(f0[3] == 1.0);
  CHECK(f0[4] == 0.0);

  // omega*t = pi/2: [1, 0, 1, -1, 0]
  Eigen::VectorXd fq = b.eval(kPi / 2.0);
  CHECK(std::abs(fq[0] - 1.0) < 1e-15);
  CHECK(std::abs(fq[1]) < 1e-15);
  CHECK(std::abs(fq[2] - 1.0) < 1e-15);
  CHECK(std::abs(fq[3] + 1.0) < 1e-15);
  CHECK(std::abs(fq[4]) < 1e-15);

  const FourierBasis constant{0, 3.0};
  CHECK(constant.eval(17.0).size() == 1);
  CHECK(constant.eval(17.0)[0] == 1.0);
}

TEST_CASE("quadrature coefficients of pure basis elements") {
  const FourierBasis b{2, 1.0};

  auto cosf = [](double t) { return scalar1(std::cos(t)); };
  FourierCoefficients wc = coefficients_by_quadrature(cosf, b, 256);
  Eigen::VectorXd expect(5);
  expect << 0, 1, 0, 0, 0;
  CHECK((wc.W.row(0).transpose() - expect).cwiseAbs().maxCoeff() < 1e-12);

  auto constf = [](double) { return scalar1(4.5); };
  FourierCoefficients wk = coefficients_by_quadrature(constf, b, 256);
  expect << 4.5, 0, 0, 0, 0;
  CHECK((wk.W.row(0).transpose() - expect).cwiseAbs().maxCoeff() < 1e-12);

  // sin^2(t) = 1/2 - cos(2t)/2
  auto sq = [](double t) { return scalar1(std::sin(t) * std::sin(t)); };
  FourierCoefficients ws = coefficients_by_quadrature(sq, b, 256);
  expect << 0.5, 0, 0, -0.5, 0;
  CHECK((ws.W.row(0).transpose() - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("quadrature reconstructs trigonometric polynomials") {
  const FourierBasis b{3, 2.0};
  Eigen::VectorXd w0(7);
  w0 << 0.3, -1.2, 0.8, 0.05, -0.4, 1.1, 0.9;
  auto f = [&](double t) { return scalar1(w0.dot(b.eval(t))); };
  FourierCoefficients fit = coefficients_by_quadrature(f, b, 8 * 7);
  CHECK((fit.W.row(0).transpose() - w0).norm() < 1e-8);

  CHECK_THROWS_AS(coefficients_by_quadrature(f, b, 8 * 7 - 1),
                  InsufficientQuadrature);
}

TEST_CASE("least squares recovers an exact series") {
  const FourierBasis b{2, 2.0 * kPi / 3.0};  // period 3
  Eigen::VectorXd w0(5);
  w0 << 1.0, 0.25, -0.5, 2.0, -1.25;

  const int count = 4 * 5;
  std::vector<double> times(count);
  Eigen::MatrixXd values(count, 1);
  for (int i = 0; i < count; ++i) {
    times[i] = 1.5 * 3.0 * i / count;
    values(i, 0) = w0.dot(b.eval(times[i]));
  }
  FourierFit fit = fit_least_squares(times, values, b);
  CHECK((fit.coeffs.W.row(0).transpose() - w0).norm() < 1e-8);
  CHECK(fit.sigma_min_scaled > 1e-3);

  SUBCASE("refitting fitted data is a projection") {
    Eigen::MatrixXd refit_values(count, 1);
    for (int i = 0; i < count; ++i) {
      refit_values(i, 0) = fit.coeffs.eval(times[i])[0];
    }
    FourierFit refit = fit_least_squares(times, refit_values, b);
    CHECK((refit.coeffs.W - fit.coeffs.W).norm() < 1e-10);
  }
}

TEST_CASE("least squares of constant samples") {
  const FourierBasis b{2, 1.0};
  std::vector<double> times;
  for (int i = 0; i < 24; ++i) times.push_back(0.37 * i);
  Eigen::MatrixXd values = Eigen::MatrixXd::Constant(24, 1, 5.0);
  FourierFit fit = fit_least_squares(times, values, b);
  CHECK(std::abs(fit.coeffs.W(0, 0) - 5.0) < 1e-10);
  CHECK(fit.coeffs.W.row(0).tail(4).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("under-determined fit is rank deficient") {
  const FourierBasis b{2, 1.0};
  std::vector<double> times{0.0, 0.5, 1.0};  // fewer than 2N+1 samples
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(3, 1);
  CHECK_THROWS_AS(fit_least_squares(times, values, b), RankDeficient);
}

TEST_CASE("basis orthogonality over one period") {
  for (int N : {1, 4, 8}) {
    const double T = 2.0;
    const FourierBasis b{N, 2.0 * kPi / T};
    const int q = 8192;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(b.size(), b.size());
    for (int i = 0; i < q; ++i) {
      const Eigen::VectorXd f = b.eval(i * T / q);
      G += f * f.transpose();
    }
    G *= T / q;
    Eigen::VectorXd diag(b.size());
    diag[0] = T;
    diag.tail(b.size() - 1).setConstant(T / 2.0);
    CHECK((G - Eigen::MatrixXd(diag.asDiagonal())).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("series error is nonincreasing as the order doubles") {
  const double T = 2.0 * kPi;
  auto f = [](double t) { return scalar1(std::exp(std::sin(t))); };
  double prev = 1e300;
  for (int N : {1, 2, 4, 8}) {
    const FourierBasis b{N, 2.0 * kPi / T};
    FourierCoefficients c =
        coefficients_by_quadrature(f, b, std::max(1024, 8 * (2 * N + 1)));
    double sup = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const double t = i * T / 2000;
      sup = std::max(sup, std::abs(c.eval(t)[0] - f(t)[0]));
    }
    CHECK(sup <= prev * (1.0 + 1e-12));
    prev = sup;
  }
  CHECK(prev < 1e-6);  // N=8 nails a smooth function
}

}  // TEST_SUITE
