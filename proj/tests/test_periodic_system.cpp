#include "ctlp/periodic_system.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "ctlp/errors.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace ctlp;
namespace tt = ctlp::testing;

namespace {
constexpr double kPi = std::numbers::pi;

Eigen::VectorXd zero_input1(double) { return Eigen::VectorXd::Zero(1); }

CtlpSystem scalar_sin_system() {
  // xdot = sin(t) x, period 2*pi; x(t) = x0 exp(1 - cos t).
  PeriodicMatrixFunction A{1, 1, 2.0 * kPi, [](double t) {
                             Eigen::MatrixXd M(1, 1);
                             M << std::sin(t);
                             return M;
                           }};
  Eigen::MatrixXd B1(1, 1);
  B1 << 1.0;
  return make_system(std::move(A),
                     PeriodicMatrixFunction::constant(B1, 2.0 * kPi));
}

}  // namespace

TEST_SUITE("periodic_system") {

TEST_CASE("equilibrium stays put") {
  auto [sys, cost] = tt::scalar_system(0.0, 1.0, 1.0, 1.0);
  Eigen::VectorXd x0(1);
  x0 << 1.0;
  const Trajectory traj =
      integrate_trajectory(sys, zero_input1, x0, 0.0, 2.0, 0.01);
  for (const auto& x : traj.x) CHECK(x[0] == 1.0);
}

TEST_CASE("polynomial dynamics are integrated exactly") {
  Eigen::MatrixXd A(2, 2), B(2, 1);
  A << 0, 1, 0, 0;
  B << 0, 0;
  auto [sys, cost] = tt::lti_system(A, B, 1.0);
  Eigen::VectorXd x0(2);
  x0 << 0, 1;
  const Trajectory traj =
      integrate_trajectory(sys, zero_input1, x0, 0.0, 1.0, 1e-3);
  CHECK(std::abs(traj.x.back()[0] - 1.0) <= 1e-10);
  CHECK(std::abs(traj.x.back()[1] - 1.0) <= 1e-10);
}

TEST_CASE("scalar linear time-varying solution") {
  const CtlpSystem sys = scalar_sin_system();
  Eigen::VectorXd x0(1);
  x0 << 1.0;
  const Trajectory traj =
      integrate_trajectory(sys, zero_input1, x0, 0.0, 2.0 * kPi, 1e-3);
  for (std::size_t i = 0; i < traj.t.size(); i += 500) {
    const double expect = std::exp(1.0 - std::cos(traj.t[i]));
    CHECK(std::abs(traj.x[i][0] - expect) <= 1e-8);
  }
  CHECK(std::abs(traj.x.back()[0] - 1.0) <= 1e-8);
}

TEST_CASE("transition matrix of a constant system matches the exponential") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd A = tt::random_matrix(rng, 3, 3, 1.0);
  auto [sys, cost] = tt::lti_system(A, Eigen::MatrixXd::Zero(3, 1), 2.0);
  const double tau = 0.7;
  const Eigen::MatrixXd Phi = state_transition(sys, 0.2, 0.2 + tau, 1e-3);
  const Eigen::MatrixXd expect = (A * tau).exp();
  CHECK((Phi - expect).norm() <= 1e-8);

  CHECK((state_transition(sys, 0.4, 0.4, 1e-3) -
         Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);

  SUBCASE("halving the step cuts the error about sixteen-fold") {
    const double e1 = (state_transition(sys, 0.0, 1.0, 0.02) - A.exp()).norm();
    const double e2 = (state_transition(sys, 0.0, 1.0, 0.01) - A.exp()).norm();
    CHECK(e1 / e2 > 10.0);
    CHECK(e1 / e2 < 24.0);
  }
}

TEST_CASE("transition over a full period of the sine scalar is one") {
  const CtlpSystem sys = scalar_sin_system();
  const Eigen::MatrixXd Phi = state_transition(sys, 0.0, 2.0 * kPi, 1e-3);
  CHECK(std::abs(Phi(0, 0) - 1.0) <= 1e-8);
}

TEST_CASE("semigroup property") {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd A0 = tt::random_matrix(rng, 3, 3, 0.8);
  const Eigen::MatrixXd A1 = tt::random_matrix(rng, 3, 3, 0.5);
  const Eigen::MatrixXd A2 = tt::random_matrix(rng, 3, 3, 0.5);
  const double T = 2.0;
  PeriodicMatrixFunction A{3, 3, T, [=](double t) -> Eigen::MatrixXd {
                             const double w = 2.0 * kPi / 2.0;
                             return A0 + A1 * std::cos(w * t) +
                                    A2 * std::sin(w * t);
                           }};
  CtlpSystem sys = make_system(
      std::move(A), PeriodicMatrixFunction::constant(
                        Eigen::MatrixXd::Zero(3, 1), T));
  const double t0 = 0.3, t1 = 0.9, t2 = 1.7;
  const Eigen::MatrixXd full = state_transition(sys, t0, t2, 1e-3);
  const Eigen::MatrixXd split = state_transition(sys, t1, t2, 1e-3) *
                                state_transition(sys, t0, t1, 1e-3);
  CHECK((full - split).norm() <= 1e-7);
}

TEST_CASE("multipliers of a diagonal constant system") {
  Eigen::MatrixXd A(2, 2);
  A << -1, 0, 0, -2;
  auto [sys, cost] = tt::lti_system(A, Eigen::MatrixXd::Zero(2, 1), 1.0);
  const auto moduli = characteristic_multipliers(monodromy(sys, 0.0));
  CHECK(moduli[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
  CHECK(moduli[1] == doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
  CHECK(is_stable(sys));
}

TEST_CASE("marginal sine scalar is not stable") {
  const CtlpSystem sys = scalar_sin_system();
  const auto moduli = characteristic_multipliers(monodromy(sys, 0.0));
  CHECK(moduli[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_FALSE(is_stable(sys));
}

TEST_CASE("multipliers do not depend on the section time") {
  std::mt19937_64 rng(19);
  const Eigen::MatrixXd A0 = tt::random_matrix(rng, 3, 3, 0.7);
  const Eigen::MatrixXd A1 = tt::random_matrix(rng, 3, 3, 0.4);
  const double T = 1.5;
  PeriodicMatrixFunction A{3, 3, T, [=](double t) -> Eigen::MatrixXd {
                             return A0 + A1 * std::cos(2.0 * kPi * t / T);
                           }};
  CtlpSystem sys = make_system(
      std::move(A), PeriodicMatrixFunction::constant(
                        Eigen::MatrixXd::Zero(3, 1), T));
  const auto m0 = characteristic_multipliers(monodromy(sys, 0.0, 8192));
  const auto m1 = characteristic_multipliers(monodromy(sys, 0.37 * T, 8192));
  for (std::size_t i = 0; i < m0.size(); ++i) {
    CHECK(std::abs(m0[i] - m1[i]) <= 1e-6);
  }
}

TEST_CASE("gain schedules and closed loops") {
  Eigen::MatrixXd K(1, 2);
  K << 3.0, 4.0;
  const GainSchedule gain = GainSchedule::constant(K, 2.0);
  CHECK((gain.eval(0.7) - K).norm() == 0.0);

  Eigen::MatrixXd A(2, 2), B(2, 1);
  A << 0, 1, 0, 0;
  B << 0, 1;
  auto [sys, cost] = tt::lti_system(A, B, 2.0);
  const CtlpSystem closed = closed_loop(sys, gain);
  // A - B K = [[0, 1], [-3, -4]], eigenvalues -1 and -3.
  const auto moduli = characteristic_multipliers(monodromy(closed, 0.0));
  CHECK(moduli[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-7));
  CHECK(moduli[1] == doctest::Approx(std::exp(-6.0)).epsilon(1e-5));
  CHECK(is_stable(closed));
}

TEST_CASE("non-finite states are reported") {
  PeriodicMatrixFunction A{1, 1, 1.0, [](double) {
                             Eigen::MatrixXd M(1, 1);
                             M << 1e8;
                             return M;
                           }};
  CtlpSystem sys = make_system(std::move(A),
                               PeriodicMatrixFunction::constant(
                                   Eigen::MatrixXd::Zero(1, 1), 1.0));
  Eigen::VectorXd x0(1);
  x0 << 1.0;
  CHECK_THROWS_AS(
      integrate_trajectory(sys, zero_input1, x0, 0.0, 100.0, 0.1),
      NonFiniteState);
}

}  // TEST_SUITE
