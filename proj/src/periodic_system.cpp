#include "ctlp/periodic_system.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ctlp/errors.hpp"

namespace ctlp {

PeriodicMatrixFunction PeriodicMatrixFunction::constant(const Eigen::MatrixXd& M,
                                                        double period) {
  return PeriodicMatrixFunction{M.rows(), M.cols(), period,
                                [M](double) { return M; }};
}

CtlpSystem make_system(PeriodicMatrixFunction A, PeriodicMatrixFunction B) {
  if (A.rows != A.cols) throw DimensionMismatch("make_system: A must be square");
  if (B.rows != A.rows) {
    throw DimensionMismatch("make_system: B row count must match A");
  }
  if (A.period != B.period) {
    throw DimensionMismatch("make_system: A and B must share the period");
  }
  for (double t : {0.31, 1.07, 2.9}) {
    for (const PeriodicMatrixFunction* f : {&A, &B}) {
      const Eigen::MatrixXd v = (*f)(t);
      if ((v - (*f)(t + f->period)).norm() > 1e-10 * (1.0 + v.norm())) {
        throw Misconfiguration(
            "make_system: evaluator is not periodic with the declared period");
      }
    }
  }
  CtlpSystem sys;
  sys.n = A.rows;
  sys.m = B.cols;
  sys.period = A.period;
  sys.A = std::move(A);
  sys.B = std::move(B);
  return sys;
}

void validate_cost(const CostSpec& cost, Eigen::Index n, Eigen::Index m,
                   double period) {
  if (cost.C.cols != n || cost.R.rows != m || cost.R.cols != m) {
    throw DimensionMismatch("validate_cost: cost dimensions do not match "
                            "the plant");
  }
  if (cost.period != period) {
    throw DimensionMismatch("validate_cost: cost and plant periods differ");
  }
  for (double frac : {0.0, 0.23, 0.61, 0.87}) {
    const double t = frac * period;
    const Eigen::MatrixXd R = cost.R(t);
    if ((R - R.transpose()).norm() > 1e-8 * (1.0 + R.norm())) {
      throw AsymmetricInput("validate_cost: R(t) asymmetric at t = " +
                            std::to_string(t));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
    if (es.eigenvalues().minCoeff() <= 1e-10) {
      throw SingularR("validate_cost: R(t) not positive definite at t = " +
                      std::to_string(t));
    }
  }
}

void validate_problem(const CtlpSystem& sys, const CostSpec& cost) {
  validate_cost(cost, sys.n, sys.m, sys.period);
}

Eigen::MatrixXd GainSchedule::eval(double t) const {
  const Eigen::VectorXd v = coeffs.eval(t);
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), m, n);
}

GainSchedule GainSchedule::constant(const Eigen::MatrixXd& K, double period) {
  FourierBasis basis{0, 2.0 * std::numbers::pi / period};
  Eigen::MatrixXd W(K.size(), 1);
  W.col(0) = Eigen::Map<const Eigen::VectorXd>(K.data(), K.size());
  return GainSchedule{FourierCoefficients{W, basis}, K.rows(), K.cols()};
}

namespace {

// One classical RK4 step of xdot = A(t)x + B(t)u(t, x).
Eigen::VectorXd rk4_step(const CtlpSystem& sys, const InputFn& input, double t,
                         const Eigen::VectorXd& x, double h) {
  const auto f = [&](double ti, const Eigen::VectorXd& xi) -> Eigen::VectorXd {
    return sys.A(ti) * xi + sys.B(ti) * input(ti, xi);
  };
  const Eigen::VectorXd k1 = f(t, x);
  const Eigen::VectorXd k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
  const Eigen::VectorXd k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
  const Eigen::VectorXd k4 = f(t + h, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

int grid_steps(double t0, double t1, double step) {
  return std::max(1, static_cast<int>(std::llround((t1 - t0) / step)));
}

}  // namespace

Trajectory integrate_trajectory(const CtlpSystem& sys, const InputFn& input,
                                const Eigen::VectorXd& x0, double t0, double t1,
                                double step) {
  if (!(step > 0.0) || !(t1 > t0)) {
    throw Misconfiguration("integrate_trajectory: need step > 0 and t1 > t0");
  }
  const int steps = grid_steps(t0, t1, step);
  const double h = (t1 - t0) / steps;
  Trajectory traj;
  traj.t.reserve(steps + 1);
  traj.x.reserve(steps + 1);
  traj.u.reserve(steps + 1);
  Eigen::VectorXd x = x0;
  for (int i = 0; i <= steps; ++i) {
    const double t = t0 + i * h;
    traj.t.push_back(t);
    traj.x.push_back(x);
    traj.u.push_back(input(t, x));
    if (!x.allFinite()) {
      throw NonFiniteState("integrate_trajectory: state non-finite at t = " +
                           std::to_string(t));
    }
    if (i < steps) x = rk4_step(sys, input, t, x, h);
  }
  return traj;
}

Trajectory integrate_trajectory(const CtlpSystem& sys,
                                const std::function<Eigen::VectorXd(double)>& u,
                                const Eigen::VectorXd& x0, double t0, double t1,
                                double step) {
  return integrate_trajectory(
      sys, [&u](double t, const Eigen::VectorXd&) { return u(t); }, x0, t0, t1,
      step);
}

Trajectory integrate_trajectory(const CtlpSystem& sys, const GainSchedule& gain,
                                const Eigen::VectorXd& x0, double t0, double t1,
                                double step) {
  return integrate_trajectory(
      sys,
      [&gain](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return -gain.eval(t) * x;
      },
      x0, t0, t1, step);
}

Trajectory SimulatedPlant::simulate(const InputFn& input,
                                    const Eigen::VectorXd& x0, double t0,
                                    double t1, double step) const {
  return integrate_trajectory(sys_, input, x0, t0, t1, step);
}

Eigen::MatrixXd state_transition(const CtlpSystem& sys, double t0, double t1,
                                 double step) {
  if (t1 < t0) throw Misconfiguration("state_transition: need t1 >= t0");
  Eigen::MatrixXd X = Eigen::MatrixXd::Identity(sys.n, sys.n);
  if (t1 == t0) return X;
  const int steps = grid_steps(t0, t1, step);
  const double h = (t1 - t0) / steps;
  for (int i = 0; i < steps; ++i) {
    const double t = t0 + i * h;
    const Eigen::MatrixXd k1 = sys.A(t) * X;
    const Eigen::MatrixXd k2 = sys.A(t + 0.5 * h) * (X + 0.5 * h * k1);
    const Eigen::MatrixXd k3 = sys.A(t + 0.5 * h) * (X + 0.5 * h * k2);
    const Eigen::MatrixXd k4 = sys.A(t + h) * (X + h * k3);
    X += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!X.allFinite()) {
      throw NonFiniteState("state_transition: non-finite at t = " +
                           std::to_string(t + h));
    }
  }
  return X;
}

CtlpSystem closed_loop(const CtlpSystem& sys, const GainSchedule& gain) {
  if (gain.n != sys.n || gain.m != sys.m) {
    throw DimensionMismatch("closed_loop: gain dimensions do not match plant");
  }
  const PeriodicMatrixFunction A = sys.A;
  const PeriodicMatrixFunction B = sys.B;
  PeriodicMatrixFunction Acl{
      sys.n, sys.n, sys.period,
      [A, B, gain](double t) -> Eigen::MatrixXd {
        return A(t) - B(t) * gain.eval(t);
      }};
  CtlpSystem out;
  out.A = std::move(Acl);
  out.B = sys.B;
  out.period = sys.period;
  out.n = sys.n;
  out.m = sys.m;
  return out;
}

Eigen::MatrixXd monodromy(const CtlpSystem& sys, double t0,
                          int steps_per_period) {
  return state_transition(sys, t0, t0 + sys.period,
                          sys.period / steps_per_period);
}

std::vector<double> characteristic_multipliers(
    const Eigen::MatrixXd& monodromy) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(monodromy, /*computeEigenvectors=*/false);
  std::vector<double> moduli(static_cast<std::size_t>(monodromy.rows()));
  for (Eigen::Index i = 0; i < monodromy.rows(); ++i) {
    moduli[static_cast<std::size_t>(i)] = std::abs(es.eigenvalues()[i]);
  }
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  return moduli;
}

bool is_stable(const CtlpSystem& sys, double t0, double tol,
               int steps_per_period) {
  const auto moduli = characteristic_multipliers(
      monodromy(sys, t0, steps_per_period));
  return moduli.front() < 1.0 - tol;
}

}  // namespace ctlp
