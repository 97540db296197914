#include "ctlp/pre_solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>

#include "ctlp/errors.hpp"
#include "ctlp/vectorize.hpp"

namespace ctlp {

namespace {

Eigen::MatrixXd riccati_rhs(const CtlpSystem& sys, const CostSpec& cost,
                            const Eigen::MatrixXd& P, double s) {
  const Eigen::MatrixXd A = sys.A(s);
  const Eigen::MatrixXd B = sys.B(s);
  const Eigen::MatrixXd C = cost.C(s);
  const Eigen::MatrixXd R = cost.R(s);
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() != Eigen::Success) {
    throw SingularR("riccati_rhs: R(t) not positive definite at t = " +
                    std::to_string(s));
  }
  const Eigen::MatrixXd BRB = B * llt.solve(B.transpose());
  Eigen::MatrixXd F = A.transpose() * P + P * A + C.transpose() * C - P * BRB * P;
  return 0.5 * (F + F.transpose());
}

}  // namespace

PreSolution solve_pre_backward(const CtlpSystem& sys, const CostSpec& cost,
                               const Eigen::MatrixXd& G, double s_f, double h,
                               const PreOptions& opts) {
  if (!(h > 0.0) || !(s_f > 0.0)) {
    throw Misconfiguration("solve_pre_backward: need h > 0 and s_f > 0");
  }
  validate_problem(sys, cost);
  if ((G - G.transpose()).norm() > 1e-8 * std::max(1.0, G.norm())) {
    throw AsymmetricInput("solve_pre_backward: G must be symmetric");
  }
  const int L = std::max(1, static_cast<int>(std::llround(s_f / h)));
  const double he = s_f / L;

  PreSolution sol;
  sol.h = he;
  sol.s_f = s_f;
  sol.final_value = 0.5 * (G + G.transpose());
  sol.s.resize(L + 1);
  sol.P.resize(L + 1);
  for (int k = 0; k <= L; ++k) sol.s[k] = k * he;

  // March in tau = s_f - s so the integrator always steps forward.
  Eigen::MatrixXd Q = sol.final_value;
  sol.P[L] = Q;
  for (int j = 0; j < L; ++j) {
    const double s = s_f - j * he;
    const auto f = [&](double si, const Eigen::MatrixXd& Pi) {
      return riccati_rhs(sys, cost, Pi, si);
    };
    const Eigen::MatrixXd k1 = f(s, Q);
    const Eigen::MatrixXd k2 = f(s - 0.5 * he, Q + 0.5 * he * k1);
    const Eigen::MatrixXd k3 = f(s - 0.5 * he, Q + 0.5 * he * k2);
    const Eigen::MatrixXd k4 = f(s - he, Q + he * k3);
    Q += (he / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    Q = 0.5 * (Q + Q.transpose()).eval();
    if (!Q.allFinite() || Q.norm() > opts.blowup_bound) {
      throw RiccatiBlowup("solve_pre_backward: ||P|| exceeded " +
                          std::to_string(opts.blowup_bound) + " at s = " +
                          std::to_string(s - he));
    }
    sol.P[L - 1 - j] = Q;
  }
  return sol;
}

Eigen::MatrixXd SteadyPeriodicSolution::P_at(double t) const {
  return vecs_inv(P_coeffs.eval(t));
}

SteadyPeriodicSolution steady_periodic_solution(const CtlpSystem& sys,
                                                const CostSpec& cost, double h,
                                                const SteadyOptions& opts) {
  if (!(opts.tol > 0.0)) {
    throw Misconfiguration("steady_periodic_solution: tol must be positive");
  }
  const double T = sys.period;
  const int max_periods =
      std::max(1, static_cast<int>(std::floor(opts.max_horizon / T)));

  // Extending the horizon by T and looking at [0, T] is the same as feeding
  // the previous section's left-edge value back in as the final value, since
  // the coefficients are T-periodic.
  const Eigen::MatrixXd G0 = Eigen::MatrixXd::Zero(sys.n, sys.n);
  std::vector<Eigen::MatrixXd> prev;  // section for horizon (k-1)T
  Eigen::MatrixXd Gk = G0;

  SteadyPeriodicSolution out;
  for (int k = 1; k <= max_periods; ++k) {
    PreSolution sec = solve_pre_backward(sys, cost, Gk, T, h,
                                         PreOptions{opts.blowup_bound});
    if (prev.empty()) prev.assign(sec.P.size(), G0);
    double sup_gap = 0.0;
    for (std::size_t i = 0; i < sec.P.size(); ++i) {
      sup_gap = std::max(sup_gap, (sec.P[i] - prev[i]).norm());
    }
    out.gaps_at_zero.push_back((sec.P.front() - prev.front()).norm());
    out.sup_gaps.push_back(sup_gap);
    out.s_f_used = k * T;
    prev = sec.P;
    Gk = sec.P.front();

    if (sup_gap < opts.tol) {
      const int Q = static_cast<int>(sec.P.size()) - 1;  // points per period
      out.s_grid.resize(Q);
      out.P_grid.resize(Q);
      for (int i = 0; i < Q; ++i) {
        out.s_grid[i] = sec.s[i];
        out.P_grid[i] = sec.P[i];
      }
      const FourierBasis basis{opts.fit_order, 2.0 * std::numbers::pi / T};
      const double he = sec.h;
      out.P_coeffs =
          coefficients_by_quadrature(
              [&](double t) {
                const int i = static_cast<int>(std::llround(t / he)) % Q;
                return vecs(out.P_grid[i]);
              },
              basis, Q)
              ;
      return out;
    }
  }
  throw NoConvergence(
      "steady_periodic_solution: no periodic section within horizon " +
      std::to_string(max_periods * T) +
      " (Assumption on stabilizability/detectability likely violated)");
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> hk_from_p(const CtlpSystem& sys,
                                                      const CostSpec& cost,
                                                      const Eigen::MatrixXd& P,
                                                      double t) {
  const Eigen::MatrixXd A = sys.A(t);
  const Eigen::MatrixXd B = sys.B(t);
  const Eigen::MatrixXd R = cost.R(t);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(R);
  if (!lu.isInvertible()) {
    throw SingularR("hk_from_p: R(t) singular at t = " + std::to_string(t));
  }
  Eigen::MatrixXd H = A.transpose() * P + P * A;
  Eigen::MatrixXd K = lu.solve(B.transpose() * P);
  return {std::move(H), std::move(K)};
}

GainSchedule gain_schedule_from_steady(const CtlpSystem& sys,
                                       const CostSpec& cost,
                                       const SteadyPeriodicSolution& steady,
                                       int fit_order) {
  const double T = sys.period;
  const FourierBasis basis{fit_order, 2.0 * std::numbers::pi / T};
  const int Q = static_cast<int>(steady.P_grid.size());
  const double he = T / Q;
  FourierCoefficients coeffs = coefficients_by_quadrature(
      [&](double t) {
        const int i = static_cast<int>(std::llround(t / he)) % Q;
        const auto hk = hk_from_p(sys, cost, steady.P_grid[i], t);
        return vec(hk.second);
      },
      basis, Q);
  return GainSchedule{std::move(coeffs), cost.R.rows, sys.n};
}

}  // namespace ctlp
