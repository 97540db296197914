#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "ctlp/fourier.hpp"
#include "ctlp/periodic_system.hpp"

namespace ctlp {

/// Backward solution of the periodic Riccati equation on a uniform grid.
struct PreSolution {
  std::vector<double> s;           // ascending grid, s[k] = k*h
  std::vector<Eigen::MatrixXd> P;  // P[k] = P(s[k]); P.back() == G
  Eigen::MatrixXd final_value;
  double h = 0.0;
  double s_f = 0.0;
};

struct PreOptions {
  double blowup_bound = 1e8;
};

/// Integrates -Pdot = A^T P + P A + C^T C - P B R^-1 B^T P backward from
/// P(s_f) = G with classical RK4; every stage is symmetrized.
PreSolution solve_pre_backward(const CtlpSystem& sys, const CostSpec& cost,
                               const Eigen::MatrixXd& G, double s_f, double h,
                               const PreOptions& opts = {});

/// Steady symmetric periodic positive-semidefinite solution of the PRE,
/// obtained by extending the backward horizon one period at a time until the
/// section repeats to within tol.
struct SteadyPeriodicSolution {
  FourierCoefficients P_coeffs;      // rows: vecs(P*) components
  std::vector<double> s_grid;        // one period, [0, T)
  std::vector<Eigen::MatrixXd> P_grid;
  std::vector<double> sup_gaps;      // sup_s ||P_k(s) - P_{k-1}(s)|| per extension
  std::vector<double> gaps_at_zero;  // ||P_k(0) - P_{k-1}(0)|| per extension
  double s_f_used = 0.0;

  Eigen::MatrixXd P_at(double t) const;
};

struct SteadyOptions {
  double tol = 1e-6;
  double max_horizon = 500.0;
  int fit_order = 16;   // Fourier order used to interpolate the section
  double blowup_bound = 1e8;
};

SteadyPeriodicSolution steady_periodic_solution(const CtlpSystem& sys,
                                                const CostSpec& cost, double h,
                                                const SteadyOptions& opts = {});

/// H(s,t) = A^T(t) P + P A(t) and K(s,t) = R^-1(t) B^T(t) P for a fixed P.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> hk_from_p(const CtlpSystem& sys,
                                                      const CostSpec& cost,
                                                      const Eigen::MatrixXd& P,
                                                      double t);

/// Optimal gain schedule K*(t) = R^-1(t) B^T(t) P*(t) as a Fourier fit.
GainSchedule gain_schedule_from_steady(const CtlpSystem& sys,
                                       const CostSpec& cost,
                                       const SteadyPeriodicSolution& steady,
                                       int fit_order = 16);

}  // namespace ctlp
