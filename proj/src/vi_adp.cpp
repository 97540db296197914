#include "ctlp/vi_adp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "ctlp/errors.hpp"
#include "ctlp/vectorize.hpp"

namespace ctlp {

double ViState::norm() const {
  return std::sqrt(W_H.squaredNorm() + W_K.squaredNorm());
}

Eigen::MatrixXd pinv_data_product(const DataMatrices& dm) {
  return dm.Theta.completeOrthogonalDecomposition().solve(dm.Gamma);
}

ViState vi_rhs(const ViState& state, double s,
               const Eigen::MatrixXd& pinv_product, const CostSpec& cost,
               const FourierBasis& basis, Eigen::Index n, Eigen::Index m) {
  const Eigen::VectorXd f = basis.eval(s);
  const Eigen::MatrixXd C = cost.C(s);
  const Eigen::MatrixXd R = cost.R(s);
  const Eigen::VectorXd kvec = state.W_K * f;
  const Eigen::MatrixXd K = Eigen::Map<const Eigen::MatrixXd>(kvec.data(), m, n);

  Eigen::VectorXd bracket = -(state.W_H * f) - vecs(C.transpose() * C) +
                            vecs(K.transpose() * R * K);
  const Eigen::VectorXd d = pinv_product * bracket;

  const Eigen::Index n1 = state.W_H.rows();
  const Eigen::Index n2 = state.W_K.rows();
  const Eigen::Index nb = basis.size();
  ViState out;
  out.W_H = Eigen::Map<const Eigen::MatrixXd>(d.data(), n1, nb);
  out.W_K = Eigen::Map<const Eigen::MatrixXd>(d.data() + n1 * nb, n2, nb);
  return out;
}

ViSolution solve_vi_backward(const DataMatrices& dm, const CostSpec& cost,
                             double s_f, double h, const ViOptions& opts) {
  if (!(h > 0.0) || !(s_f > 0.0)) {
    throw Misconfiguration("solve_vi_backward: need h > 0 and s_f > 0");
  }
  if (!(dm.sigma_scaled >= opts.alpha)) {
    throw RankDeficient(
        "solve_vi_backward: excitation diagnostic sigma_min(Theta^T Theta)/M "
        "= " +
        std::to_string(dm.sigma_scaled) + " below alpha = " +
        std::to_string(opts.alpha));
  }

  const Eigen::MatrixXd pinv_product = pinv_data_product(dm);

  ViSolution sol;
  sol.L = std::max(1, static_cast<int>(std::llround(s_f / h)));
  sol.h = s_f / sol.L;
  sol.s_f = s_f;
  sol.basis = dm.basis;
  sol.n = dm.n;
  sol.m = dm.m;
  sol.n1 = dm.n1;
  sol.n2 = dm.n2;
  sol.s.resize(sol.L + 1);
  sol.W.resize(sol.L + 1);
  for (int k = 0; k <= sol.L; ++k) sol.s[k] = k * sol.h;

  ViState W{Eigen::MatrixXd::Zero(dm.n1, dm.basis.size()),
            Eigen::MatrixXd::Zero(dm.n2, dm.basis.size())};
  sol.W[sol.L] = W;

  // March in tau = s_f - s; the rhs flips sign.
  const auto ftau = [&](double tau, const ViState& Wi) {
    ViState d = vi_rhs(Wi, s_f - tau, pinv_product, cost, dm.basis, dm.n, dm.m);
    d.W_H = -d.W_H;
    d.W_K = -d.W_K;
    return d;
  };
  const auto axpy = [](const ViState& a, double c, const ViState& b) {
    return ViState{a.W_H + c * b.W_H, a.W_K + c * b.W_K};
  };
  const double he = sol.h;
  for (int j = 0; j < sol.L; ++j) {
    const double tau = j * he;
    const ViState k1 = ftau(tau, W);
    const ViState k2 = ftau(tau + 0.5 * he, axpy(W, 0.5 * he, k1));
    const ViState k3 = ftau(tau + 0.5 * he, axpy(W, 0.5 * he, k2));
    const ViState k4 = ftau(tau + he, axpy(W, he, k3));
    W.W_H += (he / 6.0) * (k1.W_H + 2.0 * k2.W_H + 2.0 * k3.W_H + k4.W_H);
    W.W_K += (he / 6.0) * (k1.W_K + 2.0 * k2.W_K + 2.0 * k3.W_K + k4.W_K);
    if (!W.W_H.allFinite() || !W.W_K.allFinite() ||
        W.norm() > opts.blowup_bound) {
      throw Blowup("solve_vi_backward: ||W|| exceeded " +
                   std::to_string(opts.blowup_bound) + " at s = " +
                   std::to_string(s_f - (j + 1) * he) +
                   "; N, M or the excitation is likely insufficient");
    }
    sol.W[sol.L - 1 - j] = W;
  }
  return sol;
}

void reconstruct_gains(ViSolution& sol) {
  sol.H_hat.resize(sol.W.size());
  sol.K_hat.resize(sol.W.size());
  for (std::size_t k = 0; k < sol.W.size(); ++k) {
    const Eigen::VectorXd f = sol.basis.eval(sol.s[k]);
    sol.H_hat[k] = vecs_inv(sol.W[k].W_H * f);
    const Eigen::VectorXd kv = sol.W[k].W_K * f;
    sol.K_hat[k] = Eigen::Map<const Eigen::MatrixXd>(kv.data(), sol.m, sol.n);
  }
}

PeriodicityCheck detect_periodicity(const ViSolution& sol, double T,
                                    double tol) {
  if (!(sol.s_f > 2.0 * T)) {
    throw HorizonTooShort("detect_periodicity: need s_f > 2T, have s_f = " +
                          std::to_string(sol.s_f));
  }
  PeriodicityCheck out;
  out.offset = static_cast<int>(std::floor(T / sol.h));
  const int k_max = static_cast<int>(std::floor(T / sol.h));
  for (int k = 0; k <= k_max; ++k) {
    const auto& a = sol.W[static_cast<std::size_t>(k)];
    // One exact period later; T/h is generally not an integer, so compare
    // against the linear interpolant between the bracketing grid states.
    const double target = (sol.s[static_cast<std::size_t>(k)] + T) / sol.h;
    const int j = std::min(static_cast<int>(std::floor(target)), sol.L - 1);
    const double theta = target - j;
    const auto& b0 = sol.W[static_cast<std::size_t>(j)];
    const auto& b1 = sol.W[static_cast<std::size_t>(j) + 1];
    const Eigen::MatrixXd bH = (1.0 - theta) * b0.W_H + theta * b1.W_H;
    const Eigen::MatrixXd bK = (1.0 - theta) * b0.W_K + theta * b1.W_K;
    const double gap = std::sqrt((a.W_H - bH).squaredNorm() +
                                 (a.W_K - bK).squaredNorm());
    out.max_rel_gap = std::max(out.max_rel_gap, gap / (1.0 + a.norm()));
  }
  out.is_periodic = out.max_rel_gap < tol;
  return out;
}

Eigen::MatrixXd AdpResult::eval_H(double t) const {
  return vecs_inv(W_H_bar.eval(t));
}

Eigen::MatrixXd AdpResult::eval_K(double t) const {
  const Eigen::VectorXd kv = W_K_bar.eval(t);
  return Eigen::Map<const Eigen::MatrixXd>(kv.data(), m, n);
}

GainSchedule AdpResult::gain() const { return GainSchedule{W_K_bar, m, n}; }

int default_fit_window(double s_f, double h, int N, int L) {
  const int raw = static_cast<int>(std::floor(s_f / (3.0 * h)));
  const int lo = 2 * N + 2;
  const int hi = L / 2 - 1;
  return std::max(lo, std::min(raw, hi));
}

AdpResult fit_periodic_gains(const ViSolution& sol, int L_bar, double alpha) {
  if (!(L_bar > 2 * sol.basis.N + 1) || !(L_bar < sol.L / 2)) {
    throw BadWindow("fit_periodic_gains: need 2N+1 < L_bar < floor(L/2), got "
                    "L_bar = " +
                    std::to_string(L_bar) + " with N = " +
                    std::to_string(sol.basis.N) + ", L = " +
                    std::to_string(sol.L));
  }
  std::vector<double> times(static_cast<std::size_t>(L_bar) + 1);
  Eigen::MatrixXd V(L_bar + 1, sol.n1);
  Eigen::MatrixXd Wk(L_bar + 1, sol.n2);
  for (int k = 0; k <= L_bar; ++k) {
    times[static_cast<std::size_t>(k)] = sol.s[static_cast<std::size_t>(k)];
    const Eigen::VectorXd f = sol.basis.eval(sol.s[static_cast<std::size_t>(k)]);
    V.row(k) = (sol.W[static_cast<std::size_t>(k)].W_H * f).transpose();
    Wk.row(k) = (sol.W[static_cast<std::size_t>(k)].W_K * f).transpose();
  }
  FourierFit fitH = fit_least_squares(times, V, sol.basis, alpha);
  FourierFit fitK = fit_least_squares(times, Wk, sol.basis, alpha);

  AdpResult out;
  out.W_H_bar = std::move(fitH.coeffs);
  out.W_K_bar = std::move(fitK.coeffs);
  out.n = sol.n;
  out.m = sol.m;
  out.L_bar = L_bar;
  out.sigma_min_scaled = std::min(fitH.sigma_min_scaled, fitK.sigma_min_scaled);
  out.window_spans_period = sol.s[static_cast<std::size_t>(L_bar)] >
                            sol.basis.period();
  return out;
}

Eigen::MatrixXd monodromy_from_plant(const Plant& plant,
                                     const GainSchedule& gain, double t0,
                                     int steps_per_period) {
  const Eigen::Index n = plant.state_dim();
  const double T = plant.period();
  const InputFn feedback = [&gain](double t, const Eigen::VectorXd& x)
      -> Eigen::VectorXd { return -gain.eval(t) * x; };
  Eigen::MatrixXd Phi(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Trajectory traj = plant.simulate(
        feedback, Eigen::VectorXd::Unit(n, i), t0, t0 + T, T / steps_per_period);
    Phi.col(i) = traj.x.back();
  }
  return Phi;
}

AlgorithmRun run_adp(const Plant& plant, const CostSpec& cost,
                             const AlgorithmConfig& cfg) {
  validate_cost(cost, plant.state_dim(), plant.input_dim(), plant.period());
  AlgorithmRun run;
  const Eigen::VectorXd x_reset =
      cfg.x_reset.size() > 0 ? cfg.x_reset
                             : Eigen::VectorXd::Zero(plant.state_dim());

  const ExplorationSignal signal(plant.input_dim(), cfg.exploration);
  run.log = collect(plant, signal, cfg.dt, cfg.M, cfg.beta, x_reset,
                    cfg.substeps);
  run.diagnostics.reset_count = run.log.reset_count;

  run.data = build_data_matrices(run.log, cfg.N, cost);
  run.diagnostics.sigma_scaled = run.data.sigma_scaled;

  run.vi = solve_vi_backward(run.data, cost, cfg.s_f, cfg.h,
                             ViOptions{cfg.blowup_bound, cfg.alpha_theta});
  reconstruct_gains(run.vi);

  const double T = plant.period();
  if (cfg.s_f > 2.0 * T) {
    run.diagnostics.periodicity =
        detect_periodicity(run.vi, T, cfg.periodicity_tol);
    run.diagnostics.periodicity_checked = true;
  }

  const int L_bar =
      cfg.L_bar.value_or(default_fit_window(cfg.s_f, cfg.h, cfg.N, run.vi.L));
  run.result = fit_periodic_gains(run.vi, L_bar, cfg.alpha);

  const Eigen::MatrixXd Phi = monodromy_from_plant(
      plant, run.result.gain(), 0.0, cfg.stability_steps_per_period);
  run.diagnostics.multipliers = characteristic_multipliers(Phi);
  run.diagnostics.stable =
      run.diagnostics.multipliers.front() < 1.0 - cfg.stability_tol;
  return run;
}

}  // namespace ctlp
