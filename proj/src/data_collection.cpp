#include "ctlp/data_collection.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "ctlp/errors.hpp"
#include "ctlp/pre_solver.hpp"
#include "ctlp/vectorize.hpp"

namespace ctlp {

namespace {

// Uniform double in [lo, hi) from the raw 64-bit stream; kept explicit so the
// draw is identical across standard library implementations.
double uniform_from_bits(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace

ExplorationSignal::ExplorationSignal(Eigen::Index input_dim,
                                     const ExplorationConfig& cfg)
    : amplitude_(cfg.amplitude) {
  if (!(cfg.amplitude > 0.0) || !(cfg.freq_lo < cfg.freq_hi) ||
      cfg.num_sinusoids < 1) {
    throw Misconfiguration("ExplorationSignal: invalid configuration");
  }
  std::mt19937_64 rng(cfg.seed);
  freqs_.resize(input_dim, cfg.num_sinusoids);
  for (Eigen::Index i = 0; i < input_dim; ++i) {
    for (int j = 0; j < cfg.num_sinusoids; ++j) {
      freqs_(i, j) = uniform_from_bits(rng, cfg.freq_lo, cfg.freq_hi);
    }
  }
}

ExplorationSignal::ExplorationSignal(Eigen::MatrixXd frequencies,
                                     double amplitude)
    : freqs_(std::move(frequencies)), amplitude_(amplitude) {}

Eigen::VectorXd ExplorationSignal::eval(double t) const {
  Eigen::VectorXd u(freqs_.rows());
  for (Eigen::Index i = 0; i < freqs_.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < freqs_.cols(); ++j) {
      s += std::sin(freqs_(i, j) * t);
    }
    u[i] = amplitude_ * s;
  }
  return u;
}

int TrajectoryLog::valid_interval_count() const {
  int c = 0;
  for (const auto& iv : intervals) c += iv.ends_in_reset ? 0 : 1;
  return c;
}

void TrajectoryLog::write_csv(std::ostream& os) const {
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i) os << ",x" << (i + 1);
  for (Eigen::Index i = 0; i < m; ++i) os << ",u" << (i + 1);
  os << ",reset_flag\n";
  char buf[32];
  const auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
  };
  const double fine = dt / substeps;
  for (std::size_t j = 0; j < intervals.size(); ++j) {
    const auto& iv = intervals[j];
    const bool after_reset = j > 0 && intervals[j - 1].ends_in_reset;
    // Interior boundaries are shared with the previous interval; repeat the
    // left endpoint only at the start and just after a reset.
    const int first = (j == 0 || after_reset) ? 0 : 1;
    for (int i = first; i <= substeps; ++i) {
      put(iv.t_start + i * fine);
      for (Eigen::Index r = 0; r < n; ++r) {
        os << ',';
        put(iv.x(r, i));
      }
      for (Eigen::Index r = 0; r < m; ++r) {
        os << ',';
        put(iv.u(r, i));
      }
      os << ',' << ((i == 0 && after_reset) ? 1 : 0) << '\n';
    }
  }
}

TrajectoryLog collect(const Plant& plant, const ExplorationSignal& signal,
                      double dt, int M, double beta,
                      const Eigen::VectorXd& x_reset, int substeps) {
  if (substeps < 10) {
    throw Misconfiguration("collect: substeps must be at least 10");
  }
  if (!(beta > 0.0) || !(dt > 0.0) || M < 1) {
    throw Misconfiguration("collect: need beta > 0, dt > 0, M >= 1");
  }
  if (x_reset.norm() > beta) {
    throw Misconfiguration("collect: |x_reset| exceeds beta, every sample "
                           "would trigger a reset");
  }
  if (x_reset.size() != plant.state_dim()) {
    throw DimensionMismatch("collect: x_reset dimension does not match plant");
  }

  TrajectoryLog log;
  log.dt = dt;
  log.substeps = substeps;
  log.beta = beta;
  log.n = plant.state_dim();
  log.m = plant.input_dim();
  log.period = plant.period();
  log.intervals.reserve(static_cast<std::size_t>(M));

  const InputFn input = [&signal](double t, const Eigen::VectorXd&) {
    return signal.eval(t);
  };
  const double fine = dt / substeps;

  Eigen::VectorXd state = x_reset;
  for (int j = 0; j < M; ++j) {
    const double t0 = j * dt;
    const Trajectory traj =
        plant.simulate(input, state, t0, t0 + dt, fine);
    if (traj.x.size() != static_cast<std::size_t>(substeps) + 1) {
      throw DimensionMismatch(
          "collect: plant returned " + std::to_string(traj.x.size()) +
          " grid points for an interval of " + std::to_string(substeps) +
          " substeps");
    }
    SampledInterval iv;
    iv.t_start = t0;
    iv.x.resize(log.n, substeps + 1);
    iv.u.resize(log.m, substeps + 1);
    for (int i = 0; i <= substeps; ++i) {
      iv.x.col(i) = traj.x[static_cast<std::size_t>(i)];
      iv.u.col(i) = traj.u[static_cast<std::size_t>(i)];
    }
    state = iv.x.col(substeps);
    if (state.norm() > beta) {
      iv.ends_in_reset = true;
      ++log.reset_count;
      log.reset_times.push_back(t0 + dt);
      state = x_reset;
    }
    log.intervals.push_back(std::move(iv));
  }
  return log;
}

namespace {

// Row assembly shared by the solver-facing builder and the residual
// diagnostic; no excitation bookkeeping.
DataMatrices assemble_data_matrices(const TrajectoryLog& log, int N,
                                    const CostSpec& cost) {
  DataMatrices dm;
  dm.N = N;
  dm.n = log.n;
  dm.m = log.m;
  dm.n1 = sym_vec_size(log.n);
  dm.n2 = log.m * log.n;
  dm.basis = FourierBasis{N, 2.0 * std::numbers::pi / log.period};
  const Eigen::Index nb = dm.basis.size();
  const Eigen::Index cols = (dm.n1 + dm.n2) * nb;

  const int rows = log.valid_interval_count();
  dm.Theta.resize(rows, cols);
  dm.Gamma.resize(rows, dm.n1);
  const double fine = log.dt / log.substeps;

  Eigen::MatrixXd accH(dm.n1, nb), accK(dm.n2, nb);
  Eigen::VectorXd xu(dm.n2);
  int r = 0;
  for (const auto& iv : log.intervals) {
    if (iv.ends_in_reset) continue;
    accH.setZero();
    accK.setZero();
    for (int i = 0; i <= log.substeps; ++i) {
      const double w = (i == 0 || i == log.substeps) ? 0.5 : 1.0;
      const double t = iv.t_start + i * fine;
      const Eigen::VectorXd f = dm.basis.eval(t);
      const Eigen::VectorXd xq = quad_vec(iv.x.col(i));
      const Eigen::VectorXd ru = 2.0 * (cost.R(t) * iv.u.col(i));
      for (Eigen::Index a = 0; a < dm.n; ++a) {
        xu.segment(a * dm.m, dm.m) = iv.x(a, i) * ru;
      }
      accH.noalias() += w * xq * f.transpose();
      accK.noalias() += w * xu * f.transpose();
    }
    // Column-major flattening puts the basis-major Kronecker blocks in the
    // order the coefficient vectors vec(W) use.
    dm.Theta.row(r).head(dm.n1 * nb) =
        fine * Eigen::Map<const Eigen::VectorXd>(accH.data(), accH.size());
    dm.Theta.row(r).tail(dm.n2 * nb) =
        fine * Eigen::Map<const Eigen::VectorXd>(accK.data(), accK.size());
    dm.Gamma.row(r) =
        (quad_vec(iv.x.col(log.substeps)) - quad_vec(iv.x.col(0))).transpose();
    ++r;
  }
  return dm;
}

}  // namespace

DataMatrices build_data_matrices(const TrajectoryLog& log, int N,
                                 const CostSpec& cost) {
  DataMatrices dm = assemble_data_matrices(log, N, cost);
  if (dm.Theta.rows() <= dm.Theta.cols()) {
    throw TooFewRows("build_data_matrices: " + std::to_string(dm.Theta.rows()) +
                     " valid data rows but " + std::to_string(dm.Theta.cols()) +
                     " unknowns; collect more samples or lower N");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dm.Theta.transpose() *
                                                    dm.Theta);
  dm.sigma_scaled = es.eigenvalues().minCoeff() / dm.Theta.rows();
  return dm;
}

double verify_data_equation(const TrajectoryLog& log, const CtlpSystem& sys,
                            const CostSpec& cost, const Eigen::MatrixXd& P,
                            int N_check) {
  // Diagnostic only: the residual evaluates the stacked equation without
  // solving it, so the full row-count requirement does not apply.
  if (log.valid_interval_count() < 1) {
    throw TooFewRows("verify_data_equation: no valid data intervals");
  }
  const DataMatrices dm = assemble_data_matrices(log, N_check, cost);
  const int q = std::max(512, 8 * static_cast<int>(dm.basis.size()));
  const FourierCoefficients WH = coefficients_by_quadrature(
      [&](double t) { return vecs(hk_from_p(sys, cost, P, t).first); },
      dm.basis, q);
  const FourierCoefficients WK = coefficients_by_quadrature(
      [&](double t) { return vec(hk_from_p(sys, cost, P, t).second); },
      dm.basis, q);
  Eigen::VectorXd w(dm.Theta.cols());
  w.head(dm.n1 * dm.basis.size()) =
      Eigen::Map<const Eigen::VectorXd>(WH.W.data(), WH.W.size());
  w.tail(dm.n2 * dm.basis.size()) =
      Eigen::Map<const Eigen::VectorXd>(WK.W.data(), WK.W.size());
  const Eigen::VectorXd rhs = dm.Gamma * vecs(P);
  const double num = (dm.Theta * w - rhs).norm();
  const double den = rhs.norm();
  if (den == 0.0) return num == 0.0 ? 0.0 : num;
  return num / den;
}

}  // namespace ctlp
