#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ctlp/fourier.hpp"
#include "ctlp/periodic_system.hpp"

namespace ctlp {

/// Sum-of-sinusoids exploration input. Frequencies are drawn once from the
/// seed, uniformly over [freq_lo, freq_hi), and logged for reproducibility.
struct ExplorationConfig {
  double amplitude = 0.2;
  int num_sinusoids = 100;
  double freq_lo = -30.0;
  double freq_hi = 30.0;
  std::uint64_t seed = 1;
};

class ExplorationSignal {
 public:
  ExplorationSignal(Eigen::Index input_dim, const ExplorationConfig& cfg);
  /// Explicit frequency table (one row per input channel); used by tests.
  ExplorationSignal(Eigen::MatrixXd frequencies, double amplitude);

  Eigen::VectorXd eval(double t) const;
  const Eigen::MatrixXd& frequencies() const { return freqs_; }
  double amplitude() const { return amplitude_; }

 private:
  Eigen::MatrixXd freqs_;
  double amplitude_ = 0.0;
};

/// One sampling interval [t_j, t_j + dt] with its RK4 fine grid.
struct SampledInterval {
  double t_start = 0.0;
  Eigen::MatrixXd x;  // n x (substeps+1)
  Eigen::MatrixXd u;  // m x (substeps+1)
  // Right endpoint triggered a state reset; the interval is excluded from
  // data rows because its terminal sample is discontinuous.
  bool ends_in_reset = false;
};

struct TrajectoryLog {
  double dt = 0.0;
  int substeps = 0;
  double beta = 0.0;
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  double period = 0.0;  // plant period, fixes the Fourier basis frequency
  std::vector<SampledInterval> intervals;
  int reset_count = 0;
  std::vector<double> reset_times;

  int valid_interval_count() const;
  /// Columnar CSV: t, x1..xn, u1..um, reset_flag.
  void write_csv(std::ostream& os) const;
};

/// Applies the exploration input to the plant over M sampling intervals of
/// length dt, resetting the state to x_reset whenever |x(t_j)| > beta at a
/// sampling instant.
TrajectoryLog collect(const Plant& plant, const ExplorationSignal& signal,
                      double dt, int M, double beta,
                      const Eigen::VectorXd& x_reset, int substeps = 20);

/// Data matrices of the single linear equation relating sampled state energy
/// differences to the Fourier coefficients of H and K.
struct DataMatrices {
  Eigen::MatrixXd Theta;  // rows x (n1+n2)(2N+1)
  Eigen::MatrixXd Gamma;  // rows x n1
  int N = 0;
  Eigen::Index n = 0, m = 0;
  Eigen::Index n1 = 0, n2 = 0;
  double sigma_scaled = 0.0;  // sigma_min(Theta^T Theta) / row count
  FourierBasis basis;
};

DataMatrices build_data_matrices(const TrajectoryLog& log, int N,
                                 const CostSpec& cost);

/// Model-based diagnostic: relative residual of the data equation when the
/// coefficient blocks are the quadrature Fourier coefficients of
/// A^T(t)P + PA(t) and R^-1(t)B^T(t)P. Test-only; requires the model.
double verify_data_equation(const TrajectoryLog& log, const CtlpSystem& sys,
                            const CostSpec& cost, const Eigen::MatrixXd& P,
                            int N_check);

}  // namespace ctlp
