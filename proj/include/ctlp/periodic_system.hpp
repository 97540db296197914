#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "ctlp/fourier.hpp"

namespace ctlp {

/// T-periodic matrix-valued function of time.
struct PeriodicMatrixFunction {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  double period = 0.0;
  std::function<Eigen::MatrixXd(double)> fn;

  Eigen::MatrixXd operator()(double t) const { return fn(t); }

  static PeriodicMatrixFunction constant(const Eigen::MatrixXd& M,
                                         double period);
};

/// Continuous-time linear periodic plant xdot = A(t)x + B(t)u.
struct CtlpSystem {
  PeriodicMatrixFunction A;  // n x n
  PeriodicMatrixFunction B;  // n x m
  double period = 0.0;
  Eigen::Index n = 0;
  Eigen::Index m = 0;
};

/// Builds a system from A and B, checking dimension and period consistency
/// and spot-checking T-periodicity of the evaluators.
CtlpSystem make_system(PeriodicMatrixFunction A, PeriodicMatrixFunction B);

/// Quadratic cost weights: integrand |C(t)x|^2 + u^T R(t) u with R(t) SPD.
struct CostSpec {
  PeriodicMatrixFunction C;  // r x n
  PeriodicMatrixFunction R;  // m x m
  double period = 0.0;
};

/// Sampled consistency check of cost weights against plant dimensions:
/// shapes, shared period, and positive definiteness of R(t) at a handful of
/// times.
void validate_cost(const CostSpec& cost, Eigen::Index n, Eigen::Index m,
                   double period);
void validate_problem(const CtlpSystem& sys, const CostSpec& cost);

/// Periodic feedback gain K(t), stored as Fourier coefficients of vec(K(t)).
struct GainSchedule {
  FourierCoefficients coeffs;  // m*n rows
  Eigen::Index m = 0;
  Eigen::Index n = 0;

  Eigen::MatrixXd eval(double t) const;
  static GainSchedule constant(const Eigen::MatrixXd& K, double period);
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> u;
};

/// Input law u = f(t, x); covers both open-loop signals and state feedback.
using InputFn = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

/// Simulation-only access to a plant. Learning code is written against this
/// interface and never sees the system matrices.
class Plant {
 public:
  virtual ~Plant() = default;
  virtual Eigen::Index state_dim() const = 0;
  virtual Eigen::Index input_dim() const = 0;
  virtual double period() const = 0;
  virtual Trajectory simulate(const InputFn& input, const Eigen::VectorXd& x0,
                              double t0, double t1, double step) const = 0;
};

/// Plant backed by RK4 integration of a CtlpSystem.
class SimulatedPlant final : public Plant {
 public:
  explicit SimulatedPlant(CtlpSystem sys) : sys_(std::move(sys)) {}
  Eigen::Index state_dim() const override { return sys_.n; }
  Eigen::Index input_dim() const override { return sys_.m; }
  double period() const override { return sys_.period; }
  Trajectory simulate(const InputFn& input, const Eigen::VectorXd& x0,
                      double t0, double t1, double step) const override;

 private:
  CtlpSystem sys_;
};

/// Classical fixed-step RK4 integration of the plant on a uniform grid.
/// The step is adjusted to the nearest value that divides [t0, t1] evenly.
Trajectory integrate_trajectory(const CtlpSystem& sys, const InputFn& input,
                                const Eigen::VectorXd& x0, double t0, double t1,
                                double step);
Trajectory integrate_trajectory(const CtlpSystem& sys,
                                const std::function<Eigen::VectorXd(double)>& u,
                                const Eigen::VectorXd& x0, double t0, double t1,
                                double step);
Trajectory integrate_trajectory(const CtlpSystem& sys, const GainSchedule& gain,
                                const Eigen::VectorXd& x0, double t0, double t1,
                                double step);

/// State transition matrix Phi(t1, t0) of the unforced system.
Eigen::MatrixXd state_transition(const CtlpSystem& sys, double t0, double t1,
                                 double step);

/// Closed-loop system under u = -K(t)x.
CtlpSystem closed_loop(const CtlpSystem& sys, const GainSchedule& gain);

/// Monodromy matrix Phi(t0 + T, t0).
Eigen::MatrixXd monodromy(const CtlpSystem& sys, double t0,
                          int steps_per_period = 4096);

/// Moduli of the monodromy eigenvalues, sorted descending.
std::vector<double> characteristic_multipliers(const Eigen::MatrixXd& monodromy);

/// True iff all characteristic multipliers satisfy |mu| < 1 - tol.
bool is_stable(const CtlpSystem& sys, double t0 = 0.0, double tol = 1e-6,
               int steps_per_period = 4096);

}  // namespace ctlp
