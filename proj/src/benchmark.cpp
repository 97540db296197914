#include "ctlp/benchmark.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>

#include "ctlp/errors.hpp"
#include "ctlp/io.hpp"

namespace ctlp {

namespace {
constexpr std::uint64_t kTable1Seed = 1;
}

std::pair<CtlpSystem, CostSpec> build_triple_pendulum(double zeta) {
  const double T = 2.0 * std::numbers::pi;

  Eigen::Matrix3d A22;
  A22 << -1, 0, 0, 1, -1, 0, 0, 1, -1;
  A22 *= 0.5;
  Eigen::Matrix3d B2;
  B2 << 1, -1, 0, -1, 2, -1, 0, -1, 2;

  PeriodicMatrixFunction A{
      6, 6, T,
      [A22, zeta](double t) -> Eigen::MatrixXd {
        const double g = 1.0 + 2.0 * std::cos(t);
        Eigen::Matrix3d A21;
        A21 << g - 3.0, 3.0 - g, -1.0,
               4.0 - g, 2.0 * (g - 3.0), 3.0 - g,
               -1.0, 4.0 - g, g - 3.0;
        A21 += zeta * (1.0 + std::sin(3.0 * t)) * Eigen::Matrix3d::Identity();
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(6, 6);
        out.topRightCorner(3, 3) = Eigen::Matrix3d::Identity();
        out.bottomLeftCorner(3, 3) = A21;
        out.bottomRightCorner(3, 3) = A22;
        return out;
      }};
  Eigen::MatrixXd Bmat = Eigen::MatrixXd::Zero(6, 3);
  Bmat.bottomRows(3) = B2;
  PeriodicMatrixFunction B = PeriodicMatrixFunction::constant(Bmat, T);

  CtlpSystem sys = make_system(std::move(A), std::move(B));
  CostSpec cost{
      PeriodicMatrixFunction::constant(Eigen::MatrixXd::Identity(6, 6), T),
      PeriodicMatrixFunction::constant(Eigen::MatrixXd::Identity(3, 3), T), T};
  return {std::move(sys), std::move(cost)};
}

GainSchedule mbplq_controller(const CtlpSystem& nominal, const CostSpec& cost,
                              double h, int fit_order) {
  SteadyOptions opts;
  opts.tol = 1e-7;
  opts.fit_order = fit_order;
  const SteadyPeriodicSolution steady =
      steady_periodic_solution(nominal, cost, h, opts);
  return gain_schedule_from_steady(nominal, cost, steady, fit_order);
}

double evaluate_cost(const CtlpSystem& sys, const CostSpec& cost,
                     const GainSchedule& gain, const Eigen::VectorXd& x0,
                     double t0, const CostOptions& opts) {
  const CtlpSystem closed = closed_loop(sys, gain);
  const auto moduli = characteristic_multipliers(monodromy(closed, t0));
  const double rho = moduli.front();
  if (!(rho < 1.0 - opts.stability_tol)) {
    throw DivergentCost("evaluate_cost: closed loop not stable, top "
                        "multiplier modulus " + std::to_string(rho));
  }
  const double T = sys.period;
  const double decay = rho * rho;  // per-period decay of the cost integrand

  double J = 0.0;
  Eigen::VectorXd x = x0;
  double t = t0;
  for (int p = 0; p < opts.max_periods; ++p) {
    const Trajectory traj = integrate_trajectory(sys, gain, x, t, t + T,
                                                 opts.step);
    double inc = 0.0;
    const std::size_t pts = traj.t.size();
    for (std::size_t i = 0; i < pts; ++i) {
      const double w = (i == 0 || i + 1 == pts) ? 0.5 : 1.0;
      const double ti = traj.t[i];
      const Eigen::VectorXd cx = cost.C(ti) * traj.x[i];
      const Eigen::VectorXd& u = traj.u[i];
      inc += w * (cx.squaredNorm() + u.dot(cost.R(ti) * u));
    }
    inc *= (traj.t[1] - traj.t[0]);
    J += inc;
    x = traj.x.back();
    t += T;
    const double tail = inc * decay / (1.0 - decay);
    if (tail <= opts.rel_tail_tol * std::max(J, 1e-300)) return J;
  }
  throw NoConvergence("evaluate_cost: tail estimate did not fall below the "
                      "tolerance within the period cap");
}

std::vector<TrialConfig> table1_trials() {
  ExplorationConfig expl;
  expl.amplitude = 0.2;
  expl.num_sinusoids = 100;
  expl.freq_lo = -30.0;
  expl.freq_hi = 30.0;
  expl.seed = kTable1Seed;

  const auto adp = [&](std::string label, int N, int M, double s_f) {
    TrialConfig t;
    t.label = std::move(label);
    t.controller = TrialConfig::Controller::Adp;
    t.N = N;
    t.M = M;
    t.s_f = s_f;
    t.zeta = 1.0;
    t.exploration = expl;
    return t;
  };
  const auto mbplq = [&](std::string label, double zeta) {
    TrialConfig t;
    t.label = std::move(label);
    t.controller = TrialConfig::Controller::Mbplq;
    t.zeta = zeta;
    return t;
  };
  return {
      adp("trial1", 6, 800, 40.0), adp("trial2", 3, 800, 40.0),
      adp("trial3", 1, 800, 40.0), adp("trial4", 6, 800, 12.0),
      adp("trial5", 6, 800, 8.0),  adp("trial6", 6, 400, 40.0),
      mbplq("trial7", 0.1),        mbplq("trial8", 1.0),
  };
}

double max_gain_error(const std::function<Eigen::MatrixXd(double)>& K1,
                      const std::function<Eigen::MatrixXd(double)>& K2,
                      double period, int grid_points) {
  double err = 0.0;
  for (int i = 0; i < grid_points; ++i) {
    const double t = i * period / grid_points;
    err = std::max(err, (K1(t) - K2(t)).norm());
  }
  return err;
}

namespace {

struct Reference {
  CtlpSystem sys;
  CostSpec cost;
  SteadyPeriodicSolution steady;
};

void write_gain_trajectory(const std::string& path, const Reference& ref,
                           const std::function<Eigen::MatrixXd(double)>& kbar,
                           int grid_points) {
  const Eigen::Index m = ref.cost.R.rows;
  const Eigen::Index n = ref.sys.n;
  std::ofstream os(path);
  os << "t";
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      os << ",kbar_" << (i + 1) << "_" << (j + 1);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      os << ",kstar_" << (i + 1) << "_" << (j + 1);
  os << '\n';
  for (int g = 0; g < grid_points; ++g) {
    const double t = g * ref.sys.period / grid_points;
    const Eigen::MatrixXd Kb = kbar(t);
    const Eigen::MatrixXd Ks =
        hk_from_p(ref.sys, ref.cost, ref.steady.P_at(t), t).second;
    os << format_double(t);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        os << ',' << format_double(Kb(i, j));
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        os << ',' << format_double(Ks(i, j));
    os << '\n';
  }
}

}  // namespace

std::vector<TrialReport> run_table1(const std::vector<TrialConfig>& trials,
                                    const Table1Options& opts) {
  using clock = std::chrono::steady_clock;

  // One optimal-gain reference per distinct disturbance magnitude.
  std::map<double, Reference> refs;
  const auto reference = [&](double zeta) -> const Reference& {
    auto it = refs.find(zeta);
    if (it == refs.end()) {
      auto [sys, cost] = build_triple_pendulum(zeta);
      SteadyOptions sopts;
      sopts.tol = opts.kstar_tol;
      sopts.max_horizon = opts.kstar_max_horizon;
      sopts.fit_order = opts.kstar_fit_order;
      SteadyPeriodicSolution steady =
          steady_periodic_solution(sys, cost, opts.kstar_h, sopts);
      it = refs.emplace(zeta, Reference{std::move(sys), std::move(cost),
                                        std::move(steady)}).first;
    }
    return it->second;
  };

  std::optional<GainSchedule> mbplq_gain;

  if (!opts.out_dir.empty()) {
    std::filesystem::create_directories(opts.out_dir);
  }

  std::vector<TrialReport> reports;
  for (const auto& trial : trials) {
    TrialReport rep;
    rep.label = trial.label;
    rep.controller =
        trial.controller == TrialConfig::Controller::Adp ? "ADP" : "MBPLQ";
    rep.N = trial.N;
    rep.M = trial.M;
    rep.s_f = trial.s_f;
    rep.zeta = trial.zeta;
    rep.gain_grid = opts.gain_grid;
    const auto start = clock::now();
    try {
      const Reference& ref = reference(trial.zeta);
      const auto kstar = [&ref](double t) {
        return hk_from_p(ref.sys, ref.cost, ref.steady.P_at(t), t).second;
      };
      if (trial.controller == TrialConfig::Controller::Mbplq) {
        if (!mbplq_gain) {
          auto [nom_sys, nom_cost] = build_triple_pendulum(0.0);
          mbplq_gain = mbplq_controller(nom_sys, nom_cost, opts.kstar_h,
                                        opts.kstar_fit_order);
        }
        rep.stable = is_stable(closed_loop(ref.sys, *mbplq_gain));
        const GainSchedule& g = *mbplq_gain;
        rep.max_gain_error = max_gain_error(
            [&g](double t) { return g.eval(t); }, kstar, ref.sys.period,
            opts.gain_grid);
        rep.completed = true;
        if (!opts.out_dir.empty()) {
          write_gain_trajectory(opts.out_dir + "/" + trial.label + "_gains.csv",
                                ref, [&g](double t) { return g.eval(t); },
                                opts.gain_grid);
        }
      } else {
        SimulatedPlant plant(ref.sys);
        AlgorithmConfig cfg;
        cfg.dt = trial.dt;
        cfg.M = trial.M;
        cfg.N = trial.N;
        cfg.s_f = trial.s_f;
        cfg.h = trial.h;
        cfg.beta = trial.beta;
        cfg.substeps = trial.substeps;
        cfg.L_bar = trial.L_bar;
        cfg.exploration = trial.exploration;
        const AlgorithmRun run = run_adp(plant, ref.cost, cfg);
        rep.reset_count = run.diagnostics.reset_count;
        rep.sigma_scaled = run.diagnostics.sigma_scaled;
        rep.vi_periodic = run.diagnostics.periodicity_checked &&
                          run.diagnostics.periodicity.is_periodic;
        rep.stable = run.diagnostics.stable;
        const AdpResult& res = run.result;
        rep.max_gain_error = max_gain_error(
            [&res](double t) { return res.eval_K(t); }, kstar, ref.sys.period,
            opts.gain_grid);
        rep.completed = true;
        if (!opts.out_dir.empty()) {
          write_gain_trajectory(
              opts.out_dir + "/" + trial.label + "_gains.csv", ref,
              [&res](double t) { return res.eval_K(t); }, opts.gain_grid);
        }
      }
    } catch (const Error& e) {
      rep.failure = e.what();
      rep.completed = false;
      rep.stable = false;
    }
    rep.runtime_seconds =
        std::chrono::duration<double>(clock::now() - start).count();
    reports.push_back(std::move(rep));
  }

  if (!opts.out_dir.empty()) {
    std::ofstream os(opts.out_dir + "/table1.csv");
    write_table1_csv(os, reports);
  }
  return reports;
}

void write_table1_csv(std::ostream& os,
                      const std::vector<TrialReport>& reports) {
  os << "trial,controller,N,M,s_f,zeta,resets,stable,max_gain_error,"
        "runtime_s,status\n";
  for (const auto& r : reports) {
    os << r.label << ',' << r.controller << ',';
    if (r.controller == "ADP") {
      os << r.N << ',' << r.M << ',' << format_double(r.s_f) << ',';
    } else {
      os << "-,-,-,";
    }
    os << format_double(r.zeta) << ',';
    if (r.reset_count >= 0) {
      os << r.reset_count;
    } else {
      os << '-';
    }
    os << ',' << (r.stable ? "yes" : "no") << ',';
    if (r.max_gain_error) {
      os << format_double(*r.max_gain_error);
    } else {
      os << '-';
    }
    os << ',' << format_double(r.runtime_seconds) << ','
       << (r.completed ? "ok" : r.failure) << '\n';
  }
}

}  // namespace ctlp
