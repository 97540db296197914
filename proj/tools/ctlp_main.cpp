// Command-line front end: model-based PRE solving, data collection, the
// end-to-end data-driven run, the benchmark table, and stability checks of
// saved gain schedules.

#include <Eigen/Core>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ctlp/benchmark.hpp"
#include "ctlp/data_collection.hpp"
#include "ctlp/errors.hpp"
#include "ctlp/io.hpp"
#include "ctlp/periodic_system.hpp"
#include "ctlp/pre_solver.hpp"
#include "ctlp/vectorize.hpp"
#include "ctlp/vi_adp.hpp"

namespace {

using nlohmann::json;

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) throw ctlp::Misconfiguration("config: empty matrix");
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw ctlp::Misconfiguration("config: ragged matrix rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      M(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
  }
  return M;
}

struct Problem {
  ctlp::CtlpSystem sys;
  ctlp::CostSpec cost;
};

Problem problem_from_config(const json& cfg, std::optional<double> zeta_flag) {
  json sys_cfg = json::object();
  if (cfg.contains("system")) sys_cfg = cfg.at("system");
  const std::string name = sys_cfg.value("name", "triple_pendulum");

  if (name == "triple_pendulum") {
    const double zeta = zeta_flag.value_or(sys_cfg.value("zeta", 0.0));
    auto [sys, cost] = ctlp::build_triple_pendulum(zeta);
    return Problem{std::move(sys), std::move(cost)};
  }
  if (name == "lti") {
    const Eigen::MatrixXd A = matrix_from_json(sys_cfg.at("A"));
    const Eigen::MatrixXd B = matrix_from_json(sys_cfg.at("B"));
    const double period = sys_cfg.value("period", 1.0);
    ctlp::CtlpSystem sys = ctlp::make_system(
        ctlp::PeriodicMatrixFunction::constant(A, period),
        ctlp::PeriodicMatrixFunction::constant(B, period));
    Eigen::MatrixXd C = Eigen::MatrixXd::Identity(sys.n, sys.n);
    Eigen::MatrixXd R = Eigen::MatrixXd::Identity(sys.m, sys.m);
    if (sys_cfg.contains("C")) C = matrix_from_json(sys_cfg.at("C"));
    if (sys_cfg.contains("R")) R = matrix_from_json(sys_cfg.at("R"));
    ctlp::CostSpec cost{ctlp::PeriodicMatrixFunction::constant(C, period),
                        ctlp::PeriodicMatrixFunction::constant(R, period),
                        period};
    return Problem{std::move(sys), std::move(cost)};
  }
  throw ctlp::Misconfiguration("config: unknown system '" + name + "'");
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream is(path);
  if (!is) throw ctlp::Misconfiguration("config: cannot open " + path);
  json cfg;
  is >> cfg;
  return cfg;
}

std::ofstream open_out(const std::string& dir, const std::string& file) {
  std::filesystem::create_directories(dir);
  std::ofstream os(dir + "/" + file);
  if (!os) throw ctlp::Misconfiguration("cannot write " + dir + "/" + file);
  return os;
}

ctlp::AlgorithmConfig adp_config_from_json(const json& cfg) {
  ctlp::AlgorithmConfig out;
  if (!cfg.contains("adp")) return out;
  const json& a = cfg.at("adp");
  out.dt = a.value("dt", out.dt);
  out.M = a.value("samples", out.M);
  out.N = a.value("n_fourier", out.N);
  out.s_f = a.value("sf", out.s_f);
  out.h = a.value("step", out.h);
  out.beta = a.value("beta", out.beta);
  out.substeps = a.value("substeps", out.substeps);
  out.alpha = a.value("alpha", out.alpha);
  out.periodicity_tol = a.value("periodicity_tol", out.periodicity_tol);
  if (a.contains("lbar") && !a.at("lbar").is_null()) {
    out.L_bar = a.at("lbar").get<int>();
  }
  if (a.contains("x_reset")) {
    const auto& xr = a.at("x_reset");
    out.x_reset.resize(static_cast<Eigen::Index>(xr.size()));
    for (Eigen::Index i = 0; i < out.x_reset.size(); ++i) {
      out.x_reset[i] = xr.at(static_cast<std::size_t>(i)).get<double>();
    }
  }
  if (a.contains("exploration")) {
    const json& e = a.at("exploration");
    out.exploration.amplitude = e.value("amplitude", out.exploration.amplitude);
    out.exploration.num_sinusoids =
        e.value("num_sinusoids", out.exploration.num_sinusoids);
    if (e.contains("freq_range")) {
      out.exploration.freq_lo = e.at("freq_range").at(0).get<double>();
      out.exploration.freq_hi = e.at("freq_range").at(1).get<double>();
    }
    out.exploration.seed = e.value("seed", out.exploration.seed);
  }
  return out;
}

void write_gain_grid_csv(std::ostream& os, const std::string& prefix,
                         const std::function<Eigen::MatrixXd(double)>& K,
                         Eigen::Index m, Eigen::Index n, double period,
                         int grid) {
  os << "t";
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      os << ',' << prefix << '_' << (i + 1) << '_' << (j + 1);
  os << '\n';
  for (int g = 0; g < grid; ++g) {
    const double t = g * period / grid;
    const Eigen::MatrixXd Kt = K(t);
    os << ctlp::format_double(t);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        os << ',' << ctlp::format_double(Kt(i, j));
    os << '\n';
  }
}

json multipliers_json(const std::vector<double>& moduli) {
  json arr = json::array();
  for (double v : moduli) arr.push_back(v);
  return arr;
}

int cmd_solve_pre(const json& cfg, std::optional<double> zeta,
                  double step, double tol, double max_horizon, int fit_order,
                  const std::string& out_dir) {
  const Problem prob = problem_from_config(cfg, zeta);
  ctlp::SteadyOptions opts;
  opts.tol = tol;
  opts.max_horizon = max_horizon;
  opts.fit_order = fit_order;
  const ctlp::SteadyPeriodicSolution steady =
      ctlp::steady_periodic_solution(prob.sys, prob.cost, step, opts);

  const ctlp::GainSchedule kstar =
      ctlp::gain_schedule_from_steady(prob.sys, prob.cost, steady, fit_order);
  const ctlp::CtlpSystem closed = ctlp::closed_loop(prob.sys, kstar);
  const auto moduli =
      ctlp::characteristic_multipliers(ctlp::monodromy(closed, 0.0));

  {
    auto os = open_out(out_dir, "pstar_grid.csv");
    os << "s";
    for (Eigen::Index i = 0; i < prob.sys.n; ++i)
      for (Eigen::Index j = 0; j < prob.sys.n; ++j)
        os << ",p_" << (i + 1) << "_" << (j + 1);
    os << '\n';
    for (std::size_t k = 0; k < steady.s_grid.size(); ++k) {
      os << ctlp::format_double(steady.s_grid[k]);
      const Eigen::MatrixXd& P = steady.P_grid[k];
      for (Eigen::Index i = 0; i < P.rows(); ++i)
        for (Eigen::Index j = 0; j < P.cols(); ++j)
          os << ',' << ctlp::format_double(P(i, j));
      os << '\n';
    }
  }
  {
    auto os = open_out(out_dir, "kstar_grid.csv");
    write_gain_grid_csv(os, "kstar",
                        [&](double t) { return kstar.eval(t); }, prob.sys.m,
                        prob.sys.n, prob.sys.period, 1000);
  }
  {
    auto os = open_out(out_dir, "kstar_gain.json");
    os << ctlp::gain_to_json(kstar).dump(2) << '\n';
  }
  {
    json summary;
    summary["s_f_used"] = steady.s_f_used;
    summary["sup_gaps"] = steady.sup_gaps;
    summary["gaps_at_zero"] = steady.gaps_at_zero;
    summary["closed_loop_multipliers"] = multipliers_json(moduli);
    summary["closed_loop_stable"] = moduli.front() < 1.0 - 1e-6;
    summary["step"] = step;
    summary["tol"] = tol;
    auto os = open_out(out_dir, "pre_summary.json");
    os << summary.dump(2) << '\n';
  }
  std::cout << "solve-pre: converged at horizon " << steady.s_f_used
            << ", closed-loop stable: "
            << (moduli.front() < 1.0 - 1e-6 ? "yes" : "no") << "\n";
  return 0;
}

int cmd_collect(const json& cfg, std::optional<double> zeta,
                const ctlp::AlgorithmConfig& acfg, bool matrices,
                const std::string& out_dir) {
  const Problem prob = problem_from_config(cfg, zeta);
  ctlp::SimulatedPlant plant(prob.sys);
  const ctlp::ExplorationSignal signal(plant.input_dim(), acfg.exploration);
  const Eigen::VectorXd x_reset =
      acfg.x_reset.size() > 0 ? acfg.x_reset
                              : Eigen::VectorXd::Zero(plant.state_dim());
  const ctlp::TrajectoryLog log = ctlp::collect(
      plant, signal, acfg.dt, acfg.M, acfg.beta, x_reset, acfg.substeps);
  {
    auto os = open_out(out_dir, "trajectory.csv");
    log.write_csv(os);
  }
  json summary;
  summary["samples"] = acfg.M;
  summary["dt"] = acfg.dt;
  summary["beta"] = acfg.beta;
  summary["substeps"] = acfg.substeps;
  summary["seed"] = acfg.exploration.seed;
  summary["reset_count"] = log.reset_count;
  summary["reset_times"] = log.reset_times;
  summary["valid_intervals"] = log.valid_interval_count();
  if (matrices) {
    const ctlp::DataMatrices dm =
        ctlp::build_data_matrices(log, acfg.N, prob.cost);
    {
      auto os = open_out(out_dir, "theta.csv");
      ctlp::write_matrix_csv(os, dm.Theta);
    }
    {
      auto os = open_out(out_dir, "gamma.csv");
      ctlp::write_matrix_csv(os, dm.Gamma);
    }
    summary["n_fourier"] = acfg.N;
    summary["theta_cols"] = dm.Theta.cols();
    summary["theta_rows"] = dm.Theta.rows();
    summary["sigma_scaled"] = dm.sigma_scaled;
  }
  auto os = open_out(out_dir, "collect_summary.json");
  os << summary.dump(2) << '\n';
  std::cout << "collect: " << log.valid_interval_count() << " valid intervals, "
            << log.reset_count << " resets\n";
  return 0;
}

int cmd_run_adp(const json& cfg, std::optional<double> zeta,
                const ctlp::AlgorithmConfig& acfg, const std::string& out_dir) {
  const Problem prob = problem_from_config(cfg, zeta);
  ctlp::SimulatedPlant plant(prob.sys);
  const ctlp::AlgorithmRun run = ctlp::run_adp(plant, prob.cost, acfg);

  {
    auto os = open_out(out_dir, "trajectory.csv");
    run.log.write_csv(os);
  }
  {
    auto os = open_out(out_dir, "kbar_gain.json");
    os << ctlp::gain_to_json(run.result.gain()).dump(2) << '\n';
  }
  {
    auto os = open_out(out_dir, "kbar_coeffs.csv");
    ctlp::write_matrix_csv(os, run.result.W_K_bar.W);
  }
  {
    auto os = open_out(out_dir, "hbar_coeffs.csv");
    ctlp::write_matrix_csv(os, run.result.W_H_bar.W);
  }
  {
    auto os = open_out(out_dir, "kbar_traj.csv");
    write_gain_grid_csv(os, "kbar",
                        [&](double t) { return run.result.eval_K(t); },
                        prob.sys.m, prob.sys.n, prob.sys.period, 1000);
  }
  json summary;
  summary["stable"] = run.diagnostics.stable;
  summary["multipliers"] = multipliers_json(run.diagnostics.multipliers);
  summary["reset_count"] = run.diagnostics.reset_count;
  summary["sigma_scaled"] = run.diagnostics.sigma_scaled;
  summary["periodicity_checked"] = run.diagnostics.periodicity_checked;
  if (run.diagnostics.periodicity_checked) {
    summary["vi_periodic"] = run.diagnostics.periodicity.is_periodic;
    summary["vi_periodicity_gap"] = run.diagnostics.periodicity.max_rel_gap;
  }
  summary["L_bar"] = run.result.L_bar;
  summary["fit_sigma_scaled"] = run.result.sigma_min_scaled;
  summary["fit_window_spans_period"] = run.result.window_spans_period;
  summary["hyperparameters"] = {
      {"dt", acfg.dt},           {"samples", acfg.M},
      {"n_fourier", acfg.N},     {"sf", acfg.s_f},
      {"step", acfg.h},          {"beta", acfg.beta},
      {"substeps", acfg.substeps},
      {"seed", acfg.exploration.seed},
      {"amplitude", acfg.exploration.amplitude},
      {"num_sinusoids", acfg.exploration.num_sinusoids},
      {"freq_range", {acfg.exploration.freq_lo, acfg.exploration.freq_hi}},
  };
  auto os = open_out(out_dir, "adp_summary.json");
  os << summary.dump(2) << '\n';
  std::cout << "run-adp: closed loop "
            << (run.diagnostics.stable ? "stable" : "NOT stable")
            << ", top multiplier " << run.diagnostics.multipliers.front()
            << ", resets " << run.diagnostics.reset_count << "\n";
  return 0;
}

int cmd_table1(std::optional<std::uint64_t> seed,
               const std::vector<std::string>& only, double kstar_step,
               const std::string& out_dir) {
  std::vector<ctlp::TrialConfig> trials = ctlp::table1_trials();
  if (seed) {
    for (auto& t : trials) t.exploration.seed = *seed;
  }
  if (!only.empty()) {
    std::vector<ctlp::TrialConfig> keep;
    for (const auto& t : trials) {
      for (const auto& label : only) {
        if (t.label == label) keep.push_back(t);
      }
    }
    trials = std::move(keep);
  }
  ctlp::Table1Options opts;
  opts.out_dir = out_dir;
  opts.kstar_h = kstar_step;
  const auto reports = ctlp::run_table1(trials, opts);
  ctlp::write_table1_csv(std::cout, reports);
  json summary = json::array();
  for (const auto& r : reports) {
    json j;
    j["trial"] = r.label;
    j["controller"] = r.controller;
    j["stable"] = r.stable;
    j["completed"] = r.completed;
    j["reset_count"] = r.reset_count;
    if (r.max_gain_error) {
      j["max_gain_error"] = *r.max_gain_error;
    } else {
      j["max_gain_error"] = nullptr;
    }
    j["gain_grid"] = r.gain_grid;
    j["runtime_seconds"] = r.runtime_seconds;
    j["sigma_scaled"] = r.sigma_scaled;
    j["vi_periodic"] = r.vi_periodic;
    j["failure"] = r.failure;
    summary.push_back(std::move(j));
  }
  auto os = open_out(out_dir, "table1_summary.json");
  os << summary.dump(2) << '\n';
  return 0;
}

int cmd_stability(const json& cfg, std::optional<double> zeta,
                  const std::string& gain_path, double t0) {
  const Problem prob = problem_from_config(cfg, zeta);
  std::ifstream is(gain_path);
  if (!is) throw ctlp::Misconfiguration("stability: cannot open " + gain_path);
  json gj;
  is >> gj;
  const ctlp::GainSchedule gain = ctlp::gain_from_json(gj);
  const ctlp::CtlpSystem closed = ctlp::closed_loop(prob.sys, gain);
  const auto moduli =
      ctlp::characteristic_multipliers(ctlp::monodromy(closed, t0));
  json out;
  out["multipliers"] = multipliers_json(moduli);
  out["stable"] = moduli.front() < 1.0 - 1e-6;
  out["t0"] = t0;
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven and model-based periodic LQ control"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<double> zeta;
  app.add_option("--config", config_path, "JSON configuration file")
      ->check(CLI::ExistingFile);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--zeta", zeta, "disturbance magnitude (pendulum)");
    sub->add_option("--out", out_dir, "output directory");
  };

  // solve-pre
  auto* sp = app.add_subcommand("solve-pre", "model-based periodic Riccati oracle");
  double pre_step = 1e-3, pre_tol = 1e-6, pre_horizon = 200.0;
  int pre_fit_order = 16;
  add_common(sp);
  sp->add_option("--step", pre_step, "integration step");
  sp->add_option("--tol", pre_tol, "periodicity tolerance");
  sp->add_option("--max-horizon", pre_horizon, "maximum backward horizon");
  sp->add_option("--fit-order", pre_fit_order, "Fourier order of the fit");

  // shared numeric flags for collect / run-adp
  std::optional<int> n_fourier, samples, substeps, lbar;
  std::optional<double> dt, sf, step, beta;
  std::optional<std::uint64_t> seed;
  auto add_adp_flags = [&](CLI::App* sub) {
    sub->add_option("--n-fourier", n_fourier, "Fourier truncation order N");
    sub->add_option("--samples", samples, "number of sampling intervals M");
    sub->add_option("--dt", dt, "sampling interval");
    sub->add_option("--sf", sf, "backward horizon s_f");
    sub->add_option("--step", step, "backward integration step h");
    sub->add_option("--beta", beta, "state norm bound for resets");
    sub->add_option("--seed", seed, "exploration seed");
    sub->add_option("--substeps", substeps, "fine integration substeps");
  };

  auto* co = app.add_subcommand("collect", "collect exploration data only");
  bool matrices = false;
  add_common(co);
  add_adp_flags(co);
  co->add_flag("--matrices", matrices, "also write the data matrices");

  auto* ra = app.add_subcommand("run-adp", "end-to-end data-driven run");
  add_common(ra);
  add_adp_flags(ra);
  ra->add_option("--lbar", lbar, "fit window override");

  auto* tb = app.add_subcommand("table1", "benchmark trial suite");
  std::vector<std::string> only;
  std::optional<std::uint64_t> table_seed;
  double kstar_step = 1e-3;
  tb->add_option("--out", out_dir, "output directory");
  tb->add_option("--seed", table_seed, "override the pinned exploration seed");
  tb->add_option("--only", only, "run only the named trials");
  tb->add_option("--kstar-step", kstar_step, "reference solver step");

  auto* st = app.add_subcommand("stability", "multiplier check of a saved gain");
  std::string gain_path;
  double t0 = 0.0;
  add_common(st);
  st->add_option("--gain", gain_path, "gain schedule JSON")->required();
  st->add_option("--t0", t0, "section time");

  CLI11_PARSE(app, argc, argv);

  try {
    const json cfg = load_config(config_path);
    ctlp::AlgorithmConfig acfg = adp_config_from_json(cfg);
    if (n_fourier) acfg.N = *n_fourier;
    if (samples) acfg.M = *samples;
    if (dt) acfg.dt = *dt;
    if (sf) acfg.s_f = *sf;
    if (step) acfg.h = *step;
    if (beta) acfg.beta = *beta;
    if (seed) acfg.exploration.seed = *seed;
    if (substeps) acfg.substeps = *substeps;
    if (lbar) acfg.L_bar = *lbar;

    if (sp->parsed()) {
      return cmd_solve_pre(cfg, zeta, pre_step, pre_tol, pre_horizon,
                           pre_fit_order, out_dir);
    }
    if (co->parsed()) return cmd_collect(cfg, zeta, acfg, matrices, out_dir);
    if (ra->parsed()) return cmd_run_adp(cfg, zeta, acfg, out_dir);
    if (tb->parsed()) return cmd_table1(table_seed, only, kstar_step, out_dir);
    if (st->parsed()) return cmd_stability(cfg, zeta, gain_path, t0);
  } catch (const ctlp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
