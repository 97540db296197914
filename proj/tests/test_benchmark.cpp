#include "ctlp/benchmark.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "ctlp/errors.hpp"
#include "ctlp/io.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace ctlp;
namespace tt = ctlp::testing;

namespace {
constexpr double kPi = std::numbers::pi;

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}
}  // namespace

TEST_SUITE("benchmark") {

TEST_CASE("triple pendulum matrices") {
  auto [sys, cost] = build_triple_pendulum(0.0);
  CHECK(sys.n == 6);
  CHECK(sys.m == 3);
  CHECK(sys.period == doctest::Approx(2.0 * kPi).epsilon(1e-15));

  const Eigen::MatrixXd A0 = sys.A(0.0);
  CHECK((A0.topRightCorner(3, 3) - Eigen::MatrixXd::Identity(3, 3)).norm() ==
        0.0);
  CHECK(A0.topLeftCorner(3, 3).norm() == 0.0);
  Eigen::Matrix3d A21_expected;  // gamma(0) = 3
  A21_expected << 0, 0, -1, 1, 0, 0, -1, 1, 0;
  CHECK((A0.bottomLeftCorner(3, 3) - A21_expected).norm() <= 1e-15);

  Eigen::Matrix3d B2;
  B2 << 1, -1, 0, -1, 2, -1, 0, -1, 2;
  CHECK((sys.B(0.0).bottomRows(3) - B2).norm() == 0.0);
  CHECK((sys.B(1.234) - sys.B(0.0)).norm() == 0.0);

  CHECK((cost.C(0.7) - Eigen::MatrixXd::Identity(6, 6)).norm() == 0.0);
  CHECK((cost.R(0.7) - Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);

  SUBCASE("disturbance vanishes where 1 + sin(3t) = 0") {
    auto [dist, dcost] = build_triple_pendulum(1.0);
    const double t = kPi / 2.0;  // sin(3t) = -1
    CHECK((dist.A(t) - sys.A(t)).norm() <= 1e-14);
    CHECK((dist.A(0.0).bottomLeftCorner(3, 3) -
           (sys.A(0.0).bottomLeftCorner(3, 3) +
            Eigen::MatrixXd::Identity(3, 3)))
              .norm() <= 1e-14);
  }

  SUBCASE("open loop is unstable") {
    const auto moduli = characteristic_multipliers(monodromy(sys, 0.0, 2048));
    CHECK(moduli.front() > 1.0);
    CHECK_FALSE(is_stable(sys, 0.0, 1e-6, 2048));
  }
}

TEST_CASE("cost evaluation against the scalar closed form") {
  auto [sys, cost] = tt::scalar_system(0.0, 1.0, 1.0, 1.0);
  Eigen::VectorXd x0(1);
  x0 << 1.0;
  Eigen::MatrixXd K(1, 1);
  K << 1.0;
  const double J =
      evaluate_cost(sys, cost, GainSchedule::constant(K, 1.0), x0, 0.0);
  CHECK(std::abs(J - 1.0) <= 1e-4);

  CHECK(evaluate_cost(sys, cost, GainSchedule::constant(K, 1.0),
                      Eigen::VectorXd::Zero(1), 0.0) == 0.0);

  SUBCASE("quadrature matches the analytic cost of suboptimal gains") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 4; ++trial) {
      const double a = tt::uniform(rng, -0.8, 0.8);
      auto [asys, acost] = tt::scalar_system(a, 1.0, 1.0, 1.0);
      const double kstar = a + std::sqrt(a * a + 1.0);
      const double jstar = kstar;  // P* = K* for b = c = r = 1
      for (double dk : {0.0, 0.35, 0.9}) {
        const double k = kstar + dk;
        Eigen::MatrixXd Km(1, 1);
        Km << k;
        const double Jk = evaluate_cost(asys, acost,
                                        GainSchedule::constant(Km, 1.0), x0,
                                        0.0);
        const double analytic = (1.0 + k * k) / (2.0 * (k - a));
        CHECK(std::abs(Jk - analytic) <= 1e-4 * (1.0 + analytic));
        CHECK(Jk >= jstar - 1e-6);
      }
    }
  }

  SUBCASE("unstable closed loop is reported as divergent") {
    Eigen::MatrixXd Kbad(1, 1);
    Kbad << -0.5;
    CHECK_THROWS_AS(evaluate_cost(sys, cost,
                                  GainSchedule::constant(Kbad, 1.0), x0, 0.0),
                    DivergentCost);
  }
}

TEST_CASE("model-based controller stabilizes the nominal pendulum") {
  auto [sys, cost] = build_triple_pendulum(0.0);
  const GainSchedule gain = mbplq_controller(sys, cost, 5e-3, 12);
  CHECK(is_stable(closed_loop(sys, gain), 0.0, 1e-6, 2048));
}

TEST_CASE("degraded trials stay stable with larger gain error") {
  // Rows with a coarser basis (N=3) and a shorter horizon (s_f=12): both
  // remain stabilizing but lose accuracy by one to two orders of magnitude.
  const auto all = table1_trials();
  std::vector<TrialConfig> picks{all[1], all[3]};
  Table1Options opts;
  opts.kstar_h = 2e-3;
  const auto reports = run_table1(picks, opts);
  REQUIRE(reports.size() == 2);

  CHECK(reports[0].completed);
  CHECK(reports[0].stable);
  REQUIRE(reports[0].max_gain_error.has_value());
  CHECK(*reports[0].max_gain_error > 0.2);
  CHECK(*reports[0].max_gain_error < 5.0);

  CHECK(reports[1].completed);
  CHECK(reports[1].stable);
  REQUIRE(reports[1].max_gain_error.has_value());
  CHECK(*reports[1].max_gain_error > 1.0);
  CHECK(*reports[1].max_gain_error < 20.0);
}

TEST_CASE("gain error reporting grid and reproducibility") {
  const std::string dir_a = "bench_test_out_a";
  const std::string dir_b = "bench_test_out_b";

  std::vector<TrialConfig> trial;
  TrialConfig t;
  t.label = "trial7";
  t.controller = TrialConfig::Controller::Mbplq;
  t.zeta = 0.1;
  trial.push_back(t);

  Table1Options opts;
  opts.kstar_h = 5e-3;
  opts.kstar_fit_order = 12;
  opts.kstar_tol = 1e-6;

  opts.out_dir = dir_a;
  opts.gain_grid = 1000;
  const auto rep_a = run_table1(trial, opts);
  REQUIRE(rep_a.size() == 1);
  CHECK(rep_a[0].completed);

  opts.out_dir = dir_b;
  const auto rep_b = run_table1(trial, opts);
  CHECK(slurp(dir_a + "/trial7_gains.csv") == slurp(dir_b + "/trial7_gains.csv"));
  REQUIRE(rep_a[0].max_gain_error.has_value());
  CHECK(*rep_a[0].max_gain_error == *rep_b[0].max_gain_error);
  CHECK(rep_a[0].gain_grid == 1000);

  SUBCASE("doubling the report grid moves the maximum by under one percent") {
    opts.out_dir.clear();
    opts.gain_grid = 500;
    const auto rep_c = run_table1(trial, opts);
    CHECK(std::abs(*rep_c[0].max_gain_error - *rep_a[0].max_gain_error) <=
          0.01 * *rep_a[0].max_gain_error);
  }

  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("shipped trial grid") {
  const auto trials = table1_trials();
  REQUIRE(trials.size() == 8);
  CHECK(trials[0].N == 6);
  CHECK(trials[0].M == 800);
  CHECK(trials[0].s_f == 40.0);
  CHECK(trials[2].N == 1);
  CHECK(trials[3].s_f == 12.0);
  CHECK(trials[4].s_f == 8.0);
  CHECK(trials[5].M == 400);
  CHECK(trials[6].controller == TrialConfig::Controller::Mbplq);
  CHECK(trials[6].zeta == 0.1);
  CHECK(trials[7].zeta == 1.0);
  for (const auto& t : trials) {
    CHECK(t.dt == 0.2);
    CHECK(t.h == 0.1);
    if (t.controller == TrialConfig::Controller::Adp) {
      CHECK(t.zeta == 1.0);
      CHECK(t.beta == 10.0);
      CHECK(t.exploration.seed == trials[0].exploration.seed);
    }
  }
}

TEST_CASE("gain schedules round trip through json") {
  std::mt19937_64 rng(17);
  GainSchedule gain;
  gain.m = 2;
  gain.n = 3;
  gain.coeffs.basis = FourierBasis{2, 1.0};
  gain.coeffs.W = tt::random_matrix(rng, 6, 5, 3.0);
  const GainSchedule back = gain_from_json(gain_to_json(gain));
  CHECK(back.m == 2);
  CHECK(back.n == 3);
  CHECK(back.coeffs.basis.N == 2);
  CHECK((back.coeffs.W - gain.coeffs.W).norm() == 0.0);
  CHECK((back.eval(0.83) - gain.eval(0.83)).norm() == 0.0);

  nlohmann::json bad = gain_to_json(gain);
  bad["coefficients"].erase(0);
  CHECK_THROWS_AS(gain_from_json(bad), DimensionMismatch);
}

TEST_CASE("table csv layout") {
  TrialReport r;
  r.label = "trial9";
  r.controller = "ADP";
  r.N = 2;
  r.M = 100;
  r.s_f = 10;
  r.zeta = 0.5;
  r.completed = false;
  r.failure = "Blowup: test";
  r.reset_count = 3;
  std::ostringstream os;
  write_table1_csv(os, {r});
  const std::string text = os.str();
  CHECK(text.find("trial,controller,N,M,s_f,zeta,resets,stable,"
                  "max_gain_error,runtime_s,status") != std::string::npos);
  CHECK(text.find("trial9,ADP,2,100,10,0.5,3,no,-,") != std::string::npos);
  CHECK(text.find("Blowup: test") != std::string::npos);
}

}  // TEST_SUITE
