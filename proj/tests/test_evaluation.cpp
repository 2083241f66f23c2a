#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <hjb/evaluation.hpp>
#include <hjb/io.hpp>

#include <cstdio>
#include <fstream>

using namespace hjb;

namespace {

ValueNetParams mild_theta(int d, int m, unsigned long long seed) {
  ValueNetParams p = init_params(d, m, seed);
  GaussianSampler rng(seed + 1);
  p.w = rng.vector(m, 0.05);
  p.b = rng.vector(d + 1, 0.05);
  return p;
}

}  // namespace

TEST_CASE("evaluate_point at the final time") {
  Scenario sc = build(ScenarioId::corridor);
  ValueNetParams theta = mild_theta(4, 8, 1);
  Vec x = sc.rho.x0;
  PointEval pe = evaluate_point(theta, *sc.problem, x, 1.0);
  CHECK(pe.ell == 0.0);
  CHECK(pe.G == doctest::Approx(sc.problem->terminal_cost(x)));
}

TEST_CASE("shock with zero displacement is a plain continuation") {
  Scenario sc = build(ScenarioId::corridor);
  ValueNetParams theta = mild_theta(4, 8, 2);
  ShockSpec spec;
  spec.time = 0.1;
  spec.xi = Vec::Zero(4);
  BaselineOptions bopt;
  bopt.max_iters = 30;
  bopt.multistarts = 1;
  ShockReport rep = shock_experiment(theta, *sc.problem, sc.rho.x0, spec, 20, bopt);
  CHECK((rep.shocked_state - rep.state_at_shock).norm() == 0.0);
  PointEval direct =
      evaluate_point(theta, *sc.problem, rep.state_at_shock, 0.1, 20);
  CHECK(rep.nn.objective() == direct.objective());  // bit-identical
}

TEST_CASE("shock magnitude spec draws a deterministic direction") {
  Scenario sc = build(ScenarioId::corridor);
  ValueNetParams theta = mild_theta(4, 8, 3);
  ShockSpec spec;
  spec.magnitude = 0.94;
  spec.seed = 5;
  BaselineOptions bopt;
  bopt.max_iters = 20;
  bopt.multistarts = 1;
  ShockReport a = shock_experiment(theta, *sc.problem, sc.rho.x0, spec, 10, bopt);
  ShockReport b = shock_experiment(theta, *sc.problem, sc.rho.x0, spec, 10, bopt);
  CHECK(a.xi.norm() == doctest::Approx(0.94));
  CHECK((a.xi - b.xi).norm() == 0.0);
  CHECK_THROWS_AS(shock_experiment(theta, *sc.problem, sc.rho.x0,
                                   ShockSpec{.time = 1.5}, 10, bopt),
                  ConfigError);
}

TEST_CASE("degenerate hypersphere equals the single-point gap") {
  Scenario sc = build(ScenarioId::corridor);
  ValueNetParams theta = mild_theta(4, 8, 4);
  BaselineOptions bopt;
  bopt.max_iters = 60;
  bopt.multistarts = 1;
  SweepPoint pt = sweep_magnitude(theta, *sc.problem, sc.rho.x0, 0.0, 10, 9,
                                  10, bopt, 100);
  CHECK(pt.count == 1);
  PointEval nn = evaluate_point(theta, *sc.problem, sc.rho.x0, 0.0, 10);
  BaselineOptions bo = bopt;
  bo.seed = 9 + 104729ULL;
  BaselineResult base = solve_baseline(*sc.problem, sc.rho.x0, 0.0, bo);
  const double expect =
      (nn.objective() - base.ell_val_objective) / base.ell_val_objective;
  CHECK(pt.mean_subopt == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("linear fit recovers an exact line") {
  std::vector<double> x{8, 12, 16, 20, 24}, y;
  for (double v : x) y.push_back(3.5 * v + 100);
  double s, b, r2;
  linear_fit(x, y, s, b, r2);
  CHECK(s == doctest::Approx(3.5).epsilon(1e-12));
  CHECK(b == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("timing harness: NN step is cheaper than baseline re-solve") {
  Scenario sc = build(ScenarioId::corridor);
  ValueNetParams theta = mild_theta(4, sc.config.width, 5);
  TimingReport rep = timing_harness(theta, *sc.problem, sc.rho.x0, 50, 3);
  CHECK(rep.nn_per_step_ms > 0.0);
  CHECK(rep.baseline_ms > 0.0);
  CHECK(rep.ratio > 1.0);
}

TEST_CASE("trajectory CSV format") {
  Scenario sc = build(ScenarioId::corridor);
  ValueNetParams theta = mild_theta(4, 8, 6);
  RolloutResult r = integrate(sc.rho.x0, theta, *sc.problem, 5);
  const std::string path = "traj_test.csv";
  write_trajectory_csv(path, r);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "s,z0,z1,z2,z3,u0,u1,u2,u3,ell,c_hjt");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 6);
  std::remove(path.c_str());
}

TEST_CASE("train log CSV and SVG plot are written") {
  std::vector<TrainLogRow> log(3);
  for (int i = 0; i < 3; ++i) {
    log[i].iter = i;
    log[i].lr = 0.01;
    log[i].train_total = 10.0 - i;
  }
  write_train_log_csv("log_test.csv", log);
  std::ifstream in("log_test.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header.find("train_total") != std::string::npos);
  std::remove("log_test.csv");

  SvgSeries s;
  s.label = "J";
  s.x = {0, 1, 2};
  s.y = {10, 9, 8};
  write_svg_plot("plot_test.svg", {s}, "title", "iter", "J");
  std::ifstream svg("plot_test.svg");
  std::string all((std::istreambuf_iterator<char>(svg)),
                  std::istreambuf_iterator<char>());
  CHECK(all.find("<svg") != std::string::npos);
  CHECK(all.find("polyline") != std::string::npos);
  std::remove("plot_test.svg");
}
