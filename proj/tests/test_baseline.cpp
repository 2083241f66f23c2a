#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <hjb/baseline.hpp>
#include <hjb/scenarios.hpp>

using namespace hjb;

namespace {

ProblemPtr plain_problem(double alpha1, const Vec& x0, const Vec& y) {
  MultiAgentProblem::Params p;
  p.n = static_cast<int>(x0.size()) / 2;
  p.q = 2;
  p.alpha1 = alpha1;
  p.alpha2 = 0;
  p.alpha3 = 0;
  p.x0 = x0;
  p.y = y;
  return std::make_shared<MultiAgentProblem>(p);
}

}  // namespace

TEST_CASE("zero controls: objective is the terminal cost alone") {
  Vec x0 = (Vec(4) << 0, 0, 5, 5).finished();
  Vec y = (Vec(4) << 1, 1, 6, 6).finished();
  auto prob = plain_problem(100, x0, y);
  auto fwd = detail::euler_forward(*prob, x0, Mat::Zero(4, 50), 0.0, 1.0 / 50);
  CHECK(fwd.ell_train == 0.0);
  CHECK(fwd.G == doctest::Approx(prob->terminal_cost(x0)));
}

TEST_CASE("transcription gradient matches finite differences") {
  Scenario sc = build(ScenarioId::corridor);
  const int n_t = 8;
  const double h = 1.0 / n_t;
  GaussianSampler rng(3);
  Mat U = rng.matrix(4, n_t);
  Vec x0 = sc.rho.x0;

  auto fwd = detail::euler_forward(*sc.problem, x0, U, 0.0, h);
  Mat g = detail::euler_gradient(*sc.problem, fwd, U, 0.0, h);

  auto J = [&](const Mat& Uc) {
    auto f = detail::euler_forward(*sc.problem, x0, Uc, 0.0, h);
    return f.ell_train + f.G;
  };
  const double eps = 1e-6;
  double worst = 0.0;
  for (int k = 0; k < n_t; ++k)
    for (int i = 0; i < 4; ++i) {
      Mat Up = U, Um = U;
      Up(i, k) += eps;
      Um(i, k) -= eps;
      const double fd = (J(Up) - J(Um)) / (2 * eps);
      worst = std::max(worst, std::abs(fd - g(i, k)) /
                                  std::max(1.0, std::abs(fd)));
    }
  CHECK(worst <= 1e-6);
}

TEST_CASE("straight-line oracle in the obstacle-free case") {
  // continuous optimum: constant u* = alpha1 (y - x0) / (1 + alpha1 T),
  // value alpha1 ||y - x0||^2 / (2 (1 + alpha1 T))
  const double a1 = 5.0;
  Vec x0 = (Vec(4) << 0, 0, 4, 4).finished();
  Vec y = (Vec(4) << 1, 2, 3, 5).finished();
  auto prob = plain_problem(a1, x0, y);
  const double exact = a1 * (y - x0).squaredNorm() / (2 * (1 + a1));

  BaselineOptions opt;
  opt.n_t = 200;
  opt.multistarts = 2;
  BaselineResult r = solve_baseline(*prob, x0, 0.0, opt);
  CHECK(std::abs(r.objective - exact) / exact < 0.01);
}

TEST_CASE("start at the target: near-zero objective") {
  Vec x0 = (Vec(4) << 1, 1, 6, 6).finished();
  auto prob = plain_problem(100, x0, x0);
  BaselineOptions opt;
  opt.multistarts = 1;
  opt.max_iters = 1500;
  BaselineResult r = solve_baseline(*prob, x0, 0.0, opt);
  CHECK(r.objective < 0.05);
}

TEST_CASE("solution never exceeds the initialization objective") {
  Scenario sc = build(ScenarioId::corridor);
  BaselineOptions opt;
  opt.multistarts = 1;
  opt.max_iters = 200;
  opt.noise_std = 0.0;  // init = exact straight path
  Mat U0 = detail::straight_path_controls(*sc.problem, sc.rho.x0, 50, 1.0);
  auto init = detail::euler_forward(*sc.problem, sc.rho.x0, U0, 0.0, 1.0 / 50);
  BaselineResult r = solve_baseline(*sc.problem, sc.rho.x0, 0.0, opt);
  CHECK(r.objective <= init.ell_train + init.G + 1e-9);
}

TEST_CASE("deterministic given seed") {
  Scenario sc = build(ScenarioId::corridor);
  BaselineOptions opt;
  opt.multistarts = 2;
  opt.max_iters = 50;
  BaselineResult a = solve_baseline(*sc.problem, sc.rho.x0, 0.0, opt);
  BaselineResult b = solve_baseline(*sc.problem, sc.rho.x0, 0.0, opt);
  CHECK(a.objective == b.objective);
  CHECK((a.U - b.U).norm() == 0.0);
}

TEST_CASE("post-shock horizon scaling") {
  Scenario sc = build(ScenarioId::corridor);
  BaselineOptions opt;
  opt.multistarts = 1;
  opt.max_iters = 10;
  BaselineResult r = solve_baseline(*sc.problem, sc.rho.x0, 0.1, opt);
  CHECK(r.n_t == 45);  // ceil(50 * 0.9)
  CHECK(r.s_grid[0] == doctest::Approx(0.1));
  CHECK(r.s_grid[r.n_t] == doctest::Approx(1.0));
  CHECK_THROWS_AS(solve_baseline(*sc.problem, sc.rho.x0, 1.0, opt),
                  ConfigError);
}

TEST_CASE("quadcopter hover initialization is sane") {
  Scenario sc = build(ScenarioId::quadcopter);
  Mat U0 = detail::straight_path_controls(*sc.problem, sc.rho.x0, 50, 1.0);
  CHECK(U0(0, 0) == doctest::Approx(9.81));
  CHECK(U0.bottomRows(3).norm() == 0.0);
  auto fwd = detail::euler_forward(*sc.problem, sc.rho.x0, U0, 0.0, 1.0 / 50);
  CHECK(fwd.finite);
}
