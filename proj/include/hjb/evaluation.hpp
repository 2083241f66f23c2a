#pragma once

#include "hjb/baseline.hpp"
#include "hjb/rollout.hpp"
#include "hjb/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <vector>

namespace hjb {

// ---------------------------------------------------------------------------
// Point evaluation: deploy the trained feedback, re-price the trajectory
// with the validation running cost (hard-obstacle indicators, true W).
// ---------------------------------------------------------------------------

struct PointEval {
  RolloutResult traj;
  double ell = 0.0;  // validation running cost
  double G = 0.0;
  double max_W = 0.0, max_Q = 0.0;
  bool collision = false;

  double objective() const { return ell + G; }
};

inline PointEval evaluate_point(const ValueNetParams& theta,
                                const ControlProblem& prob, const Vec& x,
                                double t0 = 0.0, int n_t_val = 50) {
  const double T = prob.horizon();
  if (t0 < 0 || t0 > T) throw ConfigError("t0 must lie in [0, T]");
  PointEval pe;
  if (t0 >= T) {  // empty horizon
    pe.G = prob.terminal_cost(x);
    pe.traj.s_grid = Vec::Constant(1, T);
    pe.traj.Z = x;
    pe.traj.U = Mat::Zero(prob.control_dim(), 1);
    pe.traj.G = pe.G;
    return pe;
  }
  const int n_t = std::max(1, static_cast<int>(std::ceil(n_t_val * (T - t0) / T)));
  pe.traj = integrate(x, theta, prob, n_t, t0, /*with_val_cost=*/true);
  pe.ell = pe.traj.ell_val;
  pe.G = pe.traj.G;
  for (int k = 0; k <= n_t; ++k) {
    Mat Zk = pe.traj.Z.col(k);
    pe.max_W = std::max(pe.max_W, prob.max_pairwise_w(Zk)[0]);
    pe.max_Q = std::max(pe.max_Q, prob.obstacle_value(Zk, CostMode::Validate)[0]);
  }
  pe.collision = pe.max_W > std::exp(-2.0) || pe.max_Q > 0.0;
  return pe;
}

// ---------------------------------------------------------------------------
// Shock experiment: roll the NN to the shock time, displace the state by xi,
// then compare the NN continuation against a baseline re-solve on [ts, T].
// ---------------------------------------------------------------------------

struct ShockSpec {
  double time = 0.1;
  Vec xi;                   // explicit displacement; empty -> random direction
  double magnitude = 0.0;   // used when xi is empty
  unsigned long long seed = 1;
};

struct ShockReport {
  Vec xi;
  Vec state_at_shock;    // pre-displacement
  Vec shocked_state;
  PointEval nn;          // continuation on [ts, T]
  BaselineResult base;   // re-solve on [ts, T]

  double nn_cost() const { return nn.objective(); }
  double baseline_cost() const { return base.ell_val_objective; }
};

inline ShockReport shock_experiment(const ValueNetParams& theta,
                                    const ControlProblem& prob, const Vec& x0,
                                    const ShockSpec& spec, int n_t_val = 50,
                                    const BaselineOptions& bopt = {}) {
  const double T = prob.horizon();
  if (spec.time <= 0 || spec.time >= T)
    throw ConfigError("shock time must lie in (0, T)");

  ShockReport rep;
  rep.xi = spec.xi;
  if (rep.xi.size() == 0) {
    GaussianSampler rng(spec.seed);
    rep.xi = spec.magnitude * rng.sphere(prob.state_dim());
  }
  if (rep.xi.size() != prob.state_dim())
    throw ConfigError("shock displacement dimension mismatch");

  // roll the NN feedback from 0 to the shock time
  const int n_pre =
      std::max(1, static_cast<int>(std::ceil(n_t_val * spec.time / T)));
  {
    // partial-horizon rollout: step manually with the rollout rhs
    const ValueNetParams& th = theta;
    Mat Z = Mat(x0);
    const double h = spec.time / n_pre;
    for (int k = 0; k < n_pre; ++k) {
      const double s = k * h;
      auto k1 = detail::rollout_rhs(s, Z, th, prob, false);
      Mat Z2 = Z + (h / 2) * k1.dZ;
      auto k2 = detail::rollout_rhs(s + h / 2, Z2, th, prob, false);
      Mat Z3 = Z + (h / 2) * k2.dZ;
      auto k3 = detail::rollout_rhs(s + h / 2, Z3, th, prob, false);
      Mat Z4 = Z + h * k3.dZ;
      auto k4 = detail::rollout_rhs(s + h, Z4, th, prob, false);
      Z += (h / 6) * (k1.dZ + 2 * k2.dZ + 2 * k3.dZ + k4.dZ);
      detail::check_finite(Z, s + h);
    }
    rep.state_at_shock = Z.col(0);
  }
  rep.shocked_state = rep.state_at_shock + rep.xi;

  rep.nn = evaluate_point(theta, prob, rep.shocked_state, spec.time, n_t_val);
  rep.base = solve_baseline(prob, rep.shocked_state, spec.time, bopt);
  return rep;
}

// ---------------------------------------------------------------------------
// Hypersphere sweep: suboptimality and collision statistics over random
// displacements of fixed magnitude, with bootstrap confidence intervals.
// ---------------------------------------------------------------------------

struct SweepPoint {
  double magnitude = 0.0;
  int count = 0;
  double mean_subopt = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;  // bootstrap 95% CI of the mean
  double collision_pct = 0.0;
  double mean_nn = 0.0, mean_base = 0.0;
};

inline SweepPoint sweep_magnitude(const ValueNetParams& theta,
                                  const ControlProblem& prob, const Vec& x0,
                                  double magnitude, int count,
                                  unsigned long long seed, int n_t_val = 50,
                                  const BaselineOptions& bopt = {},
                                  int bootstrap = 1000) {
  GaussianSampler dir_rng(seed);
  SweepPoint pt;
  pt.magnitude = magnitude;
  pt.count = count;

  std::vector<double> subopt;
  subopt.reserve(count);
  int collisions = 0, drawn = 0;
  for (int i = 0; i < count; ++i) {
    Vec x = x0;
    if (magnitude > 0) x += magnitude * dir_rng.sphere(prob.state_dim());
    PointEval nn = evaluate_point(theta, prob, x, 0.0, n_t_val);
    BaselineOptions bo = bopt;
    bo.seed = seed + 104729ULL * (i + 1);
    BaselineResult base = solve_baseline(prob, x, 0.0, bo);
    const double jb = base.ell_val_objective;
    if (jb > 0) subopt.push_back((nn.objective() - jb) / jb);
    if (nn.collision) ++collisions;
    pt.mean_nn += nn.objective();
    pt.mean_base += jb;
    ++drawn;
    if (magnitude == 0) break;  // degenerate sphere: one point suffices
  }
  pt.count = drawn;
  pt.mean_nn /= drawn;
  pt.mean_base /= drawn;
  pt.collision_pct = 100.0 * collisions / drawn;
  const int n = static_cast<int>(subopt.size());
  if (n == 0) return pt;
  for (double v : subopt) pt.mean_subopt += v / n;

  if (n > 1 && bootstrap > 0) {
    std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ULL);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<double> means(bootstrap);
    for (int b = 0; b < bootstrap; ++b) {
      double m = 0;
      for (int i = 0; i < n; ++i) m += subopt[pick(rng)];
      means[b] = m / n;
    }
    std::sort(means.begin(), means.end());
    pt.ci_lo = means[static_cast<int>(0.025 * (bootstrap - 1))];
    pt.ci_hi = means[static_cast<int>(0.975 * (bootstrap - 1))];
  } else {
    pt.ci_lo = pt.ci_hi = pt.mean_subopt;
  }
  return pt;
}

inline std::vector<SweepPoint> hypersphere_sweep(
    const ValueNetParams& theta, const ControlProblem& prob, const Vec& x0,
    const std::vector<double>& magnitudes, int count, unsigned long long seed,
    int n_t_val = 50, const BaselineOptions& bopt = {}) {
  std::vector<SweepPoint> out;
  out.reserve(magnitudes.size());
  for (size_t i = 0; i < magnitudes.size(); ++i)
    out.push_back(sweep_magnitude(theta, prob, x0, magnitudes[i], count,
                                  seed + 31ULL * i, n_t_val, bopt));
  return out;
}

// ---------------------------------------------------------------------------
// Curse-of-dimensionality sweep over the swap_k family: smallest network
// width whose trained policy stays within a suboptimality budget.
// ---------------------------------------------------------------------------

struct CodPoint {
  int pairs = 0;
  int d = 0;
  int width = 0;      // smallest adequate width, -1 if none in the grid
  int param_count = 0;
  double subopt = 0.0;
  double train_seconds = 0.0;
};

struct CodReport {
  std::vector<CodPoint> points;
  double fit_slope = 0.0, fit_intercept = 0.0, fit_r2 = 0.0;  // params vs d
};

inline void linear_fit(const std::vector<double>& x,
                       const std::vector<double>& y, double& slope,
                       double& intercept, double& r2) {
  const int n = static_cast<int>(x.size());
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) mx += x[i] / n, my += y[i] / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  slope = sxx > 0 ? sxy / sxx : 0;
  intercept = my - slope * mx;
  double ssr = 0;
  for (int i = 0; i < n; ++i) {
    const double e = y[i] - (slope * x[i] + intercept);
    ssr += e * e;
  }
  r2 = syy > 0 ? 1.0 - ssr / syy : 1.0;
}

inline CodReport cod_sweep(const std::vector<int>& pair_counts,
                           const std::vector<int>& width_grid,
                           const TrainConfig& base_cfg, double budget = 0.10,
                           const BaselineOptions& bopt = {}) {
  CodReport rep;
  for (int k : pair_counts) {
    ScenarioId id;
    switch (k) {
      case 2: id = ScenarioId::swap_k2; break;
      case 3: id = ScenarioId::swap_k3; break;
      case 4: id = ScenarioId::swap_k4; break;
      case 5: id = ScenarioId::swap_k5; break;
      case 6: id = ScenarioId::swap_k6; break;
      default: throw ConfigError("cod_sweep supports k in {2..6}");
    }
    Scenario sc = build(id);
    BaselineResult base = solve_baseline(*sc.problem, sc.rho.x0, 0.0, bopt);

    CodPoint pt;
    pt.pairs = k;
    pt.d = sc.problem->state_dim();
    pt.width = -1;
    for (int m : width_grid) {
      TrainConfig cfg = base_cfg;
      cfg.width = m;
      cfg.beta1 = sc.config.beta1;
      cfg.beta2 = sc.config.beta2;
      cfg.beta3 = sc.config.beta3;
      const auto tic = std::chrono::steady_clock::now();
      TrainResult tr = train(*sc.problem, sc.rho, cfg);
      const auto toc = std::chrono::steady_clock::now();
      PointEval nn = evaluate_point(tr.theta, *sc.problem, sc.rho.x0, 0.0,
                                    sc.config.n_t_val);
      const double jb = base.ell_val_objective;
      const double sub = jb > 0 ? (nn.objective() - jb) / jb : 0.0;
      if (sub <= budget) {
        pt.width = m;
        pt.param_count = ValueNetParams::param_count(pt.d, m);
        pt.subopt = sub;
        pt.train_seconds =
            std::chrono::duration<double>(toc - tic).count();
        break;
      }
    }
    rep.points.push_back(pt);
  }

  std::vector<double> ds, ps;
  for (const auto& p : rep.points)
    if (p.width > 0) {
      ds.push_back(p.d);
      ps.push_back(p.param_count);
    }
  if (ds.size() >= 2)
    linear_fit(ds, ps, rep.fit_slope, rep.fit_intercept, rep.fit_r2);
  return rep;
}

// ---------------------------------------------------------------------------
// Deployment timing: per-step NN feedback cost vs the per-decision cost of
// re-solving the baseline (estimated as 100 objective+gradient evaluations
// at n_t = 20).
// ---------------------------------------------------------------------------

struct TimingReport {
  double nn_per_step_ms = 0.0;
  double baseline_ms = 0.0;
  double ratio = 0.0;
  double nn_cv = 0.0;  // coefficient of variation over repeats
};

inline TimingReport timing_harness(const ValueNetParams& theta,
                                   const ControlProblem& prob, const Vec& x0,
                                   int n_t = 50, int repeats = 5) {
  using clock = std::chrono::steady_clock;
  TimingReport rep;

  std::vector<double> per_step(repeats);
  for (int r = 0; r < repeats; ++r) {
    const auto tic = clock::now();
    RolloutResult rr = integrate(x0, theta, prob, n_t);
    const auto toc = clock::now();
    (void)rr;
    per_step[r] =
        std::chrono::duration<double, std::milli>(toc - tic).count() / n_t;
  }
  double mean = 0;
  for (double v : per_step) mean += v / repeats;
  double var = 0;
  for (double v : per_step) var += (v - mean) * (v - mean) / repeats;
  rep.nn_per_step_ms = mean;
  rep.nn_cv = mean > 0 ? std::sqrt(var) / mean : 0.0;

  const int bl_nt = 20;
  const double h = prob.horizon() / bl_nt;
  Mat U = detail::straight_path_controls(prob, x0, bl_nt, prob.horizon());
  const auto tic = clock::now();
  for (int i = 0; i < 100; ++i) {
    auto fwd = detail::euler_forward(prob, x0, U, 0.0, h);
    Mat g = detail::euler_gradient(prob, fwd, U, 0.0, h);
    (void)g;
  }
  const auto toc = clock::now();
  rep.baseline_ms = std::chrono::duration<double, std::milli>(toc - tic).count();
  rep.ratio = rep.nn_per_step_ms > 0 ? rep.baseline_ms / rep.nn_per_step_ms
                                     : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace hjb
