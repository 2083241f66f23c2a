#pragma once

#include "hjb/adam.hpp"
#include "hjb/problem.hpp"
#include "hjb/quadcopter.hpp"

#include <limits>
#include <vector>

namespace hjb {

// Direct transcription: forward-Euler discretization of one trajectory with
// the controls at the grid points as decision variables, solved by ADAM
// from several perturbed initial guesses.
struct BaselineOptions {
  int n_t = 0;           // 0 -> ceil(50 * (T - t0) / T)
  int max_iters = 3000;
  double lr = 0.05;      // divided by 10 at 2/3 of the iterations
  int multistarts = 5;
  double noise_std = 0.1;
  unsigned long long seed = 42;
};

struct BaselineResult {
  Mat U;            // a x n_t controls
  Mat Z;            // d x (n_t+1) trajectory
  Vec s_grid;
  Vec ell_path;     // running validation cost at the grid points
  double objective = 0.0;  // ell + G with training-mode costs (optimized)
  double ell = 0.0;        // validation-mode running cost
  double G = 0.0;
  double ell_val_objective = 0.0;  // ell + G, validation-mode
  double spread = 0.0;     // best-vs-worst finished multistart objective
  bool warning = false;    // some start diverged; best-seen iterate kept
  int n_t = 0;
  double h = 0.0;
};

namespace detail {

struct EulerRollout {
  Mat Z;  // d x (n_t+1)
  Vec ell_val_path;  // running validation cost at the grid points
  double ell_train = 0.0, ell_val = 0.0, G = 0.0;
  bool finite = true;
};

inline EulerRollout euler_forward(const ControlProblem& prob, const Vec& x,
                                  const Mat& U, double t0, double h) {
  const int n_t = static_cast<int>(U.cols());
  const int d = prob.state_dim();
  EulerRollout r;
  r.Z.resize(d, n_t + 1);
  r.Z.col(0) = x;
  r.ell_val_path = Vec::Zero(n_t + 1);
  for (int k = 0; k < n_t; ++k) {
    const double s = t0 + k * h;
    Mat Zk = r.Z.col(k);
    Mat Uk = U.col(k);
    r.ell_train += h * prob.running_cost(s, Zk, Uk, CostMode::Train)[0];
    r.ell_val += h * prob.running_cost(s, Zk, Uk, CostMode::Validate)[0];
    r.ell_val_path[k + 1] = r.ell_val;
    r.Z.col(k + 1) = r.Z.col(k) + h * prob.dynamics(s, Zk, Uk).col(0);
    if (!r.Z.col(k + 1).allFinite()) {
      r.finite = false;
      return r;
    }
  }
  r.G = prob.terminal_cost(Vec(r.Z.col(n_t)));
  return r;
}

// Exact reverse sweep of d(ell_train + G)/dU through the Euler recursion.
inline Mat euler_gradient(const ControlProblem& prob, const EulerRollout& fwd,
                          const Mat& U, double t0, double h) {
  const int n_t = static_cast<int>(U.cols());
  Mat gU(U.rows(), n_t);
  Vec lam = prob.terminal_cost_grad(Vec(fwd.Z.col(n_t)));
  for (int k = n_t - 1; k >= 0; --k) {
    const double s = t0 + k * h;
    Mat Zk = fwd.Z.col(k);
    Mat Uk = U.col(k);
    Mat lamM = lam;
    gU.col(k) = h * (prob.running_cost_grad_u(s, Zk, Uk, CostMode::Train) +
                     prob.dynamics_vjp_u(s, Zk, Uk, lamM))
                        .col(0);
    lam = lam +
          h * (prob.running_cost_grad_z(s, Zk, Uk, CostMode::Train) +
               prob.dynamics_vjp_z(s, Zk, Uk, lamM))
                  .col(0);
  }
  return gU;
}

inline Mat straight_path_controls(const ControlProblem& prob, const Vec& x,
                                  int n_t, double horizon_left) {
  Mat U(prob.control_dim(), n_t);
  if (const auto* quad = dynamic_cast<const QuadcopterProblem*>(&prob)) {
    // hover thrust, zero torques
    U.setZero();
    U.row(0).setConstant(quad->params().mass * quad->params().gravity);
  } else {
    // single-integrator agents: constant velocity toward the target
    U.colwise() = (prob.target() - x) / horizon_left;
  }
  return U;
}

}  // namespace detail

inline BaselineResult solve_baseline(const ControlProblem& prob, const Vec& x,
                                     double t0 = 0.0,
                                     const BaselineOptions& opt = {}) {
  const double T = prob.horizon();
  if (t0 < 0 || t0 >= T) throw ConfigError("t0 must lie in [0, T)");
  const int n_t =
      opt.n_t > 0 ? opt.n_t : static_cast<int>(std::ceil(50.0 * (T - t0) / T));
  const double h = (T - t0) / n_t;
  const int a = prob.control_dim();

  Mat U0 = detail::straight_path_controls(prob, x, n_t, T - t0);
  const int decay_at = (2 * opt.max_iters) / 3;

  BaselineResult best;
  best.objective = std::numeric_limits<double>::infinity();
  double worst_finished = -std::numeric_limits<double>::infinity();
  bool any_warning = false;

  for (int start = 0; start < opt.multistarts; ++start) {
    GaussianSampler rng(opt.seed + 7919ULL * start);
    Mat U = U0 + opt.noise_std * rng.matrix(a, n_t);

    Vec flat = Eigen::Map<Vec>(U.data(), U.size());
    Adam adam(static_cast<int>(flat.size()));
    double best_seen = std::numeric_limits<double>::infinity();
    Mat best_U = U;
    bool diverged = false;

    for (int it = 0; it < opt.max_iters; ++it) {
      Mat Uc = Eigen::Map<Mat>(flat.data(), a, n_t);
      auto fwd = detail::euler_forward(prob, x, Uc, t0, h);
      const double J = fwd.ell_train + fwd.G;
      if (!fwd.finite || !std::isfinite(J)) {
        diverged = true;
        break;
      }
      if (J < best_seen) {
        best_seen = J;
        best_U = Uc;
      }
      Mat gU = detail::euler_gradient(prob, fwd, Uc, t0, h);
      if (!gU.allFinite()) {
        diverged = true;
        break;
      }
      Vec g = Eigen::Map<Vec>(gU.data(), gU.size());
      adam.step(flat, g, it < decay_at ? opt.lr : opt.lr / 10);
    }
    if (!diverged) {
      Mat Uc = Eigen::Map<Mat>(flat.data(), a, n_t);
      auto fwd = detail::euler_forward(prob, x, Uc, t0, h);
      const double J = fwd.ell_train + fwd.G;
      if (fwd.finite && std::isfinite(J) && J < best_seen) {
        best_seen = J;
        best_U = Uc;
      }
      if (std::isfinite(best_seen)) worst_finished = std::max(worst_finished, best_seen);
    } else {
      any_warning = true;
    }

    if (best_seen < best.objective) {
      auto fwd = detail::euler_forward(prob, x, best_U, t0, h);
      best.objective = best_seen;
      best.U = best_U;
      best.Z = fwd.Z;
      best.ell_path = fwd.ell_val_path;
      best.ell = fwd.ell_val;
      best.G = fwd.G;
      best.ell_val_objective = fwd.ell_val + fwd.G;
    }
  }
  if (!std::isfinite(best.objective))
    throw NumericalError("baseline solver diverged from every start");

  best.warning = any_warning;
  best.n_t = n_t;
  best.h = h;
  best.s_grid = Vec::LinSpaced(n_t + 1, t0, T);
  if (std::isfinite(worst_finished) && best.objective > 0)
    best.spread = (worst_finished - best.objective) / best.objective;
  return best;
}

}  // namespace hjb
