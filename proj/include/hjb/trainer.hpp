#pragma once

#include "hjb/adam.hpp"
#include "hjb/config.hpp"
#include "hjb/rollout.hpp"
#include "hjb/scenarios.hpp"

#include <chrono>
#include <functional>
#include <vector>

namespace hjb {

// Batch-mean decomposition of the training objective.
struct LossParts {
  double ell = 0.0, G = 0.0, c_hjt = 0.0, c_hjfin = 0.0, c_hjgrad = 0.0;

  double total(const LossSeed& s) const {
    return s.w_ell * ell + s.w_G * G + s.beta1 * c_hjt + s.beta2 * c_hjfin +
           s.beta3 * c_hjgrad;
  }
};

inline LossParts loss_parts(const BatchRollout& fwd) {
  LossParts p;
  p.ell = fwd.ell.mean();
  p.G = fwd.G.mean();
  p.c_hjt = fwd.c_hjt.mean();
  p.c_hjfin = fwd.c_hjfin.mean();
  p.c_hjgrad = fwd.c_hjgrad.mean();
  return p;
}

// Batch-mean loss and its exact theta gradient in one reverse sweep.
inline LossParts loss_and_grad(const Mat& X, const ValueNetParams& theta,
                               const ControlProblem& prob, int n_t,
                               const LossSeed& seed, Vec* grad) {
  RolloutOptions opt;
  opt.store_stages = (grad != nullptr);
  BatchRollout fwd = integrate_batch(X, theta, prob, n_t, opt);
  if (grad) *grad = rollout_backward(fwd, theta, prob, seed) / X.cols();
  return loss_parts(fwd);
}

// Hold-out metrics at validation resolution. ell here re-integrates the
// running cost with validation-mode obstacle indicators; max_W / max_Q
// scan every grid point of every trajectory.
struct ValidationStats {
  double ell = 0.0, G = 0.0;
  double c_hjt = 0.0, c_hjfin = 0.0, c_hjgrad = 0.0;
  double max_W = 0.0, max_Q = 0.0;
  bool collision = false;

  double objective() const { return ell + G; }
};

inline ValidationStats validate(const ControlProblem& prob,
                                const ValueNetParams& theta, const Mat& X,
                                int n_t_val) {
  RolloutOptions opt;
  opt.store_trajectory = true;
  opt.with_validation_cost = true;
  BatchRollout fwd = integrate_batch(X, theta, prob, n_t_val, opt);

  ValidationStats v;
  v.ell = fwd.ell_val.mean();
  v.G = fwd.G.mean();
  v.c_hjt = fwd.c_hjt.mean();
  v.c_hjfin = fwd.c_hjfin.mean();
  v.c_hjgrad = fwd.c_hjgrad.mean();
  for (const Mat& Z : fwd.trajectory) {
    Vec W = prob.max_pairwise_w(Z);
    Vec Q = prob.obstacle_value(Z, CostMode::Validate);
    if (W.size() > 0) v.max_W = std::max(v.max_W, W.maxCoeff());
    if (Q.size() > 0) v.max_Q = std::max(v.max_Q, Q.maxCoeff());
  }
  // two bubbles of radius r touch when w crosses e^{-2}
  v.collision = v.max_W > std::exp(-2.0) || v.max_Q > 0.0;
  return v;
}

struct TrainLogRow {
  int iter = 0;
  double lr = 0.0;
  LossParts train;
  double train_total = 0.0;
  double wall_ms = 0.0;
  bool has_val = false;
  ValidationStats val;
};

struct TrainResult {
  ValueNetParams theta;
  std::vector<TrainLogRow> log;
  ValidationStats final_val;
  int iters = 0;
  bool aborted = false;  // non-finite loss; theta is the last good iterate
};

using TrainCallback = std::function<void(const TrainLogRow&, const ValueNetParams&)>;

// ADAM on the flat parameter vector with batch resampling, piecewise
// constant learning-rate decay and the optional late-phase penalty switch.
inline TrainResult train(const ControlProblem& prob,
                         const InitialDistribution& rho, const TrainConfig& cfg,
                         const TrainCallback& on_log = nullptr) {
  cfg.validate();
  const int d = prob.state_dim();

  ValueNetParams theta = init_params(d, cfg.width, cfg.seed);
  // Seed the quadratic part with kappa/2 * ||z - y||^2. For the
  // pure-integrator problem with terminal weight a1 the optimal feedback
  // gain is a1/(1 + a1(T-s)); kappa is the constant gain with the same time
  // integral, log(1 + a1 T)/T, so the seeded feedback law still contracts
  // all the way to the target from any displacement. Far outside the sampled
  // initial states the network body saturates, so this term supplies the
  // dominant gradient; starting from a target-reaching pull keeps the
  // feedback law sensible there instead of leaving it near zero.
  if (prob.alpha1() > 0) {
    const double T = prob.horizon();
    const Vec& y = prob.target();
    if (d <= theta.gamma) {
      const double kappa = std::log1p(prob.alpha1() * T) / T;
      theta.A.setZero();
      for (int i = 0; i < d; ++i) theta.A(i, i) = std::sqrt(kappa);
      theta.b.head(d) = -kappa * y;
      theta.c = 0.5 * kappa * y.squaredNorm();
    } else {
      // The low-rank A cannot carry the isotropic quadratic, so fall back to
      // a linear drift whose feedback law is the straight-path control from
      // the nominal start: without it the zero-gradient init leaves the
      // agents parked and training stalls.
      theta.b.head(d) = (rho.x0 - y) / T;
    }
  }
  Vec flat = theta.pack();
  Vec last_good = flat;
  Adam opt(static_cast<int>(flat.size()));

  GaussianSampler batch_rng(cfg.seed);
  const double sd = std::sqrt(rho.variance);
  auto draw_batch = [&]() {
    Mat X = sd * batch_rng.matrix(d, cfg.batch_size);
    X.colwise() += rho.x0;
    return X;
  };
  Mat X = draw_batch();
  Mat holdout = sample_initials(rho, cfg.holdout_size, cfg.seed + 1000003ULL);

  const int val_every = std::min(100, std::max(1, cfg.max_iters / 4));

  TrainResult res;
  res.theta = theta;
  int iter = 0;
  bool has_best = false;
  ValidationStats best_val;
  Vec best_flat = flat;
  try {
    for (iter = 0; iter < cfg.max_iters; ++iter) {
      if (iter > 0 && iter % cfg.resample_every == 0) X = draw_batch();

      LossSeed seed;
      if (cfg.betas_active(iter)) {
        seed.beta1 = cfg.beta1;
        seed.beta2 = cfg.beta2;
        seed.beta3 = cfg.beta3;
      }

      const auto tic = std::chrono::steady_clock::now();
      theta = ValueNetParams::unpack(flat, d, cfg.width);
      Vec grad;
      LossParts parts = loss_and_grad(X, theta, prob, cfg.n_t_train, seed, &grad);
      const double total = parts.total(seed);
      if (!std::isfinite(total) || !grad.allFinite())
        throw NumericalError("non-finite loss/gradient at iteration " +
                             std::to_string(iter));
      last_good = flat;

      TrainLogRow row;
      row.iter = iter;
      row.lr = cfg.lr_at(iter);
      row.train = parts;
      row.train_total = total;
      row.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - tic)
                        .count();
      if (iter % val_every == 0 || iter == cfg.max_iters - 1) {
        row.has_val = true;
        row.val = validate(prob, theta, holdout, cfg.n_t_val);
        if (!has_best || row.val.objective() < best_val.objective()) {
          has_best = true;
          best_val = row.val;
          best_flat = flat;
        }
      }
      res.log.push_back(row);
      if (on_log) on_log(row, theta);

      opt.step(flat, grad, row.lr);
    }
    theta = ValueNetParams::unpack(flat, d, cfg.width);
  } catch (const NumericalError&) {
    res.aborted = true;
    theta = ValueNetParams::unpack(last_good, d, cfg.width);
  }

  res.theta = theta;
  res.iters = iter;
  res.final_val = validate(prob, res.theta, holdout, cfg.n_t_val);

  // Keep the best holdout iterate if the final one regressed (e.g. a late
  // learning-rate phase destabilized training).
  if (has_best && best_val.objective() < res.final_val.objective()) {
    res.theta = ValueNetParams::unpack(best_flat, d, cfg.width);
    res.final_val = best_val;
  }
  return res;
}

}  // namespace hjb
