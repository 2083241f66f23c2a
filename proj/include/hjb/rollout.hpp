#pragma once

#include "hjb/problem.hpp"
#include "hjb/value_network.hpp"

#include <array>
#include <optional>
#include <sstream>
#include <vector>

namespace hjb {

// Weights of the per-sample objective
//   J = w_ell * ell(T) + w_G * G(z(T)) + beta1 * c_HJt(T)
//       + beta2 * c_HJfin + beta3 * c_HJgrad
struct LossSeed {
  double w_ell = 1.0, w_G = 1.0;
  double beta1 = 0.0, beta2 = 0.0, beta3 = 0.0;
};

struct RolloutOptions {
  bool store_trajectory = false;
  bool store_stages = false;        // required for the adjoint sweep
  bool with_validation_cost = false;  // also accumulate L with validation costs
};

// Batched rollout of the augmented system (z, ell, c_HJt) under the
// feedback dynamics dz/ds = -grad_p H(s, z, grad_z Phi).
struct BatchRollout {
  int n_t = 0;
  double h = 0.0;
  Mat ZT;                       // d x B
  Vec ell, c_hjt, c_hjfin, c_hjgrad, G;  // per sample
  Vec ell_val;                  // only if with_validation_cost
  std::vector<Mat> trajectory;  // n_t+1 states, if requested
  std::vector<Vec> ell_path, c_path;  // running ell / c_HJt at the grid points
  std::vector<std::array<Mat, 4>> stages;  // per-step RK4 stage states
};

namespace detail {

struct RhsEval {
  Mat dZ;
  Vec dell, dc, dell_val;
};

inline RhsEval rollout_rhs(double s, const Mat& Z, const ValueNetParams& theta,
                           const ControlProblem& prob, bool with_val) {
  const int d = prob.state_dim();
  const int B = static_cast<int>(Z.cols());
  Mat S(d + 1, B);
  S.topRows(d) = Z;
  S.row(d).setConstant(s);
  PhiEval pe = phi_forward(theta, S);
  Mat Gz = pe.grad.topRows(d);
  Vec H = prob.hamiltonian(s, Z, Gz);
  Mat Hp = prob.hamiltonian_grad_p(s, Z, Gz);

  RhsEval r;
  r.dZ = -Hp;
  r.dell = (Gz.array() * Hp.array()).colwise().sum().transpose().matrix() - H;
  r.dc = (pe.grad.row(d).transpose() - H).cwiseAbs();
  if (with_val) {
    Mat U = prob.feedback_control(s, Z, Gz);
    r.dell_val = prob.running_cost(s, Z, U, CostMode::Validate);
  }
  return r;
}

inline void check_finite(const Mat& Z, double s) {
  if (Z.allFinite()) return;
  for (int b = 0; b < Z.cols(); ++b)
    if (!Z.col(b).allFinite()) {
      std::ostringstream msg;
      msg << "rollout diverged at s=" << s << ", sample " << b;
      throw NumericalError(msg.str());
    }
}

}  // namespace detail

// Classical RK4 with fixed step h = (T - t0)/n_t from (t0, X) to T, then
// the final-time penalties c_HJfin = |Phi(T,zT) - G(zT)| and
// c_HJgrad = ||grad_z Phi(T,zT) - grad G(zT)||_1.
inline BatchRollout integrate_batch(const Mat& X, const ValueNetParams& theta,
                                    const ControlProblem& prob, int n_t,
                                    const RolloutOptions& opt = {},
                                    double t0 = 0.0) {
  if (n_t < 1) throw ConfigError("n_t must be >= 1");
  const int d = prob.state_dim();
  const int B = static_cast<int>(X.cols());
  if (X.rows() != d) throw ConfigError("initial state dimension mismatch");
  const double T = prob.horizon();
  const double h = (T - t0) / n_t;

  BatchRollout out;
  out.n_t = n_t;
  out.h = h;
  out.ell = Vec::Zero(B);
  out.c_hjt = Vec::Zero(B);
  out.ell_val = Vec::Zero(B);
  if (opt.store_trajectory) out.trajectory.reserve(n_t + 1);
  if (opt.store_stages) out.stages.reserve(n_t);

  Mat Z = X;
  if (opt.store_trajectory) {
    out.trajectory.push_back(Z);
    out.ell_path.push_back(out.ell);
    out.c_path.push_back(out.c_hjt);
  }
  const bool wv = opt.with_validation_cost;

  for (int k = 0; k < n_t; ++k) {
    const double s = t0 + k * h;
    auto k1 = detail::rollout_rhs(s, Z, theta, prob, wv);
    Mat Z2 = Z + (h / 2) * k1.dZ;
    auto k2 = detail::rollout_rhs(s + h / 2, Z2, theta, prob, wv);
    Mat Z3 = Z + (h / 2) * k2.dZ;
    auto k3 = detail::rollout_rhs(s + h / 2, Z3, theta, prob, wv);
    Mat Z4 = Z + h * k3.dZ;
    auto k4 = detail::rollout_rhs(s + h, Z4, theta, prob, wv);

    if (opt.store_stages) out.stages.push_back({Z, Z2, Z3, Z4});

    Z += (h / 6) * (k1.dZ + 2 * k2.dZ + 2 * k3.dZ + k4.dZ);
    out.ell += (h / 6) * (k1.dell + 2 * k2.dell + 2 * k3.dell + k4.dell);
    out.c_hjt += (h / 6) * (k1.dc + 2 * k2.dc + 2 * k3.dc + k4.dc);
    if (wv)
      out.ell_val +=
          (h / 6) * (k1.dell_val + 2 * k2.dell_val + 2 * k3.dell_val + k4.dell_val);

    detail::check_finite(Z, s + h);
    if (opt.store_trajectory) {
      out.trajectory.push_back(Z);
      out.ell_path.push_back(out.ell);
      out.c_path.push_back(out.c_hjt);
    }
  }

  out.ZT = Z;
  out.G = prob.terminal_cost(Z);

  Mat S(d + 1, B);
  S.topRows(d) = Z;
  S.row(d).setConstant(T);
  PhiEval pe = phi_forward(theta, S);
  Mat Gg = prob.terminal_cost_grad(Z);
  out.c_hjfin = (pe.phi - out.G).cwiseAbs();
  out.c_hjgrad =
      (pe.grad.topRows(d) - Gg).cwiseAbs().colwise().sum().transpose();
  return out;
}

// Single-sample rollout with the full time grid and feedback controls
// reconstructed at the grid points (the CSV interchange format).
struct RolloutResult {
  Vec s_grid;
  Mat Z;  // d x (n_t+1)
  Mat U;  // a x (n_t+1)
  Vec ell_path, c_path;  // running ell / c_HJt at the grid points
  double ell = 0.0, c_hjt = 0.0, c_hjfin = 0.0, c_hjgrad = 0.0, G = 0.0;
  double ell_val = 0.0;
};

inline RolloutResult integrate(const Vec& x, const ValueNetParams& theta,
                               const ControlProblem& prob, int n_t,
                               double t0 = 0.0, bool with_val_cost = false) {
  RolloutOptions opt;
  opt.store_trajectory = true;
  opt.with_validation_cost = with_val_cost;
  BatchRollout br = integrate_batch(Mat(x), theta, prob, n_t, opt, t0);

  const int d = prob.state_dim();
  RolloutResult r;
  r.s_grid = Vec::LinSpaced(n_t + 1, t0, prob.horizon());
  r.Z.resize(d, n_t + 1);
  r.U.resize(prob.control_dim(), n_t + 1);
  r.ell_path.resize(n_t + 1);
  r.c_path.resize(n_t + 1);
  for (int k = 0; k <= n_t; ++k) {
    r.Z.col(k) = br.trajectory[k].col(0);
    Mat S(d + 1, 1);
    S.col(0).head(d) = r.Z.col(k);
    S(d, 0) = r.s_grid[k];
    PhiEval pe = phi_forward(theta, S);
    r.U.col(k) = prob.feedback_control(r.s_grid[k], Mat(Vec(r.Z.col(k))),
                                       Mat(Vec(pe.grad.col(0).head(d))))
                     .col(0);
    r.ell_path[k] = br.ell_path[k][0];
    r.c_path[k] = br.c_path[k][0];
  }
  r.ell = br.ell[0];
  r.c_hjt = br.c_hjt[0];
  r.c_hjfin = br.c_hjfin[0];
  r.c_hjgrad = br.c_hjgrad[0];
  r.G = br.G[0];
  r.ell_val = with_val_cost ? br.ell_val[0] : br.ell[0];
  return r;
}

namespace detail {

// VJP of one RK4 stage: given the adjoint seed of this stage's output
// (mu_z for z, scalar seeds for the ell / c_HJt components), accumulate
// d/dtheta into g and return d/d(stage input z).
inline Mat stage_vjp(double s, const Mat& Z, const Mat& muZ, double seed_ell,
                     double seed_c, const ValueNetParams& theta,
                     const ControlProblem& prob, ValueNetParams& g) {
  const int d = prob.state_dim();
  const int B = static_cast<int>(Z.cols());
  Mat S(d + 1, B);
  S.topRows(d) = Z;
  S.row(d).setConstant(s);
  PhiEval pe = phi_forward(theta, S);
  Mat Gz = pe.grad.topRows(d);
  Vec H = prob.hamiltonian(s, Z, Gz);
  Mat Hp = prob.hamiltonian_grad_p(s, Z, Gz);
  Vec Gt = pe.grad.row(d).transpose();

  Vec r(B);
  for (int b = 0; b < B; ++b) r[b] = seed_c * sgn(Gt[b] - H[b]);
  Mat a = seed_ell * Gz - muZ;
  Vec beta = (r.array() + seed_ell).matrix();

  Mat dGz = prob.hamiltonian_hess_pp_vec(s, Z, Gz, a) - Hp * r.asDiagonal();
  Mat Vg(d + 1, B);
  Vg.topRows(d) = dGz;
  Vg.row(d) = r.transpose();

  Mat dZ = prob.hamiltonian_dz_gradp_vec(s, Z, Gz, a) -
           prob.hamiltonian_grad_z(s, Z, Gz) * beta.asDiagonal();

  Mat input_grad = Mat::Zero(d + 1, B);
  phi_adjoint(theta, S, pe, Vec(), Vg, g, &input_grad);
  dZ += input_grad.topRows(d);
  return dZ;
}

}  // namespace detail

// Exact reverse-mode differentiation of the batch-summed objective
//   sum_b J_b(theta)   (J per LossSeed)
// through every RK4 stage of the forward pass `fwd` (which must have been
// integrated with store_stages = true). Returns the flat theta gradient.
inline Vec rollout_backward(const BatchRollout& fwd, const ValueNetParams& theta,
                            const ControlProblem& prob, const LossSeed& seed,
                            double t0 = 0.0) {
  if (fwd.stages.empty() && fwd.n_t > 0)
    throw ConfigError("rollout_backward requires store_stages");
  const int d = prob.state_dim();
  const int B = static_cast<int>(fwd.ZT.cols());
  const double h = fwd.h;
  const double T = prob.horizon();

  ValueNetParams g = ValueNetParams::zeros(theta.d, theta.m);

  // terminal condition seeds
  Mat S(d + 1, B);
  S.topRows(d) = fwd.ZT;
  S.row(d).setConstant(T);
  PhiEval pe = phi_forward(theta, S);
  Mat Gg = prob.terminal_cost_grad(fwd.ZT);
  Mat GzT = pe.grad.topRows(d);

  Vec s2(B);
  for (int b = 0; b < B; ++b) s2[b] = sgn(pe.phi[b] - fwd.G[b]);
  Mat sv = (GzT - Gg).unaryExpr([](double v) { return sgn(v); });

  Vec v_val = seed.beta2 * s2;
  Mat Vg = Mat::Zero(d + 1, B);
  Vg.topRows(d) = seed.beta3 * sv;
  Mat input_grad = Mat::Zero(d + 1, B);
  phi_adjoint(theta, S, pe, v_val, Vg, g, &input_grad);

  // lambda_z(T) = d/dzT of [w_G G + beta2 |Phi - G| + beta3 ||gradPhi - gradG||_1]
  Mat lam = Gg * (Vec::Constant(B, seed.w_G) - seed.beta2 * s2).asDiagonal();
  lam -= seed.beta3 * prob.alpha1() * sv;  // Hess G = alpha1 I
  lam += input_grad.topRows(d);

  const double c_ell = seed.w_ell;
  const double c_c = seed.beta1;

  for (int k = fwd.n_t - 1; k >= 0; --k) {
    const double s = t0 + k * h;
    const auto& st = fwd.stages[k];
    Mat d4 = detail::stage_vjp(s + h, st[3], (h / 6) * lam, (h / 6) * c_ell,
                               (h / 6) * c_c, theta, prob, g);
    Mat d3 = detail::stage_vjp(s + h / 2, st[2], (h / 3) * lam + h * d4,
                               (h / 3) * c_ell, (h / 3) * c_c, theta, prob, g);
    Mat d2 = detail::stage_vjp(s + h / 2, st[1], (h / 3) * lam + (h / 2) * d3,
                               (h / 3) * c_ell, (h / 3) * c_c, theta, prob, g);
    Mat d1 = detail::stage_vjp(s, st[0], (h / 6) * lam + (h / 2) * d2,
                               (h / 6) * c_ell, (h / 6) * c_c, theta, prob, g);
    lam += d1 + d2 + d3 + d4;
  }
  return g.pack();
}

// Per-sample objective gradient in theta (spec operation). Batch of one.
inline Vec rollout_adjoint(const Vec& x, const ValueNetParams& theta,
                           const ControlProblem& prob, int n_t,
                           const LossSeed& seed) {
  RolloutOptions opt;
  opt.store_stages = true;
  BatchRollout fwd = integrate_batch(Mat(x), theta, prob, n_t, opt);
  return rollout_backward(fwd, theta, prob, seed);
}

}  // namespace hjb
