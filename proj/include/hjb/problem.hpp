#pragma once

#include "hjb/common.hpp"

#include <memory>

namespace hjb {

// Obstacle costs come in two flavors: the smooth surrogate used while
// optimizing (gradients exist inside hard obstacles) and the actual cost
// used when reporting results.
enum class CostMode { Train, Validate };

// A deterministic finite-horizon optimal control problem with a
// closed-form Hamiltonian and feedback map.
//
// All state-batched operations take/return column-per-sample matrices:
// Z is d x B, P (adjoint) is d x B, U is a x B.
class ControlProblem {
 public:
  virtual ~ControlProblem() = default;

  int state_dim() const { return d_; }
  int control_dim() const { return a_; }
  double horizon() const { return T_; }
  const Vec& target() const { return y_; }
  double alpha1() const { return alpha1_; }
  double alpha2() const { return alpha2_; }
  double alpha3() const { return alpha3_; }

  // G(z) = alpha1/2 ||z - y||^2
  double terminal_cost(const Vec& z) const {
    return 0.5 * alpha1_ * (z - y_).squaredNorm();
  }
  Vec terminal_cost_grad(const Vec& z) const { return alpha1_ * (z - y_); }

  Vec terminal_cost(const Mat& Z) const {
    return 0.5 * alpha1_ * (Z.colwise() - y_).colwise().squaredNorm().transpose();
  }
  Mat terminal_cost_grad(const Mat& Z) const {
    return alpha1_ * (Z.colwise() - y_);
  }

  virtual Vec hamiltonian(double s, const Mat& Z, const Mat& P) const = 0;
  virtual Mat hamiltonian_grad_p(double s, const Mat& Z, const Mat& P) const = 0;
  virtual Mat hamiltonian_grad_z(double s, const Mat& Z, const Mat& P) const = 0;
  // Hessian-vector product d^2H/dp^2 * V, column-wise.
  virtual Mat hamiltonian_hess_pp_vec(double s, const Mat& Z, const Mat& P,
                                      const Mat& V) const = 0;
  // gradient w.r.t. z of (V . grad_p H), column-wise.
  virtual Mat hamiltonian_dz_gradp_vec(double s, const Mat& Z, const Mat& P,
                                       const Mat& V) const = 0;

  // u*(s, z, p), the argmax of the Hamiltonian (Assumption: unique,
  // continuous, closed form).
  virtual Mat feedback_control(double s, const Mat& Z, const Mat& P) const = 0;

  virtual Vec running_cost(double s, const Mat& Z, const Mat& U,
                           CostMode mode) const = 0;
  virtual Mat running_cost_grad_z(double s, const Mat& Z, const Mat& U,
                                  CostMode mode) const = 0;
  virtual Mat running_cost_grad_u(double s, const Mat& Z, const Mat& U,
                                  CostMode mode) const = 0;

  virtual Mat dynamics(double s, const Mat& Z, const Mat& U) const = 0;
  // (df/dz)^T V and (df/du)^T V, column-wise.
  virtual Mat dynamics_vjp_z(double s, const Mat& Z, const Mat& U,
                             const Mat& V) const = 0;
  virtual Mat dynamics_vjp_u(double s, const Mat& Z, const Mat& U,
                             const Mat& V) const = 0;

  // Diagnostics for the collision audit; zero for single-agent problems.
  virtual Vec interaction_value(const Mat& Z) const {
    return Vec::Zero(Z.cols());
  }
  virtual Vec obstacle_value(const Mat& Z, CostMode) const {
    return Vec::Zero(Z.cols());
  }
  // max of the pairwise bubble overlap w over all ordered pairs
  virtual Vec max_pairwise_w(const Mat& Z) const { return Vec::Zero(Z.cols()); }

  // single-point conveniences
  double hamiltonian(double s, const Vec& z, const Vec& p) const {
    return hamiltonian(s, Mat(z), Mat(p))[0];
  }
  Vec hamiltonian_grad_p(double s, const Vec& z, const Vec& p) const {
    return hamiltonian_grad_p(s, Mat(z), Mat(p)).col(0);
  }
  Vec feedback_control(double s, const Vec& z, const Vec& p) const {
    return feedback_control(s, Mat(z), Mat(p)).col(0);
  }
  double running_cost(double s, const Vec& z, const Vec& u,
                      CostMode mode = CostMode::Train) const {
    return running_cost(s, Mat(z), Mat(u), mode)[0];
  }
  Vec dynamics(double s, const Vec& z, const Vec& u) const {
    return dynamics(s, Mat(z), Mat(u)).col(0);
  }

 protected:
  ControlProblem(int d, int a, double T, Vec y, double a1, double a2, double a3)
      : d_(d), a_(a), T_(T), y_(std::move(y)), alpha1_(a1), alpha2_(a2),
        alpha3_(a3) {
    if (T_ <= 0.0) throw ConfigError("horizon T must be positive");
    if (y_.size() != d_) throw ConfigError("target dimension mismatch");
  }

  int d_, a_;
  double T_;
  Vec y_;
  double alpha1_, alpha2_, alpha3_;
};

using ProblemPtr = std::shared_ptr<const ControlProblem>;

}  // namespace hjb
