#pragma once

#include "hjb/problem.hpp"

#include <numbers>
#include <vector>

namespace hjb {

// Isotropic Gaussian density in R^q with covariance sigma2 * I.
inline double gaussian_density(const Vec& z, const Vec& mu, double sigma2) {
  if (sigma2 <= 0.0) throw ConfigError("gaussian covariance must be positive definite");
  const int q = static_cast<int>(z.size());
  const double norm =
      std::sqrt(std::pow(2.0 * std::numbers::pi, q) * std::pow(sigma2, q));
  return std::exp(-0.5 * (z - mu).squaredNorm() / sigma2) / norm;
}

struct GaussianBump {
  Vec mu;
  double sigma2 = 1.0;
};

// Hard circular obstacle with a smooth training surrogate: inside the
// (inflated) training region the cost is a sum of Gaussian repulsors, in
// validation it is the 0/1 indicator of the hard region.
struct HardCircle {
  Vec center;
  double radius = 0.0;
  double train_radius = 0.0;  // >= radius
};

// Axis-aligned box obstacle (swarm prisms), same train/validate split as
// HardCircle. Training repulsion is a grid of Gaussian bumps tiling the
// interior of the box inflated by `inflation` about its center.
struct BoxObstacle {
  Vec lo, hi;
  double inflation = 0.10;
  double bump_spacing = 1.0;
  double bump_sigma2 = 0.25;
};

struct InteractionSpec {
  double radius = 0.5;  // space-bubble radius r
};

// w(zi, zj) of the pairwise interaction: exp(-||zi-zj||^2 / (2 r^2)) when
// the bubbles overlap (distance < 2r), 0 otherwise. Discontinuous at 2r
// exactly as specified.
inline double pairwise_w(const Vec& zi, const Vec& zj, double r) {
  const double d2 = (zi - zj).squaredNorm();
  if (d2 >= 4.0 * r * r) return 0.0;
  return std::exp(-d2 / (2.0 * r * r));
}

// Multi-agent problem with dynamics f = u, quadratic energy, Gaussian or
// hard obstacles, and pairwise space-bubble interactions.
class MultiAgentProblem : public ControlProblem {
 public:
  using ControlProblem::hamiltonian;
  using ControlProblem::hamiltonian_grad_p;
  using ControlProblem::feedback_control;
  using ControlProblem::running_cost;
  using ControlProblem::dynamics;

  struct Params {
    int n = 2;               // agents
    int q = 2;               // per-agent dimension
    double T = 1.0;
    Vec x0, y;
    double alpha1 = 100.0, alpha2 = 0.0, alpha3 = 0.0;
    InteractionSpec interaction;
    double kappa = 0.0;      // per-agent energy offset
    std::vector<GaussianBump> soft_obstacles;   // per-agent, shared
    std::vector<HardCircle> hard_circles;
    std::vector<BoxObstacle> boxes;
  };

  explicit MultiAgentProblem(Params prm)
      : ControlProblem(prm.n * prm.q, prm.n * prm.q, prm.T, prm.y, prm.alpha1,
                       prm.alpha2, prm.alpha3),
        prm_(std::move(prm)) {
    if (prm_.interaction.radius <= 0.0)
      throw ConfigError("interaction radius must be positive");
    for (const auto& c : prm_.hard_circles)
      if (c.train_radius < c.radius)
        throw ConfigError("training-buffer radius must be >= hard radius");
    for (const auto& b : prm_.boxes) box_bumps_.push_back(tile_box(b));
  }

  const Params& params() const { return prm_; }
  int agents() const { return prm_.n; }
  int agent_dim() const { return prm_.q; }

  // ---- costs on the joint state ----

  // W(z) over ordered pairs: each unordered pair contributes twice.
  double interaction_cost(const Vec& z) const {
    const int n = prm_.n, q = prm_.q;
    const double r = prm_.interaction.radius;
    double W = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        W += 2.0 * pairwise_w(z.segment(i * q, q), z.segment(j * q, q), r);
    return W;
  }

  Vec interaction_grad(const Vec& z) const {
    const int n = prm_.n, q = prm_.q;
    const double r2 = prm_.interaction.radius * prm_.interaction.radius;
    Vec g = Vec::Zero(d_);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Vec delta = z.segment(i * q, q) - z.segment(j * q, q);
        const double d2 = delta.squaredNorm();
        if (d2 >= 4.0 * r2) continue;
        Vec gij = std::exp(-d2 / (2.0 * r2)) * (-2.0 / r2) * delta;
        g.segment(i * q, q) += gij;
        g.segment(j * q, q) -= gij;
      }
    return g;
  }

  double obstacle_cost_agent(const Vec& zi, CostMode mode) const {
    double Q = 0.0;
    for (const auto& gb : prm_.soft_obstacles)
      Q += gaussian_density(zi, gb.mu, gb.sigma2);
    if (!prm_.hard_circles.empty()) {
      if (mode == CostMode::Validate) {
        for (const auto& c : prm_.hard_circles)
          if ((zi - c.center).norm() < c.radius) return Q + 1.0;
      } else if (inside_any_train_circle(zi)) {
        for (const auto& c : prm_.hard_circles)
          Q += gaussian_density(zi, c.center, 1.0);
      }
    }
    for (size_t b = 0; b < prm_.boxes.size(); ++b) {
      const auto& box = prm_.boxes[b];
      if (mode == CostMode::Validate) {
        if (inside_box(zi, box.lo, box.hi)) return Q + 1.0;
      } else if (inside_inflated_box(zi, box)) {
        for (const auto& mu : box_bumps_[b])
          Q += gaussian_density(zi, mu, box.bump_sigma2);
      }
    }
    return Q;
  }

  Vec obstacle_grad_agent(const Vec& zi, CostMode mode) const {
    Vec g = Vec::Zero(prm_.q);
    for (const auto& gb : prm_.soft_obstacles)
      g += gaussian_density(zi, gb.mu, gb.sigma2) * (-(zi - gb.mu) / gb.sigma2);
    if (mode == CostMode::Train) {
      if (!prm_.hard_circles.empty() && inside_any_train_circle(zi))
        for (const auto& c : prm_.hard_circles)
          g += gaussian_density(zi, c.center, 1.0) * (-(zi - c.center));
      for (size_t b = 0; b < prm_.boxes.size(); ++b) {
        const auto& box = prm_.boxes[b];
        if (!inside_inflated_box(zi, box)) continue;
        for (const auto& mu : box_bumps_[b])
          g += gaussian_density(zi, mu, box.bump_sigma2) *
               (-(zi - mu) / box.bump_sigma2);
      }
    }
    return g;
  }

  double obstacle_cost(const Vec& z, CostMode mode) const {
    double Q = 0.0;
    for (int i = 0; i < prm_.n; ++i)
      Q += obstacle_cost_agent(z.segment(i * prm_.q, prm_.q), mode);
    return Q;
  }

  Vec obstacle_grad(const Vec& z, CostMode mode) const {
    Vec g = Vec::Zero(d_);
    for (int i = 0; i < prm_.n; ++i)
      g.segment(i * prm_.q, prm_.q) =
          obstacle_grad_agent(z.segment(i * prm_.q, prm_.q), mode);
    return g;
  }

  // ---- ControlProblem interface ----

  // H(s,z,p) = 1/2 ||p||^2 - n*kappa - alpha2 Q(z) - alpha3 W(z)
  Vec hamiltonian(double, const Mat& Z, const Mat& P) const override {
    const int B = static_cast<int>(Z.cols());
    Vec H(B);
    for (int b = 0; b < B; ++b)
      H[b] = 0.5 * P.col(b).squaredNorm() - prm_.n * prm_.kappa -
             alpha2_ * obstacle_cost(Z.col(b), CostMode::Train) -
             alpha3_ * interaction_cost(Z.col(b));
    return H;
  }

  Mat hamiltonian_grad_p(double, const Mat&, const Mat& P) const override {
    return P;
  }

  Mat hamiltonian_grad_z(double, const Mat& Z, const Mat&) const override {
    const int B = static_cast<int>(Z.cols());
    Mat G(d_, B);
    for (int b = 0; b < B; ++b)
      G.col(b) = -alpha2_ * obstacle_grad(Z.col(b), CostMode::Train) -
                 alpha3_ * interaction_grad(Z.col(b));
    return G;
  }

  Mat hamiltonian_hess_pp_vec(double, const Mat&, const Mat&,
                              const Mat& V) const override {
    return V;  // H_pp = I
  }

  Mat hamiltonian_dz_gradp_vec(double, const Mat& Z, const Mat&,
                               const Mat&) const override {
    return Mat::Zero(d_, Z.cols());  // grad_p H = p has no z dependence
  }

  Mat feedback_control(double, const Mat&, const Mat& P) const override {
    return -P;
  }

  Vec running_cost(double, const Mat& Z, const Mat& U,
                   CostMode mode) const override {
    const int B = static_cast<int>(Z.cols());
    Vec L(B);
    for (int b = 0; b < B; ++b)
      L[b] = 0.5 * U.col(b).squaredNorm() + prm_.n * prm_.kappa +
             alpha2_ * obstacle_cost(Z.col(b), mode) +
             alpha3_ * interaction_cost(Z.col(b));
    return L;
  }

  Mat running_cost_grad_z(double, const Mat& Z, const Mat&,
                          CostMode mode) const override {
    const int B = static_cast<int>(Z.cols());
    Mat G(d_, B);
    for (int b = 0; b < B; ++b)
      G.col(b) = alpha2_ * obstacle_grad(Z.col(b), mode) +
                 alpha3_ * interaction_grad(Z.col(b));
    return G;
  }

  Mat running_cost_grad_u(double, const Mat&, const Mat& U,
                          CostMode) const override {
    return U;
  }

  Mat dynamics(double, const Mat&, const Mat& U) const override { return U; }

  Mat dynamics_vjp_z(double, const Mat& Z, const Mat&,
                     const Mat&) const override {
    return Mat::Zero(d_, Z.cols());
  }

  Mat dynamics_vjp_u(double, const Mat&, const Mat&,
                     const Mat& V) const override {
    return V;
  }

  Vec interaction_value(const Mat& Z) const override {
    Vec v(Z.cols());
    for (int b = 0; b < Z.cols(); ++b) v[b] = interaction_cost(Z.col(b));
    return v;
  }

  // Hard-region membership only: soft Gaussian bumps shape the running cost
  // but do not define a forbidden set, so they never count as a violation.
  Vec obstacle_value(const Mat& Z, CostMode mode) const override {
    const int n = prm_.n, q = prm_.q;
    Vec v = Vec::Zero(Z.cols());
    for (int b = 0; b < Z.cols(); ++b)
      for (int i = 0; i < n && v[b] == 0.0; ++i) {
        const Vec zi = Z.col(b).segment(i * q, q);
        bool inside = false;
        if (mode == CostMode::Validate) {
          for (const auto& c : prm_.hard_circles)
            if ((zi - c.center).norm() < c.radius) inside = true;
          for (const auto& box : prm_.boxes)
            if (inside_box(zi, box.lo, box.hi)) inside = true;
        } else {
          if (inside_any_train_circle(zi)) inside = true;
          for (const auto& box : prm_.boxes)
            if (inside_inflated_box(zi, box)) inside = true;
        }
        if (inside) v[b] = 1.0;
      }
    return v;
  }

  Vec max_pairwise_w(const Mat& Z) const override {
    const int n = prm_.n, q = prm_.q;
    const double r = prm_.interaction.radius;
    Vec v = Vec::Zero(Z.cols());
    for (int b = 0; b < Z.cols(); ++b)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          v[b] = std::max(v[b], pairwise_w(Z.col(b).segment(i * q, q),
                                           Z.col(b).segment(j * q, q), r));
    return v;
  }

 private:
  bool inside_any_train_circle(const Vec& zi) const {
    for (const auto& c : prm_.hard_circles)
      if ((zi - c.center).norm() < c.train_radius) return true;
    return false;
  }

  static bool inside_box(const Vec& zi, const Vec& lo, const Vec& hi) {
    for (int k = 0; k < lo.size(); ++k)
      if (zi[k] <= lo[k] || zi[k] >= hi[k]) return false;
    return true;
  }

  static bool inside_inflated_box(const Vec& zi, const BoxObstacle& box) {
    Vec c = 0.5 * (box.lo + box.hi);
    Vec half = 0.5 * (box.hi - box.lo) * (1.0 + box.inflation);
    return inside_box(zi, c - half, c + half);
  }

  static std::vector<Vec> tile_box(const BoxObstacle& box) {
    std::vector<Vec> bumps;
    const int q = static_cast<int>(box.lo.size());
    std::vector<std::vector<double>> axes(q);
    for (int k = 0; k < q; ++k) {
      const double len = box.hi[k] - box.lo[k];
      const int cnt = std::max(1, static_cast<int>(std::floor(len / box.bump_spacing)));
      for (int i = 0; i < cnt; ++i)
        axes[k].push_back(box.lo[k] + (i + 0.5) * len / cnt);
    }
    std::vector<int> idx(q, 0);
    while (true) {
      Vec mu(q);
      for (int k = 0; k < q; ++k) mu[k] = axes[k][idx[k]];
      bumps.push_back(mu);
      int k = 0;
      while (k < q && ++idx[k] == static_cast<int>(axes[k].size())) idx[k++] = 0;
      if (k == q) break;
    }
    return bumps;
  }

  Params prm_;
  std::vector<std::vector<Vec>> box_bumps_;
};

}  // namespace hjb
