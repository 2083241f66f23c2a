#pragma once

#include "hjb/common.hpp"

namespace hjb {

class Adam {
 public:
  Adam(int n, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : b1_(beta1), b2_(beta2), eps_(eps), m_(Vec::Zero(n)), v_(Vec::Zero(n)) {}

  void step(Vec& theta, const Vec& grad, double lr) {
    if (grad.size() != m_.size())
      throw ConfigError("Adam: gradient size mismatch");
    ++t_;
    m_ = b1_ * m_ + (1 - b1_) * grad;
    v_ = (b2_ * v_.array() + (1 - b2_) * grad.array().square()).matrix();
    const double bc1 = 1 - std::pow(b1_, t_);
    const double bc2 = 1 - std::pow(b2_, t_);
    theta.array() -=
        lr * (m_.array() / bc1) / ((v_.array() / bc2).sqrt() + eps_);
  }

  int iterations() const { return t_; }

 private:
  double b1_, b2_, eps_;
  int t_ = 0;
  Vec m_, v_;
};

}  // namespace hjb
