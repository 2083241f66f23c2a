#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace hjb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Arr = Eigen::ArrayXXd;

// sigma(x) = log(e^x + e^-x), the antiderivative of tanh.
// Evaluated as |x| + log1p(e^{-2|x|}) so large |x| cannot overflow.
inline double softplus_sym(double x) {
  double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax));
}

inline Mat softplus_sym(const Mat& x) {
  return x.unaryExpr([](double v) { return softplus_sym(v); });
}

// subgradient convention: sign(0) = 0
inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic Gaussian sampler. One instance per logical stream; the
// engine state is never shared so fixed seeds give fixed draws.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : eng_(seed) {}

  double draw() { return normal_(eng_); }

  Vec vector(int n, double stddev = 1.0) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = stddev * normal_(eng_);
    return v;
  }

  Mat matrix(int rows, int cols, double stddev = 1.0) {
    Mat m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = stddev * normal_(eng_);
    return m;
  }

  // uniform point on the unit sphere in R^n
  Vec sphere(int n) {
    Vec v = vector(n);
    double nrm = v.norm();
    while (nrm < 1e-12) {
      v = vector(n);
      nrm = v.norm();
    }
    return v / nrm;
  }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace hjb
