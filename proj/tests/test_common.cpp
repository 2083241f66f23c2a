#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <hjb/common.hpp>

using namespace hjb;

TEST_CASE("softplus_sym basic values") {
  CHECK(softplus_sym(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  // matches the naive formula where it does not overflow
  for (double x : {-20.0, -3.0, -0.7, 0.1, 2.5, 15.0}) {
    const double naive = std::log(std::exp(x) + std::exp(-x));
    CHECK(softplus_sym(x) == doctest::Approx(naive).epsilon(1e-12));
  }
}

TEST_CASE("softplus_sym is even and asymptotically |x|") {
  for (double x = 0.0; x <= 30.0; x += 0.37) {
    CHECK(softplus_sym(x) == doctest::Approx(softplus_sym(-x)).epsilon(1e-15));
    CHECK(softplus_sym(x) >= std::abs(x));
  }
  CHECK(softplus_sym(40.0) - 40.0 < 1e-8);
  // no overflow at extreme arguments
  CHECK(softplus_sym(1e4) == 1e4);
  CHECK(std::isfinite(softplus_sym(-1e8)));
}

TEST_CASE("softplus_sym derivative is tanh") {
  const double eps = 1e-6;
  for (double x = -8.0; x <= 8.0; x += 0.29) {
    const double fd = (softplus_sym(x + eps) - softplus_sym(x - eps)) / (2 * eps);
    CHECK(fd == doctest::Approx(std::tanh(x)).epsilon(1e-7));
  }
}

TEST_CASE("matrix softplus matches scalar") {
  Mat X(2, 3);
  X << -5, 0, 1.3, 700, -700, 0.01;
  Mat Y = softplus_sym(X);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(Y(i, j) == doctest::Approx(softplus_sym(X(i, j))).epsilon(1e-15));
}

TEST_CASE("sign with zero subgradient") {
  CHECK(sgn(0.0) == 0.0);
  CHECK(sgn(3.2) == 1.0);
  CHECK(sgn(-0.001) == -1.0);
}

TEST_CASE("gaussian sampler determinism and sphere") {
  GaussianSampler a(123), b(123), c(124);
  Vec va = a.vector(16), vb = b.vector(16), vc = c.vector(16);
  CHECK((va - vb).norm() == 0.0);
  CHECK((va - vc).norm() > 0.0);

  GaussianSampler s(7);
  for (int i = 0; i < 10; ++i)
    CHECK(s.sphere(6).norm() == doctest::Approx(1.0).epsilon(1e-12));
}
