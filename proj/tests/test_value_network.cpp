#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <hjb/value_network.hpp>

#include <cstdio>

using namespace hjb;

namespace {

ValueNetParams random_params(int d, int m, unsigned long long seed) {
  ValueNetParams p = ValueNetParams::zeros(d, m);
  GaussianSampler rng(seed);
  p.w = rng.vector(m, 0.5);
  p.K0 = rng.matrix(m, d + 1, 0.5);
  p.K1 = rng.matrix(m, m, 0.5 / std::sqrt(double(m)));
  p.b0 = rng.vector(m, 0.3);
  p.b1 = rng.vector(m, 0.3);
  p.A = rng.matrix(p.gamma, d + 1, 0.4);
  p.b = rng.vector(d + 1, 0.3);
  p.c = rng.vector(1)[0];
  return p;
}

double phi_scalar(const ValueNetParams& p, const Vec& s) {
  return phi_forward(p, Mat(s)).phi[0];
}

}  // namespace

TEST_CASE("parameter counts match the published table") {
  CHECK(ValueNetParams::param_count(4, 32) == 1311);    // corridor
  CHECK(ValueNetParams::param_count(4, 16) == 415);     // swap 2
  CHECK(ValueNetParams::param_count(24, 32) == 2196);   // swap 12
  CHECK(ValueNetParams::param_count(150, 512) == 342654);  // swarm
  CHECK(ValueNetParams::param_count(12, 128) == 18576);    // quadcopter
}

TEST_CASE("constant network") {
  ValueNetParams p = ValueNetParams::zeros(3, 5);
  p.c = 5.0;
  Vec s = (Vec(4) << 0.3, -1, 2, 0.5).finished();
  PhiEval e = phi_forward(p, Mat(s));
  CHECK(e.phi[0] == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(e.grad.col(0).norm() == doctest::Approx(0.0));
}

TEST_CASE("rank-1 quadratic") {
  ValueNetParams p = ValueNetParams::zeros(3, 4);
  p.A.row(0) = Vec::Unit(4, 2).transpose();  // picks s[2]
  Vec s = (Vec(4) << 0.3, -1, 2, 0.5).finished();
  CHECK(phi_scalar(p, s) == doctest::Approx(0.5 * 2.0 * 2.0).epsilon(1e-14));
}

TEST_CASE("w = 0 gradient is the quadratic part") {
  ValueNetParams p = random_params(4, 6, 11);
  p.w.setZero();
  Vec s = GaussianSampler(3).vector(5);
  PhiEval e = phi_forward(p, Mat(s));
  Vec expected = p.A.transpose() * (p.A * s) + p.b;
  CHECK((e.grad.col(0) - expected).norm() < 1e-12);
  // c shift leaves the gradient unchanged
  ValueNetParams q = p;
  q.c += 17.0;
  PhiEval e2 = phi_forward(q, Mat(s));
  CHECK((e2.grad - e.grad).norm() == 0.0);
  CHECK(e2.phi[0] == doctest::Approx(e.phi[0] + 17.0).epsilon(1e-12));
}

TEST_CASE("quadratic form is positive semidefinite") {
  ValueNetParams p = random_params(6, 4, 5);
  GaussianSampler rng(9);
  for (int i = 0; i < 50; ++i) {
    Vec s = rng.vector(7, 2.0);
    CHECK(s.dot(p.A.transpose() * (p.A * s)) >= 0.0);
  }
}

TEST_CASE("phi_grad matches finite differences") {
  GaussianSampler rng(21);
  const int d = 5, m = 7;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    ValueNetParams p = random_params(d, m, 100 + trial);
    Vec s = rng.vector(d + 1, 1.5);
    PhiEval e = phi_forward(p, Mat(s));
    const double eps = 1e-6;
    for (int i = 0; i < d + 1; ++i) {
      Vec sp = s, sm = s;
      sp[i] += eps;
      sm[i] -= eps;
      const double fd = (phi_scalar(p, sp) - phi_scalar(p, sm)) / (2 * eps);
      const double scale = std::max(1.0, std::abs(fd));
      worst = std::max(worst, std::abs(fd - e.grad(i, 0)) / scale);
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("phi value in grad path equals phi") {
  ValueNetParams p = random_params(4, 9, 3);
  GaussianSampler rng(4);
  Mat S = rng.matrix(5, 8);
  PhiEval e = phi_forward(p, S);
  for (int b = 0; b < 8; ++b)
    CHECK(e.phi[b] == phi_forward(p, Mat(Vec(S.col(b)))).phi[0]);
}

TEST_CASE("phi_param_adjoint trivial seeds") {
  ValueNetParams p = random_params(3, 5, 17);
  Vec s = GaussianSampler(6).vector(4);

  // value seed: dPhi/dc = 1, dPhi/dw = N(s)
  ValueNetParams g = phi_param_adjoint(s, p, 1.0, Vec::Zero(4));
  CHECK(g.c == doctest::Approx(1.0).epsilon(1e-14));
  PhiEval e = phi_forward(p, Mat(s));
  Vec N = e.A0 + e.A1;
  CHECK((g.w - N).norm() < 1e-12);

  // pure time-gradient seed with w = 0: only b receives it
  ValueNetParams pw = p;
  pw.w.setZero();
  ValueNetParams g2 = phi_param_adjoint(s, pw, 0.0, Vec::Unit(4, 3));
  CHECK((g2.b - Vec::Unit(4, 3)).norm() < 1e-13);
  CHECK(g2.K1.norm() == doctest::Approx(0.0));
  CHECK(g2.b0.norm() == doctest::Approx(0.0));
}

TEST_CASE("phi_param_adjoint matches finite differences") {
  const int d = 4, m = 6;
  GaussianSampler rng(33);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    ValueNetParams p = random_params(d, m, 300 + trial);
    Vec s = rng.vector(d + 1, 1.2);
    const double vv = rng.vector(1)[0];
    Vec vg = rng.vector(d + 1);

    ValueNetParams g = phi_param_adjoint(s, p, vv, vg);
    Vec gflat = g.pack();
    Vec pflat = p.pack();

    auto f = [&](const Vec& th) {
      ValueNetParams q = ValueNetParams::unpack(th, d, m);
      PhiEval e = phi_forward(q, Mat(s));
      return vv * e.phi[0] + vg.dot(e.grad.col(0));
    };
    const double eps = 1e-6;
    for (int k = 0; k < 20; ++k) {
      Vec dir = rng.vector(static_cast<int>(pflat.size()));
      dir.normalize();
      const double fd = (f(pflat + eps * dir) - f(pflat - eps * dir)) / (2 * eps);
      const double scale = std::max(1.0, std::abs(fd));
      worst = std::max(worst, std::abs(fd - gflat.dot(dir)) / scale);
    }
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("adjoint input gradient reproduces phi gradient") {
  ValueNetParams p = random_params(5, 8, 51);
  GaussianSampler rng(52);
  Mat S = rng.matrix(6, 4);
  PhiEval e = phi_forward(p, S);
  ValueNetParams g = ValueNetParams::zeros(5, 8);
  Mat input_grad = Mat::Zero(6, 4);
  phi_adjoint(p, S, e, Vec::Ones(4), Mat::Zero(6, 4), g, &input_grad);
  CHECK((input_grad - e.grad).norm() < 1e-11);
}

TEST_CASE("pack/unpack round trip") {
  ValueNetParams p = random_params(7, 5, 77);
  ValueNetParams q = ValueNetParams::unpack(p.pack(), 7, 5);
  CHECK((p.pack() - q.pack()).norm() == 0.0);
  CHECK(q.A.rows() == p.gamma);
}

TEST_CASE("init_params is deterministic and sanely scaled") {
  ValueNetParams a = init_params(4, 32, 9);
  ValueNetParams b = init_params(4, 32, 9);
  ValueNetParams c = init_params(4, 32, 10);
  CHECK((a.pack() - b.pack()).norm() == 0.0);
  CHECK((a.pack() - c.pack()).norm() > 0.0);
  CHECK(a.w.norm() == 0.0);
  CHECK(a.c == 0.0);
  // Layer matrices ~ N(0, 1/fan_in): bounded but not vanishing.
  CHECK(a.K0.cwiseAbs().maxCoeff() < 4.0);
  CHECK(a.K0.cwiseAbs().maxCoeff() > 0.01);
  CHECK(a.K1.cwiseAbs().maxCoeff() < 4.0);
}

TEST_CASE("checkpoint round trip is bit exact") {
  Checkpoint ck;
  ck.scenario = "corridor";
  ck.params = random_params(4, 32, 123);
  ck.seed = 42;
  ck.iters = 1800;
  ck.train_config = {{"lr", 0.01}};
  const std::string path = "test_ck.json";
  ck.save(path);
  Checkpoint lk = Checkpoint::load(path);
  CHECK(lk.scenario == ck.scenario);
  CHECK(lk.seed == ck.seed);
  CHECK(lk.iters == ck.iters);
  Vec a = ck.params.pack(), b = lk.params.pack();
  REQUIRE(a.size() == b.size());
  for (long i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);  // bit exact
  std::remove(path.c_str());
}

TEST_CASE("checkpoint rejects corrupt and mismatched input") {
  {
    std::ofstream out("bad_ck.json");
    out << "{ not json";
  }
  CHECK_THROWS_AS(Checkpoint::load("bad_ck.json"), ConfigError);
  std::remove("bad_ck.json");

  Checkpoint ck;
  ck.scenario = "corridor";
  ck.params = ValueNetParams::zeros(4, 8);
  nlohmann::json j = ck.to_json();
  j["format_version"] = 999;
  CHECK_THROWS_AS(Checkpoint::from_json(j), ConfigError);

  nlohmann::json j2 = ck.to_json();
  j2["params"]["w"] = std::vector<double>{1.0};  // wrong length
  CHECK_THROWS_AS(Checkpoint::from_json(j2), ConfigError);
}
