#pragma once

#include "hjb/common.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace hjb {

// Value function parameterization
//   Phi(s) = w.N(s) + 1/2 s.(A^T A)s + b.s + c,   s = (x, t) in R^{d+1}
// with a two-layer ResNet
//   a0 = sigma(K0 s + b0),  N(s) = a0 + sigma(K1 a0 + b1)
// and sigma the antiderivative of tanh. The quadratic rank is
// gamma = min(10, d+1), which reproduces the shipped parameter counts.
struct ValueNetParams {
  int d = 0, m = 0, gamma = 0;
  Vec w, b0, b1, b;
  Mat K0, K1, A;
  double c = 0.0;

  static int quad_rank(int d) { return std::min(10, d + 1); }

  static long param_count(int d, int m) {
    const long in = d + 1;
    return m + m * in + static_cast<long>(m) * m + 2L * m +
           static_cast<long>(quad_rank(d)) * in + in + 1;
  }

  long count() const { return param_count(d, m); }

  static ValueNetParams zeros(int d, int m) {
    ValueNetParams p;
    p.d = d;
    p.m = m;
    p.gamma = quad_rank(d);
    p.w = Vec::Zero(m);
    p.b0 = Vec::Zero(m);
    p.b1 = Vec::Zero(m);
    p.b = Vec::Zero(d + 1);
    p.K0 = Mat::Zero(m, d + 1);
    p.K1 = Mat::Zero(m, m);
    p.A = Mat::Zero(p.gamma, d + 1);
    p.c = 0.0;
    return p;
  }

  // flat layout: w, K0 (row-major), K1, b0, b1, A, b, c
  Vec pack() const {
    Vec v(count());
    long off = 0;
    auto put_vec = [&](const Vec& x) {
      v.segment(off, x.size()) = x;
      off += x.size();
    };
    auto put_mat = [&](const Mat& x) {
      for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) v[off++] = x(i, j);
    };
    put_vec(w);
    put_mat(K0);
    put_mat(K1);
    put_vec(b0);
    put_vec(b1);
    put_mat(A);
    put_vec(b);
    v[off++] = c;
    return v;
  }

  static ValueNetParams unpack(const Vec& v, int d, int m) {
    ValueNetParams p = zeros(d, m);
    if (v.size() != p.count()) throw ConfigError("parameter vector size mismatch");
    long off = 0;
    auto get_vec = [&](Vec& x) {
      x = v.segment(off, x.size());
      off += x.size();
    };
    auto get_mat = [&](Mat& x) {
      for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) x(i, j) = v[off++];
    };
    get_vec(p.w);
    get_mat(p.K0);
    get_mat(p.K1);
    get_vec(p.b0);
    get_vec(p.b1);
    get_mat(p.A);
    get_vec(p.b);
    p.c = v[off++];
    return p;
  }
};

inline ValueNetParams init_params(int d, int m, std::uint64_t seed) {
  ValueNetParams p = ValueNetParams::zeros(d, m);
  GaussianSampler rng(seed);
  p.K0 = rng.matrix(m, d + 1, 1.0 / std::sqrt(double(d + 1)));
  p.K1 = rng.matrix(m, m, 1.0 / std::sqrt(double(m)));
  p.A = rng.matrix(p.gamma, d + 1, 0.1);
  return p;
}

// Forward evaluation over a batch of space-time points (columns of S,
// each of length d+1). Caches the activations the adjoint needs.
struct PhiEval {
  Vec phi;    // B
  Mat grad;   // (d+1) x B, split [grad_z ; d/dt]
  Mat Q0, A0, Q1, A1, V0, U0;  // m x B
  Mat AS;     // gamma x B
};

inline PhiEval phi_forward(const ValueNetParams& p, const Mat& S) {
  if (S.rows() != p.d + 1) throw ConfigError("phi input dimension mismatch");
  PhiEval e;
  Mat T0 = (p.K0 * S).colwise() + p.b0;
  e.Q0 = T0.array().tanh().matrix();
  e.A0 = softplus_sym(T0);
  Mat T1 = (p.K1 * e.A0).colwise() + p.b1;
  e.Q1 = T1.array().tanh().matrix();
  e.A1 = softplus_sym(T1);
  e.AS = p.A * S;

  e.phi = ((e.A0 + e.A1).transpose() * p.w) + (S.transpose() * p.b);
  e.phi.array() += 0.5 * e.AS.colwise().squaredNorm().transpose().array() + p.c;

  Mat W1 = (e.Q1.array().colwise() * p.w.array()).matrix();
  e.V0 = (p.K1.transpose() * W1).colwise() + p.w;
  e.U0 = (e.Q0.array() * e.V0.array()).matrix();
  e.grad = (p.K0.transpose() * e.U0 + p.A.transpose() * e.AS).colwise() + p.b;
  return e;
}

// Reverse-mode sweep of F = sum_b [ v_val_b * Phi(s_b) + v_grad_b . grad Phi(s_b) ].
// Accumulates dF/dtheta into `g` and, when non-null, adds dF/ds_b into
// `input_grad` column b. The grad-seeded path runs second derivatives of
// sigma through both ResNet layers (sigma'' = 1 - tanh^2).
inline void phi_adjoint(const ValueNetParams& p, const Mat& S, const PhiEval& e,
                        const Vec& v_val, const Mat& v_grad, ValueNetParams& g,
                        Mat* input_grad = nullptr) {
  const int B = static_cast<int>(S.cols());
  const bool has_val = v_val.size() > 0;
  if (has_val && v_val.size() != B) throw ConfigError("v_val batch mismatch");
  if (v_grad.rows() != p.d + 1 || v_grad.cols() != B)
    throw ConfigError("v_grad shape mismatch");

  const Mat W1 = (e.Q1.array().colwise() * p.w.array()).matrix();

  if (has_val) {
    g.w += (e.A0 + e.A1) * v_val;
    g.c += v_val.sum();
    g.b += S * v_val;
    g.A += (e.AS * v_val.asDiagonal()) * S.transpose();
    Mat dT1 = W1 * v_val.asDiagonal();
    g.K1 += dT1 * e.A0.transpose();
    g.b1 += dT1.rowwise().sum();
    Mat dT0 = e.U0 * v_val.asDiagonal();
    g.K0 += dT0 * S.transpose();
    g.b0 += dT0.rowwise().sum();
    if (input_grad) *input_grad += e.grad * v_val.asDiagonal();
  }

  // gradient-seeded path
  Mat C0 = p.K0 * v_grad;
  g.K0 += e.U0 * v_grad.transpose();
  Mat dV0 = (C0.array() * e.Q0.array()).matrix();
  Mat KdV = p.K1 * dV0;
  g.w += (dV0 + (e.Q1.array() * KdV.array()).matrix()).rowwise().sum();
  Mat dT1 = ((1.0 - e.Q1.array().square()) * (KdV.array().colwise() * p.w.array())).matrix();
  g.K1 += W1 * dV0.transpose() + dT1 * e.A0.transpose();
  g.b1 += dT1.rowwise().sum();
  Mat dA0 = p.K1.transpose() * dT1;
  Mat dT0 = ((1.0 - e.Q0.array().square()) * C0.array() * e.V0.array() +
             e.Q0.array() * dA0.array()).matrix();
  g.K0 += dT0 * S.transpose();
  g.b0 += dT0.rowwise().sum();
  g.A += p.A * (S * v_grad.transpose() + v_grad * S.transpose());
  g.b += v_grad.rowwise().sum();
  if (input_grad)
    *input_grad += p.K0.transpose() * dT0 + p.A.transpose() * (p.A * v_grad);
}

struct Checkpoint {
  static constexpr int kFormatVersion = 1;
  std::string scenario;
  ValueNetParams params;
  nlohmann::json train_config;  // opaque snapshot
  std::uint64_t seed = 0;
  long iters = 0;

  nlohmann::json to_json() const {
    auto vec_to = [](const Vec& v) {
      return std::vector<double>(v.data(), v.data() + v.size());
    };
    auto mat_to = [](const Mat& m) {  // row-major
      std::vector<double> out;
      out.reserve(m.size());
      for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
      return out;
    };
    nlohmann::json j;
    j["format_version"] = kFormatVersion;
    j["scenario"] = scenario;
    j["dims"] = {{"d", params.d}, {"m", params.m}, {"gamma", params.gamma}};
    j["params"] = {{"w", vec_to(params.w)},   {"K0", mat_to(params.K0)},
                   {"K1", mat_to(params.K1)}, {"b0", vec_to(params.b0)},
                   {"b1", vec_to(params.b1)}, {"A", mat_to(params.A)},
                   {"b", vec_to(params.b)},   {"c", params.c}};
    j["train_config"] = train_config;
    j["seed"] = seed;
    j["iters"] = iters;
    return j;
  }

  static Checkpoint from_json(const nlohmann::json& j) {
    if (!j.contains("format_version") ||
        j.at("format_version").get<int>() != kFormatVersion)
      throw ConfigError("unsupported checkpoint format version");
    Checkpoint ck;
    ck.scenario = j.at("scenario").get<std::string>();
    const int d = j.at("dims").at("d").get<int>();
    const int m = j.at("dims").at("m").get<int>();
    ck.params = ValueNetParams::zeros(d, m);
    if (j.at("dims").at("gamma").get<int>() != ck.params.gamma)
      throw ConfigError("checkpoint gamma inconsistent with d");
    const auto& pj = j.at("params");
    auto load_vec = [&](const char* key, Vec& v) {
      auto arr = pj.at(key).get<std::vector<double>>();
      if (static_cast<long>(arr.size()) != v.size())
        throw ConfigError(std::string("checkpoint array length mismatch: ") + key);
      v = Eigen::Map<const Vec>(arr.data(), arr.size());
    };
    auto load_mat = [&](const char* key, Mat& m_) {
      auto arr = pj.at(key).get<std::vector<double>>();
      if (static_cast<long>(arr.size()) != m_.size())
        throw ConfigError(std::string("checkpoint array length mismatch: ") + key);
      size_t k = 0;
      for (int i = 0; i < m_.rows(); ++i)
        for (int j2 = 0; j2 < m_.cols(); ++j2) m_(i, j2) = arr[k++];
    };
    load_vec("w", ck.params.w);
    load_mat("K0", ck.params.K0);
    load_mat("K1", ck.params.K1);
    load_vec("b0", ck.params.b0);
    load_vec("b1", ck.params.b1);
    load_mat("A", ck.params.A);
    load_vec("b", ck.params.b);
    ck.params.c = pj.at("c").get<double>();
    if (j.contains("train_config")) ck.train_config = j.at("train_config");
    if (j.contains("seed")) ck.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("iters")) ck.iters = j.at("iters").get<long>();
    return ck;
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write checkpoint: " + path);
    out << to_json().dump(1) << "\n";
  }

  static Checkpoint load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read checkpoint: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("corrupt checkpoint: ") + e.what());
    }
    return from_json(j);
  }
};

// Single-point dtheta of v_value * Phi + v_grad . grad Phi.
inline ValueNetParams phi_param_adjoint(const Vec& s_in, const ValueNetParams& p,
                                        double v_value, const Vec& v_grad) {
  Mat S(s_in.size(), 1);
  S.col(0) = s_in;
  PhiEval e = phi_forward(p, S);
  ValueNetParams g = ValueNetParams::zeros(p.d, p.m);
  Vec vv(1);
  vv[0] = v_value;
  phi_adjoint(p, S, e, vv, Mat(v_grad), g);
  return g;
}

}  // namespace hjb
