#pragma once

#include "hjb/problem.hpp"

namespace hjb {

// Quadcopter with state [x y z psi theta phi vx vy vz vpsi vtheta vphi],
// control [thrust tau_psi tau_theta tau_phi], energy E(u) = 2 + ||u||^2.
//
// The thrust enters the velocity dynamics through
//   f7 =  sin(psi) sin(phi) + cos(psi) sin(theta) cos(phi)
//   f8 = -cos(psi) sin(phi) + sin(psi) sin(theta) cos(phi)
//   f9 =  cos(theta) cos(phi)
// and the closed-form Hamiltonian (after eliminating u) is
//   H = -2 - v.p_kin + S^2/(4 m^2) + g p9 + (p10^2+p11^2+p12^2)/4,
// with S = p7 f7 + p8 f8 + p9 f9.
class QuadcopterProblem : public ControlProblem {
 public:
  using ControlProblem::hamiltonian;
  using ControlProblem::hamiltonian_grad_p;
  using ControlProblem::feedback_control;
  using ControlProblem::running_cost;
  using ControlProblem::dynamics;

  struct Params {
    double T = 1.0;
    Vec x0, y;
    double alpha1 = 5000.0;
    double mass = 1.0;
    double gravity = 9.81;
  };

  explicit QuadcopterProblem(Params prm)
      : ControlProblem(12, 4, prm.T, prm.y, prm.alpha1, 0.0, 0.0),
        prm_(std::move(prm)) {}

  const Params& params() const { return prm_; }

  struct Trig {
    double f7, f8, f9;
    double d7[3], d8[3], d9[3];  // d/d{psi,theta,phi}
  };

  static Trig trig(double psi, double theta, double phi) {
    const double sp = std::sin(psi), cp = std::cos(psi);
    const double st = std::sin(theta), ct = std::cos(theta);
    const double sf = std::sin(phi), cf = std::cos(phi);
    Trig t;
    t.f7 = sp * sf + cp * st * cf;
    t.f8 = -cp * sf + sp * st * cf;
    t.f9 = ct * cf;
    t.d7[0] = cp * sf - sp * st * cf;   // = -f8
    t.d7[1] = cp * ct * cf;
    t.d7[2] = sp * cf - cp * st * sf;
    t.d8[0] = sp * sf + cp * st * cf;   // = f7
    t.d8[1] = sp * ct * cf;
    t.d8[2] = -cp * cf - sp * st * sf;
    t.d9[0] = 0.0;
    t.d9[1] = -st * cf;
    t.d9[2] = -ct * sf;
    return t;
  }

  Vec hamiltonian(double, const Mat& Z, const Mat& P) const override {
    const int B = static_cast<int>(Z.cols());
    const double m = prm_.mass, g = prm_.gravity;
    Vec H(B);
    for (int b = 0; b < B; ++b) {
      auto z = Z.col(b);
      auto p = P.col(b);
      const Trig t = trig(z[3], z[4], z[5]);
      const double S = p[6] * t.f7 + p[7] * t.f8 + p[8] * t.f9;
      H[b] = -2.0 - z.segment(6, 6).dot(p.segment(0, 6)) +
             S * S / (4.0 * m * m) + g * p[8] +
             0.25 * p.segment(9, 3).squaredNorm();
    }
    return H;
  }

  Mat hamiltonian_grad_p(double, const Mat& Z, const Mat& P) const override {
    const int B = static_cast<int>(Z.cols());
    const double m = prm_.mass;
    Mat G(12, B);
    for (int b = 0; b < B; ++b) {
      auto z = Z.col(b);
      auto p = P.col(b);
      const Trig t = trig(z[3], z[4], z[5]);
      const double S = p[6] * t.f7 + p[7] * t.f8 + p[8] * t.f9;
      G.col(b).segment(0, 6) = -z.segment(6, 6);
      const double c = S / (2.0 * m * m);
      G(6, b) = c * t.f7;
      G(7, b) = c * t.f8;
      G(8, b) = c * t.f9 + prm_.gravity;
      G.col(b).segment(9, 3) = 0.5 * p.segment(9, 3);
    }
    return G;
  }

  Mat hamiltonian_grad_z(double, const Mat& Z, const Mat& P) const override {
    const int B = static_cast<int>(Z.cols());
    const double m = prm_.mass;
    Mat G = Mat::Zero(12, B);
    for (int b = 0; b < B; ++b) {
      auto z = Z.col(b);
      auto p = P.col(b);
      const Trig t = trig(z[3], z[4], z[5]);
      const double S = p[6] * t.f7 + p[7] * t.f8 + p[8] * t.f9;
      for (int k = 0; k < 3; ++k) {
        const double dS = p[6] * t.d7[k] + p[7] * t.d8[k] + p[8] * t.d9[k];
        G(3 + k, b) = S * dS / (2.0 * m * m);
      }
      G.col(b).segment(6, 6) = -p.segment(0, 6);
    }
    return G;
  }

  Mat hamiltonian_hess_pp_vec(double, const Mat& Z, const Mat&,
                              const Mat& V) const override {
    const int B = static_cast<int>(Z.cols());
    const double m = prm_.mass;
    Mat R = Mat::Zero(12, B);
    for (int b = 0; b < B; ++b) {
      auto z = Z.col(b);
      auto v = V.col(b);
      const Trig t = trig(z[3], z[4], z[5]);
      const double fv = v[6] * t.f7 + v[7] * t.f8 + v[8] * t.f9;
      const double c = fv / (2.0 * m * m);
      R(6, b) = c * t.f7;
      R(7, b) = c * t.f8;
      R(8, b) = c * t.f9;
      R.col(b).segment(9, 3) = 0.5 * v.segment(9, 3);
    }
    return R;
  }

  Mat hamiltonian_dz_gradp_vec(double, const Mat& Z, const Mat& P,
                               const Mat& V) const override {
    const int B = static_cast<int>(Z.cols());
    const double m = prm_.mass;
    Mat R = Mat::Zero(12, B);
    for (int b = 0; b < B; ++b) {
      auto z = Z.col(b);
      auto p = P.col(b);
      auto v = V.col(b);
      const Trig t = trig(z[3], z[4], z[5]);
      const double S = p[6] * t.f7 + p[7] * t.f8 + p[8] * t.f9;
      const double fv = v[6] * t.f7 + v[7] * t.f8 + v[8] * t.f9;
      for (int k = 0; k < 3; ++k) {
        const double dS = p[6] * t.d7[k] + p[7] * t.d8[k] + p[8] * t.d9[k];
        const double dfv = v[6] * t.d7[k] + v[7] * t.d8[k] + v[8] * t.d9[k];
        R(3 + k, b) = (dS * fv + S * dfv) / (2.0 * m * m);
      }
      R.col(b).segment(6, 6) = -v.segment(0, 6);
    }
    return R;
  }

  // u = -(f7 p7 + f8 p8 + f9 p9)/(2m), tau = -p_{10..12}/2
  Mat feedback_control(double, const Mat& Z, const Mat& P) const override {
    const int B = static_cast<int>(Z.cols());
    Mat U(4, B);
    for (int b = 0; b < B; ++b) {
      auto z = Z.col(b);
      auto p = P.col(b);
      const Trig t = trig(z[3], z[4], z[5]);
      U(0, b) = -(p[6] * t.f7 + p[7] * t.f8 + p[8] * t.f9) / (2.0 * prm_.mass);
      U.col(b).segment(1, 3) = -0.5 * p.segment(9, 3);
    }
    return U;
  }

  Vec running_cost(double, const Mat&, const Mat& U, CostMode) const override {
    return (U.colwise().squaredNorm().array() + 2.0).matrix().transpose();
  }

  Mat running_cost_grad_z(double, const Mat& Z, const Mat&,
                          CostMode) const override {
    return Mat::Zero(12, Z.cols());
  }

  Mat running_cost_grad_u(double, const Mat&, const Mat& U,
                          CostMode) const override {
    return 2.0 * U;
  }

  Mat dynamics(double, const Mat& Z, const Mat& U) const override {
    const int B = static_cast<int>(Z.cols());
    const double m = prm_.mass, g = prm_.gravity;
    Mat F(12, B);
    for (int b = 0; b < B; ++b) {
      auto z = Z.col(b);
      auto u = U.col(b);
      const Trig t = trig(z[3], z[4], z[5]);
      F.col(b).segment(0, 6) = z.segment(6, 6);
      F(6, b) = u[0] / m * t.f7;
      F(7, b) = u[0] / m * t.f8;
      F(8, b) = u[0] / m * t.f9 - g;
      F.col(b).segment(9, 3) = u.segment(1, 3);
    }
    return F;
  }

  Mat dynamics_vjp_z(double, const Mat& Z, const Mat& U,
                     const Mat& V) const override {
    const int B = static_cast<int>(Z.cols());
    const double m = prm_.mass;
    Mat R = Mat::Zero(12, B);
    for (int b = 0; b < B; ++b) {
      auto z = Z.col(b);
      auto v = V.col(b);
      const Trig t = trig(z[3], z[4], z[5]);
      const double um = U(0, b) / m;
      for (int k = 0; k < 3; ++k)
        R(3 + k, b) = um * (v[6] * t.d7[k] + v[7] * t.d8[k] + v[8] * t.d9[k]);
      R.col(b).segment(6, 6) = v.segment(0, 6);
    }
    return R;
  }

  Mat dynamics_vjp_u(double, const Mat& Z, const Mat&,
                     const Mat& V) const override {
    const int B = static_cast<int>(Z.cols());
    const double m = prm_.mass;
    Mat R(4, B);
    for (int b = 0; b < B; ++b) {
      auto z = Z.col(b);
      auto v = V.col(b);
      const Trig t = trig(z[3], z[4], z[5]);
      R(0, b) = (v[6] * t.f7 + v[7] * t.f8 + v[8] * t.f9) / m;
      R.col(b).segment(1, 3) = v.segment(9, 3);
    }
    return R;
  }

 private:
  Params prm_;
};

}  // namespace hjb
