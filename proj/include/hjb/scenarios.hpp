#pragma once

#include "hjb/config.hpp"
#include "hjb/multi_agent.hpp"
#include "hjb/quadcopter.hpp"

#include <string>

namespace hjb {

enum class ScenarioId {
  corridor,
  swap2,
  swap12,
  swap_k2,  // first k antipodal pairs of the swap12 layout (dimension scan)
  swap_k3,
  swap_k4,
  swap_k5,
  swap_k6,
  swarm,
  quadcopter,
};

inline std::string to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::corridor: return "corridor";
    case ScenarioId::swap2: return "swap2";
    case ScenarioId::swap12: return "swap12";
    case ScenarioId::swap_k2: return "swap_k2";
    case ScenarioId::swap_k3: return "swap_k3";
    case ScenarioId::swap_k4: return "swap_k4";
    case ScenarioId::swap_k5: return "swap_k5";
    case ScenarioId::swap_k6: return "swap_k6";
    case ScenarioId::swarm: return "swarm";
    case ScenarioId::quadcopter: return "quadcopter";
  }
  throw ConfigError("unknown scenario id");
}

inline ScenarioId scenario_from_string(const std::string& s) {
  for (ScenarioId id :
       {ScenarioId::corridor, ScenarioId::swap2, ScenarioId::swap12,
        ScenarioId::swap_k2, ScenarioId::swap_k3, ScenarioId::swap_k4,
        ScenarioId::swap_k5, ScenarioId::swap_k6, ScenarioId::swarm,
        ScenarioId::quadcopter})
    if (to_string(id) == s) return id;
  throw ConfigError("unknown scenario: " + s);
}

struct InitialDistribution {
  Vec x0;
  double variance = 1.0;  // isotropic Gaussian covariance (variance * I)
};

// Deterministic i.i.d. Gaussian draws from rho; one sample per column.
inline Mat sample_initials(const InitialDistribution& rho, int count,
                           unsigned long long seed) {
  if (count < 1) throw ConfigError("sample count must be >= 1");
  if (rho.variance <= 0) throw ConfigError("initial variance must be > 0");
  GaussianSampler rng(seed);
  const int d = static_cast<int>(rho.x0.size());
  Mat X = std::sqrt(rho.variance) * rng.matrix(d, count);
  X.colwise() += rho.x0;
  return X;
}

struct Scenario {
  ScenarioId id;
  ProblemPtr problem;
  InitialDistribution rho;
  TrainConfig config;
};

namespace detail {

// Antipodal pair layout on a circle of radius 10; pair j sits at angle
// pi*j/6 and the targets swap the two agents of each pair.
inline void swap_layout(int pairs, Vec& x0, Vec& y) {
  const double R = 10.0;
  x0.resize(4 * pairs);
  y.resize(4 * pairs);
  for (int j = 0; j < pairs; ++j) {
    const double a = M_PI * j / 6.0;
    const Eigen::Vector2d p(R * std::cos(a), R * std::sin(a));
    x0.segment<2>(4 * j) = p;
    x0.segment<2>(4 * j + 2) = -p;
    y.segment<2>(4 * j) = -p;
    y.segment<2>(4 * j + 2) = p;
  }
}

inline Scenario build_swap_family(ScenarioId id, int pairs, int width) {
  MultiAgentProblem::Params p;
  p.n = 2 * pairs;
  p.q = 2;
  p.alpha1 = 300;
  p.alpha2 = 0;  // no obstacles in the swap12 family
  p.alpha3 = 1e5;
  p.interaction.radius = 0.5;
  swap_layout(pairs, p.x0, p.y);

  Scenario s;
  s.id = id;
  s.problem = std::make_shared<MultiAgentProblem>(p);
  s.rho = {p.x0, 1.0};
  s.config.width = width;
  s.config.beta1 = 5;
  s.config.beta2 = 2;
  s.config.beta3 = 5;
  s.config.batch_size = pairs == 6 ? 2048 : 1024;
  s.config.max_iters = 4000;
  s.config.n_t_train = 20;
  s.config.n_t_val = 50;
  return s;
}

}  // namespace detail

inline Scenario build(ScenarioId id) {
  Scenario s;
  s.id = id;
  switch (id) {
    case ScenarioId::corridor: {
      MultiAgentProblem::Params p;
      p.n = 2;
      p.q = 2;
      p.alpha1 = 100;
      p.alpha2 = 1e4;
      p.alpha3 = 300;
      p.interaction.radius = 0.5;
      p.x0 = (Vec(4) << -2, -2, 2, -2).finished();
      p.y = (Vec(4) << 2, 2, -2, 2).finished();
      p.soft_obstacles = {
          {(Vec(2) << -2.5, 0).finished(), 0.2},
          {(Vec(2) << 2.5, 0).finished(), 0.2},
          {(Vec(2) << -1.5, 0).finished(), 0.2},
          {(Vec(2) << 1.5, 0).finished(), 0.2},
      };
      s.problem = std::make_shared<MultiAgentProblem>(p);
      s.rho = {p.x0, 1.0};
      s.config.width = 32;
      s.config.beta1 = s.config.beta2 = s.config.beta3 = 0.02;
      s.config.batch_size = 1024;
      s.config.max_iters = 1800;
      s.config.n_t_train = 20;
      s.config.n_t_val = 50;
      return s;
    }
    case ScenarioId::swap2: {
      MultiAgentProblem::Params p;
      p.n = 2;
      p.q = 2;
      p.alpha1 = 300;
      p.alpha2 = 1e6;
      p.alpha3 = 1e5;
      p.interaction.radius = 0.5;
      p.x0 = (Vec(4) << 10, 0, -10, 0).finished();
      p.y = (Vec(4) << -10, 0, 10, 0).finished();
      p.hard_circles = {
          {(Vec(2) << 0, 4).finished(), 2.0, 2.2},
          {(Vec(2) << 0, -3.5).finished(), 2.0, 2.2},
      };
      s.problem = std::make_shared<MultiAgentProblem>(p);
      s.rho = {p.x0, 1.0};
      s.config.width = 16;
      s.config.beta1 = 1;
      s.config.beta2 = 1;
      s.config.beta3 = 3;
      s.config.batch_size = 1024;
      s.config.max_iters = 4000;
      s.config.n_t_train = 20;
      s.config.n_t_val = 50;
      return s;
    }
    case ScenarioId::swap12:
      return detail::build_swap_family(id, 6, 32);
    case ScenarioId::swap_k2:
      return detail::build_swap_family(id, 2, 32);
    case ScenarioId::swap_k3:
      return detail::build_swap_family(id, 3, 32);
    case ScenarioId::swap_k4:
      return detail::build_swap_family(id, 4, 32);
    case ScenarioId::swap_k5:
      return detail::build_swap_family(id, 5, 32);
    case ScenarioId::swap_k6:
      return detail::build_swap_family(id, 6, 32);
    case ScenarioId::swarm: {
      MultiAgentProblem::Params p;
      p.n = 50;
      p.q = 3;
      p.alpha1 = 900;
      p.alpha2 = 1e7;
      p.alpha3 = 25000;
      p.interaction.radius = 0.3;
      // 10 x 5 grid (spacing 1) facing the prisms at y = -3; targets are
      // the mirror image at y = +3.
      p.x0.resize(150);
      p.y.resize(150);
      int a = 0;
      for (int iz = 0; iz < 5; ++iz)
        for (int ix = 0; ix < 10; ++ix, ++a) {
          const double x = -4.5 + ix;
          const double z = 1.0 + iz;
          p.x0.segment<3>(3 * a) = Eigen::Vector3d(x, -3.0, z);
          p.y.segment<3>(3 * a) = Eigen::Vector3d(x, 3.0, z);
        }
      p.boxes = {
          {(Vec(3) << -2, -0.5, 0).finished(), (Vec(3) << 2, 0.5, 7).finished()},
          {(Vec(3) << 2, -1, 0).finished(), (Vec(3) << 4, 1, 4).finished()},
      };
      s.problem = std::make_shared<MultiAgentProblem>(p);
      s.rho = {p.x0, 0.25};
      s.config.width = 512;
      s.config.beta1 = 2;
      s.config.beta2 = 1;
      s.config.beta3 = 3;
      s.config.beta_switch_fraction = 0.7;
      s.config.batch_size = 1024;
      s.config.max_iters = 6000;
      s.config.n_t_train = 26;
      s.config.n_t_val = 80;
      return s;
    }
    case ScenarioId::quadcopter: {
      QuadcopterProblem::Params p;
      p.x0 = Vec::Zero(12);
      p.x0.head<3>() = Eigen::Vector3d(-1.5, -1.5, -1.5);
      p.y = Vec::Zero(12);
      p.y.head<3>() = Eigen::Vector3d(2, 2, 2);
      p.alpha1 = 5000;
      s.problem = std::make_shared<QuadcopterProblem>(p);
      s.rho = {p.x0, 0.25};
      s.config.width = 128;
      s.config.beta1 = 0.1;
      s.config.beta2 = 0;
      s.config.beta3 = 0;
      s.config.batch_size = 1024;
      s.config.max_iters = 6000;
      s.config.n_t_train = 26;
      s.config.n_t_val = 50;
      return s;
    }
  }
  throw ConfigError("unknown scenario id");
}

// Quadcopter first-order dynamics z' = f(z, u), exposed for simulation.
inline Vec quadcopter_dynamics(const Vec& z, const Vec& u, double mass = 1.0,
                               double gravity = 9.81) {
  if (z.size() != 12 || u.size() != 4)
    throw ConfigError("quadcopter_dynamics expects z in R^12, u in R^4");
  QuadcopterProblem::Params p;
  p.x0 = Vec::Zero(12);
  p.y = Vec::Zero(12);
  p.mass = mass;
  p.gravity = gravity;
  QuadcopterProblem prob(p);
  return prob.dynamics(0.0, Mat(z), Mat(u)).col(0);
}

}  // namespace hjb
