#pragma once

#include "hjb/common.hpp"

#include <json.hpp>

namespace hjb {

struct TrainConfig {
  int width = 32;           // hidden width m of the value network
  double beta1 = 0.02;      // HJB residual penalty (time derivative)
  double beta2 = 0.02;      // final-time value penalty
  double beta3 = 0.02;      // final-time gradient penalty
  int batch_size = 1024;
  int max_iters = 1800;
  int resample_every = 25;  // redraw the training batch every k iterations
  double lr = 0.1;
  double lr_decay_factor = 0.1;
  int lr_decay_every = 0;   // 0 -> ceil(0.45 * max_iters)
  int n_t_train = 20;
  int n_t_val = 50;
  double beta_switch_fraction = 1.0;  // penalties drop to 0 past this fraction
  int holdout_size = 512;
  int checkpoint_every = 0;  // 0 -> only at the end
  unsigned long long seed = 7;

  // Default schedule: divide the rate by 10 every 0.45 * max_iters
  // iterations, capped at 200 — a short aggressive phase followed by
  // refinement is markedly more stable than a long high-rate phase.
  int decay_interval() const {
    if (lr_decay_every > 0) return lr_decay_every;
    return std::min(200, std::max(1, static_cast<int>(std::ceil(0.45 * max_iters))));
  }

  // The rate is divided by 10 at most twice: a short aggressive phase, a
  // refinement phase, then a long fine-tuning tail.
  double lr_at(int iter) const {
    const int k = std::min(iter / decay_interval(), 2);
    return lr * std::pow(lr_decay_factor, k);
  }

  bool betas_active(int iter) const {
    return iter < static_cast<int>(beta_switch_fraction * max_iters);
  }

  void validate() const {
    if (width < 1) throw ConfigError("width must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (max_iters < 0) throw ConfigError("max_iters must be >= 0");
    if (resample_every < 1) throw ConfigError("resample_every must be >= 1");
    if (lr <= 0) throw ConfigError("lr must be > 0");
    if (n_t_train < 1 || n_t_val < 1) throw ConfigError("n_t must be >= 1");
    if (n_t_val < n_t_train)
      throw ConfigError("n_t_val must be >= n_t_train");
    if (beta1 < 0 || beta2 < 0 || beta3 < 0)
      throw ConfigError("beta penalties must be >= 0");
    if (beta_switch_fraction <= 0 || beta_switch_fraction > 1)
      throw ConfigError("beta_switch_fraction must be in (0, 1]");
  }
};

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"width", c.width},
                     {"beta1", c.beta1},
                     {"beta2", c.beta2},
                     {"beta3", c.beta3},
                     {"batch_size", c.batch_size},
                     {"max_iters", c.max_iters},
                     {"resample_every", c.resample_every},
                     {"lr", c.lr},
                     {"lr_decay_factor", c.lr_decay_factor},
                     {"lr_decay_every", c.lr_decay_every},
                     {"n_t_train", c.n_t_train},
                     {"n_t_val", c.n_t_val},
                     {"beta_switch_fraction", c.beta_switch_fraction},
                     {"holdout_size", c.holdout_size},
                     {"checkpoint_every", c.checkpoint_every},
                     {"seed", c.seed}};
}

inline void from_json(const nlohmann::json& j, TrainConfig& c) {
  TrainConfig def;
  c.width = j.value("width", def.width);
  c.beta1 = j.value("beta1", def.beta1);
  c.beta2 = j.value("beta2", def.beta2);
  c.beta3 = j.value("beta3", def.beta3);
  c.batch_size = j.value("batch_size", def.batch_size);
  c.max_iters = j.value("max_iters", def.max_iters);
  c.resample_every = j.value("resample_every", def.resample_every);
  c.lr = j.value("lr", def.lr);
  c.lr_decay_factor = j.value("lr_decay_factor", def.lr_decay_factor);
  c.lr_decay_every = j.value("lr_decay_every", def.lr_decay_every);
  c.n_t_train = j.value("n_t_train", def.n_t_train);
  c.n_t_val = j.value("n_t_val", def.n_t_val);
  c.beta_switch_fraction =
      j.value("beta_switch_fraction", def.beta_switch_fraction);
  c.holdout_size = j.value("holdout_size", def.holdout_size);
  c.checkpoint_every = j.value("checkpoint_every", def.checkpoint_every);
  c.seed = j.value("seed", def.seed);
  c.validate();
}

}  // namespace hjb
