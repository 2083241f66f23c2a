// hjb: command-line surface for training, deploying, and benchmarking the
// neural value-function controller.
//
// Subcommands: train, baseline, eval, shock, sweep {hypersphere, cod},
// bench, plot.  Exit codes: 0 success, 1 numerical failure, 2 config error.
// Every run writes a manifest.json (resolved config + seeds + versions) into
// the output directory so the run is reproducible from its artifacts alone.

#include <CLI11.hpp>
#include <hjb/hjb.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hjb;

namespace {

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

Vec parse_vec(const std::string& csv) {
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      vals.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("cannot parse number '" + tok + "' in '" + csv + "'");
    }
  }
  if (vals.empty()) throw ConfigError("empty vector literal: '" + csv + "'");
  return Eigen::Map<Vec>(vals.data(), static_cast<long>(vals.size()));
}

std::vector<double> parse_list(const std::string& csv) {
  Vec v = parse_vec(csv);
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  for (double v : parse_list(csv)) out.push_back(static_cast<int>(v));
  return out;
}

std::string resolve_outdir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("HJB_OUT")) return env;
  return "out";
}

json vec_json(const Vec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// TrainConfig JSON loading with unknown-key rejection (the from_json
// deserializer itself is lenient so checkpoints stay forward-readable).
TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config JSON: ") + e.what());
  }
  static const std::vector<std::string> known = {
      "width",        "beta1",         "beta2",
      "beta3",        "batch_size",    "max_iters",
      "resample_every", "lr",          "lr_decay_factor",
      "lr_decay_every", "n_t_train",   "n_t_val",
      "beta_switch_fraction", "holdout_size", "checkpoint_every",
      "seed"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError("unknown config key: " + it.key());
  }
  return j.get<TrainConfig>();
}

struct Manifest {
  std::string command;
  json resolved_config;
  json extras;
  std::vector<std::string> artifacts;
  bool partial = false;

  void write(const fs::path& dir) const {
    json j;
    j["command"] = command;
    j["config"] = resolved_config;
    j["versions"] = {{"checkpoint_format", Checkpoint::kFormatVersion},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                   std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)}};
    if (!extras.is_null()) j["run"] = extras;
    j["artifacts"] = artifacts;
    j["partial"] = partial;
    write_json((dir / "manifest.json").string(), j);
  }
};

fs::path make_outdir(const std::string& flag_value) {
  fs::path dir = resolve_outdir(flag_value);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + dir.string());
  return dir;
}

json point_eval_json(const PointEval& pe) {
  return {{"ell", pe.ell},        {"G", pe.G},
          {"objective", pe.objective()}, {"max_W", pe.max_W},
          {"max_Q", pe.max_Q},    {"collision", pe.collision}};
}

json baseline_json(const BaselineResult& b) {
  return {{"objective_train", b.objective},
          {"ell", b.ell},
          {"G", b.G},
          {"objective", b.ell_val_objective},
          {"multistart_spread", b.spread},
          {"warning", b.warning},
          {"n_t", b.n_t},
          {"h", b.h}};
}

// ---------------------------------------------------------------------------
// Shared option bundles
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string scenario;
  std::string config_file;
  std::string outdir;
  int iters = -1, width = -1, batch = -1, nt_train = -1, nt_val = -1;
  int checkpoint_every = -1;
  long long seed = -1;
  double lr = -1, beta1 = -1, beta2 = -1, beta3 = -1;
};

void add_train_options(CLI::App* cmd, TrainArgs& a) {
  cmd->add_option("--scenario", a.scenario,
                  "corridor|swap2|swap12|swap_k2..swap_k6|swarm|quadcopter")
      ->required();
  cmd->add_option("--config", a.config_file, "JSON config file");
  cmd->add_option("--out", a.outdir, "output directory (or $HJB_OUT)");
  cmd->add_option("--iters", a.iters, "override max_iters");
  cmd->add_option("--width", a.width, "override hidden width m");
  cmd->add_option("--batch", a.batch, "override batch size");
  cmd->add_option("--seed", a.seed, "override RNG seed");
  cmd->add_option("--lr", a.lr, "override learning rate");
  cmd->add_option("--beta1", a.beta1, "override HJt penalty weight");
  cmd->add_option("--beta2", a.beta2, "override HJfin penalty weight");
  cmd->add_option("--beta3", a.beta3, "override HJgrad penalty weight");
  cmd->add_option("--nt-train", a.nt_train, "override training grid size");
  cmd->add_option("--nt-val", a.nt_val, "override validation grid size");
  cmd->add_option("--checkpoint-every", a.checkpoint_every,
                  "periodic checkpoint interval (iterations)");
}

TrainConfig resolve_train_config(const Scenario& sc, const TrainArgs& a) {
  TrainConfig cfg = sc.config;
  if (!a.config_file.empty()) cfg = load_train_config(a.config_file);
  if (a.iters >= 0) cfg.max_iters = a.iters;
  if (a.width > 0) cfg.width = a.width;
  if (a.batch > 0) cfg.batch_size = a.batch;
  if (a.seed >= 0) cfg.seed = static_cast<unsigned long long>(a.seed);
  if (a.lr > 0) cfg.lr = a.lr;
  if (a.beta1 >= 0) cfg.beta1 = a.beta1;
  if (a.beta2 >= 0) cfg.beta2 = a.beta2;
  if (a.beta3 >= 0) cfg.beta3 = a.beta3;
  if (a.nt_train > 0) cfg.n_t_train = a.nt_train;
  if (a.nt_val > 0) cfg.n_t_val = a.nt_val;
  if (a.checkpoint_every >= 0) cfg.checkpoint_every = a.checkpoint_every;
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_train(const TrainArgs& a) {
  Scenario sc = build(scenario_from_string(a.scenario));
  TrainConfig cfg = resolve_train_config(sc, a);
  fs::path dir = make_outdir(a.outdir);

  Manifest mf;
  mf.command = "train";
  mf.resolved_config = json(cfg);
  mf.extras = {{"scenario", a.scenario},
               {"x0", vec_json(sc.rho.x0)},
               {"rho_variance", sc.rho.variance}};

  auto save_ckpt = [&](const ValueNetParams& theta, long iters,
                       const std::string& name) {
    Checkpoint ck;
    ck.scenario = a.scenario;
    ck.params = theta;
    ck.train_config = json(cfg);
    ck.seed = cfg.seed;
    ck.iters = iters;
    ck.save((dir / name).string());
  };

  TrainCallback cb = nullptr;
  if (cfg.checkpoint_every > 0) {
    cb = [&](const TrainLogRow& row, const ValueNetParams& theta) {
      if (row.iter > 0 && row.iter % cfg.checkpoint_every == 0)
        save_ckpt(theta, row.iter,
                  "checkpoint_" + std::to_string(row.iter) + ".json");
    };
  }

  TrainResult tr = train(*sc.problem, sc.rho, cfg, cb);

  save_ckpt(tr.theta, tr.iters, "checkpoint.json");
  write_train_log_csv((dir / "train_log.csv").string(), tr.log);

  SvgSeries loss;
  loss.label = "train objective";
  for (const auto& row : tr.log) {
    loss.x.push_back(row.iter);
    loss.y.push_back(row.train_total);
  }
  write_svg_plot((dir / "train_loss.svg").string(), {loss}, "training loss",
                 "iteration", "objective");

  mf.extras["iterations_run"] = tr.iters;
  mf.extras["aborted"] = tr.aborted;
  mf.extras["final_validation"] = {{"ell", tr.final_val.ell},
                                   {"G", tr.final_val.G},
                                   {"objective", tr.final_val.objective()},
                                   {"max_W", tr.final_val.max_W},
                                   {"max_Q", tr.final_val.max_Q},
                                   {"collision", tr.final_val.collision}};
  mf.artifacts = {"checkpoint.json", "train_log.csv", "train_loss.svg"};
  mf.partial = tr.aborted;
  mf.write(dir);

  std::cout << "trained " << a.scenario << " for " << tr.iters
            << " iterations; validation objective "
            << tr.final_val.objective() << "\n";
  if (tr.aborted) {
    std::cerr << "warning: training aborted on numerical failure; "
                 "last good parameters saved\n";
    return 1;
  }
  return 0;
}

int cmd_baseline(const std::string& scenario, const std::string& x_csv,
                 double t0, const BaselineOptions& opt,
                 const std::string& outdir) {
  Scenario sc = build(scenario_from_string(scenario));
  Vec x0 = x_csv.empty() ? sc.rho.x0 : parse_vec(x_csv);
  if (x0.size() != sc.problem->state_dim())
    throw ConfigError("initial state dimension mismatch");

  fs::path dir = make_outdir(outdir);
  BaselineResult res = solve_baseline(*sc.problem, x0, t0, opt);
  write_trajectory_csv((dir / "baseline_trajectory.csv").string(), res);
  write_json((dir / "baseline_report.json").string(), baseline_json(res));

  Manifest mf;
  mf.command = "baseline";
  mf.resolved_config = {{"scenario", scenario}, {"x0", vec_json(x0)},
                        {"t0", t0},             {"n_t", opt.n_t},
                        {"max_iters", opt.max_iters}, {"lr", opt.lr},
                        {"multistarts", opt.multistarts},
                        {"noise_std", opt.noise_std}, {"seed", opt.seed}};
  mf.artifacts = {"baseline_trajectory.csv", "baseline_report.json"};
  mf.partial = res.warning;
  mf.write(dir);

  std::cout << "baseline objective " << res.ell_val_objective
            << " (ell " << res.ell << ", G " << res.G << ")\n";
  return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& x_csv, double t0,
             int nt_val, const std::string& outdir) {
  Checkpoint ck = Checkpoint::load(ckpt_path);
  Scenario sc = build(scenario_from_string(ck.scenario));
  Vec x0 = x_csv.empty() ? sc.rho.x0 : parse_vec(x_csv);
  if (x0.size() != sc.problem->state_dim())
    throw ConfigError("initial state dimension mismatch");
  if (nt_val <= 0) nt_val = sc.config.n_t_val;

  fs::path dir = make_outdir(outdir);
  PointEval pe = evaluate_point(ck.params, *sc.problem, x0, t0, nt_val);
  write_trajectory_csv((dir / "trajectory.csv").string(), pe.traj);
  write_json((dir / "eval.json").string(), point_eval_json(pe));

  Manifest mf;
  mf.command = "eval";
  mf.resolved_config = {{"checkpoint", ckpt_path}, {"scenario", ck.scenario},
                        {"x0", vec_json(x0)},      {"t0", t0},
                        {"n_t_val", nt_val}};
  mf.artifacts = {"trajectory.csv", "eval.json"};
  mf.write(dir);

  std::cout << "eval objective " << pe.objective() << " (ell " << pe.ell
            << ", G " << pe.G << "), collision "
            << (pe.collision ? "yes" : "no") << "\n";
  return 0;
}

int cmd_shock(const std::string& ckpt_path, const ShockSpec& spec,
              const BaselineOptions& bopt, const std::string& outdir) {
  Checkpoint ck = Checkpoint::load(ckpt_path);
  Scenario sc = build(scenario_from_string(ck.scenario));

  fs::path dir = make_outdir(outdir);
  ShockReport rep = shock_experiment(ck.params, *sc.problem, sc.rho.x0, spec,
                                     sc.config.n_t_val, bopt);
  write_trajectory_csv((dir / "shock_nn_trajectory.csv").string(),
                       rep.nn.traj);
  write_trajectory_csv((dir / "shock_baseline_trajectory.csv").string(),
                       rep.base);
  const double gap =
      rep.baseline_cost() > 0
          ? (rep.nn_cost() - rep.baseline_cost()) / rep.baseline_cost()
          : 0.0;
  write_json((dir / "shock.json").string(),
             {{"xi", vec_json(rep.xi)},
              {"magnitude", rep.xi.norm()},
              {"state_at_shock", vec_json(rep.state_at_shock)},
              {"shocked_state", vec_json(rep.shocked_state)},
              {"nn", point_eval_json(rep.nn)},
              {"baseline", baseline_json(rep.base)},
              {"relative_gap", gap}});

  Manifest mf;
  mf.command = "shock";
  mf.resolved_config = {{"checkpoint", ckpt_path},
                        {"scenario", ck.scenario},
                        {"time", spec.time},
                        {"magnitude", spec.magnitude},
                        {"xi", spec.xi.size() ? vec_json(spec.xi) : json()},
                        {"seed", spec.seed},
                        {"baseline_iters", bopt.max_iters},
                        {"baseline_multistarts", bopt.multistarts}};
  mf.artifacts = {"shock.json", "shock_nn_trajectory.csv",
                  "shock_baseline_trajectory.csv"};
  mf.write(dir);

  std::cout << "shock |xi| " << rep.xi.norm() << ": nn " << rep.nn_cost()
            << " vs baseline " << rep.baseline_cost() << " (gap "
            << 100 * gap << "%)\n";
  return 0;
}

int cmd_sweep_hypersphere(const std::string& ckpt_path,
                          const std::vector<double>& magnitudes, int count,
                          unsigned long long seed, const BaselineOptions& bopt,
                          const std::string& outdir) {
  Checkpoint ck = Checkpoint::load(ckpt_path);
  Scenario sc = build(scenario_from_string(ck.scenario));
  fs::path dir = make_outdir(outdir);

  auto points = hypersphere_sweep(ck.params, *sc.problem, sc.rho.x0,
                                  magnitudes, count, seed, sc.config.n_t_val,
                                  bopt);
  json rows = json::array();
  SvgSeries sub;
  sub.label = "mean suboptimality";
  for (const auto& p : points) {
    rows.push_back({{"magnitude", p.magnitude}, {"count", p.count},
                    {"mean_subopt", p.mean_subopt}, {"ci_lo", p.ci_lo},
                    {"ci_hi", p.ci_hi}, {"collision_pct", p.collision_pct},
                    {"mean_nn", p.mean_nn}, {"mean_base", p.mean_base}});
    sub.x.push_back(p.magnitude);
    sub.y.push_back(p.mean_subopt);
  }
  write_json((dir / "hypersphere.json").string(), {{"points", rows}});
  write_svg_plot((dir / "hypersphere.svg").string(), {sub},
                 "suboptimality vs shock magnitude", "|xi|",
                 "relative suboptimality");

  Manifest mf;
  mf.command = "sweep hypersphere";
  mf.resolved_config = {{"checkpoint", ckpt_path}, {"scenario", ck.scenario},
                        {"magnitudes", magnitudes}, {"count", count},
                        {"seed", seed}, {"baseline_iters", bopt.max_iters},
                        {"baseline_multistarts", bopt.multistarts}};
  mf.artifacts = {"hypersphere.json", "hypersphere.svg"};
  mf.write(dir);

  for (const auto& p : points)
    std::cout << "|xi| " << p.magnitude << ": mean subopt " << p.mean_subopt
              << " [" << p.ci_lo << ", " << p.ci_hi << "], collisions "
              << p.collision_pct << "%\n";
  return 0;
}

int cmd_sweep_cod(const std::vector<int>& pairs,
                  const std::vector<int>& widths, int iters, double budget,
                  unsigned long long seed, const BaselineOptions& bopt,
                  const std::string& outdir) {
  fs::path dir = make_outdir(outdir);
  TrainConfig base = build(ScenarioId::swap_k2).config;
  if (iters > 0) base.max_iters = iters;
  base.seed = seed;

  CodReport rep = cod_sweep(pairs, widths, base, budget, bopt);

  json rows = json::array();
  SvgSeries pts;
  pts.label = "parameters";
  pts.points_only = true;
  for (const auto& p : rep.points) {
    rows.push_back({{"pairs", p.pairs}, {"d", p.d}, {"width", p.width},
                    {"param_count", p.param_count}, {"subopt", p.subopt},
                    {"train_seconds", p.train_seconds}});
    if (p.width > 0) {
      pts.x.push_back(p.d);
      pts.y.push_back(p.param_count);
    }
  }
  write_json((dir / "cod.json").string(),
             {{"points", rows},
              {"fit", {{"slope", rep.fit_slope},
                       {"intercept", rep.fit_intercept},
                       {"r2", rep.fit_r2}}}});
  write_svg_plot((dir / "cod.svg").string(), {pts},
                 "parameters vs state dimension", "d", "parameter count");

  Manifest mf;
  mf.command = "sweep cod";
  mf.resolved_config = {{"pairs", pairs}, {"widths", widths},
                        {"iters", base.max_iters}, {"budget", budget},
                        {"seed", seed}};
  mf.artifacts = {"cod.json", "cod.svg"};
  mf.partial = std::any_of(rep.points.begin(), rep.points.end(),
                           [](const CodPoint& p) { return p.width <= 0; });
  mf.write(dir);

  std::cout << "cod fit: params = " << rep.fit_slope << " * d + "
            << rep.fit_intercept << " (R2 " << rep.fit_r2 << ")\n";
  return 0;
}

int cmd_bench(const std::string& ckpt_path, int n_t, int repeats,
              const std::string& outdir) {
  Checkpoint ck = Checkpoint::load(ckpt_path);
  Scenario sc = build(scenario_from_string(ck.scenario));
  fs::path dir = make_outdir(outdir);

  TimingReport rep = timing_harness(ck.params, *sc.problem, sc.rho.x0, n_t,
                                    repeats);
  write_json((dir / "timing.json").string(),
             {{"nn_per_step_ms", rep.nn_per_step_ms},
              {"baseline_ms", rep.baseline_ms},
              {"ratio", rep.ratio},
              {"nn_cv", rep.nn_cv}});

  Manifest mf;
  mf.command = "bench";
  mf.resolved_config = {{"checkpoint", ckpt_path}, {"scenario", ck.scenario},
                        {"n_t", n_t}, {"repeats", repeats}};
  mf.artifacts = {"timing.json"};
  mf.write(dir);

  std::cout << "nn per-step " << rep.nn_per_step_ms << " ms, baseline "
            << rep.baseline_ms << " ms, ratio " << rep.ratio << "x\n";
  return 0;
}

int cmd_plot(const std::string& in_csv, const std::string& out_svg) {
  std::ifstream in(in_csv);
  if (!in) throw ConfigError("cannot read CSV: " + in_csv);
  std::string header;
  if (!std::getline(in, header))
    throw ConfigError("empty CSV: " + in_csv);

  // Count z columns from the stable trajectory header s,z0,...,u0,...
  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string tok;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
  }
  int d = 0;
  for (const auto& c : cols)
    if (c.size() > 1 && c[0] == 'z') ++d;
  if (cols.empty() || cols[0] != "s" || d == 0)
    throw ConfigError("not a trajectory CSV (expected header s,z0,...): " +
                      in_csv);

  std::vector<std::vector<double>> z(d);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    int col = 0;
    while (std::getline(ss, tok, ',') && col <= d) {
      if (col >= 1 && !tok.empty()) z[col - 1].push_back(std::stod(tok));
      ++col;
    }
  }

  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  std::vector<SvgSeries> series;
  for (int a = 0; 2 * a + 1 < d; ++a) {
    SvgSeries s;
    s.label = "agent " + std::to_string(a);
    s.color = palette[a % 8];
    s.x = z[2 * a];
    s.y = z[2 * a + 1];
    series.push_back(std::move(s));
  }
  write_svg_plot(out_svg, series, "trajectories", "x", "y");
  std::cout << "wrote " << out_svg << " (" << series.size() << " agents)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"neural value-function controller: train, deploy, benchmark"};
  app.require_subcommand(1);
  bool single_thread = false;
  app.add_flag("--single-thread", single_thread,
               "pin to one thread (determinism/timing); already the default "
               "execution model");

  // train ------------------------------------------------------------------
  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "train a value network");
  add_train_options(train_cmd, ta);

  // baseline ---------------------------------------------------------------
  auto* base_cmd =
      app.add_subcommand("baseline", "direct-transcription baseline solve");
  std::string b_scenario, b_x, b_out;
  double b_t0 = 0.0;
  BaselineOptions b_opt;
  base_cmd->add_option("--scenario", b_scenario)->required();
  base_cmd->add_option("--x", b_x, "initial state as comma-separated values");
  base_cmd->add_option("--t0", b_t0, "start time");
  base_cmd->add_option("--iters", b_opt.max_iters);
  base_cmd->add_option("--multistarts", b_opt.multistarts);
  base_cmd->add_option("--nt", b_opt.n_t, "grid size (0 = automatic)");
  base_cmd->add_option("--seed", b_opt.seed);
  base_cmd->add_option("--out", b_out);

  // eval ---------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "roll out a trained controller");
  std::string e_ckpt, e_x, e_out;
  double e_t0 = 0.0;
  int e_ntval = 0;
  eval_cmd->add_option("--checkpoint", e_ckpt)->required();
  eval_cmd->add_option("--x", e_x, "initial state (default scenario x0)");
  eval_cmd->add_option("--t0", e_t0);
  eval_cmd->add_option("--nt-val", e_ntval, "validation grid (0 = scenario)");
  eval_cmd->add_option("--out", e_out);

  // shock --------------------------------------------------------------
  auto* shock_cmd =
      app.add_subcommand("shock", "displace mid-flight, compare to re-solve");
  std::string s_ckpt, s_xi, s_out;
  ShockSpec s_spec;
  BaselineOptions s_bopt;
  shock_cmd->add_option("--checkpoint", s_ckpt)->required();
  shock_cmd->add_option("--time", s_spec.time, "shock time");
  shock_cmd->add_option("--magnitude", s_spec.magnitude,
                        "shock magnitude (random direction)");
  shock_cmd->add_option("--xi", s_xi, "explicit displacement vector");
  shock_cmd->add_option("--seed", s_spec.seed);
  shock_cmd->add_option("--baseline-iters", s_bopt.max_iters);
  shock_cmd->add_option("--baseline-multistarts", s_bopt.multistarts);
  shock_cmd->add_option("--out", s_out);

  // sweep ----------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("sweep", "robustness / scaling sweeps");
  sweep_cmd->require_subcommand(1);

  auto* hyp = sweep_cmd->add_subcommand(
      "hypersphere", "suboptimality over random displacements");
  std::string h_ckpt, h_mags = "1,2", h_out;
  int h_count = 100;
  unsigned long long h_seed = 1;
  BaselineOptions h_bopt;
  hyp->add_option("--checkpoint", h_ckpt)->required();
  hyp->add_option("--magnitudes", h_mags, "comma-separated magnitudes");
  hyp->add_option("--count", h_count, "samples per magnitude");
  hyp->add_option("--seed", h_seed);
  hyp->add_option("--baseline-iters", h_bopt.max_iters);
  hyp->add_option("--baseline-multistarts", h_bopt.multistarts);
  hyp->add_option("--out", h_out);

  auto* cod = sweep_cmd->add_subcommand(
      "cod", "smallest adequate width across the swap_k family");
  std::string c_pairs = "2,3,4", c_widths = "2,4,8,16,32,64", c_out;
  int c_iters = 0;
  double c_budget = 0.10;
  unsigned long long c_seed = 7;
  BaselineOptions c_bopt;
  cod->add_option("--pairs", c_pairs, "comma-separated pair counts (2..6)");
  cod->add_option("--widths", c_widths, "width grid to search");
  cod->add_option("--iters", c_iters, "training iterations per width");
  cod->add_option("--budget", c_budget, "suboptimality budget");
  cod->add_option("--seed", c_seed);
  cod->add_option("--baseline-iters", c_bopt.max_iters);
  cod->add_option("--out", c_out);

  // bench ----------------------------------------------------------------
  auto* bench_cmd =
      app.add_subcommand("bench", "deployment timing vs re-solve estimate");
  std::string n_ckpt, n_out;
  int n_nt = 50, n_rep = 5;
  bench_cmd->add_option("--checkpoint", n_ckpt)->required();
  bench_cmd->add_option("--nt", n_nt, "rollout grid for the NN timing");
  bench_cmd->add_option("--repeats", n_rep);
  bench_cmd->add_option("--out", n_out);

  // plot ---------------------------------------------------------------
  auto* plot_cmd = app.add_subcommand("plot", "trajectory CSV to SVG");
  std::string p_in, p_out = "plot.svg";
  plot_cmd->add_option("--in", p_in, "trajectory CSV")->required();
  plot_cmd->add_option("--svg", p_out, "output SVG path");

  try {
    app.parse(argc, argv);

    if (*train_cmd) return cmd_train(ta);
    if (*base_cmd)
      return cmd_baseline(b_scenario, b_x, b_t0, b_opt, b_out);
    if (*eval_cmd) return cmd_eval(e_ckpt, e_x, e_t0, e_ntval, e_out);
    if (*shock_cmd) {
      if (!s_xi.empty()) s_spec.xi = parse_vec(s_xi);
      return cmd_shock(s_ckpt, s_spec, s_bopt, s_out);
    }
    if (*hyp)
      return cmd_sweep_hypersphere(h_ckpt, parse_list(h_mags), h_count,
                                   h_seed, h_bopt, h_out);
    if (*cod)
      return cmd_sweep_cod(parse_int_list(c_pairs), parse_int_list(c_widths),
                           c_iters, c_budget, c_seed, c_bopt, c_out);
    if (*bench_cmd) return cmd_bench(n_ckpt, n_nt, n_rep, n_out);
    if (*plot_cmd) return cmd_plot(p_in, p_out);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
