// Copyright 2026 The adaptkf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "adaptkf/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>

#include "CLI11.hpp"

#include "adaptkf/csv.hpp"

namespace adaptkf::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::optional<double> as_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

std::string number_name(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

[[noreturn]] void usage(const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); }

NamedPolicy fixed_policy(double v, const StateSpaceModel& model, FilterKind kind) {
  const ActionSet one = ActionSet::from_values(kind, {v});
  one[0].validate(model.state_dim);
  return {"fixed:" + number_name(v), ParamPolicy::fixed_value(one[0])};
}

/// Options shared by every subcommand.
struct Common {
  std::string model;
  std::string filter = "ukf";
  std::string cost = "nis";
  std::optional<double> compute_weight;
  std::uint64_t seed = 0;
  int horizon = 0;
  std::vector<double> actions;
  std::string out_dir;

  void add_to(CLI::App& app, bool with_cost) {
    app.add_option("--model", model, "ungm or ctm")->required()->check(CLI::IsMember({"ungm", "ctm"}));
    app.add_option("--seed", seed, "master seed");
    app.add_option("--horizon", horizon, "override the model horizon")->check(CLI::NonNegativeNumber);
    app.add_option("--out-dir", out_dir, "directory for default output paths")
        ->envname("ADAPTKF_OUT_DIR");
    if (!with_cost) return;
    app.add_option("--filter", filter, "ukf or sif")->check(CLI::IsMember({"ukf", "sif"}));
    app.add_option("--cost", cost, "nis, logmaxnis or stateinnov")
        ->check(CLI::IsMember({"nis", "logmaxnis", "stateinnov"}));
    app.add_option("--compute-weight", compute_weight,
                   "penalty per iteration (default 0 for ukf, 1/50 for sif)");
    app.add_option("--actions", actions, "candidate parameter values")->delimiter(',');
  }

  StateSpaceModel make_model() const { return model_by_name(model, horizon); }
  FilterKind kind() const { return filter_kind_from_string(filter); }
  CostSpec cost_spec() const {
    CostSpec spec;
    spec.kind = cost_kind_from_string(cost);
    spec.compute_weight = compute_weight.value_or(kind() == FilterKind::Unscented ? 0.0 : 1.0 / 50.0);
    if (kind() == FilterKind::Unscented && spec.compute_weight != 0.0) {
      usage("--compute-weight must be 0 for ukf");
    }
    if (!(spec.compute_weight >= 0.0)) usage("--compute-weight must be non-negative");
    return spec;
  }
  ActionSet action_set(int state_dim) const {
    ActionSet set = actions.empty() ? ActionSet::defaults(kind()) : ActionSet::from_values(kind(), actions);
    set.validate(state_dim);
    return set;
  }
  std::string path(const std::string& given, const std::string& fallback) const {
    if (!given.empty()) return given;
    const std::string dir = out_dir.empty() ? "." : out_dir;
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / fallback).string();
  }
};

int simulate_cmd(const Common& c, const std::string& out_path, std::ostream& out) {
  const StateSpaceModel model = c.make_model();
  const Trajectory traj = simulate(model, c.seed);
  const std::string path = c.path(out_path, "trajectory.csv");
  csv::write_file(path, csv::trajectory(traj));
  out << "wrote " << traj.length() << " steps to " << path << '\n';
  return kExitOk;
}

struct TrainOptions {
  int episodes = 1000;
  double gamma = 0.5;
  double tau = 0.01;
  double actor_lr = 1e-4;
  double critic_lr = 5e-4;
  double entropy = 1e-3;
  int warmup = 50;
  std::vector<int> hidden = {64, 64};
  std::string out;
  std::string log;
};

int train_cmd(const Common& c, const TrainOptions& o, std::ostream& out) {
  const StateSpaceModel model = c.make_model();
  TrainConfig cfg;
  cfg.gamma = o.gamma;
  cfg.n_episodes = o.episodes;
  cfg.tau = o.tau;
  cfg.actor_lr = o.actor_lr;
  cfg.critic_lr = o.critic_lr;
  cfg.entropy_coeff = o.entropy;
  cfg.cost = c.cost_spec();
  cfg.action_set = c.action_set(model.state_dim);
  cfg.master_seed = c.seed;
  cfg.normalization_warmup_episodes = o.warmup;
  cfg.hidden_layers = o.hidden;
  cfg.validate();

  const TrainResult result = train(model, c.kind(), cfg);

  PolicyCheckpoint ckpt;
  ckpt.model = model.name;
  ckpt.filter = c.kind();
  ckpt.cost = cfg.cost;
  ckpt.gamma = cfg.gamma;
  ckpt.seed = cfg.master_seed;
  ckpt.action_set = cfg.action_set;
  ckpt.normalization = result.normalization;
  ckpt.actor = result.actor;
  const std::string ckpt_path = c.path(o.out, "policy.json");
  const std::string log_path = c.path(o.log, "train_log.csv");
  save_checkpoint(ckpt, ckpt_path);
  csv::write_file(log_path, csv::training_log(result.log));
  out << "trained " << result.log.size() << " episodes; checkpoint " << ckpt_path << ", log "
      << log_path << '\n';
  return kExitOk;
}

struct EvalOptions {
  int runs = 500;
  std::string baselines = "default";
  int workers = 1;
  int time_avg_warmup = 0;
  bool normalize_anees = false;
  std::string prefix;
};

int eval_cmd(const Common& c, const EvalOptions& o, std::ostream& out) {
  const StateSpaceModel model = c.make_model();
  EvalConfig cfg;
  cfg.n_runs = o.runs;
  cfg.master_seed = c.seed;
  cfg.cost = c.cost_spec();
  cfg.workers = o.workers;
  cfg.time_avg_warmup = o.time_avg_warmup;
  cfg.normalize_anees = o.normalize_anees;
  cfg.policies = parse_baselines(o.baselines, model, c.kind(), c.action_set(model.state_dim), cfg.cost);

  const EvalReport report = evaluate(model, c.kind(), cfg);
  const std::string prefix = c.path(o.prefix, "eval");
  csv::write_file(prefix + "_steps.csv", csv::eval_steps(report));
  csv::write_file(prefix + "_summary.csv", csv::eval_summary(report));
  csv::write_file(prefix + "_tradeoff.csv", csv::eval_tradeoff(report));
  out << csv::eval_summary(report);
  return kExitOk;
}

}  // namespace

std::vector<NamedPolicy> parse_baselines(const std::string& spec, const StateSpaceModel& model,
                                         FilterKind kind, const ActionSet& actions,
                                         const CostSpec& cost) {
  std::vector<NamedPolicy> out;
  bool in_fixed = false;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = spec.find(',', start);
    const std::string token =
        trim(spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    start = comma == std::string::npos ? spec.size() + 1 : comma + 1;
    if (token.empty()) usage("empty entry in --baselines");

    if (const auto v = as_number(token); v && in_fixed) {
      out.push_back(fixed_policy(*v, model, kind));
      continue;
    }
    in_fixed = false;
    if (token == "default") {
      out.push_back({"default", ParamPolicy::default_value()});
    } else if (token == "myopic") {
      out.push_back({"myopic", ParamPolicy::myopic(actions, cost)});
    } else if (token == "optimal") {
      if (kind != FilterKind::Unscented) usage("optimal applies only to ukf");
      out.push_back({"optimal", ParamPolicy::max_likelihood(actions)});
    } else if (token.rfind("fixed:", 0) == 0) {
      const auto v = as_number(token.substr(6));
      if (!v) usage("bad fixed value in --baselines: " + token);
      out.push_back(fixed_policy(*v, model, kind));
      in_fixed = true;
    } else if (token.rfind("adaptive:", 0) == 0) {
      auto ckpt = std::make_shared<const PolicyCheckpoint>(load_checkpoint(token.substr(9)));
      if (ckpt->model != model.name) {
        throw Error(ErrorCode::CheckpointMismatch,
                    "checkpoint was trained on " + ckpt->model + ", not " + model.name);
      }
      ParamPolicy p = ParamPolicy::adaptive_greedy(std::move(ckpt));
      p.validate(model, kind);
      out.push_back({"adaptive", std::move(p)});
    } else {
      usage("unknown entry in --baselines: " + token);
    }
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive parameter selection for Gaussian-assumed filters", "adaptkf"};
  app.set_config("--config", "", "TOML/INI file with option defaults; flags take precedence");
  app.require_subcommand(1);

  Common sim_common, train_common, eval_common;
  std::string sim_out;
  TrainOptions train_opts;
  EvalOptions eval_opts;

  CLI::App* sim = app.add_subcommand("simulate", "write one simulated trajectory as CSV");
  sim_common.add_to(*sim, false);
  sim->add_option("--out", sim_out, "trajectory CSV path");

  CLI::App* tr = app.add_subcommand("train", "train an adaptive policy and write its checkpoint");
  train_common.add_to(*tr, true);
  tr->add_option("--episodes", train_opts.episodes)->check(CLI::NonNegativeNumber);
  tr->add_option("--gamma", train_opts.gamma)->check(CLI::Range(0.0, 1.0));
  tr->add_option("--tau", train_opts.tau);
  tr->add_option("--actor-lr", train_opts.actor_lr);
  tr->add_option("--critic-lr", train_opts.critic_lr);
  tr->add_option("--entropy", train_opts.entropy);
  tr->add_option("--norm-warmup", train_opts.warmup)->check(CLI::NonNegativeNumber);
  tr->add_option("--hidden", train_opts.hidden, "hidden layer widths")->delimiter(',');
  tr->add_option("--out", train_opts.out, "checkpoint path");
  tr->add_option("--log", train_opts.log, "training-log CSV path");

  CLI::App* ev = app.add_subcommand("eval", "Monte Carlo comparison of parameter policies");
  eval_common.add_to(*ev, true);
  ev->add_option("--runs", eval_opts.runs)->check(CLI::PositiveNumber);
  ev->add_option("--baselines", eval_opts.baselines,
                 "default,fixed:<v>[,<v>...],myopic,optimal,adaptive:<path>");
  ev->add_option("--workers", eval_opts.workers)->check(CLI::PositiveNumber);
  ev->add_option("--time-avg-warmup", eval_opts.time_avg_warmup)->check(CLI::NonNegativeNumber);
  ev->add_flag("--normalize-anees", eval_opts.normalize_anees, "report ANEES / n_x");
  ev->add_option("--prefix", eval_opts.prefix, "path prefix of the three report CSVs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim->parsed()) return simulate_cmd(sim_common, sim_out, out);
    if (tr->parsed()) return train_cmd(train_common, train_opts, out);
    return eval_cmd(eval_common, eval_opts, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::InvalidArgument ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace adaptkf::cli
