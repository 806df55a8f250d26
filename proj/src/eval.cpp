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

#include "adaptkf/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include <Eigen/Cholesky>

namespace adaptkf {

namespace {

constexpr int kBlockRuns = 16;

/// e' P^-1 e, or NaN when P is not positive definite.
double nees(const Vector& err, const Matrix& cov) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  const double v = err.dot(llt.solve(err));
  return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
}

double mean_from(const std::vector<double>& series, int warmup) {
  const auto begin = std::min<std::size_t>(static_cast<std::size_t>(warmup), series.size());
  if (begin >= series.size()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (std::size_t i = begin; i < series.size(); ++i) sum += series[i];
  return sum / static_cast<double>(series.size() - begin);
}

std::uint64_t fnv_combine(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Sums over the runs of one block for one policy.
struct PolicyPartial {
  std::vector<double> sq_err, nees, cost;
  int kept = 0;
  int diverged = 0;
  std::vector<std::vector<double>> chosen;  // per kept run, in run order
};

struct BlockResult {
  std::vector<std::uint64_t> hashes;
  std::vector<PolicyPartial> policies;
};

BlockResult run_block(const StateSpaceModel& model, FilterKind kind, const EvalConfig& cfg,
                      int first, int last, int horizon) {
  BlockResult out;
  out.policies.resize(cfg.policies.size());
  for (auto& p : out.policies) {
    p.sq_err.assign(horizon, 0.0);
    p.nees.assign(horizon, 0.0);
    p.cost.assign(horizon, 0.0);
  }
  std::vector<double> sq(horizon), ne(horizon), co(horizon), ch(horizon);
  for (int run = first; run < last; ++run) {
    const std::uint64_t seed = trajectory_seed(cfg.master_seed, static_cast<std::uint64_t>(run));
    const Trajectory traj = simulate(model, seed);
    out.hashes.push_back(traj.hash());
    const FilterStreams streams(seed);
    for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
      PolicyPartial& part = out.policies[p];
      const FilterRun fr = run_filter(model, kind, cfg.policies[p].policy, traj, streams, cfg.cost);
      bool ok = !fr.diverged && static_cast<int>(fr.steps.size()) == horizon;
      for (int i = 0; ok && i < horizon; ++i) {
        const StepRecord& rec = fr.steps[i];
        const Vector err = traj.states[i] - rec.update.posterior.mean;
        sq[i] = err.squaredNorm();
        ne[i] = nees(err, rec.update.posterior.cov);
        co[i] = rec.cost;
        ch[i] = rec.params.value();
        ok = std::isfinite(sq[i]) && std::isfinite(ne[i]) && std::isfinite(co[i]);
      }
      if (!ok) {
        ++part.diverged;
        continue;
      }
      ++part.kept;
      for (int i = 0; i < horizon; ++i) {
        part.sq_err[i] += sq[i];
        part.nees[i] += ne[i];
        part.cost[i] += co[i];
      }
      part.chosen.push_back(ch);
    }
  }
  return out;
}

}  // namespace

std::vector<double> rmse_series(const std::vector<std::vector<Vector>>& errors) {
  if (errors.empty()) return {};
  const std::size_t steps = errors.front().size();
  std::vector<double> out(steps, 0.0);
  for (const auto& run : errors) {
    if (run.size() != steps) throw Error(ErrorCode::InvalidArgument, "ragged error array");
    for (std::size_t k = 0; k < steps; ++k) out[k] += run[k].squaredNorm();
  }
  for (double& v : out) v = std::sqrt(v / static_cast<double>(errors.size()));
  return out;
}

AneesResult anees_series(const std::vector<std::vector<Vector>>& errors,
                         const std::vector<std::vector<Matrix>>& covs) {
  if (errors.size() != covs.size()) throw Error(ErrorCode::InvalidArgument, "run count mismatch");
  AneesResult res;
  if (errors.empty()) return res;
  const std::size_t steps = errors.front().size();
  res.series.assign(steps, 0.0);
  std::vector<double> run_nees(steps);
  std::size_t kept = 0;
  for (std::size_t r = 0; r < errors.size(); ++r) {
    if (errors[r].size() != steps || covs[r].size() != steps) {
      throw Error(ErrorCode::InvalidArgument, "ragged error array");
    }
    bool ok = true;
    for (std::size_t k = 0; ok && k < steps; ++k) {
      run_nees[k] = nees(errors[r][k], covs[r][k]);
      ok = !std::isnan(run_nees[k]);
    }
    if (!ok) {
      res.excluded_runs.push_back(r);
      continue;
    }
    ++kept;
    for (std::size_t k = 0; k < steps; ++k) res.series[k] += run_nees[k];
  }
  for (double& v : res.series) {
    v = kept ? v / static_cast<double>(kept) : std::numeric_limits<double>::quiet_NaN();
  }
  return res;
}

void EvalConfig::validate() const {
  if (n_runs < 1) throw Error(ErrorCode::InvalidArgument, "n_runs must be at least 1");
  if (workers < 1) throw Error(ErrorCode::InvalidArgument, "workers must be at least 1");
  if (time_avg_warmup < 0) throw Error(ErrorCode::InvalidArgument, "time_avg_warmup must be >= 0");
  if (policies.empty()) throw Error(ErrorCode::InvalidArgument, "no policies to evaluate");
  std::set<std::string> names;
  for (const auto& p : policies) {
    if (!names.insert(p.name).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate policy name " + p.name);
    }
  }
}

const PolicyReport& EvalReport::policy(const std::string& name) const {
  for (const auto& p : policies) {
    if (p.name == name) return p;
  }
  throw Error(ErrorCode::InvalidArgument, "no policy named " + name);
}

EvalReport evaluate(const StateSpaceModel& model, FilterKind kind, const EvalConfig& cfg) {
  cfg.validate();
  for (const auto& p : cfg.policies) p.policy.validate(model, kind);

  const int horizon = model.horizon;
  const int n_blocks = (cfg.n_runs + kBlockRuns - 1) / kBlockRuns;
  std::vector<BlockResult> blocks(n_blocks);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int b = next++; b < n_blocks; b = next++) {
      const int first = b * kBlockRuns;
      blocks[b] = run_block(model, kind, cfg, first, std::min(cfg.n_runs, first + kBlockRuns), horizon);
    }
  };
  const int n_threads = std::min(cfg.workers, n_blocks);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  EvalReport report;
  report.model = model.name;
  report.filter = kind;
  report.horizon = horizon;
  report.n_runs = cfg.n_runs;
  for (const auto& b : blocks) {
    report.trajectory_hashes.insert(report.trajectory_hashes.end(), b.hashes.begin(), b.hashes.end());
  }
  std::uint64_t digest = 0xcbf29ce484222325ull;
  for (auto h : report.trajectory_hashes) digest = fnv_combine(digest, h);

  const double anees_scale = cfg.normalize_anees ? 1.0 / model.state_dim : 1.0;
  for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
    PolicyReport pr;
    pr.name = cfg.policies[p].name;
    std::vector<double> sq(horizon, 0.0), ne(horizon, 0.0), co(horizon, 0.0);
    int kept = 0;
    std::map<double, std::vector<long>> hist;
    for (const auto& b : blocks) {
      const PolicyPartial& part = b.policies[p];
      for (int i = 0; i < horizon; ++i) {
        sq[i] += part.sq_err[i];
        ne[i] += part.nees[i];
        co[i] += part.cost[i];
      }
      kept += part.kept;
      pr.divergence_count += part.diverged;
      for (const auto& run : part.chosen) {
        for (int i = 0; i < horizon; ++i) {
          auto& counts = hist[run[i]];
          if (counts.empty()) counts.assign(horizon, 0);
          ++counts[i];
        }
      }
    }
    pr.rmse.resize(horizon);
    pr.anees.resize(horizon);
    pr.mean_cost.resize(horizon);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < horizon; ++i) {
      pr.rmse[i] = kept ? std::sqrt(sq[i] / kept) : nan;
      pr.anees[i] = kept ? ne[i] / kept * anees_scale : nan;
      pr.mean_cost[i] = kept ? co[i] / kept : nan;
    }
    pr.time_avg_rmse = mean_from(pr.rmse, cfg.time_avg_warmup);
    pr.time_avg_anees = mean_from(pr.anees, cfg.time_avg_warmup);
    pr.time_avg_cost = mean_from(pr.mean_cost, cfg.time_avg_warmup);
    pr.param_counts.assign(horizon, std::vector<long>(hist.size(), 0));
    std::size_t j = 0;
    for (const auto& [value, counts] : hist) {
      pr.param_values.push_back(value);
      for (int i = 0; i < horizon; ++i) pr.param_counts[i][j] = counts[i];
      ++j;
    }
    pr.trajectory_digest = digest;
    report.policies.push_back(std::move(pr));
  }
  return report;
}

}  // namespace adaptkf
