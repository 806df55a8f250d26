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

#include "adaptkf/csv.hpp"

#include <cstdio>
#include <fstream>

namespace adaptkf::csv {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectory(const Trajectory& traj) {
  std::string out = "k";
  const Eigen::Index nx = traj.states.empty() ? 0 : traj.states.front().size();
  const Eigen::Index nz = traj.measurements.empty() ? 0 : traj.measurements.front().size();
  for (Eigen::Index i = 0; i < nx; ++i) out += ",x" + std::to_string(i + 1);
  for (Eigen::Index i = 0; i < nz; ++i) out += ",z" + std::to_string(i + 1);
  out += '\n';
  for (int k = 0; k < traj.length(); ++k) {
    out += std::to_string(k + 1);
    for (Eigen::Index i = 0; i < nx; ++i) out += ',' + format_double(traj.states[k](i));
    for (Eigen::Index i = 0; i < nz; ++i) out += ',' + format_double(traj.measurements[k](i));
    out += '\n';
  }
  return out;
}

std::string training_log(const std::vector<EpisodeLog>& log) {
  std::string out = "episode,cumulative_cost,mean_entropy,mean_abs_delta,steps,aborted\n";
  for (const auto& e : log) {
    out += std::to_string(e.episode) + ',' + format_double(e.cumulative_cost) + ',' +
           format_double(e.mean_entropy) + ',' + format_double(e.mean_abs_delta) + ',' +
           std::to_string(e.steps) + ',' + (e.aborted ? "1" : "0") + '\n';
  }
  return out;
}

std::string eval_steps(const EvalReport& report) {
  std::string out = "policy,k,rmse,anees,mean_cost\n";
  for (const auto& p : report.policies) {
    for (std::size_t i = 0; i < p.rmse.size(); ++i) {
      out += p.name + ',' + std::to_string(i + 1) + ',' + format_double(p.rmse[i]) + ',' +
             format_double(p.anees[i]) + ',' + format_double(p.mean_cost[i]) + '\n';
    }
  }
  return out;
}

std::string eval_summary(const EvalReport& report) {
  std::string out = "policy,time_avg_rmse,time_avg_anees,time_avg_cost,divergence_count,runs\n";
  for (const auto& p : report.policies) {
    out += p.name + ',' + format_double(p.time_avg_rmse) + ',' + format_double(p.time_avg_anees) +
           ',' + format_double(p.time_avg_cost) + ',' + std::to_string(p.divergence_count) + ',' +
           std::to_string(report.n_runs) + '\n';
  }
  return out;
}

std::string eval_tradeoff(const EvalReport& report) {
  std::string out = "policy,time_avg_rmse,time_avg_anees\n";
  for (const auto& p : report.policies) {
    out += p.name + ',' + format_double(p.time_avg_rmse) + ',' + format_double(p.time_avg_anees) + '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  out << contents;
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path);
}

}  // namespace adaptkf::csv
