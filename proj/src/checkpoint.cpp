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

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "adaptkf/csv.hpp"
#include "adaptkf/policy.hpp"

namespace adaptkf {

namespace {

using nlohmann::json;

// nlohmann prints doubles in shortest form; the document wants 17 digits,
// so it is written by hand and only parsed with the library.
std::string number(double v) { return csv::format_double(v); }

template <typename Range>
std::string array(const Range& values) {
  std::string out = "[";
  bool first = true;
  for (double v : values) {
    if (!first) out += ", ";
    out += number(v);
    first = false;
  }
  return out + "]";
}

std::string quoted(const std::string& s) { return json(s).dump(); }

[[noreturn]] void mismatch(const std::string& what) {
  throw Error(ErrorCode::CheckpointMismatch, "checkpoint: " + what);
}

std::vector<double> doubles(const json& j, const char* field) {
  if (!j.is_array()) mismatch(std::string(field) + " is not an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) mismatch(std::string(field) + " holds a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void PolicyCheckpoint::validate() const {
  if (version.empty()) mismatch("missing version tag");
  if (action_set.size() == 0) mismatch("empty action set");
  for (const auto& a : action_set.values) {
    if (a.kind != filter) mismatch("action kind differs from filter kind");
  }
  if (actor.num_layers() < 1) mismatch("actor has no layers");
  if (static_cast<std::size_t>(actor.output_dim()) != action_set.size()) {
    mismatch("actor output width differs from the action set size");
  }
  if (actor.input_dim() != normalization.dim()) {
    mismatch("actor input width differs from the normalization width");
  }
  if (normalization.scale.size() != normalization.shift.size()) {
    mismatch("normalization shift and scale differ in length");
  }
}

std::string checkpoint_to_json(const PolicyCheckpoint& ckpt) {
  ckpt.validate();
  std::vector<double> actions;
  for (const auto& a : ckpt.action_set.values) actions.push_back(a.value());

  std::ostringstream os;
  os << "{\n";
  os << "  \"version\": " << quoted(ckpt.version) << ",\n";
  os << "  \"model\": " << quoted(ckpt.model) << ",\n";
  os << "  \"filter\": " << quoted(to_string(ckpt.filter)) << ",\n";
  os << "  \"cost\": {\"kind\": " << quoted(to_string(ckpt.cost.kind))
     << ", \"compute_weight\": " << number(ckpt.cost.compute_weight) << "},\n";
  os << "  \"gamma\": " << number(ckpt.gamma) << ",\n";
  os << "  \"seed\": " << ckpt.seed << ",\n";
  os << "  \"action_set\": " << array(actions) << ",\n";
  os << "  \"normalization\": {\n";
  os << "    \"shift\": " << array(ckpt.normalization.shift) << ",\n";
  os << "    \"scale\": " << array(ckpt.normalization.scale) << "\n";
  os << "  },\n";
  os << "  \"actor\": {\n";
  os << "    \"dims\": [";
  const auto& dims = ckpt.actor.layer_dims();
  for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? ", " : "") << dims[i];
  os << "],\n";
  os << "    \"weights\": [\n";
  for (int l = 0; l < ckpt.actor.num_layers(); ++l) {
    os << "      " << array(ckpt.actor.weights(l)) << (l + 1 < ckpt.actor.num_layers() ? ",\n" : "\n");
  }
  os << "    ],\n";
  os << "    \"biases\": [\n";
  for (int l = 0; l < ckpt.actor.num_layers(); ++l) {
    os << "      " << array(ckpt.actor.biases(l)) << (l + 1 < ckpt.actor.num_layers() ? ",\n" : "\n");
  }
  os << "    ]\n";
  os << "  }\n";
  os << "}\n";
  return os.str();
}

PolicyCheckpoint checkpoint_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    mismatch(std::string("malformed document: ") + e.what());
  }
  PolicyCheckpoint ckpt;
  try {
    ckpt.version = doc.at("version").get<std::string>();
    if (ckpt.version != PolicyCheckpoint::kVersion) mismatch("unsupported version " + ckpt.version);
    ckpt.model = doc.at("model").get<std::string>();
    ckpt.filter = filter_kind_from_string(doc.at("filter").get<std::string>());
    const json& cost = doc.at("cost");
    ckpt.cost.kind = cost_kind_from_string(cost.at("kind").get<std::string>());
    ckpt.cost.compute_weight = cost.at("compute_weight").get<double>();
    ckpt.gamma = doc.at("gamma").get<double>();
    ckpt.seed = doc.at("seed").get<std::uint64_t>();
    ckpt.action_set = ActionSet::from_values(ckpt.filter, doubles(doc.at("action_set"), "action_set"));
    const json& norm = doc.at("normalization");
    ckpt.normalization.shift = to_vector(doubles(norm.at("shift"), "shift"));
    ckpt.normalization.scale = to_vector(doubles(norm.at("scale"), "scale"));

    const json& actor = doc.at("actor");
    const auto dims = actor.at("dims").get<std::vector<int>>();
    if (dims.size() < 2) mismatch("actor needs at least two widths");
    for (int d : dims) {
      if (d <= 0) mismatch("actor widths must be positive");
    }
    ckpt.actor = nn::Mlp(dims);
    const json& weights = actor.at("weights");
    const json& biases = actor.at("biases");
    const auto layers = static_cast<std::size_t>(ckpt.actor.num_layers());
    if (!weights.is_array() || !biases.is_array() || weights.size() != layers ||
        biases.size() != layers) {
      mismatch("actor layer count differs from dims");
    }
    for (int l = 0; l < ckpt.actor.num_layers(); ++l) {
      const auto w = doubles(weights[l], "weights");
      const auto b = doubles(biases[l], "biases");
      auto dw = ckpt.actor.weights(l);
      auto db = ckpt.actor.biases(l);
      if (w.size() != dw.size() || b.size() != db.size()) mismatch("actor layer shape differs from dims");
      std::copy(w.begin(), w.end(), dw.begin());
      std::copy(b.begin(), b.end(), db.begin());
    }
  } catch (const json::exception& e) {
    mismatch(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CheckpointMismatch) throw;
    mismatch(e.what());
  }
  ckpt.validate();
  return ckpt;
}

void save_checkpoint(const PolicyCheckpoint& ckpt, const std::string& path) {
  const std::string text = checkpoint_to_json(ckpt);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path);
}

PolicyCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace adaptkf
