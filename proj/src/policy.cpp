// Copyright 2026 The lrps Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lrps/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>

#include <nlohmann/json.hpp>

#include "lrps/errors.hpp"

namespace lrps {

namespace {

constexpr double kRowSumTolerance = 1e-12;
constexpr int kPolicyFormatVersion = 1;

void check_counts(const PolicyClassSpec& spec, const Counts& counts) {
  if (counts.spec.kind != spec.kind) {
    if (spec.is_controller()) {
      throw ContractError("history lacks memory annotations for a controller policy");
    }
    throw ContractError("history was tallied for a controller, policy is reactive");
  }
  if (counts.spec.observations != spec.observations || counts.spec.actions != spec.actions ||
      counts.spec.memory != spec.memory || counts.values.size() != spec.num_params()) {
    throw ContractError("history counts do not match policy dimensions");
  }
}

}  // namespace

std::vector<RowSpan> row_layout(const PolicyClassSpec& spec) {
  std::vector<RowSpan> rows;
  const int n_rows = spec.memory * spec.observations;
  rows.reserve(static_cast<std::size_t>(n_rows) * (spec.is_controller() ? 2 : 1));
  for (int r = 0; r < n_rows; ++r) {
    rows.push_back({static_cast<std::size_t>(r) * spec.actions,
                    static_cast<std::size_t>(spec.actions)});
  }
  if (spec.is_controller()) {
    for (int r = 0; r < n_rows; ++r) {
      rows.push_back({spec.action_params() + static_cast<std::size_t>(r) * spec.memory,
                      static_cast<std::size_t>(spec.memory)});
    }
  }
  return rows;
}

PolicyParams::PolicyParams(PolicyClassSpec spec, std::vector<double> params)
    : spec_(std::move(spec)), params_(std::move(params)) {
  spec_.validate();
  if (params_.size() != spec_.num_params()) {
    throw ConfigError("policy has " + std::to_string(params_.size()) + " parameters, " +
                      spec_.describe() + " needs " + std::to_string(spec_.num_params()));
  }
  for (const auto& row : row_layout(spec_)) {
    double sum = 0.0;
    for (std::size_t k = 0; k < row.length; ++k) {
      const double p = params_[row.offset + k];
      if (!std::isfinite(p)) throw ConfigError("policy parameter is not finite");
      // Singleton rows hold probability 1 regardless of the bounds.
      if (row.length > 1 && p < spec_.c_lo - kRowSumTolerance) {
        throw ConfigError("policy parameter below c_lo at index " +
                          std::to_string(row.offset + k));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw ConfigError("policy row at index " + std::to_string(row.offset) +
                        " does not sum to 1");
    }
  }
}

PolicyParams make_reactive(const PolicyClassSpec& spec,
                           const std::vector<std::vector<double>>& table) {
  if (spec.is_controller() || static_cast<int>(table.size()) != spec.observations) {
    throw ConfigError("reactive table shape does not match " + spec.describe());
  }
  std::vector<double> flat;
  flat.reserve(spec.num_params());
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != spec.actions) {
      throw ConfigError("reactive table row has wrong length");
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return PolicyParams(spec, std::move(flat));
}

PolicyParams make_controller(const PolicyClassSpec& spec,
                             const std::vector<std::vector<std::vector<double>>>& actions,
                             const std::vector<std::vector<std::vector<double>>>& memory) {
  if (!spec.is_controller()) throw ConfigError("spec is not a controller class");
  std::vector<double> flat;
  flat.reserve(spec.num_params());
  auto append = [&](const auto& table, int width, const char* what) {
    if (static_cast<int>(table.size()) != spec.memory) {
      throw ConfigError(std::string(what) + " table needs one block per memory state");
    }
    for (const auto& block : table) {
      if (static_cast<int>(block.size()) != spec.observations) {
        throw ConfigError(std::string(what) + " table needs one row per observation");
      }
      for (const auto& row : block) {
        if (static_cast<int>(row.size()) != width) {
          throw ConfigError(std::string(what) + " table row has wrong length");
        }
        flat.insert(flat.end(), row.begin(), row.end());
      }
    }
  };
  append(actions, spec.actions, "action");
  append(memory, spec.memory, "memory");
  return PolicyParams(spec, std::move(flat));
}

std::pair<Action, int> act(const PolicyParams& policy, Observation obs, int mem, Rng& rng) {
  const auto& spec = policy.spec();
  if (obs.id < 0 || obs.id >= spec.observations) throw ContractError("observation out of range");
  if (!spec.is_controller()) {
    return {Action{categorical(rng, policy.action_row(0, obs.id))}, 0};
  }
  if (mem < 0 || mem >= spec.memory) throw ContractError("memory state out of range");
  const Action a{categorical(rng, policy.action_row(mem, obs.id))};
  const int next = categorical(rng, policy.memory_row(mem, obs.id));
  return {a, next};
}

double log_phi(std::span<const double> params, const Counts& counts) {
  if (params.size() != counts.values.size()) {
    throw ContractError("parameter vector does not match history counts");
  }
  double lp = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (counts.values[k] != 0) lp += counts.values[k] * std::log(params[k]);
  }
  return lp;
}

double log_phi(const PolicyParams& policy, const Counts& counts) {
  check_counts(policy.spec(), counts);
  return log_phi(policy.params(), counts);
}

double log_phi(const PolicyParams& policy, const History& h) {
  return log_phi(policy, h.counts);
}

std::vector<double> grad_log_phi(std::span<const double> params, const Counts& counts) {
  if (params.size() != counts.values.size()) {
    throw ContractError("parameter vector does not match history counts");
  }
  std::vector<double> g(params.size(), 0.0);
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (counts.values[k] != 0) g[k] = counts.values[k] / params[k];
  }
  return g;
}

std::vector<double> grad_log_phi(const PolicyParams& policy, const History& h) {
  check_counts(policy.spec(), h.counts);
  return grad_log_phi(policy.params(), h.counts);
}

void project_row(std::span<double> row, double c_lo) {
  const std::size_t k = row.size();
  if (k == 0) return;
  const double mass = 1.0 - c_lo * static_cast<double>(k);
  if (mass < -1e-12) throw ConfigError("c_lo exceeds 1/(row length)");
  if (mass <= 0.0) {
    std::fill(row.begin(), row.end(), c_lo);
    return;
  }
  // Shift to q = p - c_lo, then project q onto {q >= 0, sum q = mass} by the
  // sort-and-threshold method.
  std::vector<double> sorted(row.begin(), row.end());
  for (auto& v : sorted) v -= c_lo;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    cumulative += sorted[j];
    const double t = (cumulative - mass) / static_cast<double>(j + 1);
    if (sorted[j] - t > 0.0) threshold = t;
  }
  double total = 0.0;
  std::size_t largest = 0;
  for (std::size_t j = 0; j < k; ++j) {
    row[j] = std::max(row[j] - c_lo - threshold, 0.0);
    total += row[j];
    if (row[j] > row[largest]) largest = j;
  }
  // Large inputs lose digits in the threshold; put the residual mass on the
  // largest coordinate so the row sums to one to rounding.
  row[largest] = std::max(row[largest] + (mass - total), 0.0);
  for (auto& v : row) v += c_lo;
}

PolicyParams project(const PolicyClassSpec& spec, std::span<const double> raw) {
  if (raw.size() != spec.num_params()) throw ContractError("raw parameter size mismatch");
  std::vector<double> p(raw.begin(), raw.end());
  for (double v : p) {
    if (!std::isfinite(v)) throw ContractError("cannot project non-finite parameters");
  }
  for (const auto& row : row_layout(spec)) {
    project_row(std::span(p).subspan(row.offset, row.length), row.length > 1 ? spec.c_lo : 0.0);
  }
  return PolicyParams(spec, std::move(p));
}

PolicyParams project(const PolicyParams& params) { return project(params.spec(), params.params()); }

PolicyParams random_policy(const PolicyClassSpec& spec, Rng& rng) {
  std::vector<double> p(spec.num_params());
  for (const auto& row : row_layout(spec)) {
    if (row.length == 1) {
      p[row.offset] = 1.0;
      continue;
    }
    // Normalized exponentials are uniform on the simplex.
    const double mass = 1.0 - spec.c_lo * static_cast<double>(row.length);
    double total = 0.0;
    for (std::size_t k = 0; k < row.length; ++k) total += (p[row.offset + k] = exponential(rng));
    for (std::size_t k = 0; k < row.length; ++k) {
      p[row.offset + k] = spec.c_lo + mass * p[row.offset + k] / total;
    }
  }
  return PolicyParams(spec, std::move(p));
}

nlohmann::json to_json(const PolicyClassSpec& spec) {
  return {{"variant", spec.is_controller() ? "controller" : "reactive"},
          {"observations", spec.observations},
          {"actions", spec.actions},
          {"memory", spec.memory},
          {"c_lo", spec.c_lo},
          {"c_hi", spec.c_hi}};
}

PolicyClassSpec spec_from_json(const nlohmann::json& j) {
  try {
    PolicyClassSpec s;
    const auto variant = j.at("variant").get<std::string>();
    if (variant == "reactive") {
      s.kind = PolicyKind::kReactive;
    } else if (variant == "controller") {
      s.kind = PolicyKind::kController;
    } else {
      throw FormatError("unknown policy variant '" + variant + "'");
    }
    s.observations = j.at("observations").get<int>();
    s.actions = j.at("actions").get<int>();
    s.memory = j.value("memory", 1);
    s.c_lo = j.at("c_lo").get<double>();
    s.c_hi = j.at("c_hi").get<double>();
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed policy class: ") + e.what());
  }
}

nlohmann::json to_json(const PolicyParams& policy) {
  const auto& spec = policy.spec();
  const auto p = policy.params();
  nlohmann::json j = to_json(spec);
  j["format"] = "lrps-policy";
  j["version"] = kPolicyFormatVersion;
  j["action_table"] = std::vector<double>(p.begin(), p.begin() + spec.action_params());
  if (spec.is_controller()) {
    j["memory_table"] = std::vector<double>(p.begin() + spec.action_params(), p.end());
  }
  return j;
}

PolicyParams policy_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", std::string("lrps-policy")) != "lrps-policy") {
      throw FormatError("not a policy record");
    }
    if (j.value("version", kPolicyFormatVersion) != kPolicyFormatVersion) {
      throw FormatError("unsupported policy format version " + j.at("version").dump());
    }
    const auto spec = spec_from_json(j);
    auto params = j.at("action_table").get<std::vector<double>>();
    if (spec.is_controller()) {
      const auto mem = j.at("memory_table").get<std::vector<double>>();
      params.insert(params.end(), mem.begin(), mem.end());
    }
    return PolicyParams(spec, std::move(params));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed policy: ") + e.what());
  }
}

PolicyParams load_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open policy file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  return policy_from_json(j);
}

void save_policy(const std::string& path, const PolicyParams& policy) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write policy file " + path);
  out << to_json(policy).dump(2) << '\n';
}

}  // namespace lrps
