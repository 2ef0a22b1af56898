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

#ifndef LRPS_POLICY_HPP
#define LRPS_POLICY_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lrps/history.hpp"
#include "lrps/rng.hpp"

namespace lrps {

/**
 * Stochastic policy with directly parameterized, bounded probabilities.
 *
 * A reactive policy holds θ[o][a]. A finite-state controller holds an action
 * table θ[m][o][a] and an independent memory table θ[m][o][m'], so that
 * Pr(a, m' | o, m) = θ[m][o][a] · θ[m][o][m']. The controller starts in
 * memory state 0 and chooses the action from its current (pre-transition)
 * memory.
 *
 * Every row sums to one and each entry is at least `c_lo`. Instances are
 * immutable once built.
 */
class PolicyParams {
 public:
  /// Validates `params` against `spec` (row sums within 1e-12, entries
  /// ≥ c_lo). Throws ConfigError.
  PolicyParams(PolicyClassSpec spec, std::vector<double> params);

  const PolicyClassSpec& spec() const { return spec_; }
  std::span<const double> params() const { return params_; }

  double action_prob(int m, int o, int a) const {
    return params_[spec_.action_index(m, o, a)];
  }
  double memory_prob(int m, int o, int next) const {
    return spec_.is_controller() ? params_[spec_.memory_index(m, o, next)] : 1.0;
  }
  std::span<const double> action_row(int m, int o) const {
    return std::span(params_).subspan(spec_.action_index(m, o, 0), spec_.actions);
  }
  std::span<const double> memory_row(int m, int o) const {
    return std::span(params_).subspan(spec_.memory_index(m, o, 0), spec_.memory);
  }

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;

 private:
  PolicyClassSpec spec_;
  std::vector<double> params_;
};

/// Offsets and lengths of the probability rows in the flat parameter vector.
struct RowSpan {
  std::size_t offset;
  std::size_t length;
};
std::vector<RowSpan> row_layout(const PolicyClassSpec& spec);

/// Reactive policy from an [o][a] table.
PolicyParams make_reactive(const PolicyClassSpec& spec,
                           const std::vector<std::vector<double>>& table);

/// Controller from [m][o][a] and [m][o][m'] tables.
PolicyParams make_controller(const PolicyClassSpec& spec,
                             const std::vector<std::vector<std::vector<double>>>& actions,
                             const std::vector<std::vector<std::vector<double>>>& memory);

/// Samples the action and the next memory state. Reactive policies ignore
/// `mem` and always report next memory 0.
std::pair<Action, int> act(const PolicyParams& policy, Observation obs, int mem, Rng& rng);

/// log Φ(h|θ) = Σ n·log θ over the count table. Entries with zero count
/// contribute nothing, so θ = 0 is allowed where never visited.
double log_phi(std::span<const double> params, const Counts& counts);
double log_phi(const PolicyParams& policy, const Counts& counts);
double log_phi(const PolicyParams& policy, const History& h);

/// ∂ log Φ / ∂θ_k = n_k / θ_k in flat parameter order.
std::vector<double> grad_log_phi(std::span<const double> params, const Counts& counts);
std::vector<double> grad_log_phi(const PolicyParams& policy, const History& h);

/// Euclidean projection of a row onto {p : Σp = 1, p ≥ c_lo}, in place.
/// Throws ConfigError if c_lo · row.size() > 1.
void project_row(std::span<double> row, double c_lo);

/// Projects every row of an arbitrary finite vector onto the feasible set.
PolicyParams project(const PolicyClassSpec& spec, std::span<const double> raw);
PolicyParams project(const PolicyParams& params);

/// Each row uniform on the c_lo-bounded simplex.
PolicyParams random_policy(const PolicyClassSpec& spec, Rng& rng);

// Serialization. Doubles are written with shortest round-trip formatting,
// so a save/load cycle reproduces every parameter bit for bit.
nlohmann::json to_json(const PolicyClassSpec& spec);
PolicyClassSpec spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PolicyParams& policy);
PolicyParams policy_from_json(const nlohmann::json& j);

PolicyParams load_policy(const std::string& path);
void save_policy(const std::string& path, const PolicyParams& policy);

}  // namespace lrps

#endif  // LRPS_POLICY_HPP
