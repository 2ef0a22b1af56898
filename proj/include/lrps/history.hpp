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

#ifndef LRPS_HISTORY_HPP
#define LRPS_HISTORY_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lrps {

struct Observation {
  int id = 0;
  friend bool operator==(Observation, Observation) = default;
};

struct Action {
  int id = 0;
  friend bool operator==(Action, Action) = default;
};

/// One time step of a trial. `memory` is the agent's internal state when it
/// chose `action`; only finite-state controllers record it.
struct Step {
  Observation obs;
  Action action;
  double reward = 0.0;
  std::optional<int> memory;

  friend bool operator==(const Step&, const Step&) = default;
};

enum class PolicyKind { kReactive, kController };

/// Describes a policy class: the tables' shapes and the probability bounds.
/// Reactive classes always have `memory == 1`.
struct PolicyClassSpec {
  PolicyKind kind = PolicyKind::kReactive;
  int observations = 1;
  int actions = 2;
  int memory = 1;
  double c_lo = 0.1;
  double c_hi = 0.9;

  static PolicyClassSpec reactive(int observations, int actions,
                                  double c_lo = 0.1, double c_hi = 0.9);
  static PolicyClassSpec controller(int observations, int actions, int memory,
                                    double c_lo = 0.1, double c_hi = 0.9);

  bool is_controller() const { return kind == PolicyKind::kController; }

  /// Flat parameter layout: action table θ[m][o][a] row-major first, then
  /// (controllers only) memory table θ[m][o][m'] row-major.
  std::size_t action_params() const {
    return static_cast<std::size_t>(memory) * observations * actions;
  }
  std::size_t memory_params() const {
    return is_controller() ? static_cast<std::size_t>(memory) * observations * memory : 0;
  }
  std::size_t num_params() const { return action_params() + memory_params(); }

  std::size_t action_index(int m, int o, int a) const {
    return (static_cast<std::size_t>(m) * observations + o) * actions + a;
  }
  std::size_t memory_index(int m, int o, int next) const {
    return action_params() + (static_cast<std::size_t>(m) * observations + o) * memory + next;
  }

  /// Throws ConfigError on inconsistent dimensions or bounds.
  void validate() const;

  std::string describe() const;

  friend bool operator==(const PolicyClassSpec&, const PolicyClassSpec&) = default;
};

/// Sufficient statistics of a history for a policy class: n[o][a] (or
/// n[m][o][a] and n[m][o][m']) laid out like the class's flat parameters.
struct Counts {
  PolicyClassSpec spec;
  std::vector<std::uint32_t> values;

  friend bool operator==(const Counts&, const Counts&) = default;
};

/// Tallies the steps of a trial for `spec`. Controller classes require every
/// step to carry a memory annotation (ContractError otherwise); memory
/// transitions are counted between consecutive recorded steps.
Counts tally(std::span<const Step> steps, const PolicyClassSpec& spec);

struct History {
  std::vector<Step> steps;
  Counts counts;

  std::size_t length() const { return steps.size(); }
};

using ReturnAggregator = std::function<double(std::span<const Step>)>;

double sum_rewards(std::span<const Step> steps);

}  // namespace lrps

#endif  // LRPS_HISTORY_HPP
