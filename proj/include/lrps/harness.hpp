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

#ifndef LRPS_HARNESS_HPP
#define LRPS_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lrps/env.hpp"
#include "lrps/learner.hpp"

namespace lrps {

enum class Algorithm { kLearn, kReinforce };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct PolicyClassChoice {
  PolicyKind kind = PolicyKind::kReactive;
  int memory = 1;

  /// "reactive" or "fsc<M>".
  std::string label() const;
  /// Accepts "reactive", "0" (reactive) or a memory size ("2", "fsc2").
  static PolicyClassChoice parse(const std::string& s);
};

/**
 * One experiment grid. Cells are enumerated class-major, then algorithm,
 * p*, N. Cells that differ only in N form a group; run r of every cell in a
 * group uses the seed derive_seed(base_seed, {group, r}). Because the learn
 * loop never looks ahead, a run of N_max trials passes through exactly the
 * state of the N-trial run at iteration N, so with `share_prefix` one long
 * run per (group, run) scores every N at once and yields the same rows as
 * separate runs.
 */
struct ExperimentConfig {
  /// bandit-ht | bandit-hf | load-unload | custom
  std::string experiment = "bandit-ht";
  std::vector<int> n_grid{10};
  std::vector<double> p_stars{0.5};
  int runs = 10;
  std::vector<PolicyClassChoice> classes{PolicyClassChoice{}};
  std::vector<Algorithm> algorithms{Algorithm::kLearn};
  std::uint64_t base_seed = 1;
  int threads = 1;
  bool share_prefix = true;

  double c_lo = 0.1;
  double c_hi = 0.9;
  OptimizerConfig optimizer;
  double reinforce_step = 1e-3;
  double reinforce_decay = 0.0;

  int positions = 5;
  int horizon = 100;
  std::optional<EnvModel> model;  // for "custom"

  /// Rollouts per policy when no exact model is available.
  int mc_rollouts = 10000;

  void validate() const;
};

/// Builds the config from JSON; unknown keys are rejected.
ExperimentConfig experiment_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment(const std::string& path);

struct ResultRow {
  std::string experiment;
  std::string policy_class;
  int memory = 1;
  int n = 0;
  double p_star = 0.0;
  std::string algorithm;
  double mean = 0.0;
  double std_error = 0.0;
  int runs = 0;
  std::uint64_t base_seed = 0;
  /// "exact" or "monte-carlo:<rollouts>".
  std::string scoring;
};

using EnvironmentFactory = std::function<std::unique_ptr<Environment>()>;

EnvironmentFactory environment_factory(const ExperimentConfig& cfg);

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg,
                                      const EnvironmentFactory& factory);

extern const char* const kResultCsvHeader;
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);

}  // namespace lrps

#endif  // LRPS_HARNESS_HPP
