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

#ifndef LRPS_ENV_HPP
#define LRPS_ENV_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lrps/history.hpp"
#include "lrps/policy.hpp"
#include "lrps/rng.hpp"

namespace lrps {

/**
 * Tabular POMDP. Tables are row-major:
 *   start[s], transition[s][a][s'], observation[s][o], reward[s][a][s'].
 *
 * The reward depends on the arrival state as well as (s, a) so that bandits
 * with random payoffs fit the same description.
 */
struct EnvModel {
  std::string name = "tabular";
  int states = 1;
  int observations = 1;
  int actions = 1;
  int horizon = 1;
  std::vector<double> start;
  std::vector<double> transition;
  std::vector<double> observation;
  std::vector<double> reward;

  double trans(int s, int a, int next) const {
    return transition[(static_cast<std::size_t>(s) * actions + a) * states + next];
  }
  double obs(int s, int o) const {
    return observation[static_cast<std::size_t>(s) * observations + o];
  }
  double rew(int s, int a, int next) const {
    return reward[(static_cast<std::size_t>(s) * actions + a) * states + next];
  }

  /// Throws ConfigError unless every distribution row sums to 1 within
  /// 1e-12, entries are non-negative and rewards finite.
  void validate() const;
};

/// JSON schema: {"name", "states", "observations", "actions", "horizon",
/// "start": [S], "transition": [S*A*S], "observation": [S*O],
/// "reward": [S*A*S] or [S*A]}. An S*A reward list is broadcast over s'.
EnvModel model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EnvModel& model);
EnvModel load_model(const std::string& path);

struct StepOutcome {
  Observation obs;
  double reward = 0.0;
  bool done = false;
};

/// A single-trial state machine. Not shareable during a trial; use clone()
/// to obtain an independent instance per worker.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual int num_observations() const = 0;
  virtual int num_actions() const = 0;
  virtual int horizon() const = 0;

  virtual Observation reset(Rng& rng) = 0;
  virtual StepOutcome step(Action a, Rng& rng) = 0;

  /// Exact tabular description when one exists.
  virtual std::optional<EnvModel> model() const { return std::nullopt; }

  virtual std::unique_ptr<Environment> clone() const = 0;
};

struct Trial {
  double ret = 0.0;
  History history;
};

/// Runs one trial of `policy` and tallies its counts for the policy's class.
Trial sample(Environment& env, const PolicyParams& policy, Rng& rng,
             const ReturnAggregator& aggregate = sum_rewards);

struct Outcome {
  double value;
  double prob;
};
using BanditArm = std::vector<Outcome>;

/// One state, one observation, one pull per trial.
std::unique_ptr<Environment> make_bandit(std::vector<BanditArm> arms);
std::vector<BanditArm> hidden_treasure_arms();
std::vector<BanditArm> hidden_failure_arms();
double arm_mean(const BanditArm& arm);

/// Cart on a line of `n_positions` cells. Observes its position only; is
/// loaded on reaching the left end and paid 1 on reaching the right end
/// loaded. Actions: 0 = left, 1 = right.
std::unique_ptr<Environment> make_load_unload(int n_positions = 5, int horizon = 100);
EnvModel load_unload_model(int n_positions = 5, int horizon = 100);

std::unique_ptr<Environment> make_tabular(EnvModel model);

/// V(θ) by forward recursion over the joint (state, memory) distribution.
/// Throws CapacityError when states × memory exceeds `max_joint`.
double exact_value(const EnvModel& model, const PolicyParams& policy,
                   std::size_t max_joint = std::size_t{1} << 22);

/// Hand-built one-bit controller that shuttles between the ends.
PolicyParams load_unload_optimal_controller(int n_positions = 5);

}  // namespace lrps

#endif  // LRPS_ENV_HPP
