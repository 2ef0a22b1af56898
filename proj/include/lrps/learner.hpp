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

#ifndef LRPS_LEARNER_HPP
#define LRPS_LEARNER_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "lrps/env.hpp"
#include "lrps/estimator.hpp"
#include "lrps/policy.hpp"
#include "lrps/rng.hpp"

namespace lrps {

/// Projected gradient ascent on the WIS proxy value.
struct OptimizerConfig {
  int max_iterations = 500;
  /// Initial step; halved until the proxy value does not decrease, then
  /// doubled after every accepted step (capped at max_step).
  double initial_step = 1.0;
  double max_step = 1e6;
  int max_halvings = 60;
  /// Stop when ‖project(θ + ∇V̂) − θ‖₂ falls below this.
  double gradient_tolerance = 1e-6;
  /// Stop when an accepted step improves V̂ by less than this.
  double improvement_tolerance = 1e-9;
  /// Random restarts in addition to θ_init and the best archived policy.
  int restarts = 4;
};

struct LearnConfig {
  int trials = 100;
  double p_star = 0.5;
  OptimizerConfig optimizer;
  std::uint64_t seed = 1;
  /// REINFORCE step α₀ and optional decay α_k = α₀ / (1 + k/τ); τ ≤ 0 keeps
  /// the step constant.
  double reinforce_step = 1e-3;
  double reinforce_decay = 0.0;

  void validate() const;
};

struct TraceEntry {
  int iteration = 0;  // 1-based trial index
  bool exploited = false;
  PolicyParams sampled;
  double ret = 0.0;
  PolicyParams best;
  double proxy_value = 0.0;
};

using LearnTrace = std::vector<TraceEntry>;

struct LearnResult {
  PolicyParams policy;
  LearnTrace trace;
  Dataset data;
};

struct PickResult {
  PolicyParams policy;
  bool exploited;
};

/// With probability p_star returns θ*, otherwise a uniformly random policy.
PickResult pick_sample(const Dataset& d, const PolicyParams& best, double p_star, Rng& rng);

struct OptimizeResult {
  PolicyParams policy;
  double value;
};

/// Multi-start projected gradient ascent on evaluate_wis. Candidates are
/// θ_init, `restarts` random policies and the archived sampling policy with
/// the highest return; the best final value wins, earlier candidates on ties.
OptimizeResult optimize(const Dataset& d, const PolicyParams& init, const OptimizerConfig& cfg,
                        Rng& rng);

/// Gradient ascent from a single start; no restarts.
OptimizeResult ascend(const Dataset& d, const PolicyParams& start, const OptimizerConfig& cfg);

/// The learn loop: pick_sample, sample, add_data, optimize, N times.
LearnResult learn(Environment& env, const PolicyClassSpec& spec, const LearnConfig& cfg);

/// REINFORCE as a learn-loop instance: always samples θ*, keeps only the
/// newest trial, and takes one step θ* ← project(θ* + α R ∇log Φ).
LearnResult reinforce(Environment& env, const PolicyClassSpec& spec, const LearnConfig& cfg);

/// One CSV row per iteration: iteration,exploited,return,proxy_value,exact_value.
/// exact_value is left empty without a model.
void write_trace_csv(std::ostream& out, const LearnTrace& trace,
                     const std::optional<EnvModel>& model);

}  // namespace lrps

#endif  // LRPS_LEARNER_HPP
