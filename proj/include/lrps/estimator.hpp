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

#ifndef LRPS_ESTIMATOR_HPP
#define LRPS_ESTIMATOR_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lrps/env.hpp"
#include "lrps/history.hpp"
#include "lrps/policy.hpp"

namespace lrps {

/// One archived trial ⟨θ_i, R_i, h_i⟩. The history is kept as counts; the
/// full step list only when the dataset is verbose.
struct SampleRecord {
  PolicyParams policy;
  double ret = 0.0;
  Counts counts;
  std::optional<std::vector<Step>> steps;
  double log_phi_self = 0.0;

  static SampleRecord make(PolicyParams policy, double ret, const History& h,
                           bool keep_steps = false);
  static SampleRecord make(PolicyParams policy, const Trial& trial, bool keep_steps = false) {
    return make(std::move(policy), trial.ret, trial.history, keep_steps);
  }
};

struct Estimate {
  double value = 0.0;
  std::vector<double> gradient;
  /// Σw / max w; equals N when all weights agree and 1 when one dominates.
  double effective_sample_size = 0.0;
};

/**
 * The proxy environment: an append-only archive of trials drawn from
 * arbitrary policies of one class, answering value and gradient queries
 * for any policy of that class.
 *
 * Samples are treated as drawn from the uniform mixture of all sampling
 * policies. For every record the log of Σ_j Φ(h_i|θ_j) is cached and kept
 * current as records arrive, so a query is O(N · params).
 *
 * Queries are const and may run concurrently against a fixed version;
 * add() needs exclusive access and bumps version().
 */
class Dataset {
 public:
  /// Requires c_lo > 0 so every log-likelihood stays finite.
  explicit Dataset(PolicyClassSpec spec, bool verbose = false);

  const PolicyClassSpec& spec() const { return spec_; }
  bool verbose() const { return verbose_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::uint64_t version() const { return version_; }

  const std::vector<SampleRecord>& records() const { return records_; }
  std::span<const double> returns() const { return returns_; }
  /// log Σ_j Φ(h_i|θ_j) for each record i.
  std::span<const double> mix_denominators() const { return log_mix_; }
  /// Row-major N × params matrix of history counts.
  std::span<const double> count_matrix() const { return counts_; }

  /// Appends a record and folds it into every cached denominator. O(N).
  void add(SampleRecord rec);

  /// log Φ(h_i | params) for every record.
  std::vector<double> log_likelihoods(std::span<const double> params) const;

  /// Drops every record (REINFORCE-style forgetting).
  void clear();

 private:
  PolicyClassSpec spec_;
  bool verbose_;
  std::uint64_t version_ = 0;
  std::vector<SampleRecord> records_;
  std::vector<double> returns_;
  std::vector<double> log_mix_;
  // Row-major N × P: history counts and the log-parameters of each
  // record's sampling policy.
  std::vector<double> counts_;
  std::vector<double> log_params_;
};

/// add_data: returns the dataset with `rec` appended.
Dataset add_data(Dataset d, SampleRecord rec);

/// Weighted (self-normalized) importance sampling estimate and gradient.
/// Throws EmptyDatasetError / DegeneracyError.
Estimate evaluate_wis(const Dataset& d, const PolicyParams& policy);
Estimate evaluate_wis(const Dataset& d, std::span<const double> params);

/// Unnormalized importance sampling with the mixture denominator.
Estimate evaluate_is(const Dataset& d, const PolicyParams& policy);
Estimate evaluate_is(const Dataset& d, std::span<const double> params);

/// Mean return; meaningful only if every sample came from the queried policy.
double direct_estimate(const Dataset& d);

/// Largest possible weight Φ(h|θ)/Φ(h|θ') for histories of length `horizon`:
/// (c_hi/c_lo)^(k·horizon) with k table factors per step.
double weight_bound(const PolicyClassSpec& spec, int horizon);

}  // namespace lrps

#endif  // LRPS_ESTIMATOR_HPP
