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

#include "lrps/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "lrps/errors.hpp"

namespace lrps {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

double log_sum_exp(std::span<const double> v) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : v) hi = std::max(hi, x);
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

void check_query(const Dataset& d, std::span<const double> params) {
  if (d.empty()) throw EmptyDatasetError();
  if (params.size() != d.spec().num_params()) {
    throw ContractError("query policy does not belong to the dataset's class " +
                        d.spec().describe());
  }
  for (double p : params) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw ContractError("query parameters must be positive and finite");
    }
  }
}

// Log importance weights log w_i = log Φ(h_i|θ) − log Σ_j Φ(h_i|θ_j).
Eigen::VectorXd log_weights(const Dataset& d, std::span<const double> params) {
  const auto lp = d.log_likelihoods(params);
  Eigen::VectorXd lw(static_cast<Eigen::Index>(lp.size()));
  const auto den = d.mix_denominators();
  for (std::size_t i = 0; i < lp.size(); ++i) lw[static_cast<Eigen::Index>(i)] = lp[i] - den[i];
  return lw;
}

// Σ_i c_i ∇log Φ(h_i|θ) = (Countsᵀ c) ./ θ.
std::vector<double> weighted_score(const Dataset& d, const Eigen::VectorXd& coef,
                                   std::span<const double> params,
                                   std::span<const double> counts) {
  const auto n = static_cast<Eigen::Index>(d.size());
  const auto p = static_cast<Eigen::Index>(params.size());
  const ConstMatrixMap c(counts.data(), n, p);
  const Eigen::VectorXd s = c.transpose() * coef;
  std::vector<double> g(params.size());
  for (Eigen::Index k = 0; k < p; ++k) g[static_cast<std::size_t>(k)] = s[k] / params[static_cast<std::size_t>(k)];
  return g;
}

}  // namespace

SampleRecord SampleRecord::make(PolicyParams policy, double ret, const History& h,
                                bool keep_steps) {
  Counts counts = h.counts;
  if (counts.values.empty() && !h.steps.empty()) counts = tally(h.steps, policy.spec());
  const double self = log_phi(policy, counts);
  std::optional<std::vector<Step>> steps;
  if (keep_steps) steps = h.steps;
  return SampleRecord{std::move(policy), ret, std::move(counts), std::move(steps), self};
}

Dataset::Dataset(PolicyClassSpec spec, bool verbose) : spec_(std::move(spec)), verbose_(verbose) {
  spec_.validate();
  if (!(spec_.c_lo > 0.0)) {
    throw ConfigError("importance sampling needs c_lo > 0 so likelihoods stay positive");
  }
}

std::vector<double> Dataset::log_likelihoods(std::span<const double> params) const {
  const auto n = static_cast<Eigen::Index>(size());
  const auto p = static_cast<Eigen::Index>(spec_.num_params());
  Eigen::VectorXd logp(p);
  for (Eigen::Index k = 0; k < p; ++k) logp[k] = std::log(params[static_cast<std::size_t>(k)]);
  const ConstMatrixMap c(counts_.data(), n, p);
  std::vector<double> out(static_cast<std::size_t>(n));
  Eigen::Map<Eigen::VectorXd>(out.data(), n) = c * logp;
  return out;
}

void Dataset::add(SampleRecord rec) {
  if (!(rec.policy.spec() == spec_)) {
    throw ContractError("record policy class " + rec.policy.spec().describe() +
                        " does not match dataset class " + spec_.describe());
  }
  if (!(rec.counts.spec == spec_)) {
    rec.counts = rec.steps ? tally(*rec.steps, spec_) : rec.counts;
    if (!(rec.counts.spec == spec_)) throw ContractError("record counts do not match dataset class");
  }
  const auto P = spec_.num_params();
  const auto theta = rec.policy.params();
  for (double v : theta) {
    if (!(v > 0.0)) throw ContractError("sampling policy has a zero probability");
  }

  // Fold Φ(h_i | θ_new) into every existing denominator.
  const auto lp_existing = log_likelihoods(theta);
  for (std::size_t i = 0; i < records_.size(); ++i) {
    log_mix_[i] = log_add_exp(log_mix_[i], lp_existing[i]);
  }

  const std::size_t base = counts_.size();
  counts_.resize(base + P);
  log_params_.resize(base + P);
  for (std::size_t k = 0; k < P; ++k) {
    counts_[base + k] = static_cast<double>(rec.counts.values[k]);
    log_params_[base + k] = std::log(theta[k]);
  }

  // Denominator of the new record: Φ(h_new | θ_j) over all N+1 policies.
  const auto n = static_cast<Eigen::Index>(records_.size() + 1);
  const ConstMatrixMap lparams(log_params_.data(), n, static_cast<Eigen::Index>(P));
  const ConstVectorMap c_new(counts_.data() + base, static_cast<Eigen::Index>(P));
  const Eigen::VectorXd lp_new = lparams * c_new;
  log_mix_.push_back(log_sum_exp(std::span<const double>(lp_new.data(), lp_new.size())));

  returns_.push_back(rec.ret);
  rec.log_phi_self = lp_new[n - 1];
  if (!verbose_) rec.steps.reset();
  records_.push_back(std::move(rec));
  ++version_;
}

void Dataset::clear() {
  records_.clear();
  returns_.clear();
  log_mix_.clear();
  counts_.clear();
  log_params_.clear();
  ++version_;
}

Dataset add_data(Dataset d, SampleRecord rec) {
  d.add(std::move(rec));
  return d;
}

Estimate evaluate_wis(const Dataset& d, std::span<const double> params) {
  check_query(d, params);
  const Eigen::VectorXd lw = log_weights(d, params);
  const double hi = lw.maxCoeff();
  if (!std::isfinite(hi)) throw DegeneracyError("all importance weights vanished");
  const Eigen::VectorXd w = (lw.array() - hi).exp();
  const double total = w.sum();
  const ConstVectorMap r(d.returns().data(), static_cast<Eigen::Index>(d.size()));

  Estimate e;
  e.value = r.dot(w) / total;
  // ∇V̂ = Σ (R_i − V̂) w_i ∇log Φ_i / Σ w_i; the common scale exp(hi) cancels.
  const Eigen::VectorXd coef = (r.array() - e.value).matrix().cwiseProduct(w) / total;
  e.gradient = weighted_score(d, coef, params, d.count_matrix());
  e.effective_sample_size = total;  // max w is exp(0) = 1 after shifting
  return e;
}

Estimate evaluate_is(const Dataset& d, std::span<const double> params) {
  check_query(d, params);
  const Eigen::VectorXd lw = log_weights(d, params);
  const double hi = lw.maxCoeff();
  if (!std::isfinite(hi)) throw DegeneracyError("all importance weights vanished");
  const Eigen::VectorXd w = lw.array().exp();
  if (!(w.maxCoeff() > 0.0)) throw DegeneracyError("all importance weights underflowed");
  const ConstVectorMap r(d.returns().data(), static_cast<Eigen::Index>(d.size()));

  Estimate e;
  e.value = r.dot(w);
  e.gradient = weighted_score(d, r.cwiseProduct(w), params, d.count_matrix());
  e.effective_sample_size = w.sum() / w.maxCoeff();
  return e;
}

Estimate evaluate_wis(const Dataset& d, const PolicyParams& policy) {
  if (!(policy.spec() == d.spec())) throw ContractError("query policy class mismatch");
  return evaluate_wis(d, policy.params());
}

Estimate evaluate_is(const Dataset& d, const PolicyParams& policy) {
  if (!(policy.spec() == d.spec())) throw ContractError("query policy class mismatch");
  return evaluate_is(d, policy.params());
}

double direct_estimate(const Dataset& d) {
  if (d.empty()) throw EmptyDatasetError();
  double s = 0.0;
  for (double r : d.returns()) s += r;
  return s / static_cast<double>(d.size());
}

double weight_bound(const PolicyClassSpec& spec, int horizon) {
  // Largest attainable entry of a row of length k is 1 − (k−1)·c_lo.
  auto ratio = [&](int k) { return k > 1 ? (1.0 - (k - 1) * spec.c_lo) / spec.c_lo : 1.0; };
  double per_step = ratio(spec.actions);
  if (spec.is_controller()) per_step *= ratio(spec.memory);
  return std::pow(per_step, horizon);
}

}  // namespace lrps
