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

// Independent reference computations shared by the unit and acceptance tests.
// None of these call into the estimator or the likelihood code they check.

#ifndef LRPS_TESTS_ORACLES_HPP
#define LRPS_TESTS_ORACLES_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <vector>

#include "lrps/env.hpp"
#include "lrps/estimator.hpp"
#include "lrps/history.hpp"
#include "lrps/policy.hpp"
#include "lrps/rng.hpp"

namespace lrps::oracle {

inline History make_history(std::vector<Step> steps, const PolicyClassSpec& spec) {
  History h;
  h.counts = tally(steps, spec);
  h.steps = std::move(steps);
  return h;
}

/// Σ_t log Pr(a_t, m_{t+1} | o_t, m_t) straight from the step list.
inline double stepwise_log_phi(const PolicyParams& p, const std::vector<Step>& steps) {
  double total = 0.0;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const int m = steps[t].memory.value_or(0);
    total += std::log(p.action_prob(m, steps[t].obs.id, steps[t].action.id));
    if (p.spec().is_controller() && t + 1 < steps.size()) {
      total += std::log(p.memory_prob(m, steps[t].obs.id, *steps[t + 1].memory));
    }
  }
  return total;
}

/// log Pr(h | θ) under the full model: forward algorithm over hidden states
/// with the policy factors multiplied in at every step.
inline double full_log_likelihood(const EnvModel& model, const PolicyParams& p,
                                  const std::vector<Step>& steps) {
  const int S = model.states;
  std::vector<double> alpha(S);
  for (int s = 0; s < S; ++s) alpha[s] = model.start[s] * model.obs(s, steps.front().obs.id);
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const Step& st = steps[t];
    const int m = st.memory.value_or(0);
    double agent = p.action_prob(m, st.obs.id, st.action.id);
    if (p.spec().is_controller() && t + 1 < steps.size()) {
      agent *= p.memory_prob(m, st.obs.id, *steps[t + 1].memory);
    }
    std::vector<double> next(S, 0.0);
    for (int s = 0; s < S; ++s) {
      if (alpha[s] == 0.0) continue;
      for (int s2 = 0; s2 < S; ++s2) {
        if (model.rew(s, st.action.id, s2) != st.reward) continue;
        double f = alpha[s] * agent * model.trans(s, st.action.id, s2);
        if (t + 1 < steps.size()) f *= model.obs(s2, steps[t + 1].obs.id);
        next[s2] += f;
      }
    }
    alpha = std::move(next);
  }
  return std::log(std::accumulate(alpha.begin(), alpha.end(), 0.0));
}

inline std::vector<double> random_distribution(int k, Rng& rng) {
  std::vector<double> v(k);
  double total = 0.0;
  for (auto& x : v) total += (x = 0.05 + uniform01(rng));
  for (auto& x : v) x /= total;
  return v;
}

/// Dense random POMDP with small integer rewards.
inline EnvModel random_model(int states, int observations, int actions, int horizon, Rng& rng) {
  EnvModel m;
  m.name = "random";
  m.states = states;
  m.observations = observations;
  m.actions = actions;
  m.horizon = horizon;
  m.start = random_distribution(states, rng);
  for (int i = 0; i < states * actions; ++i) {
    const auto row = random_distribution(states, rng);
    m.transition.insert(m.transition.end(), row.begin(), row.end());
  }
  for (int s = 0; s < states; ++s) {
    const auto row = random_distribution(observations, rng);
    m.observation.insert(m.observation.end(), row.begin(), row.end());
  }
  for (int i = 0; i < states * actions * states; ++i) {
    m.reward.push_back(static_cast<double>(rng() % 3));
  }
  return m;
}

/// Central difference of f along coordinate i.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f,
                                  std::vector<double> x, std::size_t i, double h = 1e-6) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double up = f(x);
  x[i] = x0 - h;
  const double down = f(x);
  return (up - down) / (2 * h);
}

/// max_i |a_i − b_i| / max(1, |b_i|).
inline double max_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
  }
  return worst;
}

/// The plain O(N²) definition of the mixture weights and both estimators.
struct NaiveEstimate {
  double wis = 0.0;
  double is = 0.0;
  std::vector<double> weights;
};

inline NaiveEstimate naive_estimate(const Dataset& d, const PolicyParams& query) {
  NaiveEstimate out;
  const auto& recs = d.records();
  double wsum = 0.0;
  for (const auto& ri : recs) {
    double mix = 0.0;
    for (const auto& rj : recs) {
      double lp = 0.0;
      for (std::size_t k = 0; k < ri.counts.values.size(); ++k) {
        if (ri.counts.values[k]) lp += ri.counts.values[k] * std::log(rj.policy.params()[k]);
      }
      mix += std::exp(lp);
    }
    double lq = 0.0;
    for (std::size_t k = 0; k < ri.counts.values.size(); ++k) {
      if (ri.counts.values[k]) lq += ri.counts.values[k] * std::log(query.params()[k]);
    }
    const double w = std::exp(lq) / mix;
    out.weights.push_back(w);
    out.is += ri.ret * w;
    out.wis += ri.ret * w;
    wsum += w;
  }
  out.wis /= wsum;
  return out;
}

/// Decorator that counts every trial started on the wrapped environment.
class CountingEnv final : public Environment {
 public:
  CountingEnv(std::unique_ptr<Environment> inner, std::shared_ptr<std::atomic<long>> counter)
      : inner_(std::move(inner)), counter_(std::move(counter)) {}

  std::string name() const override { return inner_->name(); }
  int num_observations() const override { return inner_->num_observations(); }
  int num_actions() const override { return inner_->num_actions(); }
  int horizon() const override { return inner_->horizon(); }
  Observation reset(Rng& rng) override {
    ++*counter_;
    return inner_->reset(rng);
  }
  StepOutcome step(Action a, Rng& rng) override { return inner_->step(a, rng); }
  std::optional<EnvModel> model() const override { return inner_->model(); }
  std::unique_ptr<Environment> clone() const override {
    return std::make_unique<CountingEnv>(inner_->clone(), counter_);
  }

 private:
  std::unique_ptr<Environment> inner_;
  std::shared_ptr<std::atomic<long>> counter_;
};

/// Kolmogorov–Smirnov statistic of `xs` against the uniform law on [lo, hi].
inline double ks_uniform(std::vector<double> xs, double lo, double hi) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = std::clamp((xs[i] - lo) / (hi - lo), 0.0, 1.0);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

/// Reactive load-unload policy from per-position probabilities of moving right.
inline PolicyParams reactive_load_unload(const std::vector<double>& right, double c_lo = 0.0,
                                         double c_hi = 1.0) {
  const auto spec =
      PolicyClassSpec::reactive(static_cast<int>(right.size()), 2, c_lo, c_hi);
  std::vector<std::vector<double>> table;
  for (double r : right) table.push_back({1.0 - r, r});
  return make_reactive(spec, table);
}

}  // namespace lrps::oracle

#endif  // LRPS_TESTS_ORACLES_HPP
