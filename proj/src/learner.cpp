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

#include "lrps/learner.hpp"

#include <cassert>
#include <cmath>
#include <ostream>

#include "lrps/errors.hpp"

namespace lrps {

namespace {

void project_in_place(const PolicyClassSpec& spec, const std::vector<RowSpan>& rows,
                      std::vector<double>& x) {
  for (const auto& row : rows) {
    project_row(std::span(x).subspan(row.offset, row.length), row.length > 1 ? spec.c_lo : 0.0);
  }
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

}  // namespace

void LearnConfig::validate() const {
  if (trials < 1) throw ConfigError("number of trials must be at least 1");
  if (!(p_star >= 0.0 && p_star <= 1.0)) throw ConfigError("p_star must lie in [0, 1]");
  if (optimizer.max_iterations < 0 || optimizer.restarts < 0 || optimizer.max_halvings < 0) {
    throw ConfigError("optimizer budgets must be non-negative");
  }
  if (!(optimizer.initial_step > 0.0) || !(optimizer.max_step >= optimizer.initial_step)) {
    throw ConfigError("optimizer step sizes must be positive");
  }
  if (!(reinforce_step > 0.0)) throw ConfigError("REINFORCE step must be positive");
}

PickResult pick_sample(const Dataset&, const PolicyParams& best, double p_star, Rng& rng) {
  if (bernoulli(rng, p_star)) return {best, true};
  return {random_policy(best.spec(), rng), false};
}

OptimizeResult ascend(const Dataset& d, const PolicyParams& start, const OptimizerConfig& cfg) {
  const auto& spec = start.spec();
  const auto rows = row_layout(spec);
  std::vector<double> x(start.params().begin(), start.params().end());
  Estimate est = evaluate_wis(d, x);
  double step = cfg.initial_step;
  std::vector<double> trial(x.size());

  for (int it = 0; it < cfg.max_iterations; ++it) {
    for (std::size_t k = 0; k < x.size(); ++k) trial[k] = x[k] + est.gradient[k];
    project_in_place(spec, rows, trial);
    if (distance(trial, x) < cfg.gradient_tolerance) break;

    bool accepted = false;
    Estimate next;
    for (int h = 0; h <= cfg.max_halvings; ++h) {
      for (std::size_t k = 0; k < x.size(); ++k) trial[k] = x[k] + step * est.gradient[k];
      project_in_place(spec, rows, trial);
      next = evaluate_wis(d, trial);
      if (next.value >= est.value) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const double gain = next.value - est.value;
    x.swap(trial);
    est = std::move(next);
    if (gain < cfg.improvement_tolerance) break;
    step = std::min(step * 2.0, cfg.max_step);
  }
  return {PolicyParams(spec, std::move(x)), est.value};
}

OptimizeResult optimize(const Dataset& d, const PolicyParams& init, const OptimizerConfig& cfg,
                        Rng& rng) {
  if (d.empty()) throw EmptyDatasetError();
  std::vector<PolicyParams> starts{init};
  for (int r = 0; r < cfg.restarts; ++r) starts.push_back(random_policy(init.spec(), rng));
  {
    const auto returns = d.returns();
    std::size_t arg = 0;
    for (std::size_t i = 1; i < returns.size(); ++i) {
      if (returns[i] > returns[arg]) arg = i;
    }
    starts.push_back(d.records()[arg].policy);
  }

  std::optional<OptimizeResult> best;
  for (const auto& s : starts) {
    auto r = ascend(d, s, cfg);
    if (!best || r.value > best->value) best = std::move(r);
  }
  assert(best->value >= evaluate_wis(d, init).value);
  return std::move(*best);
}

LearnResult learn(Environment& env, const PolicyClassSpec& spec, const LearnConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  Dataset data(spec);
  PolicyParams best = random_policy(spec, rng);
  LearnTrace trace;
  trace.reserve(static_cast<std::size_t>(cfg.trials));

  for (int i = 1; i <= cfg.trials; ++i) {
    auto [theta, exploited] = pick_sample(data, best, cfg.p_star, rng);
    const Trial t = sample(env, theta, rng);
    data.add(SampleRecord::make(theta, t));
    auto opt = optimize(data, best, cfg.optimizer, rng);
    best = std::move(opt.policy);
    trace.push_back({i, exploited, std::move(theta), t.ret, best, opt.value});
  }
  return {std::move(best), std::move(trace), std::move(data)};
}

LearnResult reinforce(Environment& env, const PolicyClassSpec& spec, const LearnConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  Dataset data(spec);
  PolicyParams best = random_policy(spec, rng);
  const auto rows = row_layout(spec);
  LearnTrace trace;
  trace.reserve(static_cast<std::size_t>(cfg.trials));

  for (int i = 1; i <= cfg.trials; ++i) {
    const Trial t = sample(env, best, rng);
    data.clear();
    data.add(SampleRecord::make(best, t));

    const double step = cfg.reinforce_decay > 0.0
                            ? cfg.reinforce_step / (1.0 + (i - 1) / cfg.reinforce_decay)
                            : cfg.reinforce_step;
    PolicyParams sampled = best;
    // A zero return leaves θ* exactly where it is (no re-projection drift).
    if (t.ret != 0.0) {
      const auto g = grad_log_phi(best, t.history);
      std::vector<double> x(best.params().begin(), best.params().end());
      for (std::size_t k = 0; k < x.size(); ++k) x[k] += step * t.ret * g[k];
      project_in_place(spec, rows, x);
      best = PolicyParams(spec, std::move(x));
    }
    const double proxy = evaluate_is(data, best).value;
    trace.push_back({i, true, std::move(sampled), t.ret, best, proxy});
  }
  return {std::move(best), std::move(trace), std::move(data)};
}

void write_trace_csv(std::ostream& out, const LearnTrace& trace,
                     const std::optional<EnvModel>& model) {
  const auto old_precision = out.precision(17);
  out << "iteration,exploited,return,proxy_value,exact_value\n";
  for (const auto& e : trace) {
    out << e.iteration << ',' << (e.exploited ? 1 : 0) << ',' << e.ret << ',' << e.proxy_value
        << ',';
    if (model) out << exact_value(*model, e.best);
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace lrps
