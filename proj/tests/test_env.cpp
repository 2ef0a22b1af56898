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

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "lrps/env.hpp"
#include "lrps/errors.hpp"
#include "oracles.hpp"

using namespace lrps;

TEST_CASE("HF bandit returns only its listed outcomes") {
  auto env = make_bandit(hidden_failure_arms());
  const auto spec = PolicyClassSpec::reactive(1, 2);
  const auto p = make_reactive(spec, {{0.9, 0.1}});
  Rng rng(1);
  std::set<double> seen;
  for (int i = 0; i < 20000; ++i) {
    const auto t = sample(*env, p, rng);
    CHECK(t.history.length() == 1);
    seen.insert(t.ret);
  }
  CHECK(seen == std::set<double>{1.0, 10.0, -990.0});
}

TEST_CASE("bandit presets have the stated arm means") {
  const auto ht = hidden_treasure_arms();
  const auto hf = hidden_failure_arms();
  CHECK(arm_mean(ht[0]) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(arm_mean(ht[1]) == 0.0);
  CHECK(arm_mean(hf[0]) == 1.0);
  CHECK(std::abs(arm_mean(hf[1])) < 1e-12);
}

TEST_CASE("degenerate arm always pays its single outcome") {
  auto env = make_bandit({{{5.0, 1.0}}});
  const auto spec = PolicyClassSpec::reactive(1, 1, 0.0, 1.0);
  const PolicyParams p(spec, {1.0});
  Rng rng(2);
  for (int i = 0; i < 100; ++i) CHECK(sample(*env, p, rng).ret == 5.0);
}

TEST_CASE("non-normalized arm is a configuration error") {
  CHECK_THROWS_AS(make_bandit({{{1.0, 0.5}, {2.0, 0.4}}}), ConfigError);
  CHECK_THROWS_AS(make_bandit({}), ConfigError);
}

TEST_CASE("bandit exact value is p for both presets") {
  const auto spec = PolicyClassSpec::reactive(1, 2);
  for (double p : {0.1, 0.3, 0.5, 0.77, 0.9}) {
    const auto policy = make_reactive(spec, {{p, 1 - p}});
    for (const auto& arms : {hidden_treasure_arms(), hidden_failure_arms()}) {
      const auto model = make_bandit(arms)->model();
      REQUIRE(model);
      CHECK(exact_value(*model, policy) == doctest::Approx(p).epsilon(1e-12));
    }
  }
}

TEST_CASE("load-unload: always-right policy earns exactly one unit") {
  const auto p = oracle::reactive_load_unload({1, 1, 1, 1, 1});
  auto env = make_load_unload();
  Rng rng(3);
  const auto t = sample(*env, p, rng);
  CHECK(t.ret == 1.0);
  CHECK(t.history.length() == 100);
  CHECK(exact_value(load_unload_model(), p) == 1.0);
}

TEST_CASE("load-unload: the shuttle controller earns 13") {
  const auto p = load_unload_optimal_controller(5);
  CHECK(exact_value(load_unload_model(5, 100), p) == 13.0);
  auto env = make_load_unload(5, 100);
  Rng rng(4);
  CHECK(sample(*env, p, rng).ret == 13.0);
}

TEST_CASE("load-unload: wall moves are no-ops") {
  auto env = make_load_unload();
  Rng rng(5);
  CHECK(env->reset(rng).id == 0);
  const auto out = env->step(Action{0}, rng);
  CHECK(out.obs.id == 0);
  CHECK(out.reward == 0.0);
}

TEST_CASE("load-unload: rewards only on loaded arrival, spaced by a round trip") {
  Rng rng(6);
  const auto spec = PolicyClassSpec::reactive(5, 2);
  auto env = make_load_unload();
  for (int rep = 0; rep < 200; ++rep) {
    const auto p = random_policy(spec, rng);
    const auto t = sample(*env, p, rng);
    int last = -100;
    bool loaded = true;
    int pos = 0;
    for (int i = 0; i < static_cast<int>(t.history.steps.size()); ++i) {
      const auto& s = t.history.steps[i];
      CHECK(s.obs.id == pos);
      const int next = s.action.id == 0 ? std::max(pos - 1, 0) : std::min(pos + 1, 4);
      const bool pays = next == 4 && pos != 4 && loaded;
      CHECK(s.reward == (pays ? 1.0 : 0.0));
      if (pays) {
        CHECK(i - last >= 2 * (5 - 1));
        last = i;
        loaded = false;
      }
      if (next == 0) loaded = true;
      pos = next;
    }
    CHECK(t.ret == sum_rewards(t.history.steps));
    CHECK(t.history.counts == tally(t.history.steps, spec));
  }
}

TEST_CASE("load-unload: exact value of the uniform policy matches Monte Carlo") {
  const auto p = oracle::reactive_load_unload({0.5, 0.5, 0.5, 0.5, 0.5});
  const double v = exact_value(load_unload_model(), p);
  auto env = make_load_unload();
  Rng rng(7);
  const int n = 1000000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = sample(*env, p, rng).ret;
    sum += r;
    sq += r * r;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::abs(mean - v) < 3 * se);
}

TEST_CASE("sample means converge to exact values") {
  Rng rng(8);
  for (int rep = 0; rep < 5; ++rep) {
    const auto model = oracle::random_model(3, 2, 2, 6, rng);
    const auto spec = PolicyClassSpec::controller(2, 2, 2);
    const auto p = random_policy(spec, rng);
    auto env = make_tabular(model);
    const int n = 40000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = sample(*env, p, rng).ret;
      sum += r;
      sq += r * r;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    CHECK(std::abs(mean - exact_value(model, p)) < 4 * sd / std::sqrt(n));
  }
}

TEST_CASE("tabular: deterministic unit reward over three steps") {
  EnvModel m;
  m.states = 1;
  m.observations = 1;
  m.actions = 1;
  m.horizon = 3;
  m.start = {1.0};
  m.transition = {1.0};
  m.observation = {1.0};
  m.reward = {1.0};
  auto env = make_tabular(m);
  const PolicyParams p(PolicyClassSpec::reactive(1, 1, 0.0, 1.0), {1.0});
  Rng rng(9);
  for (int i = 0; i < 10; ++i) CHECK(sample(*env, p, rng).ret == 3.0);
  CHECK(exact_value(m, p) == 3.0);
}

TEST_CASE("tabular: zero rewards give zero value") {
  Rng rng(10);
  auto m = oracle::random_model(4, 2, 2, 10, rng);
  std::fill(m.reward.begin(), m.reward.end(), 0.0);
  CHECK(exact_value(m, random_policy(PolicyClassSpec::controller(2, 2, 3), rng)) == 0.0);
}

TEST_CASE("tabular: invalid tables are rejected") {
  Rng rng(11);
  auto m = oracle::random_model(2, 2, 2, 3, rng);
  m.transition[0] += 0.1;
  CHECK_THROWS_AS(make_tabular(m), ConfigError);
  auto j = to_json(oracle::random_model(2, 2, 2, 3, rng));
  j["start"] = {0.5, 0.6};
  CHECK_THROWS_AS(model_from_json(j), ConfigError);
  j.erase("start");
  CHECK_THROWS_AS(model_from_json(j), ConfigError);
}

TEST_CASE("tabular: model json round trip and reward broadcast") {
  Rng rng(12);
  const auto m = oracle::random_model(3, 2, 2, 4, rng);
  const auto back = model_from_json(nlohmann::json::parse(to_json(m).dump()));
  CHECK(back.transition == m.transition);
  CHECK(back.reward == m.reward);

  auto j = to_json(m);
  j["reward"] = {1, 2, 3, 4, 5, 6};
  const auto b = model_from_json(j);
  CHECK(b.rew(1, 0, 2) == 3.0);
  CHECK(b.rew(2, 1, 0) == 6.0);
}

TEST_CASE("tabular load-unload is distributed like the native environment") {
  const auto p = oracle::reactive_load_unload({0.6, 0.55, 0.5, 0.45, 0.4});
  auto native = make_load_unload(5, 30);
  auto table = make_tabular(load_unload_model(5, 30));
  Rng rng_a(13);
  Rng rng_b(14);
  const int n = 20000;
  // Category: (return, final position).
  std::map<std::pair<int, int>, std::pair<int, int>> freq;
  for (int i = 0; i < n; ++i) {
    const auto a = sample(*native, p, rng_a);
    const auto b = sample(*table, p, rng_b);
    ++freq[{static_cast<int>(a.ret), a.history.steps.back().obs.id}].first;
    ++freq[{static_cast<int>(b.ret), b.history.steps.back().obs.id}].second;
  }
  // Two-sample chi-square over categories with enough mass.
  double chi2 = 0.0;
  int dof = -1;
  for (const auto& [key, f] : freq) {
    if (f.first + f.second < 20) continue;
    const double diff = f.first - f.second;
    chi2 += diff * diff / (f.first + f.second);
    ++dof;
  }
  REQUIRE(dof > 0);
  // 99.9% quantile via the Wilson-Hilferty approximation.
  const double z = 3.09;
  const double k = dof;
  const double critical = k * std::pow(1 - 2 / (9 * k) + z * std::sqrt(2 / (9 * k)), 3);
  CHECK(chi2 < critical);
}

TEST_CASE("exact_value rejects oversized joint spaces and mismatched policies") {
  Rng rng(15);
  const auto m = oracle::random_model(4, 2, 2, 3, rng);
  const auto p = random_policy(PolicyClassSpec::controller(2, 2, 3), rng);
  CHECK_THROWS_AS(exact_value(m, p, 8), CapacityError);
  CHECK_THROWS_AS(exact_value(m, random_policy(PolicyClassSpec::reactive(3, 2), rng)),
                  ConfigError);
  auto env = make_tabular(m);
  CHECK_THROWS_AS(sample(*env, random_policy(PolicyClassSpec::reactive(3, 2), rng), rng),
                  ConfigError);
}

TEST_CASE("custom return aggregator is honored") {
  auto env = make_load_unload();
  Rng rng(16);
  const auto p = load_unload_optimal_controller();
  const auto t = sample(*env, p, rng, [](std::span<const Step> s) {
    return static_cast<double>(s.size());
  });
  CHECK(t.ret == 100.0);
}
