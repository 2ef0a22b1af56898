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

#include "lrps/env.hpp"

#include <cmath>
#include <fstream>
#include <span>

#include <nlohmann/json.hpp>

#include "lrps/errors.hpp"

namespace lrps {

namespace {

constexpr double kNormTolerance = 1e-12;

void check_rows(const std::vector<double>& table, std::size_t rows, std::size_t width,
                const char* what) {
  if (table.size() != rows * width) {
    throw ConfigError(std::string(what) + " table has " + std::to_string(table.size()) +
                      " entries, expected " + std::to_string(rows * width));
  }
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (std::size_t k = 0; k < width; ++k) {
      const double p = table[r * width + k];
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw ConfigError(std::string(what) + " table has an invalid probability in row " +
                          std::to_string(r));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kNormTolerance) {
      throw ConfigError(std::string(what) + " row " + std::to_string(r) + " sums to " +
                        std::to_string(sum));
    }
  }
}

class TabularEnv final : public Environment {
 public:
  explicit TabularEnv(EnvModel model) : model_(std::move(model)) { model_.validate(); }

  std::string name() const override { return model_.name; }
  int num_observations() const override { return model_.observations; }
  int num_actions() const override { return model_.actions; }
  int horizon() const override { return model_.horizon; }

  Observation reset(Rng& rng) override {
    state_ = categorical(rng, model_.start);
    return emit(rng);
  }

  StepOutcome step(Action a, Rng& rng) override {
    const auto row = std::span(model_.transition)
                         .subspan((static_cast<std::size_t>(state_) * model_.actions + a.id) *
                                      model_.states,
                                  model_.states);
    const int next = categorical(rng, row);
    const double r = model_.rew(state_, a.id, next);
    state_ = next;
    return {emit(rng), r, false};
  }

  std::optional<EnvModel> model() const override { return model_; }
  std::unique_ptr<Environment> clone() const override {
    return std::make_unique<TabularEnv>(model_);
  }

 private:
  Observation emit(Rng& rng) const {
    return Observation{categorical(
        rng, std::span(model_.observation)
                 .subspan(static_cast<std::size_t>(state_) * model_.observations,
                          model_.observations))};
  }

  EnvModel model_;
  int state_ = 0;
};

class BanditEnv final : public Environment {
 public:
  explicit BanditEnv(std::vector<BanditArm> arms) : arms_(std::move(arms)) {
    if (arms_.empty()) throw ConfigError("bandit needs at least one arm");
    for (std::size_t a = 0; a < arms_.size(); ++a) {
      if (arms_[a].empty()) throw ConfigError("bandit arm " + std::to_string(a) + " is empty");
      double sum = 0.0;
      for (const auto& o : arms_[a]) {
        if (!(o.prob >= 0.0) || !std::isfinite(o.value)) {
          throw ConfigError("bandit arm " + std::to_string(a) + " has an invalid outcome");
        }
        sum += o.prob;
      }
      if (std::abs(sum - 1.0) > kNormTolerance) {
        throw ConfigError("bandit arm " + std::to_string(a) + " probabilities sum to " +
                          std::to_string(sum));
      }
      std::vector<double> probs;
      for (const auto& o : arms_[a]) probs.push_back(o.prob);
      probs_.push_back(std::move(probs));
    }
  }

  std::string name() const override { return "bandit"; }
  int num_observations() const override { return 1; }
  int num_actions() const override { return static_cast<int>(arms_.size()); }
  int horizon() const override { return 1; }

  Observation reset(Rng&) override { return Observation{0}; }

  StepOutcome step(Action a, Rng& rng) override {
    const int k = categorical(rng, probs_.at(a.id));
    return {Observation{0}, arms_[a.id][k].value, true};
  }

  std::optional<EnvModel> model() const override {
    // State 0 is the lever; state 1 + (a, k) is "arm a paid outcome k".
    EnvModel m;
    m.name = "bandit";
    m.actions = num_actions();
    m.observations = 1;
    m.horizon = 1;
    std::vector<int> base;
    int s = 1;
    for (const auto& arm : arms_) {
      base.push_back(s);
      s += static_cast<int>(arm.size());
    }
    m.states = s;
    m.start.assign(m.states, 0.0);
    m.start[0] = 1.0;
    m.observation.assign(m.states, 1.0);
    m.transition.assign(static_cast<std::size_t>(m.states) * m.actions * m.states, 0.0);
    m.reward.assign(m.transition.size(), 0.0);
    auto idx = [&](int from, int a, int to) {
      return (static_cast<std::size_t>(from) * m.actions + a) * m.states + to;
    };
    for (int a = 0; a < m.actions; ++a) {
      for (std::size_t k = 0; k < arms_[a].size(); ++k) {
        const int to = base[a] + static_cast<int>(k);
        m.transition[idx(0, a, to)] = arms_[a][k].prob;
        m.reward[idx(0, a, to)] = arms_[a][k].value;
      }
      for (int from = 1; from < m.states; ++from) m.transition[idx(from, a, from)] = 1.0;
    }
    return m;
  }

  std::unique_ptr<Environment> clone() const override {
    return std::make_unique<BanditEnv>(arms_);
  }

 private:
  std::vector<BanditArm> arms_;
  std::vector<std::vector<double>> probs_;
};

class LoadUnloadEnv final : public Environment {
 public:
  LoadUnloadEnv(int n_positions, int horizon) : n_(n_positions), horizon_(horizon) {
    if (n_ < 2) throw ConfigError("load-unload needs at least 2 positions");
    if (horizon_ < 1) throw ConfigError("horizon must be at least 1");
  }

  std::string name() const override { return "load-unload"; }
  int num_observations() const override { return n_; }
  int num_actions() const override { return 2; }
  int horizon() const override { return horizon_; }

  Observation reset(Rng&) override {
    pos_ = 0;
    loaded_ = true;
    return Observation{pos_};
  }

  StepOutcome step(Action a, Rng&) override {
    if (a.id != 0 && a.id != 1) throw ContractError("load-unload action out of range");
    const int next = a.id == 0 ? std::max(pos_ - 1, 0) : std::min(pos_ + 1, n_ - 1);
    double r = 0.0;
    if (next == n_ - 1 && next != pos_ && loaded_) {
      r = 1.0;
      loaded_ = false;
    }
    if (next == 0) loaded_ = true;
    pos_ = next;
    return {Observation{pos_}, r, false};
  }

  std::optional<EnvModel> model() const override { return load_unload_model(n_, horizon_); }
  std::unique_ptr<Environment> clone() const override {
    return std::make_unique<LoadUnloadEnv>(n_, horizon_);
  }

 private:
  int n_;
  int horizon_;
  int pos_ = 0;
  bool loaded_ = true;
};

}  // namespace

void EnvModel::validate() const {
  if (states < 1 || observations < 1 || actions < 1) {
    throw ConfigError("model dimensions must be positive");
  }
  if (horizon < 1) throw ConfigError("model horizon must be at least 1");
  const auto S = static_cast<std::size_t>(states);
  const auto A = static_cast<std::size_t>(actions);
  check_rows(start, 1, S, "start");
  check_rows(transition, S * A, S, "transition");
  check_rows(observation, S, static_cast<std::size_t>(observations), "observation");
  if (reward.size() != S * A * S) throw ConfigError("reward table has wrong size");
  for (double r : reward) {
    if (!std::isfinite(r)) throw ConfigError("reward table has a non-finite entry");
  }
}

EnvModel model_from_json(const nlohmann::json& j) {
  EnvModel m;
  try {
    m.name = j.value("name", std::string("tabular"));
    m.states = j.at("states").get<int>();
    m.observations = j.at("observations").get<int>();
    m.actions = j.at("actions").get<int>();
    m.horizon = j.at("horizon").get<int>();
    m.start = j.at("start").get<std::vector<double>>();
    m.transition = j.at("transition").get<std::vector<double>>();
    m.observation = j.at("observation").get<std::vector<double>>();
    auto reward = j.at("reward").get<std::vector<double>>();
    const auto sa = static_cast<std::size_t>(m.states) * m.actions;
    if (m.states > 1 && m.actions >= 1 && reward.size() == sa) {
      m.reward.resize(sa * m.states);
      for (std::size_t k = 0; k < sa; ++k) {
        std::fill_n(m.reward.begin() + static_cast<std::ptrdiff_t>(k * m.states), m.states,
                    reward[k]);
      }
    } else {
      m.reward = std::move(reward);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed environment model: ") + e.what());
  }
  m.validate();
  return m;
}

nlohmann::json to_json(const EnvModel& m) {
  return {{"name", m.name},           {"states", m.states},
          {"observations", m.observations}, {"actions", m.actions},
          {"horizon", m.horizon},     {"start", m.start},
          {"transition", m.transition}, {"observation", m.observation},
          {"reward", m.reward}};
}

EnvModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return model_from_json(j);
}

Trial sample(Environment& env, const PolicyParams& policy, Rng& rng,
             const ReturnAggregator& aggregate) {
  const auto& spec = policy.spec();
  if (spec.observations != env.num_observations() || spec.actions != env.num_actions()) {
    throw ConfigError("policy " + spec.describe() + " does not match environment '" +
                      env.name() + "' (|O|=" + std::to_string(env.num_observations()) +
                      ", |A|=" + std::to_string(env.num_actions()) + ")");
  }
  Trial trial;
  auto& steps = trial.history.steps;
  steps.reserve(static_cast<std::size_t>(env.horizon()));
  Observation obs = env.reset(rng);
  int mem = 0;
  for (int t = 0; t < env.horizon(); ++t) {
    const auto [a, next_mem] = act(policy, obs, mem, rng);
    const StepOutcome out = env.step(a, rng);
    steps.push_back(Step{obs, a, out.reward,
                         spec.is_controller() ? std::optional<int>(mem) : std::nullopt});
    obs = out.obs;
    mem = next_mem;
    if (out.done) break;
  }
  trial.history.counts = tally(steps, spec);
  trial.ret = aggregate(steps);
  return trial;
}

std::vector<BanditArm> hidden_treasure_arms() {
  return {{{-10.0, 0.99}, {1090.0, 0.01}}, {{0.0, 1.0}}};
}

std::vector<BanditArm> hidden_failure_arms() {
  return {{{1.0, 1.0}}, {{10.0, 0.99}, {-990.0, 0.01}}};
}

double arm_mean(const BanditArm& arm) {
  double m = 0.0;
  for (const auto& o : arm) m += o.value * o.prob;
  return m;
}

std::unique_ptr<Environment> make_bandit(std::vector<BanditArm> arms) {
  return std::make_unique<BanditEnv>(std::move(arms));
}

std::unique_ptr<Environment> make_load_unload(int n_positions, int horizon) {
  return std::make_unique<LoadUnloadEnv>(n_positions, horizon);
}

EnvModel load_unload_model(int n_positions, int horizon) {
  if (n_positions < 2) throw ConfigError("load-unload needs at least 2 positions");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  // State index: 2 * position + loaded.
  EnvModel m;
  m.name = "load-unload";
  m.states = 2 * n_positions;
  m.observations = n_positions;
  m.actions = 2;
  m.horizon = horizon;
  m.start.assign(m.states, 0.0);
  m.start[1] = 1.0;
  m.observation.assign(static_cast<std::size_t>(m.states) * m.observations, 0.0);
  m.transition.assign(static_cast<std::size_t>(m.states) * m.actions * m.states, 0.0);
  m.reward.assign(m.transition.size(), 0.0);
  for (int pos = 0; pos < n_positions; ++pos) {
    for (int loaded = 0; loaded < 2; ++loaded) {
      const int s = 2 * pos + loaded;
      m.observation[static_cast<std::size_t>(s) * m.observations + pos] = 1.0;
      for (int a = 0; a < 2; ++a) {
        const int next = a == 0 ? std::max(pos - 1, 0) : std::min(pos + 1, n_positions - 1);
        bool next_loaded = loaded == 1;
        double r = 0.0;
        if (next == n_positions - 1 && next != pos && next_loaded) {
          r = 1.0;
          next_loaded = false;
        }
        if (next == 0) next_loaded = true;
        const int to = 2 * next + (next_loaded ? 1 : 0);
        const auto k = (static_cast<std::size_t>(s) * m.actions + a) * m.states + to;
        m.transition[k] = 1.0;
        m.reward[k] = r;
      }
    }
  }
  return m;
}

std::unique_ptr<Environment> make_tabular(EnvModel model) {
  return std::make_unique<TabularEnv>(std::move(model));
}

double exact_value(const EnvModel& model, const PolicyParams& policy, std::size_t max_joint) {
  const auto& spec = policy.spec();
  if (spec.observations != model.observations || spec.actions != model.actions) {
    throw ConfigError("policy " + spec.describe() + " does not match model '" + model.name + "'");
  }
  const int S = model.states;
  const int M = spec.memory;
  if (static_cast<std::size_t>(S) * static_cast<std::size_t>(M) > max_joint) {
    throw CapacityError("state x memory product " + std::to_string(S) + "x" +
                        std::to_string(M) + " too large to enumerate");
  }
  // Expected reward of taking a in s.
  std::vector<double> r_sa(static_cast<std::size_t>(S) * model.actions, 0.0);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < model.actions; ++a) {
      double e = 0.0;
      for (int n = 0; n < S; ++n) {
        const double p = model.trans(s, a, n);
        if (p != 0.0) e += p * model.rew(s, a, n);
      }
      r_sa[static_cast<std::size_t>(s) * model.actions + a] = e;
    }
  }

  auto at = [M](int s, int m) { return static_cast<std::size_t>(s) * M + m; };
  std::vector<double> dist(static_cast<std::size_t>(S) * M, 0.0);
  std::vector<double> next(dist.size());
  for (int s = 0; s < S; ++s) dist[at(s, 0)] = model.start[s];

  double value = 0.0;
  for (int t = 0; t < model.horizon; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < S; ++s) {
      for (int m = 0; m < M; ++m) {
        const double p_sm = dist[at(s, m)];
        if (p_sm == 0.0) continue;
        for (int o = 0; o < model.observations; ++o) {
          const double p_o = p_sm * model.obs(s, o);
          if (p_o == 0.0) continue;
          for (int a = 0; a < model.actions; ++a) {
            const double p_a = p_o * policy.action_prob(m, o, a);
            if (p_a == 0.0) continue;
            value += p_a * r_sa[static_cast<std::size_t>(s) * model.actions + a];
            for (int n = 0; n < S; ++n) {
              const double p_n = p_a * model.trans(s, a, n);
              if (p_n == 0.0) continue;
              for (int mn = 0; mn < M; ++mn) {
                next[at(n, mn)] += p_n * policy.memory_prob(m, o, mn);
              }
            }
          }
        }
      }
    }
    dist.swap(next);
  }
  return value;
}

PolicyParams load_unload_optimal_controller(int n_positions) {
  const auto spec = PolicyClassSpec::controller(n_positions, 2, 2, 0.0, 1.0);
  // Memory 0 heads right, memory 1 heads left; turn around at either end.
  std::vector<std::vector<std::vector<double>>> actions(2), memory(2);
  for (int m = 0; m < 2; ++m) {
    for (int o = 0; o < n_positions; ++o) {
      bool go_right = m == 0 ? o < n_positions - 1 : o == 0;
      int next = go_right ? 0 : 1;
      actions[m].push_back(go_right ? std::vector<double>{0.0, 1.0} : std::vector<double>{1.0, 0.0});
      memory[m].push_back(next == 0 ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0});
    }
  }
  return make_controller(spec, actions, memory);
}

}  // namespace lrps
