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

#include "lrps/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "lrps/errors.hpp"

namespace lrps {

namespace {

struct Group {
  PolicyClassChoice cls;
  Algorithm algorithm;
  double p_star;
};

std::vector<Group> enumerate_groups(const ExperimentConfig& cfg) {
  std::vector<Group> groups;
  for (const auto& c : cfg.classes) {
    for (const auto a : cfg.algorithms) {
      for (const double p : cfg.p_stars) groups.push_back({c, a, p});
    }
  }
  return groups;
}

PolicyClassSpec class_spec(const PolicyClassChoice& c, const Environment& env,
                           const ExperimentConfig& cfg) {
  if (c.kind == PolicyKind::kReactive) {
    return PolicyClassSpec::reactive(env.num_observations(), env.num_actions(), cfg.c_lo,
                                     cfg.c_hi);
  }
  return PolicyClassSpec::controller(env.num_observations(), env.num_actions(), c.memory,
                                     cfg.c_lo, cfg.c_hi);
}

struct Scorer {
  std::optional<EnvModel> model;
  int rollouts;

  double operator()(const PolicyParams& policy, Environment& env, std::uint64_t seed) const {
    if (model) return exact_value(*model, policy);
    Rng rng(seed);
    double total = 0.0;
    for (int k = 0; k < rollouts; ++k) total += sample(env, policy, rng).ret;
    return total / rollouts;
  }
};

// Runs `work(i)` for i in [0, count) on `threads` workers; rethrows the first
// failure after all workers stop.
template <class F>
void parallel_for(std::size_t count, int threads, F&& work) {
  const auto n_workers = static_cast<std::size_t>(std::max(1, threads));
  if (n_workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(n_workers, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          work(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::string to_string(Algorithm a) { return a == Algorithm::kLearn ? "learn" : "reinforce"; }

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "learn") return Algorithm::kLearn;
  if (s == "reinforce") return Algorithm::kReinforce;
  throw ConfigError("unknown algorithm '" + s + "' (expected learn or reinforce)");
}

std::string PolicyClassChoice::label() const {
  return kind == PolicyKind::kReactive ? "reactive" : "fsc" + std::to_string(memory);
}

PolicyClassChoice PolicyClassChoice::parse(const std::string& s) {
  if (s == "reactive" || s == "0") return {PolicyKind::kReactive, 1};
  std::string digits = s.rfind("fsc", 0) == 0 ? s.substr(3) : s;
  try {
    std::size_t used = 0;
    const int m = std::stoi(digits, &used);
    if (used == digits.size() && m >= 1) return {PolicyKind::kController, m};
  } catch (const std::exception&) {
  }
  throw ConfigError("unknown policy class '" + s + "' (expected reactive or a memory size)");
}

void ExperimentConfig::validate() const {
  static const std::set<std::string> known{"bandit-ht", "bandit-hf", "load-unload", "custom"};
  if (!known.contains(experiment)) throw ConfigError("unknown experiment '" + experiment + "'");
  if (experiment == "custom" && !model) throw ConfigError("custom experiment needs a model");
  if (runs < 1) throw ConfigError("runs must be at least 1");
  if (n_grid.empty() || p_stars.empty() || classes.empty() || algorithms.empty()) {
    throw ConfigError("experiment grids must be non-empty");
  }
  for (int n : n_grid) {
    if (n < 1) throw ConfigError("every N must be at least 1");
  }
  for (double p : p_stars) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p_star values must lie in [0, 1]");
  }
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (mc_rollouts < 1) throw ConfigError("mc_rollouts must be at least 1");
}

ExperimentConfig experiment_from_json(const nlohmann::json& j) {
  static const std::set<std::string> keys{
      "experiment", "n",      "p_star",        "runs",        "classes",     "algorithms",
      "seed",       "threads", "share_prefix", "c_lo",        "c_hi",        "optimizer",
      "reinforce_step", "reinforce_decay", "positions", "horizon", "model", "model_path",
      "mc_rollouts"};
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!keys.contains(k)) throw ConfigError("unknown config key '" + k + "'");
  }
  ExperimentConfig c;
  try {
    c.experiment = j.value("experiment", c.experiment);
    if (j.contains("n")) c.n_grid = j.at("n").get<std::vector<int>>();
    if (j.contains("p_star")) c.p_stars = j.at("p_star").get<std::vector<double>>();
    c.runs = j.value("runs", c.runs);
    if (j.contains("classes")) {
      c.classes.clear();
      for (const auto& v : j.at("classes")) {
        c.classes.push_back(PolicyClassChoice::parse(v.is_string() ? v.get<std::string>()
                                                                   : std::to_string(v.get<int>())));
      }
    }
    if (j.contains("algorithms")) {
      c.algorithms.clear();
      for (const auto& v : j.at("algorithms")) c.algorithms.push_back(algorithm_from_string(v));
    }
    c.base_seed = j.value("seed", c.base_seed);
    c.threads = j.value("threads", c.threads);
    c.share_prefix = j.value("share_prefix", c.share_prefix);
    c.c_lo = j.value("c_lo", c.c_lo);
    c.c_hi = j.value("c_hi", c.c_hi);
    if (j.contains("optimizer")) {
      const auto& o = j.at("optimizer");
      c.optimizer.max_iterations = o.value("max_iterations", c.optimizer.max_iterations);
      c.optimizer.initial_step = o.value("initial_step", c.optimizer.initial_step);
      c.optimizer.max_step = o.value("max_step", c.optimizer.max_step);
      c.optimizer.max_halvings = o.value("max_halvings", c.optimizer.max_halvings);
      c.optimizer.gradient_tolerance = o.value("gradient_tolerance", c.optimizer.gradient_tolerance);
      c.optimizer.improvement_tolerance =
          o.value("improvement_tolerance", c.optimizer.improvement_tolerance);
      c.optimizer.restarts = o.value("restarts", c.optimizer.restarts);
    }
    c.reinforce_step = j.value("reinforce_step", c.reinforce_step);
    c.reinforce_decay = j.value("reinforce_decay", c.reinforce_decay);
    c.positions = j.value("positions", c.positions);
    c.horizon = j.value("horizon", c.horizon);
    c.mc_rollouts = j.value("mc_rollouts", c.mc_rollouts);
    if (j.contains("model")) c.model = model_from_json(j.at("model"));
    if (j.contains("model_path")) c.model = load_model(j.at("model_path").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return experiment_from_json(j);
}

EnvironmentFactory environment_factory(const ExperimentConfig& cfg) {
  if (cfg.experiment == "bandit-ht") return [] { return make_bandit(hidden_treasure_arms()); };
  if (cfg.experiment == "bandit-hf") return [] { return make_bandit(hidden_failure_arms()); };
  if (cfg.experiment == "load-unload") {
    return [n = cfg.positions, t = cfg.horizon] { return make_load_unload(n, t); };
  }
  if (cfg.experiment == "custom" && cfg.model) {
    return [m = *cfg.model] { return make_tabular(m); };
  }
  throw ConfigError("cannot build environment for experiment '" + cfg.experiment + "'");
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_experiment(cfg, environment_factory(cfg));
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg,
                                      const EnvironmentFactory& factory) {
  cfg.validate();
  const auto groups = enumerate_groups(cfg);
  const std::size_t n_count = cfg.n_grid.size();
  const auto runs = static_cast<std::size_t>(cfg.runs);

  const auto probe = factory();
  const Scorer scorer{probe->model(), cfg.mc_rollouts};
  // Fail early on class/environment mismatches.
  for (const auto& g : groups) (void)class_spec(g.cls, *probe, cfg);

  // values[(group * n_count + n_index) * runs + run]
  std::vector<double> values(groups.size() * n_count * runs, 0.0);

  auto run_one = [&](std::size_t g, std::size_t run, const std::vector<std::size_t>& n_indices) {
    const auto env = factory();
    const auto spec = class_spec(groups[g].cls, *env, cfg);
    int max_n = 0;
    for (auto k : n_indices) max_n = std::max(max_n, cfg.n_grid[k]);
    LearnConfig lc;
    lc.trials = max_n;
    lc.p_star = groups[g].p_star;
    lc.optimizer = cfg.optimizer;
    lc.seed = derive_seed(cfg.base_seed, {g, run});
    lc.reinforce_step = cfg.reinforce_step;
    lc.reinforce_decay = cfg.reinforce_decay;
    const auto result = groups[g].algorithm == Algorithm::kLearn ? learn(*env, spec, lc)
                                                                 : reinforce(*env, spec, lc);
    for (auto k : n_indices) {
      const int n = cfg.n_grid[k];
      const auto& policy = result.trace[static_cast<std::size_t>(n) - 1].best;
      const auto score_seed = derive_seed(cfg.base_seed, {g, run, static_cast<std::uint64_t>(n), 0x5c0e});
      values[(g * n_count + k) * runs + run] = scorer(policy, *env, score_seed);
    }
  };

  if (cfg.share_prefix) {
    std::vector<std::size_t> all(n_count);
    for (std::size_t k = 0; k < n_count; ++k) all[k] = k;
    parallel_for(groups.size() * runs, cfg.threads,
                 [&](std::size_t u) { run_one(u / runs, u % runs, all); });
  } else {
    parallel_for(groups.size() * n_count * runs, cfg.threads, [&](std::size_t u) {
      const std::size_t cell = u / runs;
      run_one(cell / n_count, u % runs, {cell % n_count});
    });
  }

  const std::string scoring =
      scorer.model ? "exact" : "monte-carlo:" + std::to_string(cfg.mc_rollouts);
  std::vector<ResultRow> rows;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t k = 0; k < n_count; ++k) {
      const double* v = &values[(g * n_count + k) * runs];
      double mean = 0.0;
      for (std::size_t r = 0; r < runs; ++r) mean += v[r];
      mean /= static_cast<double>(runs);
      double ss = 0.0;
      for (std::size_t r = 0; r < runs; ++r) ss += (v[r] - mean) * (v[r] - mean);
      const double se =
          runs > 1 ? std::sqrt(ss / static_cast<double>(runs - 1)) / std::sqrt(static_cast<double>(runs))
                   : 0.0;
      rows.push_back({cfg.experiment, groups[g].cls.label(), groups[g].cls.memory, cfg.n_grid[k],
                      groups[g].p_star, to_string(groups[g].algorithm), mean, se, cfg.runs,
                      cfg.base_seed, scoring});
    }
  }
  return rows;
}

const char* const kResultCsvHeader =
    "experiment,policy_class,memory,n,p_star,algorithm,mean_value,std_error,runs,base_seed,scoring";

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  const auto old_precision = out.precision(17);
  out << kResultCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.policy_class << ',' << r.memory << ',' << r.n << ','
        << r.p_star << ',' << r.algorithm << ',' << r.mean << ',' << r.std_error << ',' << r.runs
        << ',' << r.base_seed << ',' << r.scoring << '\n';
  }
  out.precision(old_precision);
}

}  // namespace lrps
