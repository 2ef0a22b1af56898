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

#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lrps/archive.hpp"
#include "lrps/errors.hpp"
#include "lrps/harness.hpp"
#include "oracles.hpp"

using namespace lrps;

namespace {

std::string csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

ExperimentConfig small_bandit() {
  ExperimentConfig c;
  c.experiment = "bandit-ht";
  c.n_grid = {3, 8};
  c.p_stars = {0.0, 1.0};
  c.runs = 4;
  c.base_seed = 5;
  c.optimizer.restarts = 1;
  return c;
}

Dataset sample_dataset(const PolicyClassSpec& spec, Environment& env, int n, Rng& rng,
                       bool verbose) {
  Dataset d(spec, verbose);
  for (int i = 0; i < n; ++i) {
    const auto p = random_policy(spec, rng);
    d.add(SampleRecord::make(p, sample(env, p, rng), verbose));
  }
  return d;
}

}  // namespace

TEST_CASE("bandit grid yields one bounded row per cell") {
  auto c = small_bandit();
  c.n_grid = {10, 30, 100, 300};
  c.p_stars = {0.0, 0.5, 1.0};
  c.runs = 3;
  const auto rows = run_experiment(c);
  CHECK(rows.size() == 12);
  for (const auto& r : rows) {
    CHECK(r.mean >= 0.1 - 1e-12);
    CHECK(r.mean <= 0.9 + 1e-12);
    CHECK(r.runs == 3);
    CHECK(r.scoring == "exact");
    CHECK(r.algorithm == "learn");
  }
}

TEST_CASE("standard error is the sample deviation over root runs") {
  auto c = small_bandit();
  c.n_grid = {5};
  c.p_stars = {0.5};
  c.runs = 6;
  const auto rows = run_experiment(c);
  // Rebuild the per-run values with the documented seeds.
  auto env = make_bandit(hidden_treasure_arms());
  const auto model = *env->model();
  std::vector<double> v;
  for (std::uint64_t r = 0; r < 6; ++r) {
    LearnConfig lc;
    lc.trials = 5;
    lc.p_star = 0.5;
    lc.optimizer = c.optimizer;
    lc.seed = derive_seed(c.base_seed, {0, r});
    v.push_back(exact_value(model, learn(*env, PolicyClassSpec::reactive(1, 2), lc).policy));
  }
  double mean = 0.0;
  for (double x : v) mean += x / 6;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  CHECK(rows[0].mean == doctest::Approx(mean).epsilon(1e-14));
  CHECK(rows[0].std_error == doctest::Approx(std::sqrt(ss / 5) / std::sqrt(6.0)).epsilon(1e-12));
}

TEST_CASE("same seed gives byte-identical csv") {
  const auto c = small_bandit();
  CHECK(csv(run_experiment(c)) == csv(run_experiment(c)));
}

TEST_CASE("thread count does not change the output") {
  auto c = small_bandit();
  c.experiment = "load-unload";
  c.positions = 4;
  c.horizon = 15;
  c.n_grid = {4, 9};
  c.p_stars = {0.5};
  c.classes = {PolicyClassChoice::parse("reactive"), PolicyClassChoice::parse("2")};
  c.algorithms = {Algorithm::kLearn, Algorithm::kReinforce};
  c.optimizer.max_iterations = 30;
  c.threads = 1;
  const auto one = csv(run_experiment(c));
  c.threads = 8;
  CHECK(csv(run_experiment(c)) == one);
}

TEST_CASE("prefix sharing matches separate runs") {
  auto c = small_bandit();
  c.algorithms = {Algorithm::kLearn, Algorithm::kReinforce};
  c.share_prefix = true;
  const auto shared = csv(run_experiment(c));
  c.share_prefix = false;
  CHECK(csv(run_experiment(c)) == shared);
}

TEST_CASE("every cell consumes N times runs trials") {
  auto c = small_bandit();
  c.share_prefix = false;
  auto counter = std::make_shared<std::atomic<long>>(0);
  const EnvironmentFactory factory = [&] {
    return std::make_unique<oracle::CountingEnv>(make_bandit(hidden_treasure_arms()), counter);
  };
  run_experiment(c, factory);
  long expected = 0;
  for (int n : c.n_grid) expected += static_cast<long>(n) * c.runs * c.p_stars.size();
  CHECK(*counter == expected);

  // With prefix sharing each group runs once to the largest N.
  *counter = 0;
  c.share_prefix = true;
  run_experiment(c, factory);
  CHECK(*counter == 8L * c.runs * static_cast<long>(c.p_stars.size()));
}

TEST_CASE("environments without a model are scored by Monte Carlo") {
  class Opaque final : public Environment {
   public:
    std::string name() const override { return "opaque"; }
    int num_observations() const override { return 1; }
    int num_actions() const override { return 2; }
    int horizon() const override { return 1; }
    Observation reset(Rng&) override { return Observation{0}; }
    StepOutcome step(Action a, Rng&) override { return {Observation{0}, a.id == 0 ? 1.0 : 0.0, true}; }
    std::unique_ptr<Environment> clone() const override { return std::make_unique<Opaque>(); }
  };
  auto c = small_bandit();
  c.experiment = "custom";
  c.model = load_unload_model(2, 1);  // satisfies validation; the factory wins
  c.mc_rollouts = 500;
  const auto rows = run_experiment(c, [] { return std::make_unique<Opaque>(); });
  for (const auto& r : rows) {
    CHECK(r.scoring == "monte-carlo:500");
    CHECK(r.mean >= 0.0);
    CHECK(r.mean <= 1.0);
  }
}

TEST_CASE("csv schema") {
  const auto text = csv(run_experiment(small_bandit()));
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  CHECK(line == kResultCsvHeader);
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 10);
  }
  CHECK(rows == 4);
}

TEST_CASE("experiment config parsing") {
  const auto j = nlohmann::json::parse(R"({
    "experiment": "load-unload", "n": [5, 10], "p_star": [0.5], "runs": 3,
    "classes": ["reactive", 2, "fsc3"], "algorithms": ["learn", "reinforce"],
    "seed": 17, "threads": 2, "optimizer": {"restarts": 2, "max_iterations": 40}
  })");
  const auto c = experiment_from_json(j);
  CHECK(c.n_grid == std::vector<int>{5, 10});
  CHECK(c.classes.size() == 3);
  CHECK(c.classes[1].label() == "fsc2");
  CHECK(c.classes[2].memory == 3);
  CHECK(c.algorithms[1] == Algorithm::kReinforce);
  CHECK(c.base_seed == 17);
  CHECK(c.optimizer.restarts == 2);
  CHECK_THROWS_AS(experiment_from_json(nlohmann::json::parse(R"({"bogus": 1})")), ConfigError);
  CHECK_THROWS_AS(experiment_from_json(nlohmann::json::parse(R"({"runs": "x"})")), ConfigError);
  CHECK_THROWS_AS(PolicyClassChoice::parse("fsc"), ConfigError);
  CHECK_THROWS_AS(algorithm_from_string("sarsa"), ConfigError);

  ExperimentConfig bad;
  bad.runs = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = ExperimentConfig{};
  bad.n_grid.clear();
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = ExperimentConfig{};
  bad.experiment = "custom";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("archive round trip is bit-identical") {
  Rng rng(1);
  auto env = make_load_unload(4, 12);
  for (bool verbose : {false, true}) {
    for (const auto& spec :
         {PolicyClassSpec::reactive(4, 2), PolicyClassSpec::controller(4, 2, 2)}) {
      const auto d = sample_dataset(spec, *env, 20, rng, verbose);
      std::stringstream ss;
      write_archive(ss, d, {"load-unload", 12, 77});
      const auto back = read_archive(ss);
      CHECK(back.header.environment == "load-unload");
      CHECK(back.header.horizon == 12);
      CHECK(back.header.seed == 77);
      REQUIRE(back.data.size() == d.size());
      CHECK(back.data.verbose() == verbose);
      for (int q = 0; q < 10; ++q) {
        const auto theta = random_policy(spec, rng);
        const auto a = evaluate_wis(d, theta);
        const auto b = evaluate_wis(back.data, theta);
        CHECK(a.value == b.value);
        CHECK(a.gradient == b.gradient);
        CHECK(evaluate_is(d, theta).value == evaluate_is(back.data, theta).value);
      }
    }
  }
}

TEST_CASE("empty archive round-trips to empty") {
  Dataset d(PolicyClassSpec::reactive(1, 2));
  std::stringstream ss;
  write_archive(ss, d, {"bandit", 1, 0});
  const auto back = read_archive(ss);
  CHECK(back.data.empty());
  CHECK(back.data.spec() == d.spec());
}

TEST_CASE("archive load errors name the line") {
  Rng rng(2);
  auto env = make_bandit(hidden_failure_arms());
  const auto d = sample_dataset(PolicyClassSpec::reactive(1, 2), *env, 3, rng, false);
  std::stringstream ss;
  write_archive(ss, d, {"bandit", 1, 0});
  std::vector<std::string> lines;
  for (std::string l; std::getline(ss, l);) lines.push_back(l);
  REQUIRE(lines.size() == 4);

  auto load = [](const std::vector<std::string>& ls) {
    std::stringstream in;
    for (const auto& l : ls) in << l << '\n';
    return read_archive(in, "a.dat");
  };
  auto message = [&](const std::vector<std::string>& ls) {
    try {
      load(ls);
    } catch (const FormatError& e) {
      return std::string(e.what());
    }
    return std::string();
  };

  auto corrupted = lines;
  corrupted[2] = "{\"policy\": 12";
  CHECK(message(corrupted).rfind("a.dat:3:", 0) == 0);

  auto truncated = lines;
  truncated.pop_back();
  CHECK(message(truncated).find("a.dat:") == 0);

  auto versioned = lines;
  auto head = nlohmann::json::parse(versioned[0]);
  head["version"] = 2;
  versioned[0] = head.dump();
  CHECK(message(versioned).rfind("a.dat:1:", 0) == 0);
  CHECK(message(versioned).find("version") != std::string::npos);

  CHECK(message({}).find("a.dat:1:") == 0);
  CHECK(message({"not json"}).rfind("a.dat:1:", 0) == 0);
}

TEST_CASE("archive_experience and load_experience use files") {
  Rng rng(3);
  auto env = make_bandit(hidden_treasure_arms());
  const auto spec = PolicyClassSpec::reactive(1, 2);
  std::vector<PolicyParams> policies;
  for (int i = 0; i < 6; ++i) policies.push_back(random_policy(spec, rng));
  const auto path = (std::filesystem::temp_directory_path() / "lrps_archive_test.jsonl").string();
  const auto d = archive_experience(*env, policies, rng, path, 9);
  const auto back = load_experience(path);
  std::filesystem::remove(path);
  CHECK(back.data.size() == 6);
  CHECK(back.header.seed == 9);
  const auto q = random_policy(spec, rng);
  CHECK(evaluate_wis(d, q).value == evaluate_wis(back.data, q).value);
  CHECK_THROWS_AS(load_experience("/nonexistent/dir/x.jsonl"), FormatError);
}
