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

#include "lrps/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lrps/archive.hpp"
#include "lrps/bounds.hpp"
#include "lrps/errors.hpp"
#include "lrps/harness.hpp"

namespace lrps {

namespace {

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::string output = "-";
  int runs = 10;
  int threads = 1;
};

// Writes to --output, or to `out` for "-".
template <class F>
void emit(const std::string& path, std::ostream& out, F&& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  write(file);
}

struct SweepRange {
  std::uint64_t lo, hi, step;
};

SweepRange parse_sweep(const std::string& s) {
  std::uint64_t lo = 0, hi = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(s);
  if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || lo < 1 || hi < lo ||
      step < 1 || !is.eof()) {
    throw ConfigError("--sweep-n expects lo:hi:step with 1 <= lo <= hi and step >= 1");
  }
  return {lo, hi, step};
}

void write_bounds_rows(std::ostream& out, const bounds::BoundInputs& in,
                       const std::vector<std::uint64_t>& ns) {
  out.precision(17);
  out << "v_max,eps,delta,t,c_lo,c_hi,capacity,n,eta,sup_deviation,variance_bound,"
         "pac_confidence,required_n,likelihood_ratio_n,reusable_trajectories_n,ratio,note\n";
  const double e = bounds::eta(in.c_lo, in.c_hi, in.horizon);
  const auto required = bounds::invert_for_n(in);
  const auto cmp = bounds::compare_bounds(in);
  for (const auto n : ns) {
    const std::uint64_t nn = n == 0 ? required : n;
    out << in.v_max << ',' << in.eps << ',' << in.delta << ',' << in.horizon << ',' << in.c_lo
        << ',' << in.c_hi << ',' << in.capacity << ',' << nn << ',' << e << ','
        << bounds::wis_sup_deviation(in.v_max, in.c_lo, in.c_hi, in.horizon, nn) << ','
        << bounds::wis_variance_bound(in.v_max, e, nn) << ','
        << bounds::pac_confidence(in, nn) << ',' << required << ',' << cmp.likelihood_ratio
        << ',' << cmp.reusable_trajectories << ',' << cmp.ratio << ",\"" << cmp.note << "\"\n";
  }
}

void add_optimizer_options(CLI::App* cmd, OptimizerConfig& opt, double& reinforce_step) {
  cmd->add_option("--restarts", opt.restarts, "random restarts per optimization")
      ->capture_default_str();
  cmd->add_option("--max-iter", opt.max_iterations, "gradient ascent iterations per start")
      ->capture_default_str();
  cmd->add_option("--reinforce-step", reinforce_step, "REINFORCE step size")
      ->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Likelihood-ratio policy search: experiments, bounds and proxy queries", "lrps"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  auto* seed_opt = app.add_option("--seed", g.seed, "base random seed")->capture_default_str();
  app.add_option("--output,-o", g.output, "output path ('-' for stdout)")->capture_default_str();
  auto* runs_opt = app.add_option("--runs", g.runs, "independent runs per cell")->capture_default_str();
  auto* threads_opt =
      app.add_option("--threads", g.threads, "worker threads")->capture_default_str();

  // bandit
  ExperimentConfig bandit_cfg;
  bandit_cfg.n_grid = {10, 30, 100, 300};
  bandit_cfg.p_stars = {0.0, 0.5, 1.0};
  std::string problem = "ht";
  auto* bandit = app.add_subcommand("bandit", "hidden treasure / hidden failure bandit grid");
  bandit->add_option("--problem", problem, "ht or hf")
      ->check(CLI::IsMember({"ht", "hf"}))
      ->capture_default_str();
  bandit->add_option("--n", bandit_cfg.n_grid, "trial budgets")->delimiter(',');
  bandit->add_option("--p-star", bandit_cfg.p_stars, "exploitation probabilities")->delimiter(',');
  add_optimizer_options(bandit, bandit_cfg.optimizer, bandit_cfg.reinforce_step);

  // loadunload
  ExperimentConfig lu_cfg;
  lu_cfg.experiment = "load-unload";
  lu_cfg.n_grid = {25, 50, 100, 200};
  lu_cfg.p_stars = {0.5};
  std::vector<std::string> classes{"reactive", "2", "3"};
  std::vector<std::string> algorithms{"learn"};
  auto* lu = app.add_subcommand("loadunload", "load-unload learning curves per policy class");
  lu->add_option("--classes", classes, "reactive and/or controller memory sizes")->delimiter(',');
  lu->add_option("--algorithms", algorithms, "learn and/or reinforce")->delimiter(',');
  lu->add_option("--n", lu_cfg.n_grid, "trial budgets")->delimiter(',');
  lu->add_option("--p-star", lu_cfg.p_stars, "exploitation probabilities")->delimiter(',');
  lu->add_option("--positions", lu_cfg.positions, "positions on the line")->capture_default_str();
  lu->add_option("--horizon", lu_cfg.horizon, "steps per trial")->capture_default_str();
  add_optimizer_options(lu, lu_cfg.optimizer, lu_cfg.reinforce_step);

  // bounds
  bounds::BoundInputs bin;
  std::string sweep;
  double entropy = -1.0, vc = -1.0;
  auto* bcmd = app.add_subcommand("bounds", "sample complexity bounds (one row or an N sweep)");
  bcmd->add_option("--v-max", bin.v_max, "return bound V_max")->capture_default_str();
  bcmd->add_option("--eps", bin.eps, "accuracy")->capture_default_str();
  bcmd->add_option("--delta", bin.delta, "confidence")->capture_default_str();
  bcmd->add_option("--t", bin.horizon, "horizon")->capture_default_str();
  bcmd->add_option("--c-lo", bin.c_lo, "lower probability bound")->capture_default_str();
  bcmd->add_option("--c-hi", bin.c_hi, "upper probability bound")->capture_default_str();
  bcmd->add_option("--capacity", bin.capacity, "covering number")->capture_default_str();
  bcmd->add_option("--entropy", entropy, "metric entropy (defaults to capacity)");
  bcmd->add_option("--vc", vc, "VC dimension (defaults to capacity)");
  bcmd->add_option("--sweep-n", sweep, "N sweep lo:hi:step");

  // evaluate
  std::string archive_path, policy_path, estimator = "wis";
  auto* ev = app.add_subcommand("evaluate", "query an experience archive at a policy");
  ev->add_option("--archive", archive_path, "archive file")->required();
  ev->add_option("--policy", policy_path, "policy JSON file")->required();
  ev->add_option("--estimator", estimator, "wis or is")
      ->check(CLI::IsMember({"wis", "is"}))
      ->capture_default_str();

  // archive
  std::string arch_env = "bandit-ht", arch_class = "reactive";
  double arch_p_star = 0.5;
  int arch_n = 100;
  auto* ar = app.add_subcommand("archive", "run learn() and save its experience archive");
  ar->add_option("--env", arch_env, "bandit-ht, bandit-hf or load-unload")
      ->check(CLI::IsMember({"bandit-ht", "bandit-hf", "load-unload"}))
      ->capture_default_str();
  ar->add_option("--class", arch_class, "reactive or a memory size")->capture_default_str();
  ar->add_option("--n", arch_n, "trials")->capture_default_str();
  ar->add_option("--p-star", arch_p_star, "exploitation probability")->capture_default_str();
  std::string policy_out;
  ar->add_option("--policy-out", policy_out, "also write the learned policy here");

  // run
  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment described by a JSON config file");
  run->add_option("--config", config_path, "config file")->required();

  std::vector<std::string> argv_store{"lrps"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfigError;
  }

  auto apply_globals = [&](ExperimentConfig& c, bool only_explicit) {
    if (!only_explicit || seed_opt->count() > 0) c.base_seed = g.seed;
    if (!only_explicit || runs_opt->count() > 0) c.runs = g.runs;
    if (!only_explicit || threads_opt->count() > 0) c.threads = g.threads;
  };
  auto run_and_write = [&](const ExperimentConfig& c) {
    const auto rows = run_experiment(c);
    emit(g.output, out, [&](std::ostream& os) { write_csv(os, rows); });
  };

  try {
    if (bandit->parsed()) {
      bandit_cfg.experiment = problem == "ht" ? "bandit-ht" : "bandit-hf";
      apply_globals(bandit_cfg, false);
      run_and_write(bandit_cfg);
    } else if (lu->parsed()) {
      lu_cfg.classes.clear();
      for (const auto& c : classes) lu_cfg.classes.push_back(PolicyClassChoice::parse(c));
      lu_cfg.algorithms.clear();
      for (const auto& a : algorithms) lu_cfg.algorithms.push_back(algorithm_from_string(a));
      apply_globals(lu_cfg, false);
      run_and_write(lu_cfg);
    } else if (bcmd->parsed()) {
      if (entropy >= 0.0) bin.entropy = entropy;
      if (vc >= 0.0) bin.vc_dimension = vc;
      bin.validate();
      std::vector<std::uint64_t> ns;
      if (sweep.empty()) {
        ns.push_back(0);  // the required N
      } else {
        const auto r = parse_sweep(sweep);
        for (std::uint64_t n = r.lo; n <= r.hi; n += r.step) ns.push_back(n);
      }
      emit(g.output, out, [&](std::ostream& os) { write_bounds_rows(os, bin, ns); });
    } else if (ev->parsed()) {
      const auto loaded = load_experience(archive_path);
      const auto policy = load_policy(policy_path);
      if (!(policy.spec() == loaded.data.spec())) {
        throw ConfigError("policy class " + policy.spec().describe() +
                          " does not match archive class " + loaded.data.spec().describe());
      }
      const auto est = estimator == "wis" ? evaluate_wis(loaded.data, policy)
                                          : evaluate_is(loaded.data, policy);
      emit(g.output, out, [&](std::ostream& os) {
        os.precision(17);
        os << "estimator=" << estimator << "\nrecords=" << loaded.data.size()
           << "\nvalue=" << est.value << "\neffective_sample_size=" << est.effective_sample_size
           << "\ngradient=";
        for (std::size_t k = 0; k < est.gradient.size(); ++k) {
          os << (k ? " " : "") << est.gradient[k];
        }
        os << '\n';
      });
    } else if (ar->parsed()) {
      if (g.output.empty() || g.output == "-") throw ConfigError("archive needs --output <path>");
      ExperimentConfig c;
      c.experiment = arch_env;
      const auto env = environment_factory(c)();
      const auto choice = PolicyClassChoice::parse(arch_class);
      const auto spec =
          choice.kind == PolicyKind::kReactive
              ? PolicyClassSpec::reactive(env->num_observations(), env->num_actions())
              : PolicyClassSpec::controller(env->num_observations(), env->num_actions(),
                                            choice.memory);
      LearnConfig lc;
      lc.trials = arch_n;
      lc.p_star = arch_p_star;
      lc.seed = g.seed;
      const auto result = learn(*env, spec, lc);
      save_archive(g.output, result.data, {env->name(), env->horizon(), g.seed});
      if (!policy_out.empty()) save_policy(policy_out, result.policy);
    } else if (run->parsed()) {
      auto c = load_experiment(config_path);
      apply_globals(c, true);
      run_and_write(c);
    }
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitOk;
}

}  // namespace lrps
