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

#include "lrps/history.hpp"

#include <sstream>

#include "lrps/errors.hpp"

namespace lrps {

PolicyClassSpec PolicyClassSpec::reactive(int observations, int actions, double c_lo,
                                          double c_hi) {
  PolicyClassSpec s{PolicyKind::kReactive, observations, actions, 1, c_lo, c_hi};
  s.validate();
  return s;
}

PolicyClassSpec PolicyClassSpec::controller(int observations, int actions, int memory,
                                            double c_lo, double c_hi) {
  PolicyClassSpec s{PolicyKind::kController, observations, actions, memory, c_lo, c_hi};
  s.validate();
  return s;
}

void PolicyClassSpec::validate() const {
  if (observations < 1 || actions < 1 || memory < 1) {
    throw ConfigError("policy class dimensions must be positive: " + describe());
  }
  if (kind == PolicyKind::kReactive && memory != 1) {
    throw ConfigError("reactive policy class must have memory size 1");
  }
  // c_lo = 0 admits deterministic policies (used for exact evaluation);
  // estimation needs c_lo > 0 and checks it separately.
  if (!(c_lo >= 0.0 && c_lo < c_hi && c_hi <= 1.0)) {
    throw ConfigError("probability bounds must satisfy 0 <= c_lo < c_hi <= 1");
  }
  if (c_lo * actions > 1.0 + 1e-12) {
    throw ConfigError("c_lo exceeds 1/|actions|; the action simplex is empty");
  }
  if (is_controller() && c_lo * memory > 1.0 + 1e-12) {
    throw ConfigError("c_lo exceeds 1/memory; the memory simplex is empty");
  }
}

std::string PolicyClassSpec::describe() const {
  std::ostringstream os;
  os << (is_controller() ? "controller" : "reactive") << "(|O|=" << observations
     << ", |A|=" << actions << ", M=" << memory << ", c=[" << c_lo << ", " << c_hi << "])";
  return os.str();
}

Counts tally(std::span<const Step> steps, const PolicyClassSpec& spec) {
  Counts c{spec, std::vector<std::uint32_t>(spec.num_params(), 0)};
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const Step& s = steps[t];
    if (s.obs.id < 0 || s.obs.id >= spec.observations || s.action.id < 0 ||
        s.action.id >= spec.actions) {
      throw ContractError("history step out of range for " + spec.describe());
    }
    int m = 0;
    if (spec.is_controller()) {
      if (!s.memory) throw ContractError("controller policy needs memory-annotated history");
      m = *s.memory;
      if (m < 0 || m >= spec.memory) throw ContractError("memory annotation out of range");
    }
    ++c.values[spec.action_index(m, s.obs.id, s.action.id)];
    if (spec.is_controller() && t + 1 < steps.size()) {
      const auto& next = steps[t + 1].memory;
      if (!next) throw ContractError("controller policy needs memory-annotated history");
      if (*next < 0 || *next >= spec.memory) throw ContractError("memory annotation out of range");
      ++c.values[spec.memory_index(m, s.obs.id, *next)];
    }
  }
  return c;
}

double sum_rewards(std::span<const Step> steps) {
  double r = 0.0;
  for (const auto& s : steps) r += s.reward;
  return r;
}

}  // namespace lrps
