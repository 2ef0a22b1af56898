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

#include "lrps/archive.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "lrps/errors.hpp"

namespace lrps {

namespace {

constexpr int kArchiveVersion = 1;
constexpr const char* kArchiveFormat = "lrps-archive";

nlohmann::json step_to_json(const Step& s) {
  auto j = nlohmann::json::array({s.obs.id, s.action.id, s.reward});
  if (s.memory) j.push_back(*s.memory);
  return j;
}

Step step_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() < 3 || j.size() > 4) {
    throw FormatError("step must be [obs, action, reward(, memory)]");
  }
  Step s{Observation{j[0].get<int>()}, Action{j[1].get<int>()}, j[2].get<double>(), std::nullopt};
  if (j.size() == 4) s.memory = j[3].get<int>();
  return s;
}

}  // namespace

void write_archive(std::ostream& out, const Dataset& data, const ArchiveHeader& header) {
  const nlohmann::json head = {{"format", kArchiveFormat},
                               {"version", kArchiveVersion},
                               {"policy_class", to_json(data.spec())},
                               {"environment", header.environment},
                               {"horizon", header.horizon},
                               {"seed", header.seed},
                               {"verbose", data.verbose()},
                               {"records", data.size()}};
  out << head.dump() << '\n';
  for (const auto& rec : data.records()) {
    nlohmann::json line = {{"policy", to_json(rec.policy)}, {"return", rec.ret}};
    if (rec.steps) {
      auto steps = nlohmann::json::array();
      for (const auto& s : *rec.steps) steps.push_back(step_to_json(s));
      line["steps"] = std::move(steps);
    } else {
      line["counts"] = rec.counts.values;
    }
    out << line.dump() << '\n';
  }
  if (!out) throw FormatError("failed writing archive");
}

void save_archive(const std::string& path, const Dataset& data, const ArchiveHeader& header) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write archive " + path);
  write_archive(out, data, header);
}

LoadedArchive read_archive(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 1;
  auto fail = [&](const std::string& what) -> FormatError {
    return FormatError(source + ":" + std::to_string(line_no) + ": " + what);
  };

  if (!std::getline(in, line)) throw fail("missing archive header");
  nlohmann::json head;
  try {
    head = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("malformed header: ") + e.what());
  }
  if (!head.is_object() || head.value("format", std::string()) != kArchiveFormat) {
    throw fail("not an lrps experience archive");
  }
  if (head.value("version", -1) != kArchiveVersion) {
    throw fail("unsupported archive version " + head.value("version", nlohmann::json()).dump() +
               " (expected " + std::to_string(kArchiveVersion) + ")");
  }

  ArchiveHeader header;
  std::size_t expected = 0;
  PolicyClassSpec spec;
  bool verbose = false;
  try {
    spec = spec_from_json(head.at("policy_class"));
    header.environment = head.at("environment").get<std::string>();
    header.horizon = head.at("horizon").get<int>();
    header.seed = head.at("seed").get<std::uint64_t>();
    verbose = head.at("verbose").get<bool>();
    expected = head.at("records").get<std::size_t>();
  } catch (const std::exception& e) {
    throw fail(std::string("malformed header: ") + e.what());
  }

  Dataset data(spec, verbose);
  while (data.size() < expected) {
    if (!std::getline(in, line)) {
      ++line_no;
      throw fail("truncated archive: expected " + std::to_string(expected) + " records, found " +
                 std::to_string(data.size()));
    }
    ++line_no;
    try {
      const auto j = nlohmann::json::parse(line);
      auto policy = policy_from_json(j.at("policy"));
      const double ret = j.at("return").get<double>();
      History h;
      if (j.contains("steps")) {
        for (const auto& s : j.at("steps")) h.steps.push_back(step_from_json(s));
        h.counts = tally(h.steps, spec);
      } else {
        h.counts = Counts{spec, j.at("counts").get<std::vector<std::uint32_t>>()};
        if (h.counts.values.size() != spec.num_params()) throw FormatError("count table size mismatch");
      }
      data.add(SampleRecord::make(std::move(policy), ret, h, verbose));
    } catch (const std::exception& e) {
      throw fail(std::string("bad record: ") + e.what());
    }
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty()) throw fail("unexpected content after the last record");
  }
  return {std::move(header), std::move(data)};
}

LoadedArchive load_experience(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open archive " + path);
  return read_archive(in, path);
}

Dataset archive_experience(Environment& env, std::span<const PolicyParams> policies, Rng& rng,
                           const std::string& path, std::uint64_t seed, bool verbose) {
  if (policies.empty()) throw ConfigError("no policies to archive");
  Dataset data(policies.front().spec(), verbose);
  for (const auto& p : policies) {
    const Trial t = sample(env, p, rng);
    data.add(SampleRecord::make(p, t, verbose));
  }
  save_archive(path, data, {env.name(), env.horizon(), seed});
  return data;
}

}  // namespace lrps
