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

#ifndef LRPS_ARCHIVE_HPP
#define LRPS_ARCHIVE_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "lrps/env.hpp"
#include "lrps/estimator.hpp"

// Experience archive: JSON Lines. The first line is a header
//
//   {"format":"lrps-archive","version":1,"policy_class":{...},
//    "environment":"load-unload","horizon":100,"seed":7,
//    "verbose":false,"records":N}
//
// followed by exactly N record lines
//
//   {"policy":{...},"return":R,"counts":[...]}          (compact)
//   {"policy":{...},"return":R,"steps":[[o,a,r,m],...]}  (verbose)
//
// where m is omitted for reactive policies. Numbers use shortest round-trip
// formatting, so reloading rebuilds a dataset whose evaluations match the
// original bit for bit.
namespace lrps {

struct ArchiveHeader {
  std::string environment;
  int horizon = 0;
  std::uint64_t seed = 0;
};

struct LoadedArchive {
  ArchiveHeader header;
  Dataset data;
};

void write_archive(std::ostream& out, const Dataset& data, const ArchiveHeader& header);
void save_archive(const std::string& path, const Dataset& data, const ArchiveHeader& header);

/// `source` names the stream in error messages ("file:line: ...").
LoadedArchive read_archive(std::istream& in, const std::string& source = "<archive>");
LoadedArchive load_experience(const std::string& path);

/// Runs each policy once in `env` and writes the resulting dataset.
Dataset archive_experience(Environment& env, std::span<const PolicyParams> policies, Rng& rng,
                           const std::string& path, std::uint64_t seed, bool verbose = false);

}  // namespace lrps

#endif  // LRPS_ARCHIVE_HPP
