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

#ifndef LRPS_ERRORS_HPP
#define LRPS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lrps {

/// Invalid user-supplied configuration: bad dimensions, unnormalized
/// distributions, out-of-range bounds. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller broke an API precondition (mismatched policy class, history
/// without memory annotations, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class EmptyDatasetError : public std::runtime_error {
 public:
  EmptyDatasetError() : std::runtime_error("dataset is empty") {}
};

/// All importance weights underflowed to zero.
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact computation would need more memory than allowed.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No sample size reaches the requested confidence.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed, truncated or version-mismatched archive / policy file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lrps

#endif  // LRPS_ERRORS_HPP
