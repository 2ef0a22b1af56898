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

#ifndef LRPS_BOUNDS_HPP
#define LRPS_BOUNDS_HPP

#include <cstdint>
#include <optional>
#include <string>

/// Sample-complexity bounds for weighted importance sampling.
///
/// The guarantees assume returns in [0, V_max]. Problems with negative
/// rewards (the bandits here) must be rescaled first; see rescaled_v_max().
/// All logarithms are natural.
namespace lrps::bounds {

struct BoundInputs {
  double v_max = 1.0;
  double eps = 0.1;
  double delta = 0.1;
  int horizon = 1;
  double c_lo = 0.1;
  double c_hi = 0.9;
  /// Covering number N(Θ, ε/8) used by the PAC bound.
  double capacity = 1.0;
  /// Metric entropy K(Θ) and VC dimension for compare_bounds; fall back to
  /// `capacity` when unset.
  std::optional<double> entropy;
  std::optional<double> vc_dimension;

  void validate() const;
};

/// η = max(c_hi^T, (1 − c_lo)^T).
double eta(double c_lo, double c_hi, int horizon);

/// Largest change of the WIS estimate when one of N trajectories is replaced:
/// V_max c_hi^T / (N c_lo^T + c_hi^T).
double wis_sup_deviation(double v_max, double c_lo, double c_hi, int horizon, std::uint64_t n);

/// Var{V̂_WIS} ≤ V_max² η⁴ N / (4 (N + η²)²).
double wis_variance_bound(double v_max, double eta, std::uint64_t n);

/// log of 4 N(Θ, ε/8) exp[−ε² (N + η²)² / (32 V_max² η⁴ N)], unclamped.
double log_pac_confidence(const BoundInputs& in, double n);

/// The PAC failure probability bound, clamped to [0, 1].
double pac_confidence(const BoundInputs& in, std::uint64_t n);

/// Smallest N with pac_confidence(in, N) ≤ δ, by bisection over [1, 2^62].
/// Throws InfeasibleError when no such N exists in range.
std::uint64_t invert_for_n(const BoundInputs& in);

struct BoundComparison {
  double likelihood_ratio = 0.0;      // (V/ε)² 2^{4T} (1−c_lo)^{4T} (K + log(8/δ))
  double reusable_trajectories = 0.0; // (V/ε)² 2^{2T} VC (T + log(V/ε) + log(1/δ)) log T
  double ratio = 0.0;                 // likelihood_ratio / reusable_trajectories
  std::string note;
};

/// Evaluates both rows of the sample-complexity comparison as printed
/// (order of magnitude; constants as printed). At T = 1 the log T factor
/// zeroes the second row and `note` carries a T ≥ 2 advisory.
BoundComparison compare_bounds(const BoundInputs& in);

/// Likelihood ratio bound against a uniform two-action sampling policy:
/// 2^T (1 − c_lo)^T.
double uniform_sampling_eta(double c_lo, int horizon);

/// V_max to use after shifting returns from [r_min, r_max] into [0, V_max].
double rescaled_v_max(double r_min, double r_max);

}  // namespace lrps::bounds

#endif  // LRPS_BOUNDS_HPP
