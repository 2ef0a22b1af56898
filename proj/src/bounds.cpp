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

#include "lrps/bounds.hpp"

#include <cmath>
#include <limits>

#include "lrps/errors.hpp"

namespace lrps::bounds {

namespace {

constexpr std::uint64_t kMaxSamples = std::uint64_t{1} << 62;

}  // namespace

void BoundInputs::validate() const {
  if (!(v_max > 0.0)) throw ConfigError("v_max must be positive");
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (!(c_lo > 0.0 && c_lo < c_hi && c_hi < 1.0)) {
    throw ConfigError("bounds need 0 < c_lo < c_hi < 1");
  }
  if (!(capacity >= 1.0)) throw ConfigError("capacity (covering number) must be >= 1");
  if (entropy && !(*entropy >= 0.0)) throw ConfigError("metric entropy must be >= 0");
  if (vc_dimension && !(*vc_dimension >= 1.0)) throw ConfigError("VC dimension must be >= 1");
}

double eta(double c_lo, double c_hi, int horizon) {
  return std::max(std::pow(c_hi, horizon), std::pow(1.0 - c_lo, horizon));
}

double wis_sup_deviation(double v_max, double c_lo, double c_hi, int horizon, std::uint64_t n) {
  if (n < 1) throw ConfigError("N must be at least 1");
  const double hi = std::pow(c_hi, horizon);
  return v_max * hi / (static_cast<double>(n) * std::pow(c_lo, horizon) + hi);
}

double wis_variance_bound(double v_max, double eta_value, std::uint64_t n) {
  if (n < 1) throw ConfigError("N must be at least 1");
  if (!(eta_value > 0.0 && eta_value <= 1.0)) throw ConfigError("eta must lie in (0, 1]");
  const double nn = static_cast<double>(n);
  const double e2 = eta_value * eta_value;
  return v_max * v_max * e2 * e2 * nn / (4.0 * (nn + e2) * (nn + e2));
}

double log_pac_confidence(const BoundInputs& in, double n) {
  in.validate();
  const double e = eta(in.c_lo, in.c_hi, in.horizon);
  const double e2 = e * e;
  const double exponent =
      in.eps * in.eps * (n + e2) * (n + e2) / (32.0 * in.v_max * in.v_max * e2 * e2 * n);
  return std::log(4.0) + std::log(in.capacity) - exponent;
}

double pac_confidence(const BoundInputs& in, std::uint64_t n) {
  if (n < 1) throw ConfigError("N must be at least 1");
  const double lp = log_pac_confidence(in, static_cast<double>(n));
  return lp >= 0.0 ? 1.0 : std::exp(lp);
}

std::uint64_t invert_for_n(const BoundInputs& in) {
  in.validate();
  const double target = std::log(in.delta);
  auto ok = [&](std::uint64_t n) { return log_pac_confidence(in, static_cast<double>(n)) <= target; };
  if (ok(1)) return 1;
  if (!ok(kMaxSamples)) {
    throw InfeasibleError("confidence delta is not reachable with N <= 2^62 samples");
  }
  // Invariant: !ok(lo), ok(hi). The bound decreases in N for N >= η² <= 1.
  std::uint64_t lo = 1;
  std::uint64_t hi = kMaxSamples;
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

BoundComparison compare_bounds(const BoundInputs& in) {
  in.validate();
  const double entropy = in.entropy.value_or(in.capacity);
  const double vc = in.vc_dimension.value_or(in.capacity);
  const double T = in.horizon;
  const double scale = (in.v_max / in.eps) * (in.v_max / in.eps);

  BoundComparison out;
  out.likelihood_ratio = scale * std::pow(2.0, 4.0 * T) * std::pow(1.0 - in.c_lo, 4.0 * T) *
                         (entropy + std::log(8.0 / in.delta));
  out.reusable_trajectories = scale * std::pow(2.0, 2.0 * T) * vc *
                              (T + std::log(in.v_max / in.eps) + std::log(1.0 / in.delta)) *
                              std::log(T);
  out.ratio = out.reusable_trajectories != 0.0
                  ? out.likelihood_ratio / out.reusable_trajectories
                  : std::numeric_limits<double>::infinity();
  out.note = "order-of-magnitude, constants as printed";
  if (in.horizon < 2) out.note += "; T<2: log(T) zeroes the reusable-trajectories row";
  return out;
}

double uniform_sampling_eta(double c_lo, int horizon) {
  return std::pow(2.0, horizon) * std::pow(1.0 - c_lo, horizon);
}

double rescaled_v_max(double r_min, double r_max) {
  if (!(r_max > r_min)) throw ConfigError("return range must have r_max > r_min");
  return r_max - r_min;
}

}  // namespace lrps::bounds
