#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "smcsmooth/rng.hpp"

namespace smc {

/// Throws InvalidArgumentError unless `weights` is nonnegative, finite and
/// sums to one within `tolerance`.
void validate_simplex(std::span<const double> weights, double tolerance = 1e-9);

/// Walker/Vose alias table: O(N) construction, O(1) per draw.
class AliasSampler {
 public:
  AliasSampler() = default;
  /// Weights need not be normalised but must be nonnegative with a positive sum.
  explicit AliasSampler(std::span<const double> weights);

  std::size_t sample(Rng& rng) const;
  std::size_t size() const noexcept { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

/// Inverse-CDF sampler with binary search, O(log N) per draw. Kept as an
/// independent reference for AliasSampler.
class CdfSampler {
 public:
  explicit CdfSampler(std::span<const double> weights);

  std::size_t sample(Rng& rng) const;
  std::size_t size() const noexcept { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

/// One O(N) inverse-CDF draw from unnormalised nonnegative weights.
std::size_t sample_linear_scan(std::span<const double> weights, double u);

}  // namespace smc
