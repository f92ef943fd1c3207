#include "smcsmooth/discrete_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "smcsmooth/errors.hpp"

namespace smc {

void validate_simplex(std::span<const double> weights, double tolerance) {
  if (weights.empty()) throw InvalidArgumentError("empty weight vector");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw InvalidArgumentError("weights must be finite and nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > tolerance) {
    throw InvalidArgumentError("weights sum to " + std::to_string(total) + ", not 1");
  }
}

namespace {

double checked_total(std::span<const double> weights) {
  if (weights.empty()) throw InvalidArgumentError("empty weight vector");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw InvalidArgumentError("weights must be finite and nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgumentError("weights have zero total mass");
  return total;
}

}  // namespace

AliasSampler::AliasSampler(std::span<const double> weights) {
  const double total = checked_total(weights);
  const std::size_t n = weights.size();
  prob_.assign(n, 0.0);
  alias_.assign(n, 0);

  std::vector<double> scaled(n);
  std::vector<std::size_t> small;
  std::vector<std::size_t> large;
  small.reserve(n);
  large.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers carry mass 1 up to rounding.
  for (std::size_t i : large) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
  for (std::size_t i : small) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
}

std::size_t AliasSampler::sample(Rng& rng) const {
  const std::size_t column = rng.index(prob_.size());
  return rng.uniform() < prob_[column] ? column : alias_[column];
}

CdfSampler::CdfSampler(std::span<const double> weights) {
  const double total = checked_total(weights);
  cdf_.resize(weights.size());
  double running = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    running += weights[i];
    cdf_[i] = running / total;
  }
  cdf_.back() = 1.0;
}

std::size_t CdfSampler::sample(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
}

std::size_t sample_linear_scan(std::span<const double> weights, double u) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double target = u * total;
  double running = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    running += weights[i];
    last_positive = i;
    if (target < running) return i;
  }
  return last_positive;
}

}  // namespace smc
