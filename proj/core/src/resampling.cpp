#include "smcsmooth/resampling.hpp"

#include <vector>

#include "smcsmooth/discrete_sampler.hpp"
#include "smcsmooth/errors.hpp"
#include "smcsmooth/hilbert.hpp"

namespace smc {

std::vector<std::size_t> multinomial_resample(std::span<const double> weights, std::size_t n, Rng& rng) {
  validate_simplex(weights);
  const AliasSampler sampler(weights);
  std::vector<std::size_t> out(n);
  for (auto& a : out) a = sampler.sample(rng);
  return out;
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights, double u) {
  validate_simplex(weights);
  if (!(u >= 0.0 && u < 1.0)) throw InvalidArgumentError("systematic resampling needs u in [0, 1)");
  const std::size_t n = weights.size();
  std::vector<std::size_t> out(n);
  double cumulative = weights[0];
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double point = (static_cast<double>(i) + u) / static_cast<double>(n);
    while (point >= cumulative && k + 1 < n) cumulative += weights[++k];
    // Rounding in the running sum must never select a zero-weight tail index.
    while (weights[k] == 0.0 && k > 0) --k;
    out[i] = k;
  }
  return out;
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights, Rng& rng) {
  return systematic_resample(weights, rng.uniform());
}

std::vector<std::size_t> adjacent_resample(std::span<const double> states, std::size_t dim,
                                           std::span<const double> weights, Rng& rng) {
  const std::size_t n = weights.size();
  if (states.size() != n * dim) throw InvalidArgumentError("state buffer does not match N * dim");
  const std::vector<std::size_t> order = hilbert_sort(states, dim);
  const std::vector<std::size_t> picked = systematic_resample(weights, rng);

  std::vector<std::size_t> position_of(n);
  for (std::size_t pos = 0; pos < n; ++pos) position_of[order[pos]] = pos;
  std::vector<std::size_t> count(n, 0);
  for (std::size_t a : picked) ++count[position_of[a]];

  // Doubly linked list over Hilbert positions that still have copies left.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> next(n, kNone);
  std::vector<std::size_t> prev(n, kNone);
  std::size_t head = kNone;
  std::size_t last = kNone;
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (count[pos] == 0) continue;
    if (last == kNone) {
      head = pos;
    } else {
      next[last] = pos;
    }
    prev[pos] = last;
    last = pos;
  }

  std::vector<std::size_t> out(n);
  std::size_t i = head;
  for (std::size_t slot = 0; slot < n; ++slot) {
    out[slot] = order[i];
    --count[i];
    const std::size_t right = next[i];
    const std::size_t left = prev[i];
    if (count[i] == 0) {
      if (left != kNone) next[left] = right;
      if (right != kNone) prev[right] = left;
    }
    if (left == kNone && right == kNone) continue;
    if (left == kNone) {
      i = right;
    } else if (right == kNone) {
      i = left;
    } else if (count[left] != count[right]) {
      i = count[left] > count[right] ? left : right;
    } else {
      i = rng.uniform() < 0.5 ? left : right;
    }
  }
  return out;
}

std::vector<std::size_t> resample(ResamplingScheme scheme, std::span<const double> weights, Rng& rng) {
  switch (scheme) {
    case ResamplingScheme::Multinomial:
      return multinomial_resample(weights, weights.size(), rng);
    case ResamplingScheme::Systematic:
      return systematic_resample(weights, rng);
  }
  throw InvalidArgumentError("unknown resampling scheme");
}

}  // namespace smc
