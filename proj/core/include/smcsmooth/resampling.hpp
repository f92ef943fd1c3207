#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "smcsmooth/rng.hpp"

namespace smc {

enum class ResamplingScheme { Multinomial, Systematic };

/// N i.i.d. categorical draws from `weights` (alias method).
std::vector<std::size_t> multinomial_resample(std::span<const double> weights, std::size_t n, Rng& rng);

/// Systematic resampling with a single uniform `u` in [0, 1): output slot n
/// holds the index k whose cumulative-weight bracket contains (n + u) / N.
std::vector<std::size_t> systematic_resample(std::span<const double> weights, double u);
std::vector<std::size_t> systematic_resample(std::span<const double> weights, Rng& rng);

/// Adjacent Resampler: systematic resampling followed by a reordering along
/// the Hilbert curve, so consecutive output slots (2k, 2k+1) tend to carry
/// distinct but spatially close particles. The output multiset equals the
/// systematic multiset drawn with the same generator state.
///
/// `states` is particle-major with `dim` coordinates per particle (dim <= 8).
std::vector<std::size_t> adjacent_resample(std::span<const double> states, std::size_t dim,
                                           std::span<const double> weights, Rng& rng);

std::vector<std::size_t> resample(ResamplingScheme scheme, std::span<const double> weights, Rng& rng);

}  // namespace smc
