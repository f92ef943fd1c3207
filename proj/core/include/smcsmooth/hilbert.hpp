#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace smc {

__extension__ using HilbertKey = unsigned __int128;

inline constexpr std::size_t kHilbertMaxDim = 8;
inline constexpr unsigned kHilbertBits = 16;

/// Hilbert index of a point on the 2^bits grid in `coords.size()` dimensions.
/// Requires coords.size() * bits <= 128.
HilbertKey hilbert_key(std::span<const std::uint32_t> coords, unsigned bits);

/// Permutation that orders the points by Hilbert index after min-max scaling
/// each axis onto [0, 2^16 - 1]. perm[k] is the original index of the k-th
/// point along the curve; equal keys keep their original order.
/// Throws InvalidArgumentError on NaN coordinates or dim outside [1, 8].
std::vector<std::size_t> hilbert_sort(std::span<const double> points, std::size_t dim);

}  // namespace smc
