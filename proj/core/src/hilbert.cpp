#include "smcsmooth/hilbert.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "smcsmooth/errors.hpp"

namespace smc {

HilbertKey hilbert_key(std::span<const std::uint32_t> coords, unsigned bits) {
  const std::size_t n = coords.size();
  if (n == 0 || n > kHilbertMaxDim || bits == 0 || bits > 32 || n * bits > 128) {
    throw InvalidArgumentError("unsupported Hilbert key dimensions");
  }
  std::array<std::uint32_t, kHilbertMaxDim> x{};
  std::copy(coords.begin(), coords.end(), x.begin());

  // Skilling's axes-to-transpose transform.
  const std::uint32_t top = std::uint32_t{1} << (bits - 1);
  for (std::uint32_t q = top; q > 1; q >>= 1) {
    const std::uint32_t p = q - 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] & q) {
        x[0] ^= p;
      } else {
        const std::uint32_t t = (x[0] ^ x[i]) & p;
        x[0] ^= t;
        x[i] ^= t;
      }
    }
  }
  for (std::size_t i = 1; i < n; ++i) x[i] ^= x[i - 1];
  std::uint32_t t = 0;
  for (std::uint32_t q = top; q > 1; q >>= 1) {
    if (x[n - 1] & q) t ^= q - 1;
  }
  for (std::size_t i = 0; i < n; ++i) x[i] ^= t;

  HilbertKey key = 0;
  for (int b = static_cast<int>(bits) - 1; b >= 0; --b) {
    for (std::size_t i = 0; i < n; ++i) key = (key << 1) | ((x[i] >> b) & 1u);
  }
  return key;
}

std::vector<std::size_t> hilbert_sort(std::span<const double> points, std::size_t dim) {
  if (dim == 0 || dim > kHilbertMaxDim) throw InvalidArgumentError("Hilbert sort supports 1 to 8 dimensions");
  if (points.size() % dim != 0) throw InvalidArgumentError("point buffer is not a multiple of dim");
  for (double v : points) {
    if (std::isnan(v)) throw InvalidArgumentError("NaN coordinate in Hilbert sort");
  }
  const std::size_t n = points.size() / dim;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  if (dim == 1) {
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
    return perm;
  }

  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      lo[d] = std::min(lo[d], points[i * dim + d]);
      hi[d] = std::max(hi[d], points[i * dim + d]);
    }
  }
  const double cells = static_cast<double>((std::uint32_t{1} << kHilbertBits) - 1);
  std::vector<HilbertKey> keys(n);
  std::array<std::uint32_t, kHilbertMaxDim> grid{};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double span = hi[d] - lo[d];
      const double scaled = span > 0.0 ? (points[i * dim + d] - lo[d]) / span : 0.0;
      grid[d] = static_cast<std::uint32_t>(std::lround(scaled * cells));
    }
    keys[i] = hilbert_key({grid.data(), dim}, kHilbertBits);
  }
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  return perm;
}

}  // namespace smc
