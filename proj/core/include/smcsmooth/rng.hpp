#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace smc {

/// SplitMix64 finaliser; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for stream `stream` of master seed `master`. Distinct (master, stream)
/// pairs give statistically independent generators, so replicate results do
/// not depend on the order in which replicates are executed.
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return mix64(mix64(master) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

/// Random source passed explicitly to every stochastic routine. Not
/// thread-safe; each replicate (or worker) owns one.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng for_stream(std::uint64_t master, std::uint64_t stream) {
    return Rng(split_seed(master, stream));
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1); safe to take the logarithm of.
  double uniform_positive() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return normal_(engine_); }

  /// Uniform integer in [0, n). Requires n > 0.
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  engine_type& engine() noexcept { return engine_; }

 private:
  engine_type engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace smc
