#pragma once

#include <array>
#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>

namespace smc {

/// Tally of transition-density evaluations, the execution-time unit used by
/// every benchmark. Counts only grow; nothing resets them implicitly.
///
/// Rejection samplers additionally record how many trials each draw took.
/// Trial counts are bucketed by floor(log2(trials)) so heavy tails stay
/// visible without storing every draw.
class CostCounter {
 public:
  static constexpr std::size_t kBuckets = 64;

  CostCounter() = default;
  CostCounter(const CostCounter&) = delete;
  CostCounter& operator=(const CostCounter&) = delete;

  void add_evaluations(std::uint64_t n) noexcept {
    evaluations_.fetch_add(n, std::memory_order_relaxed);
  }

  /// Records one completed draw that needed `trials` rejection trials.
  void record_trials(std::uint64_t trials) noexcept {
    draws_.fetch_add(1, std::memory_order_relaxed);
    trials_.fetch_add(trials, std::memory_order_relaxed);
    const auto bucket = trials == 0 ? 0 : static_cast<std::size_t>(std::bit_width(trials) - 1);
    histogram_[bucket].fetch_add(1, std::memory_order_relaxed);
    std::uint64_t seen = max_trials_.load(std::memory_order_relaxed);
    while (trials > seen && !max_trials_.compare_exchange_weak(seen, trials, std::memory_order_relaxed)) {
    }
  }

  /// Records a draw that exhausted its trial budget and fell back to direct sampling.
  void record_fallback() noexcept { fallbacks_.fetch_add(1, std::memory_order_relaxed); }

  std::uint64_t evaluations() const noexcept { return evaluations_.load(std::memory_order_relaxed); }
  std::uint64_t draws() const noexcept { return draws_.load(std::memory_order_relaxed); }
  std::uint64_t trials() const noexcept { return trials_.load(std::memory_order_relaxed); }
  std::uint64_t fallbacks() const noexcept { return fallbacks_.load(std::memory_order_relaxed); }
  std::uint64_t max_trials() const noexcept { return max_trials_.load(std::memory_order_relaxed); }

  /// Number of draws whose trial count t satisfies 2^k <= t < 2^(k+1).
  std::uint64_t histogram_bucket(std::size_t k) const noexcept {
    return histogram_[k].load(std::memory_order_relaxed);
  }

 private:
  std::atomic<std::uint64_t> evaluations_{0};
  std::atomic<std::uint64_t> draws_{0};
  std::atomic<std::uint64_t> trials_{0};
  std::atomic<std::uint64_t> fallbacks_{0};
  std::atomic<std::uint64_t> max_trials_{0};
  std::array<std::atomic<std::uint64_t>, kBuckets> histogram_{};
};

}  // namespace smc
