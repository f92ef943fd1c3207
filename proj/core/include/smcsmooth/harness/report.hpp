#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "smcsmooth/harness/experiment.hpp"
#include "smcsmooth/models/linear_gaussian.hpp"

namespace smc {

struct Summary {
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::vector<double> q25;
  std::vector<double> median;
  std::vector<double> q75;
  std::vector<double> iqr_squared;
  std::vector<double> mean_ess;
  std::vector<double> mean_cost_per_n;  ///< per t, averaged over replicates
  std::size_t slope_from = 0;
  std::size_t slope_to = 0;
  double slope = 0.0;                   ///< log-log slope of iqr_squared against t
  double mean_cost_per_nt = 0.0;
  double median_cost_per_nt = 0.0;
};

/// Per-t quantiles, squared IQR, ESS and cost of the non-failed replicates,
/// with a log-log slope fit over [from, to] (defaults: T / 5 and T).
/// Throws InvalidArgumentError with fewer than two usable replicates.
Summary summarize(const std::vector<RunRecord>& records, std::size_t n,
                  std::optional<std::size_t> slope_from = std::nullopt,
                  std::optional<std::size_t> slope_to = std::nullopt);

void write_summary_csv(const Summary& summary, std::ostream& out);

struct TailReport {
  std::vector<double> mean_trials_per_particle;  ///< one per replicate
  double median = 0.0;
  double max = 0.0;
  double max_over_median = 0.0;
  std::size_t above_2x = 0;
  std::size_t above_5x = 0;
  std::size_t above_10x = 0;
};

/// Cost divided by N per replicate, at time `time` or averaged over t >= 1.
TailReport tail_report(const std::vector<RunRecord>& records, std::size_t n,
                       std::optional<std::size_t> time = std::nullopt);

void write_tail_report(const TailReport& report, std::ostream& out);

struct HybridGrowthPoint {
  std::size_t n = 0;
  double mean = 0.0;  ///< E[min(tau, N)]
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t draws = 0;
};

struct HybridGrowthReport {
  std::vector<HybridGrowthPoint> points;
  double gamma = 0.0;           ///< fit of mean ~ c N^gamma
  double log_coefficient = 0.0; ///< least-squares c in mean ~ c (log N)^(d/2)
  double log_residual = 0.0;    ///< RMS residual of that fit
  bool monotone = false;        ///< point estimates strictly increase with N
};

/// Estimates E[min(tau, N)] for hybrid rejection draws of the online
/// backward step, over bootstrap filters with N particles on the same data.
HybridGrowthReport hybrid_growth_report(const LinearGaussianModel& model, std::size_t horizon,
                                        const std::vector<std::size_t>& grid, std::size_t replicates,
                                        std::uint64_t seed, std::uint64_t data_seed);

void write_hybrid_growth_report(const HybridGrowthReport& report, std::ostream& out);

}  // namespace smc
