#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "smcsmooth/rng.hpp"

namespace smc {

/// Linear-interpolation sample quantile (R type 7). Throws on empty input.
double quantile(std::span<const double> values, double p);
double median(std::span<const double> values);
double mean(std::span<const double> values);
/// Unbiased sample variance; zero for fewer than two values.
double variance(std::span<const double> values);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares fit of y on x.
LineFit least_squares(std::span<const double> x, std::span<const double> y);

/// Least squares of log y on log x over points with positive x and y.
LineFit log_log_fit(std::span<const double> x, std::span<const double> y);

/// Standard error of the sample median from `resamples` bootstrap resamples.
double bootstrap_median_se(std::span<const double> values, std::size_t resamples, Rng& rng);

}  // namespace smc
