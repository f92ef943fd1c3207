#include "smcsmooth/harness/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "smcsmooth/errors.hpp"

namespace smc {

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw InvalidArgumentError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgumentError("quantile level must lie in [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double median(std::span<const double> values) { return quantile(values, 0.5); }

double mean(std::span<const double> values) {
  if (values.empty()) throw InvalidArgumentError("mean of an empty sample");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double variance(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double s = 0.0;
  for (double v : values) s += (v - m) * (v - m);
  return s / static_cast<double>(values.size() - 1);
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgumentError("line fit needs two or more paired points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgumentError("line fit needs distinct x values");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

LineFit log_log_fit(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  return least_squares(lx, ly);
}

double bootstrap_median_se(std::span<const double> values, std::size_t resamples, Rng& rng) {
  if (values.empty() || resamples < 2) throw InvalidArgumentError("bootstrap needs data and two or more resamples");
  std::vector<double> medians(resamples);
  std::vector<double> draw(values.size());
  for (auto& m : medians) {
    for (auto& v : draw) v = values[rng.index(values.size())];
    m = median(draw);
  }
  return std::sqrt(variance(medians));
}

}  // namespace smc
