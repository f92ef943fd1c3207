#include "smcsmooth/particle_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "smcsmooth/errors.hpp"

namespace smc {

ParticleCloud ParticleCloud::from_log_weights(std::size_t t, std::size_t dim, std::vector<double> states,
                                              std::span<const double> log_weights,
                                              std::vector<std::size_t> ancestors) {
  const std::size_t n = log_weights.size();
  if (n == 0) throw InvalidArgumentError("particle cloud needs at least one particle");
  if (dim == 0 || states.size() != n * dim) throw InvalidArgumentError("state buffer does not match N * dim");
  if (!ancestors.empty() && ancestors.size() != n) throw InvalidArgumentError("ancestor count does not match N");
  for (double x : states) {
    if (!std::isfinite(x)) throw NumericError("non-finite particle state at time " + std::to_string(t));
  }

  double max_lw = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights) {
    if (std::isnan(lw) || lw == std::numeric_limits<double>::infinity()) {
      throw NumericError("invalid log weight at time " + std::to_string(t));
    }
    max_lw = std::max(max_lw, lw);
  }
  if (max_lw == -std::numeric_limits<double>::infinity()) {
    throw DegenerateWeightsError("all potentials are zero at time " + std::to_string(t));
  }

  ParticleCloud cloud;
  cloud.t_ = t;
  cloud.dim_ = dim;
  cloud.states_ = std::move(states);
  cloud.ancestors_ = std::move(ancestors);
  cloud.weights_.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cloud.weights_[i] = std::exp(log_weights[i] - max_lw);
    total += cloud.weights_[i];
  }
  for (double& w : cloud.weights_) w /= total;
  cloud.log_likelihood_increment_ = max_lw + std::log(total / static_cast<double>(n));
  return cloud;
}

void ParticleCloud::validate() const {
  const std::size_t n = size();
  if (n == 0) throw InvalidArgumentError("empty particle cloud");
  if (states_.size() != n * dim_) throw InvalidArgumentError("state buffer does not match N * dim");
  double total = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) throw NumericError("invalid particle weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw NumericError("weights do not sum to one");
  for (double x : states_) {
    if (!std::isfinite(x)) throw NumericError("non-finite particle state");
  }
  if (has_ancestors()) {
    if (ancestors_.size() != n) throw InvalidArgumentError("ancestor count does not match N");
    for (std::size_t a : ancestors_) {
      if (a >= n) throw InvalidArgumentError("ancestor index out of range");
    }
  }
  if (!std::isfinite(log_likelihood_increment_)) throw NumericError("non-finite likelihood increment");
}

double ess(std::span<const double> weights) {
  double sum_sq = 0.0;
  for (double w : weights) sum_sq += w * w;
  return 1.0 / sum_sq;
}

}  // namespace smc
