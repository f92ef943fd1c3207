#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace smc {

/// One time slice of a particle filter: states, normalised weights, the
/// ancestor of each particle at the previous time (empty at t = 0) and the
/// log of the likelihood increment, log(mean of unnormalised potentials).
///
/// States are stored particle-major: particle n occupies
/// [n * dim, (n + 1) * dim).
class ParticleCloud {
 public:
  ParticleCloud() = default;

  /// Normalises `log_weights` by max-shifted log-sum-exp. Throws
  /// DegenerateWeightsError when every weight is zero and NumericError on NaN
  /// states or weights.
  static ParticleCloud from_log_weights(std::size_t t, std::size_t dim, std::vector<double> states,
                                        std::span<const double> log_weights, std::vector<std::size_t> ancestors);

  std::size_t time() const noexcept { return t_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return weights_.size(); }

  std::span<const double> state(std::size_t n) const noexcept { return {states_.data() + n * dim_, dim_}; }
  std::span<const double> states() const noexcept { return states_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double weight(std::size_t n) const noexcept { return weights_[n]; }
  std::span<const std::size_t> ancestors() const noexcept { return ancestors_; }
  bool has_ancestors() const noexcept { return !ancestors_.empty(); }
  double log_likelihood_increment() const noexcept { return log_likelihood_increment_; }

  /// Checks every documented invariant; throws on the first violation.
  void validate() const;

 private:
  std::size_t t_ = 0;
  std::size_t dim_ = 1;
  std::vector<double> states_;
  std::vector<double> weights_;
  std::vector<std::size_t> ancestors_;
  double log_likelihood_increment_ = 0.0;
};

/// Effective sample size 1 / sum W_i^2 of normalised weights; lies in [1, N].
double ess(std::span<const double> weights);

}  // namespace smc
