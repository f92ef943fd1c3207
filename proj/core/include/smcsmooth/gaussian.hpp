#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "smcsmooth/rng.hpp"

namespace smc {

inline constexpr std::size_t kMaxGaussianDim = 16;

/// N(0, cov) with a cached Cholesky factor. log_density_of_residual is a
/// plain triangular solve on a stack buffer, cheap enough for the N^2 loops
/// of the backward kernels.
class GaussianNoise {
 public:
  GaussianNoise() = default;
  /// Throws InvalidArgumentError if `cov` is not symmetric positive definite
  /// or its dimension exceeds kMaxGaussianDim.
  explicit GaussianNoise(const Eigen::MatrixXd& cov);

  std::size_t dim() const noexcept { return dim_; }
  const Eigen::MatrixXd& covariance() const noexcept { return cov_; }
  const Eigen::MatrixXd& cholesky() const noexcept { return chol_; }

  /// -0.5 d log(2 pi) - 0.5 log det(cov).
  double log_normalizer() const noexcept { return log_norm_; }

  /// log N(r; 0, cov) for a residual r of length dim().
  double log_density_of_residual(const double* r) const noexcept;

  /// Writes L z with z standard normal, so out ~ N(0, cov).
  void sample(Rng& rng, double* out) const;

 private:
  std::size_t dim_ = 0;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd chol_;
  std::vector<double> lower_;  // row-major lower triangle of chol_
  double log_norm_ = 0.0;
};

/// log N(x; mean, cov), computed from scratch. Convenience for tests and
/// setup code, not for inner loops.
double gaussian_log_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov);

}  // namespace smc
