#include "smcsmooth/gaussian.hpp"

#include <cmath>
#include <numbers>

#include "smcsmooth/errors.hpp"

namespace smc {

GaussianNoise::GaussianNoise(const Eigen::MatrixXd& cov) : dim_(static_cast<std::size_t>(cov.rows())), cov_(cov) {
  if (cov.rows() != cov.cols() || dim_ == 0 || dim_ > kMaxGaussianDim) {
    throw InvalidArgumentError("covariance must be square with dimension in [1, 16]");
  }
  if (!cov.isApprox(cov.transpose(), 1e-12)) throw InvalidArgumentError("covariance is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw InvalidArgumentError("covariance is not positive definite");
  chol_ = llt.matrixL();
  lower_.assign(dim_ * dim_, 0.0);
  double log_det = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (!(chol_(i, i) > 0.0)) throw InvalidArgumentError("covariance is not positive definite");
    log_det += 2.0 * std::log(chol_(i, i));
    for (std::size_t j = 0; j <= i; ++j) lower_[i * dim_ + j] = chol_(i, j);
  }
  log_norm_ = -0.5 * static_cast<double>(dim_) * std::log(2.0 * std::numbers::pi) - 0.5 * log_det;
}

double GaussianNoise::log_density_of_residual(const double* r) const noexcept {
  double z[kMaxGaussianDim];
  double quad = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double* row = lower_.data() + i * dim_;
    double s = r[i];
    for (std::size_t j = 0; j < i; ++j) s -= row[j] * z[j];
    z[i] = s / row[i];
    quad += z[i] * z[i];
  }
  return log_norm_ - 0.5 * quad;
}

void GaussianNoise::sample(Rng& rng, double* out) const {
  double z[kMaxGaussianDim];
  for (std::size_t i = 0; i < dim_; ++i) z[i] = rng.normal();
  for (std::size_t i = 0; i < dim_; ++i) {
    const double* row = lower_.data() + i * dim_;
    double s = 0.0;
    for (std::size_t j = 0; j <= i; ++j) s += row[j] * z[j];
    out[i] = s;
  }
}

double gaussian_log_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw InvalidArgumentError("covariance is not positive definite");
  const Eigen::VectorXd z = llt.matrixL().solve(x - mean);
  const Eigen::MatrixXd l = llt.matrixL();
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  return -0.5 * static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi) - 0.5 * log_det - 0.5 * z.squaredNorm();
}

}  // namespace smc
