#pragma once

#include <vector>

#include <Eigen/Dense>

#include "smcsmooth/models/linear_gaussian.hpp"

namespace smc {

struct KalmanResult {
  std::vector<Eigen::VectorXd> pred_mean;
  std::vector<Eigen::MatrixXd> pred_cov;
  std::vector<Eigen::VectorXd> filt_mean;
  std::vector<Eigen::MatrixXd> filt_cov;
  std::vector<Eigen::VectorXd> smooth_mean;
  std::vector<Eigen::MatrixXd> smooth_cov;
  double log_likelihood = 0.0;
};

/// Kalman filter and Rauch-Tung-Striebel smoother for y_{0:T}. The
/// log-likelihood uses the prediction-error decomposition. Throws
/// NumericError if an innovation covariance is not positive definite.
KalmanResult kalman_filter_smoother(const LinearGaussianModel& model,
                                    const std::vector<Eigen::VectorXd>& observations);

/// sum_{s <= t} E[X_s[coordinate] | y_{0:T}] for every t (offline targets).
std::vector<double> kalman_additive_reference(const KalmanResult& result, std::size_t coordinate = 0);

/// sum_{s <= t} E[X_s[coordinate] | y_{0:t}] for every t (online targets).
/// Runs one backward smoothing sweep per t, so O(T^2).
std::vector<double> kalman_online_reference(const LinearGaussianModel& model,
                                            const std::vector<Eigen::VectorXd>& observations,
                                            std::size_t coordinate = 0);

}  // namespace smc
