#include "smcsmooth/models/kalman.hpp"

#include <cmath>
#include <numbers>

#include "smcsmooth/errors.hpp"

namespace smc {

KalmanResult kalman_filter_smoother(const LinearGaussianModel& model,
                                    const std::vector<Eigen::VectorXd>& observations) {
  model.validate();
  if (observations.empty()) throw InvalidArgumentError("need at least one observation");
  const std::size_t n_times = observations.size();
  const Eigen::Index dx = model.fx.rows();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dx, dx);
  KalmanResult r;
  r.pred_mean.resize(n_times);
  r.pred_cov.resize(n_times);
  r.filt_mean.resize(n_times);
  r.filt_cov.resize(n_times);

  for (std::size_t t = 0; t < n_times; ++t) {
    if (t == 0) {
      r.pred_mean[0] = model.initial_mean;
      r.pred_cov[0] = model.initial_cov;
    } else {
      r.pred_mean[t] = model.fx * r.filt_mean[t - 1];
      r.pred_cov[t] = model.fx * r.filt_cov[t - 1] * model.fx.transpose() + model.cx;
      r.pred_cov[t] = 0.5 * (r.pred_cov[t] + r.pred_cov[t].transpose());
    }
    const Eigen::VectorXd innovation = observations[t] - model.fy * r.pred_mean[t];
    Eigen::MatrixXd s = model.fy * r.pred_cov[t] * model.fy.transpose() + model.cy;
    s = 0.5 * (s + s.transpose());
    const Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success) throw NumericError("innovation covariance is not positive definite");
    const Eigen::MatrixXd gain = llt.solve(model.fy * r.pred_cov[t]).transpose();
    r.filt_mean[t] = r.pred_mean[t] + gain * innovation;
    const Eigen::MatrixXd a = id - gain * model.fy;
    r.filt_cov[t] = a * r.pred_cov[t] * a.transpose() + gain * model.cy * gain.transpose();
    const Eigen::MatrixXd l = llt.matrixL();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    const Eigen::VectorXd z = l.triangularView<Eigen::Lower>().solve(innovation);
    r.log_likelihood += -0.5 * static_cast<double>(innovation.size()) * std::log(2.0 * std::numbers::pi) -
                        0.5 * log_det - 0.5 * z.squaredNorm();
  }

  r.smooth_mean = r.filt_mean;
  r.smooth_cov = r.filt_cov;
  for (std::size_t t = n_times - 1; t-- > 0;) {
    const Eigen::MatrixXd j =
        r.pred_cov[t + 1].llt().solve(model.fx * r.filt_cov[t]).transpose();
    r.smooth_mean[t] = r.filt_mean[t] + j * (r.smooth_mean[t + 1] - r.pred_mean[t + 1]);
    r.smooth_cov[t] = r.filt_cov[t] + j * (r.smooth_cov[t + 1] - r.pred_cov[t + 1]) * j.transpose();
    r.smooth_cov[t] = 0.5 * (r.smooth_cov[t] + r.smooth_cov[t].transpose());
  }
  return r;
}

std::vector<double> kalman_additive_reference(const KalmanResult& result, std::size_t coordinate) {
  std::vector<double> out(result.smooth_mean.size());
  double running = 0.0;
  for (std::size_t t = 0; t < out.size(); ++t) {
    running += result.smooth_mean[t](static_cast<Eigen::Index>(coordinate));
    out[t] = running;
  }
  return out;
}

std::vector<double> kalman_online_reference(const LinearGaussianModel& model,
                                            const std::vector<Eigen::VectorXd>& observations,
                                            std::size_t coordinate) {
  const KalmanResult r = kalman_filter_smoother(model, observations);
  const auto c = static_cast<Eigen::Index>(coordinate);
  std::vector<Eigen::MatrixXd> gains(observations.size());
  for (std::size_t t = 0; t + 1 < observations.size(); ++t) {
    gains[t] = r.pred_cov[t + 1].llt().solve(model.fx * r.filt_cov[t]).transpose();
  }
  std::vector<double> out(observations.size());
  for (std::size_t t = 0; t < observations.size(); ++t) {
    Eigen::VectorXd mean = r.filt_mean[t];
    double total = mean(c);
    for (std::size_t s = t; s-- > 0;) {
      mean = r.filt_mean[s] + gains[s] * (mean - r.pred_mean[s + 1]);
      total += mean(c);
    }
    out[t] = total;
  }
  return out;
}

}  // namespace smc
