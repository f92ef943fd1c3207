#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "smcsmooth/fk_model.hpp"
#include "smcsmooth/gaussian.hpp"
#include "smcsmooth/rng.hpp"

namespace smc {

/// X_t = F_X X_{t-1} + N(0, C_X), Y_t = F_Y X_t + N(0, C_Y),
/// X_0 ~ N(initial_mean, initial_cov).
struct LinearGaussianModel {
  Eigen::MatrixXd fx;
  Eigen::MatrixXd cx;
  Eigen::MatrixXd fy;
  Eigen::MatrixXd cy;
  Eigen::VectorXd initial_mean;
  Eigen::MatrixXd initial_cov;

  std::size_t dim_x() const { return static_cast<std::size_t>(fx.rows()); }
  std::size_t dim_y() const { return static_cast<std::size_t>(fy.rows()); }

  /// Throws InvalidArgumentError on shape mismatch, non-SPD covariance or a
  /// rank-deficient F_X / F_Y.
  void validate() const;
};

/// F_X[i, j] = alpha^(1 + |i - j|), C_X = I, F_Y = I, C_Y = sigma_y2 I,
/// X_0 ~ N(0, I).
LinearGaussianModel guarniero_model(std::size_t dim = 2, double alpha = 0.4, double sigma_y2 = 0.5);

/// Scalar model with F_X = 0.5, C_X = 1, F_Y = 1, C_Y = sigma_y^2 and the
/// stationary initial law N(0, 4/3).
LinearGaussianModel scalar_model(double sigma_y);

struct SimulatedData {
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> observations;
};

/// Draws X_{0:T} and Y_{0:T}.
SimulatedData simulate_data(const LinearGaussianModel& model, std::size_t horizon, Rng& rng);

/// Feynman-Kac form of a linear Gaussian model for fixed observations y_{0:T}:
/// M_t = N(F_X x, C_X), G_t(x) = N(y_t; F_Y x, C_Y). Supplies the transition
/// density with its bound, the locally optimal proposal N(x_t | x_{t-1}, y_t)
/// and a maximal-coupling transition sampler.
class LinearGaussianFK final : public FeynmanKacModel {
 public:
  LinearGaussianFK(LinearGaussianModel model, std::vector<Eigen::VectorXd> observations);

  const LinearGaussianModel& model() const noexcept { return model_; }
  const std::vector<Eigen::VectorXd>& observations() const noexcept { return observations_; }

  std::size_t dim() const override { return model_.dim_x(); }
  std::size_t horizon() const override { return observations_.size() - 1; }

  void sample_initial(Rng& rng, MutableState out) const override;
  void sample_transition(std::size_t t, State prev, Rng& rng, MutableState out) const override;
  double log_potential(std::size_t t, State x) const override;

  bool has_transition_density() const override { return true; }
  double log_transition_density(std::size_t t, State prev, State x) const override;
  std::optional<double> log_transition_bound(std::size_t t) const override;

  bool has_guided_proposal() const override { return true; }
  void sample_guided(std::size_t t, State prev, Rng& rng, MutableState out) const override;
  double log_guided_density(std::size_t t, State prev, State x) const override;

  /// Mean of the optimal proposal; its covariance is proposal_covariance().
  Eigen::VectorXd proposal_mean(std::size_t t, const Eigen::VectorXd& prev) const;
  const Eigen::MatrixXd& proposal_covariance() const noexcept { return proposal_.covariance(); }

  bool has_coupled_transition() const override { return true; }
  bool sample_coupled_transition(std::size_t t, State prev_a, State prev_b, Rng& rng, MutableState out_a,
                                 MutableState out_b) const override;

 private:
  void mean_of(State prev, double* out) const;

  LinearGaussianModel model_;
  std::vector<Eigen::VectorXd> observations_;
  GaussianNoise initial_;
  GaussianNoise transition_;
  GaussianNoise emission_;
  GaussianNoise proposal_;
  Eigen::MatrixXd proposal_gain_x_;  // P C_X^{-1} F_X
  Eigen::MatrixXd proposal_gain_y_;  // P F_Y^T C_Y^{-1}
  std::vector<double> fx_;           // row-major F_X
  std::vector<double> fy_;           // row-major F_Y
};

}  // namespace smc
