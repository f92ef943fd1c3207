#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "smcsmooth/coupling.hpp"
#include "smcsmooth/fk_model.hpp"
#include "smcsmooth/gaussian.hpp"
#include "smcsmooth/rng.hpp"

namespace smc {

/// Stochastic Lotka-Volterra system
///   dX0 = [b0 X0 - t0 X0^2 / 2 - t1 X0 X1] dt + X0 dE0
///   dX1 = [-b1 X1 + t1 X0 X1] dt + X1 dE1,   E = Gamma W,
/// observed at integer times as log X + N(0, obs_cov).
struct LotkaVolterraParams {
  double beta0 = 0.3125;
  double beta1 = 0.25;
  double tau0 = 1.0 / 800.0;
  double tau1 = 1.0 / 400.0;
  Eigen::Matrix2d noise_cov = (Eigen::Matrix2d() << 0.01, 0.005, 0.005, 0.01).finished();
  Eigen::Matrix2d obs_cov = (Eigen::Matrix2d() << 0.04, 0.02, 0.02, 0.04).finished();
  Eigen::Vector2d initial_mean = Eigen::Vector2d(100.0, 100.0);
  Eigen::Matrix2d initial_cov = (Eigen::Matrix2d() << 100.0, 50.0, 50.0, 100.0).finished();
  std::size_t n_steps = 10;
  double floor = 1e-6;

  void validate() const;
};

Eigen::Vector2d lv_drift(const LotkaVolterraParams& p, const Eigen::Vector2d& x);
/// diag(x) Gamma with Gamma the lower Cholesky factor of noise_cov.
Eigen::Matrix2d lv_diffusion(const LotkaVolterraParams& p, const Eigen::Vector2d& x);

struct LvData {
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> observations;
};

LvData simulate_lv(const LotkaVolterraParams& params, std::size_t horizon, Rng& rng);

/// Feynman-Kac form of the Euler-discretised system. The transition density
/// is intractable; coupled transitions use the MLR coupler at every Euler
/// step. Coordinates below `floor` after a step are clamped to it and counted.
class LotkaVolterraFK final : public FeynmanKacModel {
 public:
  LotkaVolterraFK(LotkaVolterraParams params, std::vector<Eigen::VectorXd> observations,
                  GaussianCoupler coupler = GaussianCoupler::ModifiedLindvallRogers);

  const LotkaVolterraParams& params() const noexcept { return params_; }

  std::size_t dim() const override { return 2; }
  std::size_t horizon() const override { return observations_.size() - 1; }

  void sample_initial(Rng& rng, MutableState out) const override;
  void sample_transition(std::size_t t, State prev, Rng& rng, MutableState out) const override;
  double log_potential(std::size_t t, State x) const override;

  bool has_coupled_transition() const override { return true; }
  bool sample_coupled_transition(std::size_t t, State prev_a, State prev_b, Rng& rng, MutableState out_a,
                                 MutableState out_b) const override;

  std::uint64_t clamp_count() const noexcept { return clamps_.load(std::memory_order_relaxed); }

 private:
  LotkaVolterraParams params_;
  std::vector<Eigen::VectorXd> observations_;
  GaussianCoupler coupler_;
  GaussianNoise initial_;
  GaussianNoise emission_;
  DriftFunction drift_;
  DiffusionFunction diffusion_;
  StateProjection project_;
  mutable std::atomic<std::uint64_t> clamps_{0};
};

}  // namespace smc
