#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "smcsmooth/rng.hpp"

namespace smc {

struct CoupledPair {
  Eigen::VectorXd left;
  Eigen::VectorXd right;
  bool met = false;  ///< true only when left and right are bitwise equal
};

/// Reflection coupling of N(mu_a, sigma_a sigma_a^T) and N(mu_b, sigma_b sigma_b^T):
/// W_b = (I - 2 u u^T) W_a with u the normalised sigma_b^{-1}(mu_a - mu_b).
/// When mu_a == mu_b, u is undefined and common noise W_b = W_a is used.
CoupledPair lindvall_rogers_gaussian(const Eigen::VectorXd& mu_a, const Eigen::VectorXd& mu_b,
                                     const Eigen::MatrixXd& sigma_a, const Eigen::MatrixXd& sigma_b, Rng& rng);

/// Both sides driven by the same standard normal vector.
CoupledPair common_noise_gaussian(const Eigen::VectorXd& mu_a, const Eigen::VectorXd& mu_b,
                                  const Eigen::MatrixXd& sigma_a, const Eigen::MatrixXd& sigma_b, Rng& rng);

/// Modified Lindvall-Rogers coupler: a reflection-coupled pair whose members
/// are swapped for a shared draw from the overlap of the two densities when
/// they fall inside it. Fixed cost per call.
CoupledPair mlr_gaussian_coupler(const Eigen::VectorXd& mu_a, const Eigen::VectorXd& mu_b,
                                 const Eigen::MatrixXd& sigma_a, const Eigen::MatrixXd& sigma_b, Rng& rng);

/// A distribution given by an exact sampler and its log density.
struct CouplingTarget {
  std::function<double(const Eigen::VectorXd&)> log_density;
  std::function<Eigen::VectorXd(Rng&)> sample;
};

/// Rejection maximal coupler. Meets with probability 1 - TV(a, b).
/// `trials`, when given, receives the number of proposals drawn from b.
CoupledPair rejection_maximal_coupling(const CouplingTarget& a, const CouplingTarget& b, Rng& rng,
                                       std::size_t* trials = nullptr);

enum class GaussianCoupler { LindvallRogers, ModifiedLindvallRogers, CommonNoise };

CoupledPair couple_gaussians(GaussianCoupler coupler, const Eigen::VectorXd& mu_a, const Eigen::VectorXd& mu_b,
                             const Eigen::MatrixXd& sigma_a, const Eigen::MatrixXd& sigma_b, Rng& rng);

using DriftFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using DiffusionFunction = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
/// Applied to each sub-chain after every Euler step (e.g. a positivity floor).
using StateProjection = std::function<void(Eigen::VectorXd&)>;

/// Two Euler chains over unit time with step 1 / n_steps, each step coupled by
/// `coupler`. Once the chains are bitwise equal they share noise and stay
/// equal. Throws NumericError on non-finite drift, diffusion or state.
CoupledPair coupled_euler_transition(const DriftFunction& drift, const DiffusionFunction& diffusion,
                                     const Eigen::VectorXd& x0_a, const Eigen::VectorXd& x0_b,
                                     std::size_t n_steps, GaussianCoupler coupler, Rng& rng,
                                     const StateProjection& project = {});

/// Uncoupled Euler chain over unit time; the marginal of each side above.
Eigen::VectorXd euler_transition(const DriftFunction& drift, const DiffusionFunction& diffusion,
                                 const Eigen::VectorXd& x0, std::size_t n_steps, Rng& rng,
                                 const StateProjection& project = {});

/// First grid time k * delta <= horizon at which two coupled Euler chains
/// with step `delta` coincide; empty if they have not met by `horizon`.
std::optional<double> coupled_euler_meeting_time(const DriftFunction& drift, const DiffusionFunction& diffusion,
                                                 const Eigen::VectorXd& x0_a, const Eigen::VectorXd& x0_b,
                                                 double delta, double horizon, GaussianCoupler coupler, Rng& rng);

}  // namespace smc
