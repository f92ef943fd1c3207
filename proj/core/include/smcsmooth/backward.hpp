#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "smcsmooth/backward_kernel.hpp"
#include "smcsmooth/cost_counter.hpp"
#include "smcsmooth/discrete_sampler.hpp"
#include "smcsmooth/fk_model.hpp"
#include "smcsmooth/particle_cloud.hpp"
#include "smcsmooth/rng.hpp"

namespace smc {

/// How draws from an FFBS row are produced.
enum class FfbsSampler {
  Direct,         ///< O(N) row evaluation and inverse-CDF draw
  PureRejection,  ///< rejection from M(W_{t-1}) until acceptance
  Hybrid,         ///< at most K rejection trials, then a direct draw
};

/// FFBS row W_{t-1}^i m_t(X_{t-1}^i, x_t) / r_t^N(x_t), where `x_t` is a
/// state at time prev.time() + 1. Adds N evaluations to `counter`.
/// Throws DegenerateWeightsError when r_t^N(x_t) underflows to zero.
std::vector<double> ffbs_row(const FeynmanKacModel& model, const ParticleCloud& prev, State x_t,
                             CostCounter& counter);

/// Exact categorical draw from an explicit row by inverse CDF.
std::size_t sample_ffbs_direct(std::span<const double> row, Rng& rng);
std::size_t sample_ffbs_direct(const FeynmanKacModel& model, const ParticleCloud& prev, State x_t,
                               CostCounter& counter, Rng& rng);

/// Rejection sampler with proposal M(W_{t-1}) (drawn from `proposal`, an alias
/// table over prev's weights) and acceptance m_t / M_h. One evaluation per
/// trial. Throws UnsupportedOperationError without a bound and
/// BoundViolationError if an evaluated density exceeds it.
std::size_t sample_ffbs_pure_rejection(const FeynmanKacModel& model, const ParticleCloud& prev, State x_t,
                                       const AliasSampler& proposal, CostCounter& counter, Rng& rng);

/// At most `max_trials` rejection trials, then a direct draw costing N more
/// evaluations. The output law is exactly the FFBS row for any budget.
std::size_t sample_ffbs_hybrid(const FeynmanKacModel& model, const ParticleCloud& prev, State x_t,
                               const AliasSampler& proposal, CostCounter& counter, std::size_t max_trials,
                               Rng& rng);

/// Row i is the point mass at the filtering ancestor A_t^i. No evaluations.
BackwardKernel gt_kernel(const ParticleCloud& cloud);

/// Fully materialised FFBS kernel (N^2 evaluations).
BackwardKernel ffbs_kernel(const FeynmanKacModel& model, const ParticleCloud& prev, const ParticleCloud& cloud,
                           CostCounter& counter);

struct ParisOptions {
  std::size_t n_tilde = 2;
  FfbsSampler sampler = FfbsSampler::Hybrid;
  /// Trial budget of the hybrid sampler; 0 selects K = N.
  std::size_t hybrid_max_trials = 0;
};

/// Row i is (1/N~) sum delta(J^{i,k}) with J^{i,1:N~} i.i.d. FFBS draws.
BackwardKernel paris_kernel(const FeynmanKacModel& model, const ParticleCloud& prev, const ParticleCloud& cloud,
                            const ParisOptions& options, const AliasSampler& proposal, CostCounter& counter,
                            Rng& rng);

/// Runs `n_steps` independent Metropolis-Hastings steps on {0..N-1} targeting
/// the FFBS row of `x_t`, proposing from M(W_{t-1}) and starting at `start`.
/// `start_log_density` is log m_t(X_{t-1}^start, x_t) when already known
/// (the filtering pair); otherwise it is computed without being charged, as
/// the filter's own move defines it. Each step costs one evaluation.
std::size_t imh_backward_sample(const FeynmanKacModel& model, const ParticleCloud& prev, State x_t,
                                std::size_t start, std::size_t n_steps, const AliasSampler& proposal,
                                CostCounter& counter, Rng& rng,
                                std::optional<double> start_log_density = std::nullopt);

/// Row i is (1/N~) sum over the N~ states of an IMH chain started at A_t^i,
/// so N~ - 1 evaluations per row.
BackwardKernel imhp_kernel(const FeynmanKacModel& model, const ParticleCloud& prev, const ParticleCloud& cloud,
                           std::size_t n_tilde, const AliasSampler& proposal, CostCounter& counter, Rng& rng);

/// Offline IMH kernel: each row draw runs `n_steps` fresh IMH steps from the
/// filtering ancestor. The returned kernel references `model`, `prev`,
/// `cloud`, `proposal` and `counter`, which must outlive it.
BackwardKernel imh_kernel(const FeynmanKacModel& model, const ParticleCloud& prev, const ParticleCloud& cloud,
                          std::size_t n_steps, const AliasSampler& proposal, CostCounter& counter);

/// Offline FFBS kernel whose rows are drawn lazily by the chosen sampler.
/// Same lifetime rule as imh_kernel.
BackwardKernel lazy_ffbs_kernel(const FeynmanKacModel& model, const ParticleCloud& prev,
                                const ParticleCloud& cloud, FfbsSampler sampler, std::size_t hybrid_max_trials,
                                const AliasSampler& proposal, CostCounter& counter);

/// Exact one-step IMH transition matrix on {0..N-1} for the FFBS target of
/// `x_t`: P[a, j] = W_j min(1, m_j / m_a) for j != a, rows summing to one.
Eigen::MatrixXd imh_transition_matrix(const FeynmanKacModel& model, const ParticleCloud& prev, State x_t);

/// Output of a forward step that builds its backward kernel on the fly.
struct CoupledForwardStep {
  ParticleCloud cloud;
  BackwardKernel kernel;
  std::size_t pairs = 0;           ///< coupled moves attempted
  std::size_t distinct_pairs = 0;  ///< pairs whose two ancestors differ
  std::size_t met_pairs = 0;       ///< distinct-ancestor pairs whose moves met
};

/// Intractable-density forward step with conditionally independent ancestor
/// pairs and coupled moves; row n is two atoms if the moves met, else one.
CoupledForwardStep itr_forward_step(const FeynmanKacModel& model, const ParticleCloud& prev, Rng& rng);

/// Conditionally correlated variant: ancestors from the Adjacent Resampler,
/// slots (2k, 2k+1) moved by one coupled transition, both endpoints kept.
/// Requires an even number of particles.
CoupledForwardStep itrc_forward_step(const FeynmanKacModel& model, const ParticleCloud& prev, Rng& rng);

}  // namespace smc
