#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "smcsmooth/backward.hpp"
#include "smcsmooth/backward_kernel.hpp"
#include "smcsmooth/cost_counter.hpp"
#include "smcsmooth/filter.hpp"
#include "smcsmooth/fk_model.hpp"
#include "smcsmooth/particle_cloud.hpp"
#include "smcsmooth/resampling.hpp"
#include "smcsmooth/rng.hpp"

namespace smc {

/// phi_t(x_{0:t}) = psi_0(x_0) + sum_{s=1}^t psi_s(x_{s-1}, x_s).
struct AdditiveFunction {
  std::function<double(State x0)> initial;
  std::function<double(std::size_t t, State prev, State x)> increment;

  /// psi_s = x_s[coordinate] - offset for every s.
  static AdditiveFunction coordinate_sum(std::size_t coordinate = 0, double offset = 0.0);
};

/// Partial expectations S_t^N[i] of phi_t given the last index i.
struct SmoothingStatVector {
  std::size_t t = 0;
  std::vector<double> values;
};

struct TrajectoryDraw {
  std::vector<std::size_t> indices;  ///< I_0 .. I_T
  std::vector<double> states;        ///< (T + 1) x dim, time-major
};

/// Draws n_traj paths: I_T ~ M(W_T), then I_{t-1} ~ B_t(I_t, .). Paths are
/// drawn one time layer at a time; `after_layer(t)` (optional) runs once the
/// indices at time t - 1 are known, for per-time cost bookkeeping.
/// kernels[t - 1] is B_t.
std::vector<TrajectoryDraw> offline_smoother(const std::vector<ParticleCloud>& clouds,
                                             const std::vector<BackwardKernel>& kernels, std::size_t n_traj,
                                             Rng& rng, const std::function<void(std::size_t t)>& after_layer = {});

/// (1/n) sum_n phi(X_s^{I_s^n}).
double fixed_marginal_estimate(const std::vector<TrajectoryDraw>& trajectories, std::size_t s, std::size_t dim,
                               const std::function<double(State)>& phi);

/// (1/n) sum_n phi_t along each drawn path.
double trajectory_additive_estimate(const std::vector<TrajectoryDraw>& trajectories, std::size_t t,
                                    std::size_t dim, const AdditiveFunction& f);

SmoothingStatVector initial_statistics(const ParticleCloud& cloud0, const AdditiveFunction& f);

/// S_t[i] = sum_j B_t[i, j] (S_{t-1}[j] + psi_t(X_{t-1}^j, X_t^i)).
/// Requires a materialised kernel. Row sums are compensated.
SmoothingStatVector online_update(const SmoothingStatVector& prev_stats, const BackwardKernel& kernel,
                                  const AdditiveFunction& f, const ParticleCloud& prev, const ParticleCloud& cloud);

/// sum_n W_t^n S_t[n], compensated.
double additive_estimate(const ParticleCloud& cloud, const SmoothingStatVector& stats);

enum class BackwardMethod { GenealogyTracking, FfbsDense, Paris, Imhp, Itr, Itrc };

struct OnlineOptions {
  FilterKind filter = FilterKind::Bootstrap;
  BackwardMethod method = BackwardMethod::Paris;
  std::size_t n_tilde = 2;
  FfbsSampler sampler = FfbsSampler::Hybrid;
  std::size_t hybrid_max_trials = 0;  ///< 0 selects K = N
  ResamplingScheme resampling = ResamplingScheme::Systematic;
};

/// Filter plus online additive smoother, advanced one time step at a time.
/// Keeps only the current and previous clouds. The model must outlive it.
class OnlineSmoother {
 public:
  OnlineSmoother(const FeynmanKacModel& model, AdditiveFunction f, OnlineOptions options, std::size_t n, Rng& rng);

  /// Advances to the next time. Throws InvalidArgumentError past the horizon.
  void step(Rng& rng);

  std::size_t time() const noexcept { return cloud_.time(); }
  double estimate() const { return additive_estimate(cloud_, stats_); }
  const ParticleCloud& cloud() const noexcept { return cloud_; }
  const SmoothingStatVector& statistics() const noexcept { return stats_; }
  const CostCounter& cost() const noexcept { return *counter_; }

  /// Coupled-move tallies of the ITR/ITRC forward steps so far.
  std::uint64_t coupled_pairs() const noexcept { return distinct_pairs_; }
  std::uint64_t met_pairs() const noexcept { return met_pairs_; }

 private:
  const FeynmanKacModel& model_;
  AdditiveFunction f_;
  OnlineOptions options_;
  ParticleCloud cloud_;
  SmoothingStatVector stats_;
  std::unique_ptr<CostCounter> counter_;
  std::uint64_t distinct_pairs_ = 0;
  std::uint64_t met_pairs_ = 0;
};

struct ParisState {
  ParticleCloud cloud;
  SmoothingStatVector stats;
};

/// One step of the concrete PaRIS algorithm: bootstrap move, N~ backward
/// draws per particle, statistic update. Consumes random numbers exactly as
/// bootstrap_step, paris_kernel and online_update called in sequence.
ParisState paris_online_step(const FeynmanKacModel& model, const ParisState& state, const AdditiveFunction& f,
                             const ParisOptions& options, ResamplingScheme scheme, CostCounter& counter, Rng& rng);

/// Runs the filter from time 0 to the horizon and keeps every cloud.
/// Throws StorageBudgetError if (T + 1) N dim exceeds `max_stored_values`.
std::vector<ParticleCloud> forward_pass(const FeynmanKacModel& model, std::size_t n, FilterKind filter,
                                        ResamplingScheme scheme, Rng& rng,
                                        std::size_t max_stored_values = std::size_t{1} << 28);

}  // namespace smc
