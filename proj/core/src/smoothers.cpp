#include "smcsmooth/smoothers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "smcsmooth/discrete_sampler.hpp"
#include "smcsmooth/errors.hpp"

namespace smc {

namespace {

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

AdditiveFunction AdditiveFunction::coordinate_sum(std::size_t coordinate, double offset) {
  AdditiveFunction f;
  f.initial = [coordinate, offset](State x) { return x[coordinate] - offset; };
  f.increment = [coordinate, offset](std::size_t, State, State x) { return x[coordinate] - offset; };
  return f;
}

std::vector<TrajectoryDraw> offline_smoother(const std::vector<ParticleCloud>& clouds,
                                             const std::vector<BackwardKernel>& kernels, std::size_t n_traj,
                                             Rng& rng, const std::function<void(std::size_t t)>& after_layer) {
  if (clouds.empty()) throw InvalidArgumentError("offline smoothing needs at least one cloud");
  const std::size_t horizon = clouds.size() - 1;
  if (kernels.size() != horizon) throw InvalidArgumentError("need one backward kernel per time step");
  const std::size_t d = clouds.front().dim();

  std::vector<std::vector<std::size_t>> layers(horizon + 1, std::vector<std::size_t>(n_traj));
  const AliasSampler terminal(clouds.back().weights());
  for (auto& i : layers[horizon]) i = terminal.sample(rng);
  for (std::size_t t = horizon; t >= 1; --t) {
    const BackwardKernel& kernel = kernels[t - 1];
    if (kernel.time() != t) throw InvalidArgumentError("backward kernel time does not match its slot");
    for (std::size_t n = 0; n < n_traj; ++n) layers[t - 1][n] = kernel.sample(layers[t][n], rng);
    if (after_layer) after_layer(t);
  }

  std::vector<TrajectoryDraw> out(n_traj);
  for (std::size_t n = 0; n < n_traj; ++n) {
    TrajectoryDraw& draw = out[n];
    draw.indices.resize(horizon + 1);
    draw.states.resize((horizon + 1) * d);
    for (std::size_t t = 0; t <= horizon; ++t) {
      const std::size_t i = layers[t][n];
      draw.indices[t] = i;
      const State x = clouds[t].state(i);
      std::copy(x.begin(), x.end(), draw.states.begin() + static_cast<std::ptrdiff_t>(t * d));
    }
  }
  return out;
}

double fixed_marginal_estimate(const std::vector<TrajectoryDraw>& trajectories, std::size_t s, std::size_t dim,
                               const std::function<double(State)>& phi) {
  if (trajectories.empty()) throw InvalidArgumentError("no trajectories");
  CompensatedSum sum;
  for (const auto& draw : trajectories) sum.add(phi(State{draw.states.data() + s * dim, dim}));
  return sum.value() / static_cast<double>(trajectories.size());
}

double trajectory_additive_estimate(const std::vector<TrajectoryDraw>& trajectories, std::size_t t,
                                    std::size_t dim, const AdditiveFunction& f) {
  if (trajectories.empty()) throw InvalidArgumentError("no trajectories");
  CompensatedSum total;
  for (const auto& draw : trajectories) {
    const double* x = draw.states.data();
    CompensatedSum path;
    path.add(f.initial(State{x, dim}));
    for (std::size_t s = 1; s <= t; ++s) path.add(f.increment(s, State{x + (s - 1) * dim, dim}, State{x + s * dim, dim}));
    total.add(path.value());
  }
  return total.value() / static_cast<double>(trajectories.size());
}

SmoothingStatVector initial_statistics(const ParticleCloud& cloud0, const AdditiveFunction& f) {
  SmoothingStatVector stats;
  stats.t = cloud0.time();
  stats.values.resize(cloud0.size());
  for (std::size_t i = 0; i < cloud0.size(); ++i) stats.values[i] = f.initial(cloud0.state(i));
  return stats;
}

SmoothingStatVector online_update(const SmoothingStatVector& prev_stats, const BackwardKernel& kernel,
                                  const AdditiveFunction& f, const ParticleCloud& prev, const ParticleCloud& cloud) {
  if (!kernel.materialized()) throw InvalidArgumentError("online update needs a materialised kernel");
  if (prev_stats.values.size() != prev.size() || kernel.prev_size() != prev.size() ||
      kernel.rows() != cloud.size()) {
    throw InvalidArgumentError("dimension mismatch in online update");
  }
  const std::size_t t = cloud.time();
  SmoothingStatVector stats;
  stats.t = t;
  stats.values.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const State x = cloud.state(i);
    const auto support = kernel.support(i);
    const auto probs = kernel.probabilities(i);
    CompensatedSum sum;
    for (std::size_t k = 0; k < support.size(); ++k) {
      const std::size_t j = support[k];
      sum.add(probs[k] * (prev_stats.values[j] + f.increment(t, prev.state(j), x)));
    }
    stats.values[i] = sum.value();
  }
  return stats;
}

double additive_estimate(const ParticleCloud& cloud, const SmoothingStatVector& stats) {
  if (stats.values.size() != cloud.size()) throw InvalidArgumentError("dimension mismatch in additive estimate");
  CompensatedSum sum;
  for (std::size_t i = 0; i < cloud.size(); ++i) sum.add(cloud.weight(i) * stats.values[i]);
  return sum.value();
}

OnlineSmoother::OnlineSmoother(const FeynmanKacModel& model, AdditiveFunction f, OnlineOptions options,
                               std::size_t n, Rng& rng)
    : model_(model), f_(std::move(f)), options_(options), counter_(std::make_unique<CostCounter>()) {
  const bool needs_density = options_.method == BackwardMethod::FfbsDense ||
                             options_.method == BackwardMethod::Paris || options_.method == BackwardMethod::Imhp;
  if (needs_density && !model_.has_transition_density()) {
    throw UnsupportedOperationError("backward method needs a tractable transition density");
  }
  if ((options_.method == BackwardMethod::Itr || options_.method == BackwardMethod::Itrc) &&
      !model_.has_coupled_transition()) {
    throw UnsupportedOperationError("ITR/ITRC need a coupled transition sampler");
  }
  if (options_.method == BackwardMethod::Itrc && n % 2 != 0) {
    throw InvalidArgumentError("ITRC needs an even number of particles");
  }
  cloud_ = initial_cloud(model_, n, rng);
  stats_ = initial_statistics(cloud_, f_);
}

void OnlineSmoother::step(Rng& rng) {
  if (cloud_.time() >= model_.horizon()) throw InvalidArgumentError("smoother advanced past the model horizon");
  ParticleCloud next;
  BackwardKernel kernel;
  switch (options_.method) {
    case BackwardMethod::Itr:
    case BackwardMethod::Itrc: {
      CoupledForwardStep s = options_.method == BackwardMethod::Itr ? itr_forward_step(model_, cloud_, rng)
                                                                     : itrc_forward_step(model_, cloud_, rng);
      distinct_pairs_ += s.distinct_pairs;
      met_pairs_ += s.met_pairs;
      next = std::move(s.cloud);
      kernel = std::move(s.kernel);
      break;
    }
    case BackwardMethod::GenealogyTracking:
      next = filter_step(options_.filter, model_, cloud_, options_.resampling, rng);
      kernel = gt_kernel(next);
      break;
    case BackwardMethod::FfbsDense:
      next = filter_step(options_.filter, model_, cloud_, options_.resampling, rng);
      kernel = ffbs_kernel(model_, cloud_, next, *counter_);
      break;
    case BackwardMethod::Paris: {
      next = filter_step(options_.filter, model_, cloud_, options_.resampling, rng);
      const AliasSampler proposal(cloud_.weights());
      const ParisOptions paris{options_.n_tilde, options_.sampler, options_.hybrid_max_trials};
      kernel = paris_kernel(model_, cloud_, next, paris, proposal, *counter_, rng);
      break;
    }
    case BackwardMethod::Imhp: {
      next = filter_step(options_.filter, model_, cloud_, options_.resampling, rng);
      const AliasSampler proposal(cloud_.weights());
      kernel = imhp_kernel(model_, cloud_, next, options_.n_tilde, proposal, *counter_, rng);
      break;
    }
  }
  stats_ = online_update(stats_, kernel, f_, cloud_, next);
  cloud_ = std::move(next);
}

ParisState paris_online_step(const FeynmanKacModel& model, const ParisState& state, const AdditiveFunction& f,
                             const ParisOptions& options, ResamplingScheme scheme, CostCounter& counter, Rng& rng) {
  ParisState out;
  out.cloud = bootstrap_step(model, state.cloud, scheme, rng);
  const AliasSampler proposal(state.cloud.weights());
  const BackwardKernel kernel = paris_kernel(model, state.cloud, out.cloud, options, proposal, counter, rng);
  out.stats = online_update(state.stats, kernel, f, state.cloud, out.cloud);
  return out;
}

std::vector<ParticleCloud> forward_pass(const FeynmanKacModel& model, std::size_t n, FilterKind filter,
                                        ResamplingScheme scheme, Rng& rng, std::size_t max_stored_values) {
  const std::size_t horizon = model.horizon();
  const double stored = static_cast<double>(horizon + 1) * static_cast<double>(n) * static_cast<double>(model.dim());
  if (stored > static_cast<double>(max_stored_values)) {
    throw StorageBudgetError("offline smoothing would store " + std::to_string(static_cast<unsigned long long>(stored)) +
                             " values, above the budget of " + std::to_string(max_stored_values));
  }
  std::vector<ParticleCloud> clouds;
  clouds.reserve(horizon + 1);
  clouds.push_back(initial_cloud(model, n, rng));
  for (std::size_t t = 1; t <= horizon; ++t) {
    clouds.push_back(filter_step(filter, model, clouds.back(), scheme, rng));
  }
  return clouds;
}

}  // namespace smc
