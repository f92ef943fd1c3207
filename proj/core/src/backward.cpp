#include "smcsmooth/backward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "smcsmooth/errors.hpp"
#include "smcsmooth/resampling.hpp"

namespace smc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t next_time(const ParticleCloud& prev) { return prev.time() + 1; }

double require_bound(const FeynmanKacModel& model, std::size_t t) {
  const auto bound = model.log_transition_bound(t);
  if (!bound) throw UnsupportedOperationError("rejection sampling needs a transition density bound");
  return *bound;
}

void check_bound(double log_m, double log_bound, std::size_t t) {
  if (log_m > log_bound + 1e-12 * std::max(1.0, std::abs(log_bound))) {
    throw BoundViolationError("transition density exceeds its advertised bound at time " + std::to_string(t));
  }
}

/// One rejection trial: proposes an index and reports acceptance.
struct Trial {
  std::size_t index;
  bool accepted;
};

Trial rejection_trial(const FeynmanKacModel& model, const ParticleCloud& prev, State x_t, std::size_t t,
                      double log_bound, const AliasSampler& proposal, CostCounter& counter, Rng& rng) {
  const std::size_t j = proposal.sample(rng);
  const double log_m = model.log_transition_density(t, prev.state(j), x_t);
  counter.add_evaluations(1);
  check_bound(log_m, log_bound, t);
  return {j, std::log(rng.uniform_positive()) <= log_m - log_bound};
}

/// Runs an independent Metropolis-Hastings chain and calls visit(state)
/// after every step.
template <typename Visit>
void imh_chain(const FeynmanKacModel& model, const ParticleCloud& prev, State x_t, std::size_t t, std::size_t start,
               double start_log_m, std::size_t n_steps, const AliasSampler& proposal, CostCounter& counter, Rng& rng,
               Visit&& visit) {
  std::size_t current = start;
  double current_log_m = start_log_m;
  for (std::size_t s = 0; s < n_steps; ++s) {
    const std::size_t candidate = proposal.sample(rng);
    const double log_m = model.log_transition_density(t, prev.state(candidate), x_t);
    counter.add_evaluations(1);
    const double log_u = std::log(rng.uniform_positive());
    if (current_log_m == kNegInf || log_u <= log_m - current_log_m) {
      current = candidate;
      current_log_m = log_m;
    }
    visit(current);
  }
}

void require_density(const FeynmanKacModel& model) {
  if (!model.has_transition_density()) throw UnsupportedOperationError("backward kernel needs m_t");
}

}  // namespace

std::vector<double> ffbs_row(const FeynmanKacModel& model, const ParticleCloud& prev, State x_t,
                             CostCounter& counter) {
  require_density(model);
  const std::size_t t = next_time(prev);
  const std::size_t n = prev.size();
  std::vector<double> row(n);
  double max_lw = kNegInf;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = prev.weight(i);
    row[i] = w > 0.0 ? std::log(w) + model.log_transition_density(t, prev.state(i), x_t) : kNegInf;
    if (std::isnan(row[i])) throw NumericError("NaN transition density at time " + std::to_string(t));
    max_lw = std::max(max_lw, row[i]);
  }
  counter.add_evaluations(n);
  if (max_lw == kNegInf) throw DegenerateWeightsError("predictive density is zero at time " + std::to_string(t));
  double total = 0.0;
  for (double& v : row) {
    v = std::exp(v - max_lw);
    total += v;
  }
  for (double& v : row) v /= total;
  return row;
}

std::size_t sample_ffbs_direct(std::span<const double> row, Rng& rng) {
  return sample_linear_scan(row, rng.uniform());
}

std::size_t sample_ffbs_direct(const FeynmanKacModel& model, const ParticleCloud& prev, State x_t,
                               CostCounter& counter, Rng& rng) {
  const std::vector<double> row = ffbs_row(model, prev, x_t, counter);
  return sample_ffbs_direct(row, rng);
}

std::size_t sample_ffbs_pure_rejection(const FeynmanKacModel& model, const ParticleCloud& prev, State x_t,
                                       const AliasSampler& proposal, CostCounter& counter, Rng& rng) {
  require_density(model);
  const std::size_t t = next_time(prev);
  const double log_bound = require_bound(model, t);
  for (std::uint64_t trials = 1;; ++trials) {
    const Trial trial = rejection_trial(model, prev, x_t, t, log_bound, proposal, counter, rng);
    if (trial.accepted) {
      counter.record_trials(trials);
      return trial.index;
    }
  }
}

std::size_t sample_ffbs_hybrid(const FeynmanKacModel& model, const ParticleCloud& prev, State x_t,
                               const AliasSampler& proposal, CostCounter& counter, std::size_t max_trials,
                               Rng& rng) {
  require_density(model);
  const std::size_t t = next_time(prev);
  const double log_bound = require_bound(model, t);
  for (std::uint64_t trials = 1; trials <= max_trials; ++trials) {
    const Trial trial = rejection_trial(model, prev, x_t, t, log_bound, proposal, counter, rng);
    if (trial.accepted) {
      counter.record_trials(trials);
      return trial.index;
    }
  }
  counter.record_trials(max_trials);
  counter.record_fallback();
  return sample_ffbs_direct(model, prev, x_t, counter, rng);
}

BackwardKernel gt_kernel(const ParticleCloud& cloud) {
  if (!cloud.has_ancestors()) throw InvalidArgumentError("genealogy tracking needs ancestors");
  BackwardKernel::Builder builder(cloud.time(), cloud.size());
  for (std::size_t a : cloud.ancestors()) builder.add_point_mass(a);
  return std::move(builder).finish();
}

BackwardKernel ffbs_kernel(const FeynmanKacModel& model, const ParticleCloud& prev, const ParticleCloud& cloud,
                           CostCounter& counter) {
  BackwardKernel::Builder builder(cloud.time(), prev.size(), BackwardKernel::Kind::Dense);
  std::vector<std::size_t> all(prev.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const std::vector<double> row = ffbs_row(model, prev, cloud.state(i), counter);
    builder.add_row(all, row);
  }
  return std::move(builder).finish();
}

BackwardKernel paris_kernel(const FeynmanKacModel& model, const ParticleCloud& prev, const ParticleCloud& cloud,
                            const ParisOptions& options, const AliasSampler& proposal, CostCounter& counter,
                            Rng& rng) {
  if (options.n_tilde == 0) throw InvalidArgumentError("PaRIS needs at least one backward draw per particle");
  const std::size_t k_max = options.hybrid_max_trials == 0 ? prev.size() : options.hybrid_max_trials;
  BackwardKernel::Builder builder(cloud.time(), prev.size());
  std::vector<std::size_t> atoms(options.n_tilde);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const State x = cloud.state(i);
    switch (options.sampler) {
      case FfbsSampler::Direct: {
        const std::vector<double> row = ffbs_row(model, prev, x, counter);
        for (auto& a : atoms) a = sample_ffbs_direct(row, rng);
        break;
      }
      case FfbsSampler::PureRejection:
        for (auto& a : atoms) a = sample_ffbs_pure_rejection(model, prev, x, proposal, counter, rng);
        break;
      case FfbsSampler::Hybrid:
        for (auto& a : atoms) a = sample_ffbs_hybrid(model, prev, x, proposal, counter, k_max, rng);
        break;
    }
    builder.add_atoms(atoms);
  }
  return std::move(builder).finish();
}

std::size_t imh_backward_sample(const FeynmanKacModel& model, const ParticleCloud& prev, State x_t,
                                std::size_t start, std::size_t n_steps, const AliasSampler& proposal,
                                CostCounter& counter, Rng& rng, std::optional<double> start_log_density) {
  require_density(model);
  const std::size_t t = next_time(prev);
  if (n_steps == 0) return start;
  const double start_log_m =
      start_log_density ? *start_log_density : model.log_transition_density(t, prev.state(start), x_t);
  std::size_t result = start;
  imh_chain(model, prev, x_t, t, start, start_log_m, n_steps, proposal, counter, rng,
            [&](std::size_t state) { result = state; });
  return result;
}

BackwardKernel imhp_kernel(const FeynmanKacModel& model, const ParticleCloud& prev, const ParticleCloud& cloud,
                           std::size_t n_tilde, const AliasSampler& proposal, CostCounter& counter, Rng& rng) {
  require_density(model);
  if (!cloud.has_ancestors()) throw InvalidArgumentError("IMHP needs filtering ancestors");
  if (n_tilde == 0) throw InvalidArgumentError("IMHP needs at least one atom per row");
  const std::size_t t = cloud.time();
  BackwardKernel::Builder builder(t, prev.size());
  std::vector<std::size_t> atoms;
  atoms.reserve(n_tilde);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const State x = cloud.state(i);
    const std::size_t a = cloud.ancestors()[i];
    atoms.clear();
    atoms.push_back(a);
    if (n_tilde > 1) {
      // The filtering pair's density is part of the forward move, not a new evaluation.
      const double start_log_m = model.log_transition_density(t, prev.state(a), x);
      imh_chain(model, prev, x, t, a, start_log_m, n_tilde - 1, proposal, counter, rng,
                [&](std::size_t state) { atoms.push_back(state); });
    }
    builder.add_atoms(atoms);
  }
  return std::move(builder).finish();
}

BackwardKernel imh_kernel(const FeynmanKacModel& model, const ParticleCloud& prev, const ParticleCloud& cloud,
                          std::size_t n_steps, const AliasSampler& proposal, CostCounter& counter) {
  require_density(model);
  if (!cloud.has_ancestors()) throw InvalidArgumentError("IMH needs filtering ancestors");
  return BackwardKernel::implicit(
      cloud.time(), cloud.size(), prev.size(),
      [&model, &prev, &cloud, n_steps, &proposal, &counter](std::size_t row, Rng& rng) {
        return imh_backward_sample(model, prev, cloud.state(row), cloud.ancestors()[row], n_steps, proposal, counter,
                                   rng);
      });
}

BackwardKernel lazy_ffbs_kernel(const FeynmanKacModel& model, const ParticleCloud& prev,
                                const ParticleCloud& cloud, FfbsSampler sampler, std::size_t hybrid_max_trials,
                                const AliasSampler& proposal, CostCounter& counter) {
  require_density(model);
  const std::size_t k_max = hybrid_max_trials == 0 ? prev.size() : hybrid_max_trials;
  return BackwardKernel::implicit(
      cloud.time(), cloud.size(), prev.size(),
      [&model, &prev, &cloud, sampler, k_max, &proposal, &counter](std::size_t row, Rng& rng) -> std::size_t {
        const State x = cloud.state(row);
        switch (sampler) {
          case FfbsSampler::Direct:
            return sample_ffbs_direct(model, prev, x, counter, rng);
          case FfbsSampler::PureRejection:
            return sample_ffbs_pure_rejection(model, prev, x, proposal, counter, rng);
          case FfbsSampler::Hybrid:
            return sample_ffbs_hybrid(model, prev, x, proposal, counter, k_max, rng);
        }
        throw InvalidArgumentError("unknown FFBS sampler");
      });
}

Eigen::MatrixXd imh_transition_matrix(const FeynmanKacModel& model, const ParticleCloud& prev, State x_t) {
  require_density(model);
  const std::size_t t = next_time(prev);
  const auto n = static_cast<Eigen::Index>(prev.size());
  Eigen::VectorXd log_m(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    log_m(j) = model.log_transition_density(t, prev.state(static_cast<std::size_t>(j)), x_t);
  }
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    double off_diagonal = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == a) continue;
      const double ratio = log_m(a) == kNegInf ? 1.0 : std::min(1.0, std::exp(log_m(j) - log_m(a)));
      p(a, j) = prev.weight(static_cast<std::size_t>(j)) * ratio;
      off_diagonal += p(a, j);
    }
    p(a, a) = 1.0 - off_diagonal;
  }
  return p;
}

namespace {

ParticleCloud reweighted(const FeynmanKacModel& model, std::size_t t, std::size_t dim, std::vector<double> states,
                         std::vector<std::size_t> ancestors) {
  const std::size_t n = ancestors.size();
  std::vector<double> log_w(n);
  for (std::size_t i = 0; i < n; ++i) log_w[i] = model.log_potential(t, State{states.data() + i * dim, dim});
  return ParticleCloud::from_log_weights(t, dim, std::move(states), log_w, std::move(ancestors));
}

void require_coupler(const FeynmanKacModel& model, const ParticleCloud& prev) {
  if (!model.has_coupled_transition()) throw UnsupportedOperationError("model has no coupled transition sampler");
  if (next_time(prev) > model.horizon()) throw InvalidArgumentError("filter advanced past the model horizon");
}

}  // namespace

CoupledForwardStep itr_forward_step(const FeynmanKacModel& model, const ParticleCloud& prev, Rng& rng) {
  require_coupler(model, prev);
  const std::size_t t = next_time(prev);
  const std::size_t n = prev.size();
  const std::size_t d = model.dim();
  const AliasSampler ancestors_law(prev.weights());
  std::vector<double> states(n * d);
  std::vector<double> other(d);
  std::vector<std::size_t> ancestors(n);
  BackwardKernel::Builder builder(t, n);
  CoupledForwardStep step;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a1 = ancestors_law.sample(rng);
    const std::size_t a2 = ancestors_law.sample(rng);
    MutableState x{states.data() + i * d, d};
    ++step.pairs;
    if (a1 == a2) {
      model.sample_transition(t, prev.state(a1), rng, x);
      ancestors[i] = a1;
      builder.add_point_mass(a1);
      continue;
    }
    ++step.distinct_pairs;
    const bool keep_first = rng.uniform() < 0.5;
    MutableState x_other{other.data(), d};
    const bool met = keep_first ? model.sample_coupled_transition(t, prev.state(a1), prev.state(a2), rng, x, x_other)
                                : model.sample_coupled_transition(t, prev.state(a1), prev.state(a2), rng, x_other, x);
    ancestors[i] = keep_first ? a1 : a2;
    if (met) {
      ++step.met_pairs;
      const std::size_t both[2] = {a1, a2};
      builder.add_atoms(both);
    } else {
      builder.add_point_mass(ancestors[i]);
    }
  }
  step.cloud = reweighted(model, t, d, std::move(states), std::move(ancestors));
  step.kernel = std::move(builder).finish();
  return step;
}

CoupledForwardStep itrc_forward_step(const FeynmanKacModel& model, const ParticleCloud& prev, Rng& rng) {
  require_coupler(model, prev);
  const std::size_t n = prev.size();
  if (n % 2 != 0) throw InvalidArgumentError("ITRC needs an even number of particles");
  const std::size_t t = next_time(prev);
  const std::size_t d = model.dim();
  std::vector<std::size_t> ancestors = adjacent_resample(prev.states(), d, prev.weights(), rng);
  std::vector<double> states(n * d);
  BackwardKernel::Builder builder(t, n);
  CoupledForwardStep step;
  for (std::size_t k = 0; k < n / 2; ++k) {
    const std::size_t a1 = ancestors[2 * k];
    const std::size_t a2 = ancestors[2 * k + 1];
    MutableState x1{states.data() + 2 * k * d, d};
    MutableState x2{states.data() + (2 * k + 1) * d, d};
    ++step.pairs;
    if (a1 == a2) {
      model.sample_transition(t, prev.state(a1), rng, x1);
      model.sample_transition(t, prev.state(a2), rng, x2);
      builder.add_point_mass(a1);
      builder.add_point_mass(a2);
      continue;
    }
    ++step.distinct_pairs;
    if (model.sample_coupled_transition(t, prev.state(a1), prev.state(a2), rng, x1, x2)) {
      ++step.met_pairs;
      const std::size_t both[2] = {a1, a2};
      builder.add_atoms(both);
      builder.add_atoms(both);
    } else {
      builder.add_point_mass(a1);
      builder.add_point_mass(a2);
    }
  }
  step.cloud = reweighted(model, t, d, std::move(states), std::move(ancestors));
  step.kernel = std::move(builder).finish();
  return step;
}

}  // namespace smc
