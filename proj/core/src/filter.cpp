#include "smcsmooth/filter.hpp"

#include <vector>

#include "smcsmooth/errors.hpp"

namespace smc {

ParticleCloud initial_cloud(const FeynmanKacModel& model, std::size_t n, Rng& rng) {
  if (n == 0) throw InvalidArgumentError("need at least one particle");
  const std::size_t d = model.dim();
  std::vector<double> states(n * d);
  std::vector<double> log_w(n);
  for (std::size_t i = 0; i < n; ++i) {
    MutableState x{states.data() + i * d, d};
    model.sample_initial(rng, x);
    log_w[i] = model.log_potential(0, x);
  }
  return ParticleCloud::from_log_weights(0, d, std::move(states), log_w, {});
}

ParticleCloud propagate(const FeynmanKacModel& model, const ParticleCloud& prev, std::vector<std::size_t> ancestors,
                        Rng& rng) {
  const std::size_t t = prev.time() + 1;
  if (t > model.horizon()) throw InvalidArgumentError("filter advanced past the model horizon");
  const std::size_t n = ancestors.size();
  const std::size_t d = model.dim();
  std::vector<double> states(n * d);
  std::vector<double> log_w(n);
  for (std::size_t i = 0; i < n; ++i) {
    MutableState x{states.data() + i * d, d};
    model.sample_transition(t, prev.state(ancestors[i]), rng, x);
    log_w[i] = model.log_potential(t, x);
  }
  return ParticleCloud::from_log_weights(t, d, std::move(states), log_w, std::move(ancestors));
}

ParticleCloud bootstrap_step(const FeynmanKacModel& model, const ParticleCloud& prev, ResamplingScheme scheme,
                             Rng& rng) {
  return propagate(model, prev, resample(scheme, prev.weights(), rng), rng);
}

ParticleCloud guided_step(const FeynmanKacModel& model, const ParticleCloud& prev, ResamplingScheme scheme,
                          Rng& rng) {
  if (!model.has_guided_proposal()) throw UnsupportedOperationError("model has no guided proposal");
  if (!model.has_transition_density()) throw UnsupportedOperationError("guided weights need m_t");
  const std::size_t t = prev.time() + 1;
  if (t > model.horizon()) throw InvalidArgumentError("filter advanced past the model horizon");
  std::vector<std::size_t> ancestors = resample(scheme, prev.weights(), rng);
  const std::size_t n = ancestors.size();
  const std::size_t d = model.dim();
  std::vector<double> states(n * d);
  std::vector<double> log_w(n);
  for (std::size_t i = 0; i < n; ++i) {
    MutableState x{states.data() + i * d, d};
    const State xp = prev.state(ancestors[i]);
    model.sample_guided(t, xp, rng, x);
    log_w[i] = model.log_potential(t, x) + model.log_transition_density(t, xp, x) - model.log_guided_density(t, xp, x);
  }
  return ParticleCloud::from_log_weights(t, d, std::move(states), log_w, std::move(ancestors));
}

ParticleCloud filter_step(FilterKind kind, const FeynmanKacModel& model, const ParticleCloud& prev,
                          ResamplingScheme scheme, Rng& rng) {
  return kind == FilterKind::Guided ? guided_step(model, prev, scheme, rng) : bootstrap_step(model, prev, scheme, rng);
}

}  // namespace smc
