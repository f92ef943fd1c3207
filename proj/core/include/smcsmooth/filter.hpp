#pragma once

#include <cstddef>

#include "smcsmooth/fk_model.hpp"
#include "smcsmooth/particle_cloud.hpp"
#include "smcsmooth/resampling.hpp"
#include "smcsmooth/rng.hpp"

namespace smc {

enum class FilterKind { Bootstrap, Guided };

/// X_0^n ~ M_0 i.i.d., weighted by G_0.
ParticleCloud initial_cloud(const FeynmanKacModel& model, std::size_t n, Rng& rng);

/// One bootstrap step: resample, move through M_t, reweight by G_t.
ParticleCloud bootstrap_step(const FeynmanKacModel& model, const ParticleCloud& prev, ResamplingScheme scheme,
                             Rng& rng);

/// Move and reweight with externally chosen ancestors.
ParticleCloud propagate(const FeynmanKacModel& model, const ParticleCloud& prev, std::vector<std::size_t> ancestors,
                        Rng& rng);

/// One guided step: resample, move through the model's proposal q_t and
/// weight by G_t m_t / q_t. Throws UnsupportedOperationError when the model
/// lacks a proposal or a transition density.
ParticleCloud guided_step(const FeynmanKacModel& model, const ParticleCloud& prev, ResamplingScheme scheme,
                          Rng& rng);

ParticleCloud filter_step(FilterKind kind, const FeynmanKacModel& model, const ParticleCloud& prev,
                          ResamplingScheme scheme, Rng& rng);

}  // namespace smc
