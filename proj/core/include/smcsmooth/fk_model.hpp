#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "smcsmooth/errors.hpp"
#include "smcsmooth/rng.hpp"

namespace smc {

using State = std::span<const double>;
using MutableState = std::span<double>;

/// Feynman-Kac model: initial law M_0, Markov kernels M_t, potentials G_t.
///
/// Only sampling from M_0 and M_t and evaluating log G_t are mandatory. The
/// remaining members are capabilities that specific algorithms require:
/// backward samplers need the transition density m_t, rejection samplers
/// additionally need an upper bound on it, guided filters need a proposal,
/// and the intractable-model smoothers need a coupled transition sampler.
/// Time indices run from 0 to horizon() inclusive; transitions are indexed by
/// the time of their endpoint (t >= 1).
class FeynmanKacModel {
 public:
  virtual ~FeynmanKacModel() = default;

  virtual std::size_t dim() const = 0;
  virtual std::size_t horizon() const = 0;

  virtual void sample_initial(Rng& rng, MutableState out) const = 0;
  virtual void sample_transition(std::size_t t, State prev, Rng& rng, MutableState out) const = 0;
  virtual double log_potential(std::size_t t, State x) const = 0;

  virtual bool has_transition_density() const { return false; }
  virtual double log_transition_density(std::size_t /*t*/, State /*prev*/, State /*x*/) const {
    throw UnsupportedOperationError("model has no tractable transition density");
  }
  /// log of an upper bound on m_t(x, y) over all (x, y), when one is known.
  virtual std::optional<double> log_transition_bound(std::size_t /*t*/) const { return std::nullopt; }

  virtual bool has_guided_proposal() const { return false; }
  virtual void sample_guided(std::size_t /*t*/, State /*prev*/, Rng& /*rng*/, MutableState /*out*/) const {
    throw UnsupportedOperationError("model has no guided proposal");
  }
  virtual double log_guided_density(std::size_t /*t*/, State /*prev*/, State /*x*/) const {
    throw UnsupportedOperationError("model has no guided proposal");
  }

  virtual bool has_coupled_transition() const { return false; }
  /// Draws (out_a, out_b) with marginals M_t(prev_a, .) and M_t(prev_b, .).
  /// Returns true when the two draws met, in which case they are bitwise equal.
  virtual bool sample_coupled_transition(std::size_t /*t*/, State /*prev_a*/, State /*prev_b*/, Rng& /*rng*/,
                                         MutableState /*out_a*/, MutableState /*out_b*/) const {
    throw UnsupportedOperationError("model has no coupled transition sampler");
  }
};

}  // namespace smc
