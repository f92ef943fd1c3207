#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "smcsmooth/errors.hpp"
#include "smcsmooth/filter.hpp"
#include "smcsmooth/models/kalman.hpp"
#include "smcsmooth/models/linear_gaussian.hpp"
#include "smcsmooth/rng.hpp"
#include "smcsmooth/smoothers.hpp"
#include "test_models.hpp"

using namespace smc;

namespace {

// FlatModel whose guided proposal is the transition itself.
class PriorProposal final : public FeynmanKacModel {
 public:
  std::size_t dim() const override { return 1; }
  std::size_t horizon() const override { return 10; }
  void sample_initial(Rng& rng, MutableState out) const override { out[0] = rng.normal(); }
  void sample_transition(std::size_t, State prev, Rng& rng, MutableState out) const override {
    out[0] = 0.7 * prev[0] + rng.normal();
  }
  double log_potential(std::size_t t, State x) const override { return -0.5 * std::pow(x[0] - 0.1 * t, 2); }
  bool has_transition_density() const override { return true; }
  double log_transition_density(std::size_t, State prev, State x) const override {
    return -0.5 * std::pow(x[0] - 0.7 * prev[0], 2);
  }
  bool has_guided_proposal() const override { return true; }
  void sample_guided(std::size_t t, State prev, Rng& rng, MutableState out) const override {
    sample_transition(t, prev, rng, out);
  }
  double log_guided_density(std::size_t t, State prev, State x) const override {
    return log_transition_density(t, prev, x);
  }
};

class ZeroPotential final : public FeynmanKacModel {
 public:
  std::size_t dim() const override { return 1; }
  std::size_t horizon() const override { return 1; }
  void sample_initial(Rng& rng, MutableState out) const override { out[0] = rng.uniform(); }
  void sample_transition(std::size_t, State, Rng& rng, MutableState out) const override { out[0] = rng.uniform(); }
  double log_potential(std::size_t t, State) const override {
    return t == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
};

}  // namespace

TEST(ParticleCloud, NormalisesAndValidates) {
  const std::vector<double> logw{0.0, std::log(3.0)};
  const auto c = ParticleCloud::from_log_weights(0, 1, {1.0, 2.0}, logw, {});
  EXPECT_NEAR(c.weight(0), 0.25, 1e-15);
  EXPECT_NEAR(c.weight(1), 0.75, 1e-15);
  EXPECT_NEAR(c.log_likelihood_increment(), std::log(2.0), 1e-15);
  EXPECT_NO_THROW(c.validate());
}

TEST(ParticleCloud, ErrorsOnDegenerateOrNaN) {
  const double ninf = -std::numeric_limits<double>::infinity();
  EXPECT_THROW(ParticleCloud::from_log_weights(0, 1, {1.0, 2.0}, std::vector<double>{ninf, ninf}, {}),
               DegenerateWeightsError);
  EXPECT_THROW(ParticleCloud::from_log_weights(0, 1, {NAN, 2.0}, std::vector<double>{0.0, 0.0}, {}), NumericError);
  EXPECT_THROW(ParticleCloud::from_log_weights(0, 1, {1.0, 2.0}, std::vector<double>{NAN, 0.0}, {}), NumericError);
}

TEST(BootstrapFilter, SingleParticleIsIdentity) {
  const oracle::FlatModel model(5);
  Rng rng(1);
  ParticleCloud c = initial_cloud(model, 1, rng);
  for (int t = 1; t <= 5; ++t) {
    c = bootstrap_step(model, c, ResamplingScheme::Systematic, rng);
    ASSERT_EQ(c.ancestors()[0], 0u);
    ASSERT_EQ(c.weight(0), 1.0);
  }
}

TEST(BootstrapFilter, ZeroPotentialsRaise) {
  const ZeroPotential model;
  Rng rng(2);
  const ParticleCloud c = initial_cloud(model, 10, rng);
  EXPECT_THROW(bootstrap_step(model, c, ResamplingScheme::Systematic, rng), DegenerateWeightsError);
}

TEST(BootstrapFilter, LikelihoodIsUnbiased) {
  Rng data_rng(3);
  const LinearGaussianModel lg = scalar_model(1.0);
  const SimulatedData data = simulate_data(lg, 20, data_rng);
  const LinearGaussianFK model(lg, data.observations);
  const double exact = kalman_filter_smoother(lg, data.observations).log_likelihood;
  const int reps = 200;
  double sum = 0.0, sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    Rng rng = Rng::for_stream(4, r);
    ParticleCloud c = initial_cloud(model, 500, rng);
    double ll = c.log_likelihood_increment();
    for (std::size_t t = 1; t <= 20; ++t) {
      c = bootstrap_step(model, c, ResamplingScheme::Systematic, rng);
      ll += c.log_likelihood_increment();
    }
    const double ratio = std::exp(ll - exact);
    sum += ratio;
    sq += ratio * ratio;
  }
  const double m = sum / reps;
  const double se = std::sqrt((sq / reps - m * m) / reps);
  EXPECT_NEAR(m, 1.0, 3 * se);
}

TEST(BootstrapFilter, DiscreteHmmFilterMeans) {
  const std::vector<int> y{0, 1, 1, 0, 1, 0, 0, 1};
  const oracle::DiscreteHmm hmm({0.6, 0.4}, {{{0.9, 0.1}, {0.2, 0.8}}}, {{{0.7, 0.3}, {0.25, 0.75}}}, y);
  const auto exact = hmm.filter_probabilities();
  const int reps = 20;
  std::vector<double> sum(y.size(), 0.0), sq(y.size(), 0.0);
  for (int r = 0; r < reps; ++r) {
    Rng rng = Rng::for_stream(5, r);
    ParticleCloud c = initial_cloud(hmm, 10000, rng);
    for (std::size_t t = 0; t < y.size(); ++t) {
      if (t > 0) c = bootstrap_step(hmm, c, ResamplingScheme::Systematic, rng);
      double m = 0.0;
      for (std::size_t n = 0; n < c.size(); ++n) m += c.weight(n) * c.state(n)[0];
      sum[t] += m;
      sq[t] += m * m;
    }
  }
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double m = sum[t] / reps;
    const double se = std::sqrt(std::max(sq[t] / reps - m * m, 1e-12) / reps);
    EXPECT_NEAR(m, exact[t], 3 * se + 1e-4) << "t=" << t;
  }
}

TEST(GuidedFilter, PriorProposalReducesToBootstrap) {
  const PriorProposal model;
  Rng a(6), b(6);
  ParticleCloud ca = initial_cloud(model, 50, a);
  ParticleCloud cb = initial_cloud(model, 50, b);
  for (int t = 1; t <= 10; ++t) {
    ca = bootstrap_step(model, ca, ResamplingScheme::Systematic, a);
    cb = guided_step(model, cb, ResamplingScheme::Systematic, b);
    for (std::size_t n = 0; n < 50; ++n) {
      ASSERT_EQ(ca.state(n)[0], cb.state(n)[0]);
      ASSERT_NEAR(ca.weight(n), cb.weight(n), 1e-14);
    }
  }
}

TEST(GuidedFilter, MissingProposalIsUnsupported) {
  const oracle::FlatModel model(3);
  Rng rng(7);
  const ParticleCloud c = initial_cloud(model, 10, rng);
  EXPECT_THROW(guided_step(model, c, ResamplingScheme::Systematic, rng), UnsupportedOperationError);
}

TEST(GuidedFilter, HigherEssThanBootstrapOnGuarniero) {
  Rng data_rng(8);
  const LinearGaussianModel lg = guarniero_model();
  const SimulatedData data = simulate_data(lg, 30, data_rng);
  const LinearGaussianFK model(lg, data.observations);
  int wins = 0;
  const int seeds = 50;
  for (int s = 0; s < seeds; ++s) {
    double ess_b = 0.0, ess_g = 0.0;
    for (FilterKind kind : {FilterKind::Bootstrap, FilterKind::Guided}) {
      Rng rng = Rng::for_stream(9, s);
      ParticleCloud c = initial_cloud(model, 200, rng);
      double total = 0.0;
      for (std::size_t t = 1; t <= 30; ++t) {
        c = filter_step(kind, model, c, ResamplingScheme::Systematic, rng);
        total += ess(c.weights());
      }
      (kind == FilterKind::Bootstrap ? ess_b : ess_g) = total;
    }
    wins += ess_g >= ess_b ? 1 : 0;
  }
  // One-sided sign test at roughly the 0.1% level.
  EXPECT_GE(wins, 36);
}

TEST(ForwardPass, StorageBudget) {
  const oracle::FlatModel model(100);
  Rng rng(10);
  EXPECT_THROW(forward_pass(model, 100, FilterKind::Bootstrap, ResamplingScheme::Systematic, rng, 1000),
               StorageBudgetError);
  const auto clouds = forward_pass(model, 10, FilterKind::Bootstrap, ResamplingScheme::Systematic, rng);
  ASSERT_EQ(clouds.size(), 101u);
  for (const auto& c : clouds) EXPECT_NO_THROW(c.validate());
}
