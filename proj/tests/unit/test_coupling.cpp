#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "smcsmooth/coupling.hpp"
#include "smcsmooth/errors.hpp"
#include "smcsmooth/rng.hpp"

using namespace smc;

namespace {

Eigen::Matrix2d lv_gamma() {
  Eigen::Matrix2d c;
  c << 0.01, 0.005, 0.005, 0.01;
  return c.llt().matrixL();
}

CouplingTarget normal_target(double mu, double s) {
  return {[mu, s](const Eigen::VectorXd& x) {
            const double z = (x(0) - mu) / s;
            return -0.5 * z * z - std::log(s) - 0.5 * std::log(2 * M_PI);
          },
          [mu, s](Rng& rng) { return Eigen::VectorXd::Constant(1, mu + s * rng.normal()); }};
}

CouplingTarget uniform_target(double lo, double hi) {
  return {[lo, hi](const Eigen::VectorXd& x) {
            return x(0) >= lo && x(0) <= hi ? -std::log(hi - lo) : -std::numeric_limits<double>::infinity();
          },
          [lo, hi](Rng& rng) { return Eigen::VectorXd::Constant(1, lo + (hi - lo) * rng.uniform()); }};
}

// Whitened coordinates of a coupled draw must be standard normal on each side.
void expect_gaussian_marginals(GaussianCoupler coupler, const Eigen::Vector2d& mu_a, const Eigen::Vector2d& mu_b,
                               const Eigen::Matrix2d& sa, const Eigen::Matrix2d& sb, std::uint64_t seed) {
  Rng rng(seed);
  const int n = 100000;
  std::vector<std::vector<double>> z(4);
  const Eigen::Matrix2d ia = sa.inverse(), ib = sb.inverse();
  for (int i = 0; i < n; ++i) {
    const CoupledPair p = couple_gaussians(coupler, mu_a, mu_b, sa, sb, rng);
    const Eigen::Vector2d za = ia * (p.left - mu_a), zb = ib * (p.right - mu_b);
    z[0].push_back(za(0));
    z[1].push_back(za(1));
    z[2].push_back(zb(0));
    z[3].push_back(zb(1));
  }
  for (auto& v : z) EXPECT_GT(oracle::ks_one_sample(v, oracle::normal_cdf).p_value, 0.001);
}

double meeting_frequency(GaussianCoupler coupler, double mu_b, double sigma, int n, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::VectorXd a = Eigen::VectorXd::Zero(1), b = Eigen::VectorXd::Constant(1, mu_b);
  const Eigen::MatrixXd s = Eigen::MatrixXd::Constant(1, 1, sigma);
  int met = 0;
  for (int i = 0; i < n; ++i) met += couple_gaussians(coupler, a, b, s, s, rng).met ? 1 : 0;
  return static_cast<double>(met) / n;
}

}  // namespace

TEST(LindvallRogers, OneDimensionalReflection) {
  Rng rng(1);
  const Eigen::VectorXd a = Eigen::VectorXd::Constant(1, 0.3), b = Eigen::VectorXd::Constant(1, -1.2);
  const Eigen::MatrixXd s = Eigen::MatrixXd::Identity(1, 1);
  for (int i = 0; i < 100; ++i) {
    const auto p = lindvall_rogers_gaussian(a, b, s, s, rng);
    EXPECT_NEAR(p.right(0) - b(0), -(p.left(0) - a(0)), 1e-14);
  }
}

TEST(LindvallRogers, EqualMeansFallBackToCommonNoise) {
  Rng rng(2);
  const Eigen::VectorXd a = Eigen::VectorXd::Zero(2);
  const Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2, 2);
  for (int i = 0; i < 100; ++i) {
    const auto p = lindvall_rogers_gaussian(a, a, s, s, rng);
    EXPECT_EQ(p.left, p.right);
  }
}

TEST(Couplers, GaussianMarginalsUnderLvCovariance) {
  const Eigen::Matrix2d g = lv_gamma();
  const Eigen::Vector2d mu_a(100.0, 100.0), mu_b(100.5, 99.8);
  const Eigen::Matrix2d sa = Eigen::Vector2d(100.0, 100.0).asDiagonal() * g * std::sqrt(0.1);
  const Eigen::Matrix2d sb = Eigen::Vector2d(100.5, 99.8).asDiagonal() * g * std::sqrt(0.1);
  expect_gaussian_marginals(GaussianCoupler::LindvallRogers, mu_a, mu_b, sa, sb, 3);
  expect_gaussian_marginals(GaussianCoupler::ModifiedLindvallRogers, mu_a, mu_b, sa, sb, 4);
  expect_gaussian_marginals(GaussianCoupler::CommonNoise, mu_a, mu_b, sa, sb, 5);
}

TEST(MaximalCoupling, MeetingProbabilityIsOverlap) {
  const double overlap = oracle::gaussian_overlap(0.0, 1.0, 1.5, 1.0);
  EXPECT_NEAR(overlap, 2.0 * oracle::normal_cdf(-0.75), 1e-10);
  Rng rng(6);
  const auto a = normal_target(0.0, 1.0), b = normal_target(1.5, 1.0);
  const int n = 100000;
  int met = 0;
  std::vector<double> left, right;
  for (int i = 0; i < n; ++i) {
    const auto p = rejection_maximal_coupling(a, b, rng);
    met += p.met ? 1 : 0;
    left.push_back(p.left(0));
    right.push_back(p.right(0) - 1.5);
  }
  EXPECT_NEAR(met / static_cast<double>(n), 0.4533, 0.005);
  EXPECT_NEAR(met / static_cast<double>(n), overlap, 0.005);
  EXPECT_GT(oracle::ks_one_sample(left, oracle::normal_cdf).p_value, 0.001);
  EXPECT_GT(oracle::ks_one_sample(right, oracle::normal_cdf).p_value, 0.001);
}

TEST(MaximalCoupling, IdenticalAndDisjointTargets) {
  Rng rng(7);
  const auto a = normal_target(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const auto p = rejection_maximal_coupling(a, a, rng);
    ASSERT_TRUE(p.met);
    ASSERT_EQ(p.left, p.right);
  }
  const auto u = uniform_target(0.0, 1.0), v = uniform_target(2.0, 3.0);
  for (int i = 0; i < 1000; ++i) ASSERT_FALSE(rejection_maximal_coupling(u, v, rng).met);
}

TEST(Mlr, IdenticalDistributionsMeetOften) {
  EXPECT_GT(meeting_frequency(GaussianCoupler::ModifiedLindvallRogers, 0.0, 1.0, 100000, 8), 0.4);
}

TEST(Mlr, DistantMeansRarelyMeet) {
  EXPECT_LT(meeting_frequency(GaussianCoupler::ModifiedLindvallRogers, 20.0, 1.0, 100000, 9), 0.001);
}

TEST(Couplers, MeetingBoundedByOverlap) {
  const double overlap = oracle::gaussian_overlap(0.0, 1.0, 1.5, 1.0);
  const int n = 100000;
  for (auto c : {GaussianCoupler::LindvallRogers, GaussianCoupler::ModifiedLindvallRogers,
                 GaussianCoupler::CommonNoise}) {
    const double f = meeting_frequency(c, 1.5, 1.0, n, 10);
    EXPECT_LE(f, overlap + 4 * std::sqrt(overlap * (1 - overlap) / n));
  }
}

TEST(Euler, EqualStartsStayTogether) {
  Rng rng(11);
  const DriftFunction drift = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return -x; };
  const DiffusionFunction diff = [](const Eigen::VectorXd&) -> Eigen::MatrixXd { return Eigen::MatrixXd::Identity(1, 1); };
  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 0.7);
  for (auto c : {GaussianCoupler::CommonNoise, GaussianCoupler::LindvallRogers, GaussianCoupler::ModifiedLindvallRogers}) {
    const auto p = coupled_euler_transition(drift, diff, x0, x0, 10, c, rng);
    EXPECT_TRUE(p.met);
    EXPECT_EQ(p.left, p.right);
  }
}

TEST(Euler, PureReflectionNeverMeets) {
  Rng rng(12);
  const DriftFunction drift = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(x.size()); };
  const DiffusionFunction diff = [](const Eigen::VectorXd&) -> Eigen::MatrixXd { return Eigen::MatrixXd::Identity(1, 1); };
  const Eigen::VectorXd a = Eigen::VectorXd::Zero(1), b = Eigen::VectorXd::Constant(1, 0.3);
  for (int i = 0; i < 2000; ++i) {
    ASSERT_FALSE(coupled_euler_transition(drift, diff, a, b, 10, GaussianCoupler::LindvallRogers, rng).met);
  }
  EXPECT_FALSE(coupled_euler_meeting_time(drift, diff, a, b, 0.01, 5.0, GaussianCoupler::LindvallRogers, rng));
}

TEST(Euler, MarginalMatchesUncoupledChain) {
  const DriftFunction drift = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 0.5 - x.array(); };
  const DiffusionFunction diff = [](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Constant(1, 1, 0.3 + 0.1 * std::abs(x(0)));
  };
  const Eigen::VectorXd a = Eigen::VectorXd::Constant(1, 0.2), b = Eigen::VectorXd::Constant(1, 0.25);
  Rng rng(13);
  std::vector<double> left, right, free_a, free_b;
  for (int i = 0; i < 10000; ++i) {
    const auto p = coupled_euler_transition(drift, diff, a, b, 10, GaussianCoupler::ModifiedLindvallRogers, rng);
    left.push_back(p.left(0));
    right.push_back(p.right(0));
    free_a.push_back(euler_transition(drift, diff, a, 10, rng)(0));
    free_b.push_back(euler_transition(drift, diff, b, 10, rng)(0));
  }
  EXPECT_GT(oracle::ks_two_sample(left, free_a).p_value, 0.001);
  EXPECT_GT(oracle::ks_two_sample(right, free_b).p_value, 0.001);
}

TEST(Euler, NonFiniteDriftRaises) {
  Rng rng(14);
  const DriftFunction drift = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(x.size(), std::numeric_limits<double>::quiet_NaN());
  };
  const DiffusionFunction diff = [](const Eigen::VectorXd&) -> Eigen::MatrixXd { return Eigen::MatrixXd::Identity(1, 1); };
  const Eigen::VectorXd a = Eigen::VectorXd::Zero(1);
  EXPECT_THROW(coupled_euler_transition(drift, diff, a, a, 5, GaussianCoupler::CommonNoise, rng), NumericError);
  EXPECT_THROW(euler_transition(drift, diff, a, 5, rng), NumericError);
}
