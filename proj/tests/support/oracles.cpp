#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "smcsmooth/filter.hpp"
#include "smcsmooth/rng.hpp"

namespace smc::oracle {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double kolmogorov_tail(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

namespace {

double ks_p(double d, double n_eff) {
  const double root = std::sqrt(n_eff);
  return kolmogorov_tail((root + 0.12 + 0.11 / root) * d);
}

}  // namespace

KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return {d, ks_p(d, n)};
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  const double d = ks_distance(std::move(a), std::move(b));
  return {d, ks_p(d, n * m / (n + m))};
}

double chi2_gof_pvalue(std::span<const std::uint64_t> counts, std::span<const double> probs) {
  if (counts.size() != probs.size()) throw std::invalid_argument("counts and probs differ in size");
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  double stat = 0.0;
  std::size_t cells = 0;
  double pooled_obs = 0.0;
  double pooled_exp = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = total * probs[i];
    if (expected < 5.0) {
      pooled_obs += static_cast<double>(counts[i]);
      pooled_exp += expected;
      continue;
    }
    stat += std::pow(counts[i] - expected, 2) / expected;
    ++cells;
  }
  if (pooled_exp > 0.0) {
    stat += std::pow(pooled_obs - pooled_exp, 2) / std::max(pooled_exp, 1e-300);
    ++cells;
  }
  if (cells < 2) return 1.0;
  const boost::math::chi_squared dist(static_cast<double>(cells - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

double chi2_two_sample_pvalue(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("count vectors differ in size");
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  double stat = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double row = static_cast<double>(a[i] + b[i]);
    if (row == 0.0) continue;
    const double ea = row * na / (na + nb);
    const double eb = row * nb / (na + nb);
    stat += std::pow(a[i] - ea, 2) / ea + std::pow(b[i] - eb, 2) / eb;
    ++cells;
  }
  if (cells < 2) return 1.0;
  const boost::math::chi_squared dist(static_cast<double>(cells - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

JointSmoothing joint_gaussian_smoothing(const LinearGaussianModel& model, const std::vector<Eigen::VectorXd>& y) {
  const auto dx = static_cast<Eigen::Index>(model.dim_x());
  const auto dy = static_cast<Eigen::Index>(model.dim_y());
  const auto steps = static_cast<Eigen::Index>(y.size());

  // Marginal means and covariances of the state process.
  std::vector<Eigen::VectorXd> mx(y.size());
  std::vector<Eigen::MatrixXd> vx(y.size());
  mx[0] = model.initial_mean;
  vx[0] = model.initial_cov;
  for (std::size_t t = 1; t < y.size(); ++t) {
    mx[t] = model.fx * mx[t - 1];
    vx[t] = model.fx * vx[t - 1] * model.fx.transpose() + model.cx;
  }
  // Cov(X_s, X_t) = Var(X_s) (F^{t-s})^T for s <= t.
  Eigen::MatrixXd sxx(dx * steps, dx * steps);
  for (Eigen::Index s = 0; s < steps; ++s) {
    Eigen::MatrixXd block = vx[s];
    for (Eigen::Index t = s; t < steps; ++t) {
      sxx.block(s * dx, t * dx, dx, dx) = block;
      sxx.block(t * dx, s * dx, dx, dx) = block.transpose();
      block = block * model.fx.transpose();
    }
  }
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dy * steps, dx * steps);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(dy * steps, dy * steps);
  Eigen::VectorXd mean_x(dx * steps);
  Eigen::VectorXd obs(dy * steps);
  for (Eigen::Index t = 0; t < steps; ++t) {
    h.block(t * dy, t * dx, dy, dx) = model.fy;
    r.block(t * dy, t * dy, dy, dy) = model.cy;
    mean_x.segment(t * dx, dx) = mx[t];
    obs.segment(t * dy, dy) = y[t];
  }
  const Eigen::MatrixXd sxy = sxx * h.transpose();
  const Eigen::MatrixXd syy = h * sxx * h.transpose() + r;
  const Eigen::LDLT<Eigen::MatrixXd> solver(syy);
  const Eigen::VectorXd post_mean = mean_x + sxy * solver.solve(obs - h * mean_x);
  const Eigen::MatrixXd post_cov = sxx - sxy * solver.solve(sxy.transpose());

  JointSmoothing out;
  for (Eigen::Index t = 0; t < steps; ++t) {
    out.mean.push_back(post_mean.segment(t * dx, dx));
    out.cov.push_back(post_cov.block(t * dx, t * dx, dx, dx));
  }
  return out;
}

void conditional_proposal(const LinearGaussianModel& model, const Eigen::VectorXd& prev, const Eigen::VectorXd& y,
                          Eigen::VectorXd& mean, Eigen::MatrixXd& cov) {
  const Eigen::VectorXd mx = model.fx * prev;
  const Eigen::MatrixXd sxy = model.cx * model.fy.transpose();
  const Eigen::MatrixXd syy = model.fy * model.cx * model.fy.transpose() + model.cy;
  const Eigen::MatrixXd gain = sxy * syy.inverse();
  mean = mx + gain * (y - model.fy * mx);
  cov = model.cx - gain * sxy.transpose();
}

double gaussian_overlap(double mu_a, double s_a, double mu_b, double s_b) {
  auto pdf = [](double x, double mu, double s) {
    const double z = (x - mu) / s;
    return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * M_PI));
  };
  auto integrand = [&](double x) { return std::min(pdf(x, mu_a, s_a), pdf(x, mu_b, s_b)); };
  const double lo = std::min(mu_a - 40 * s_a, mu_b - 40 * s_b);
  const double hi = std::max(mu_a + 40 * s_a, mu_b + 40 * s_b);
  // Split at the midpoint so the kink of min() sits on a panel boundary.
  const double mid = 0.5 * (mu_a + mu_b);
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(integrand, lo, mid, 15, 1e-14) +
         gauss_kronrod<double, 61>::integrate(integrand, mid, hi, 15, 1e-14);
}

namespace {

// Row B_s(i, .) recomputed from scratch in long double.
std::vector<long double> row(const FeynmanKacModel& model, const ParticleCloud& prev, State x) {
  const std::size_t t = prev.time() + 1;
  std::vector<long double> out(prev.size());
  long double z = 0.0L;
  for (std::size_t j = 0; j < prev.size(); ++j) {
    out[j] = static_cast<long double>(prev.weight(j)) *
             std::exp(static_cast<long double>(model.log_transition_density(t, prev.state(j), x)));
    z += out[j];
  }
  for (auto& v : out) v /= z;
  return out;
}

}  // namespace

std::vector<long double> ffbs_path_law(const FeynmanKacModel& model, const std::vector<ParticleCloud>& clouds,
                                       std::size_t t) {
  const std::size_t n = clouds[0].size();
  std::size_t paths = 1;
  for (std::size_t s = 0; s <= t; ++s) paths *= n;
  // rows[s][i] = B_s(i, .) for s = 1..t
  std::vector<std::vector<std::vector<long double>>> rows(t + 1);
  for (std::size_t s = 1; s <= t; ++s) {
    for (std::size_t i = 0; i < n; ++i) rows[s].push_back(row(model, clouds[s - 1], clouds[s].state(i)));
  }
  std::vector<long double> law(paths);
  std::vector<std::size_t> idx(t + 1);
  for (std::size_t p = 0; p < paths; ++p) {
    std::size_t rest = p;
    for (std::size_t s = 0; s <= t; ++s) {
      idx[s] = rest % n;
      rest /= n;
    }
    long double prob = clouds[t].weight(idx[t]);
    for (std::size_t s = t; s >= 1; --s) prob *= rows[s][idx[s]][idx[s - 1]];
    law[p] = prob;
  }
  return law;
}

long double ffbs_enumerated_expectation(const FeynmanKacModel& model, const std::vector<ParticleCloud>& clouds,
                                        std::size_t t, const AdditiveFunction& f) {
  const std::size_t n = clouds[0].size();
  const std::vector<long double> law = ffbs_path_law(model, clouds, t);
  std::vector<std::size_t> idx(t + 1);
  long double total = 0.0L;
  for (std::size_t p = 0; p < law.size(); ++p) {
    std::size_t rest = p;
    for (std::size_t s = 0; s <= t; ++s) {
      idx[s] = rest % n;
      rest /= n;
    }
    long double phi = f.initial(clouds[0].state(idx[0]));
    for (std::size_t s = 1; s <= t; ++s) phi += f.increment(s, clouds[s - 1].state(idx[s - 1]), clouds[s].state(idx[s]));
    total += law[p] * phi;
  }
  return total;
}

Skeleton scalar_skeleton(double sigma_y, std::size_t n, std::size_t horizon, std::uint64_t seed) {
  Rng data_rng(seed);
  const LinearGaussianModel lg = scalar_model(sigma_y);
  SimulatedData data = simulate_data(lg, horizon, data_rng);
  Skeleton out{LinearGaussianFK(lg, std::move(data.observations)), {}};
  Rng rng(seed + 1);
  out.clouds = forward_pass(out.model, n, FilterKind::Bootstrap, ResamplingScheme::Systematic, rng);
  return out;
}

}  // namespace smc::oracle
