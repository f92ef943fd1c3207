#include "smcsmooth/coupling.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "smcsmooth/errors.hpp"

namespace smc {

namespace {

Eigen::VectorXd standard_normal(Eigen::Index d, Rng& rng) {
  Eigen::VectorXd w(d);
  for (Eigen::Index i = 0; i < d; ++i) w(i) = rng.normal();
  return w;
}

bool bitwise_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return false;
  }
  return true;
}

void check_shapes(const Eigen::VectorXd& mu_a, const Eigen::VectorXd& mu_b, const Eigen::MatrixXd& sigma_a,
                  const Eigen::MatrixXd& sigma_b) {
  const Eigen::Index d = mu_a.size();
  if (mu_b.size() != d || sigma_a.rows() != d || sigma_a.cols() != d || sigma_b.rows() != d || sigma_b.cols() != d) {
    throw InvalidArgumentError("coupler inputs have inconsistent dimensions");
  }
}

/// Density of N(mu, sigma sigma^T) parameterised by the square root sigma.
class ScaleDensity {
 public:
  ScaleDensity(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma) : mu_(mu), lu_(sigma) {
    const double det = lu_.determinant();
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) throw InvalidArgumentError("coupler scale matrix is singular");
    log_norm_ = -0.5 * static_cast<double>(mu.size()) * std::log(2.0 * std::numbers::pi) - std::log(std::abs(det));
  }

  double log_density(const Eigen::VectorXd& x) const {
    return log_norm_ - 0.5 * lu_.solve(x - mu_).squaredNorm();
  }

 private:
  Eigen::VectorXd mu_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  double log_norm_ = 0.0;
};

}  // namespace

CoupledPair lindvall_rogers_gaussian(const Eigen::VectorXd& mu_a, const Eigen::VectorXd& mu_b,
                                     const Eigen::MatrixXd& sigma_a, const Eigen::MatrixXd& sigma_b, Rng& rng) {
  check_shapes(mu_a, mu_b, sigma_a, sigma_b);
  const Eigen::VectorXd diff = mu_a - mu_b;
  if (diff.isZero(0.0)) return common_noise_gaussian(mu_a, mu_b, sigma_a, sigma_b, rng);
  Eigen::VectorXd u = sigma_b.partialPivLu().solve(diff);
  const double norm = u.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericError("reflection direction is not finite");
  u /= norm;
  const Eigen::VectorXd w_a = standard_normal(mu_a.size(), rng);
  const Eigen::VectorXd w_b = w_a - 2.0 * u * u.dot(w_a);
  CoupledPair pair{mu_a + sigma_a * w_a, mu_b + sigma_b * w_b, false};
  pair.met = bitwise_equal(pair.left, pair.right);
  return pair;
}

CoupledPair common_noise_gaussian(const Eigen::VectorXd& mu_a, const Eigen::VectorXd& mu_b,
                                  const Eigen::MatrixXd& sigma_a, const Eigen::MatrixXd& sigma_b, Rng& rng) {
  check_shapes(mu_a, mu_b, sigma_a, sigma_b);
  const Eigen::VectorXd w = standard_normal(mu_a.size(), rng);
  CoupledPair pair{mu_a + sigma_a * w, mu_b + sigma_b * w, false};
  pair.met = bitwise_equal(pair.left, pair.right);
  return pair;
}

CoupledPair mlr_gaussian_coupler(const Eigen::VectorXd& mu_a, const Eigen::VectorXd& mu_b,
                                 const Eigen::MatrixXd& sigma_a, const Eigen::MatrixXd& sigma_b, Rng& rng) {
  const ScaleDensity f_a(mu_a, sigma_a);
  const ScaleDensity f_b(mu_b, sigma_b);
  CoupledPair pair = lindvall_rogers_gaussian(mu_a, mu_b, sigma_a, sigma_b, rng);

  const double log_u = std::log(rng.uniform_positive());
  const double log_u_a = log_u + f_a.log_density(pair.left);
  const double log_u_b = log_u + f_b.log_density(pair.right);

  const Eigen::VectorXd y = mu_a + sigma_a * standard_normal(mu_a.size(), rng);
  const double log_v = std::log(rng.uniform_positive()) + f_a.log_density(y);
  if (log_v <= f_b.log_density(y)) {
    if (log_u_a <= f_b.log_density(pair.left)) pair.left = y;
    if (log_u_b <= f_a.log_density(pair.right)) pair.right = y;
  }
  pair.met = bitwise_equal(pair.left, pair.right);
  return pair;
}

CoupledPair rejection_maximal_coupling(const CouplingTarget& a, const CouplingTarget& b, Rng& rng,
                                       std::size_t* trials) {
  CoupledPair pair;
  pair.left = a.sample(rng);
  const double log_u_a = std::log(rng.uniform_positive()) + a.log_density(pair.left);
  std::size_t proposals = 0;
  if (log_u_a <= b.log_density(pair.left)) {
    pair.right = pair.left;
    pair.met = true;
  } else {
    for (;;) {
      ++proposals;
      pair.right = b.sample(rng);
      const double log_u_b = std::log(rng.uniform_positive()) + b.log_density(pair.right);
      if (log_u_b > a.log_density(pair.right)) break;
    }
    pair.met = bitwise_equal(pair.left, pair.right);
  }
  if (trials != nullptr) *trials = proposals;
  return pair;
}

CoupledPair couple_gaussians(GaussianCoupler coupler, const Eigen::VectorXd& mu_a, const Eigen::VectorXd& mu_b,
                             const Eigen::MatrixXd& sigma_a, const Eigen::MatrixXd& sigma_b, Rng& rng) {
  switch (coupler) {
    case GaussianCoupler::LindvallRogers:
      return lindvall_rogers_gaussian(mu_a, mu_b, sigma_a, sigma_b, rng);
    case GaussianCoupler::ModifiedLindvallRogers:
      return mlr_gaussian_coupler(mu_a, mu_b, sigma_a, sigma_b, rng);
    case GaussianCoupler::CommonNoise:
      return common_noise_gaussian(mu_a, mu_b, sigma_a, sigma_b, rng);
  }
  throw InvalidArgumentError("unknown Gaussian coupler");
}

namespace {

void check_finite(const Eigen::VectorXd& v, const char* what, std::size_t step) {
  if (!v.allFinite()) throw NumericError(std::string("non-finite ") + what + " at Euler step " + std::to_string(step));
}

void check_finite(const Eigen::MatrixXd& m, const char* what, std::size_t step) {
  if (!m.allFinite()) throw NumericError(std::string("non-finite ") + what + " at Euler step " + std::to_string(step));
}

struct EulerMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd scale;
};

EulerMoments euler_moments(const DriftFunction& drift, const DiffusionFunction& diffusion, const Eigen::VectorXd& x,
                           double delta, std::size_t step) {
  const Eigen::VectorXd b = drift(x);
  const Eigen::MatrixXd s = diffusion(x);
  check_finite(b, "drift", step);
  check_finite(s, "diffusion", step);
  return {x + delta * b, std::sqrt(delta) * s};
}

/// Advances both chains by one Euler step of size delta; returns whether they coincide.
bool coupled_euler_step(const DriftFunction& drift, const DiffusionFunction& diffusion, Eigen::VectorXd& x_a,
                        Eigen::VectorXd& x_b, double delta, GaussianCoupler coupler, Rng& rng,
                        const StateProjection& project, std::size_t step) {
  if (bitwise_equal(x_a, x_b)) {
    const EulerMoments m = euler_moments(drift, diffusion, x_a, delta, step);
    x_a = m.mean + m.scale * standard_normal(x_a.size(), rng);
    if (project) project(x_a);
    check_finite(x_a, "state", step);
    x_b = x_a;
    return true;
  }
  const EulerMoments m_a = euler_moments(drift, diffusion, x_a, delta, step);
  const EulerMoments m_b = euler_moments(drift, diffusion, x_b, delta, step);
  CoupledPair pair = couple_gaussians(coupler, m_a.mean, m_b.mean, m_a.scale, m_b.scale, rng);
  x_a = std::move(pair.left);
  x_b = std::move(pair.right);
  if (project) {
    project(x_a);
    project(x_b);
  }
  check_finite(x_a, "state", step);
  check_finite(x_b, "state", step);
  return bitwise_equal(x_a, x_b);
}

}  // namespace

CoupledPair coupled_euler_transition(const DriftFunction& drift, const DiffusionFunction& diffusion,
                                     const Eigen::VectorXd& x0_a, const Eigen::VectorXd& x0_b,
                                     std::size_t n_steps, GaussianCoupler coupler, Rng& rng,
                                     const StateProjection& project) {
  if (n_steps == 0) throw InvalidArgumentError("Euler coupling needs at least one step");
  if (x0_a.size() != x0_b.size()) throw InvalidArgumentError("coupled chains have different dimensions");
  const double delta = 1.0 / static_cast<double>(n_steps);
  CoupledPair pair{x0_a, x0_b, false};
  for (std::size_t s = 0; s < n_steps; ++s) {
    pair.met = coupled_euler_step(drift, diffusion, pair.left, pair.right, delta, coupler, rng, project, s);
  }
  return pair;
}

Eigen::VectorXd euler_transition(const DriftFunction& drift, const DiffusionFunction& diffusion,
                                 const Eigen::VectorXd& x0, std::size_t n_steps, Rng& rng,
                                 const StateProjection& project) {
  if (n_steps == 0) throw InvalidArgumentError("Euler chain needs at least one step");
  const double delta = 1.0 / static_cast<double>(n_steps);
  Eigen::VectorXd x = x0;
  for (std::size_t s = 0; s < n_steps; ++s) {
    const EulerMoments m = euler_moments(drift, diffusion, x, delta, s);
    x = m.mean + m.scale * standard_normal(x.size(), rng);
    if (project) project(x);
    check_finite(x, "state", s);
  }
  return x;
}

std::optional<double> coupled_euler_meeting_time(const DriftFunction& drift, const DiffusionFunction& diffusion,
                                                 const Eigen::VectorXd& x0_a, const Eigen::VectorXd& x0_b,
                                                 double delta, double horizon, GaussianCoupler coupler, Rng& rng) {
  if (!(delta > 0.0) || !(horizon > 0.0)) throw InvalidArgumentError("meeting time needs positive delta and horizon");
  if (bitwise_equal(x0_a, x0_b)) return 0.0;
  const auto steps = static_cast<std::size_t>(std::llround(horizon / delta));
  Eigen::VectorXd x_a = x0_a;
  Eigen::VectorXd x_b = x0_b;
  for (std::size_t s = 1; s <= steps; ++s) {
    if (coupled_euler_step(drift, diffusion, x_a, x_b, delta, coupler, rng, {}, s)) {
      return static_cast<double>(s) * delta;
    }
  }
  return std::nullopt;
}

}  // namespace smc
