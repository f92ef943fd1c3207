#include "smcsmooth/models/lotka_volterra.hpp"

#include <algorithm>
#include <cmath>

#include "smcsmooth/errors.hpp"

namespace smc {

void LotkaVolterraParams::validate() const {
  if (!(beta0 > 0.0 && beta1 > 0.0 && tau0 > 0.0 && tau1 > 0.0)) {
    throw InvalidArgumentError("Lotka-Volterra rates must be positive");
  }
  for (const Eigen::Matrix2d* m : {&noise_cov, &obs_cov, &initial_cov}) {
    if (!m->isApprox(m->transpose()) || Eigen::LLT<Eigen::Matrix2d>(*m).info() != Eigen::Success) {
      throw InvalidArgumentError("Lotka-Volterra covariances must be SPD");
    }
  }
  if (n_steps == 0) throw InvalidArgumentError("Euler discretisation needs at least one step");
  if (!(floor > 0.0)) throw InvalidArgumentError("positivity floor must be positive");
}

Eigen::Vector2d lv_drift(const LotkaVolterraParams& p, const Eigen::Vector2d& x) {
  return {p.beta0 * x(0) - 0.5 * p.tau0 * x(0) * x(0) - p.tau1 * x(0) * x(1), -p.beta1 * x(1) + p.tau1 * x(0) * x(1)};
}

Eigen::Matrix2d lv_diffusion(const LotkaVolterraParams& p, const Eigen::Vector2d& x) {
  const Eigen::Matrix2d gamma = p.noise_cov.llt().matrixL();
  return x.asDiagonal() * gamma;
}

namespace {

/// Clamps coordinates below the floor; returns how many were clamped.
std::size_t clamp(Eigen::VectorXd& x, double floor) {
  std::size_t clamped = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) < floor) {
      x(i) = floor;
      ++clamped;
    }
  }
  return clamped;
}

Eigen::VectorXd draw(const GaussianNoise& noise, const Eigen::VectorXd& mean, Rng& rng) {
  Eigen::VectorXd x(mean.size());
  noise.sample(rng, x.data());
  return x + mean;
}

}  // namespace

LvData simulate_lv(const LotkaVolterraParams& params, std::size_t horizon, Rng& rng) {
  params.validate();
  const Eigen::Matrix2d gamma = params.noise_cov.llt().matrixL();
  const DriftFunction drift = [&params](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return lv_drift(params, x);
  };
  const DiffusionFunction diffusion = [gamma](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    return x.asDiagonal() * gamma;
  };
  const StateProjection project = [&params](Eigen::VectorXd& x) { clamp(x, params.floor); };
  const GaussianNoise initial(params.initial_cov);
  const GaussianNoise emission(params.obs_cov);
  LvData data;
  Eigen::VectorXd x = draw(initial, params.initial_mean, rng);
  clamp(x, params.floor);
  for (std::size_t t = 0; t <= horizon; ++t) {
    if (t > 0) x = euler_transition(drift, diffusion, x, params.n_steps, rng, project);
    data.states.push_back(x);
    data.observations.push_back(draw(emission, x.array().log().matrix(), rng));
  }
  return data;
}

LotkaVolterraFK::LotkaVolterraFK(LotkaVolterraParams params, std::vector<Eigen::VectorXd> observations,
                                 GaussianCoupler coupler)
    : params_(std::move(params)), observations_(std::move(observations)), coupler_(coupler) {
  params_.validate();
  if (observations_.empty()) throw InvalidArgumentError("need at least one observation");
  for (const auto& y : observations_) {
    if (y.size() != 2) throw InvalidArgumentError("Lotka-Volterra observations are two-dimensional");
  }
  initial_ = GaussianNoise(params_.initial_cov);
  emission_ = GaussianNoise(params_.obs_cov);
  const Eigen::Matrix2d gamma = params_.noise_cov.llt().matrixL();
  drift_ = [this](const Eigen::VectorXd& x) -> Eigen::VectorXd { return lv_drift(params_, x); };
  diffusion_ = [gamma](const Eigen::VectorXd& x) -> Eigen::MatrixXd { return x.asDiagonal() * gamma; };
  project_ = [this](Eigen::VectorXd& x) {
    const std::size_t n = clamp(x, params_.floor);
    if (n > 0) clamps_.fetch_add(n, std::memory_order_relaxed);
  };
}

void LotkaVolterraFK::sample_initial(Rng& rng, MutableState out) const {
  Eigen::VectorXd x = draw(initial_, params_.initial_mean, rng);
  project_(x);
  std::copy(x.data(), x.data() + 2, out.begin());
}

void LotkaVolterraFK::sample_transition(std::size_t, State prev, Rng& rng, MutableState out) const {
  const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(prev.data(), 2);
  const Eigen::VectorXd x = euler_transition(drift_, diffusion_, x0, params_.n_steps, rng, project_);
  std::copy(x.data(), x.data() + 2, out.begin());
}

double LotkaVolterraFK::log_potential(std::size_t t, State x) const {
  const Eigen::VectorXd& y = observations_.at(t);
  const double r[2] = {y(0) - std::log(x[0]), y(1) - std::log(x[1])};
  return emission_.log_density_of_residual(r);
}

bool LotkaVolterraFK::sample_coupled_transition(std::size_t, State prev_a, State prev_b, Rng& rng,
                                                MutableState out_a, MutableState out_b) const {
  const Eigen::VectorXd xa = Eigen::Map<const Eigen::VectorXd>(prev_a.data(), 2);
  const Eigen::VectorXd xb = Eigen::Map<const Eigen::VectorXd>(prev_b.data(), 2);
  const CoupledPair pair = coupled_euler_transition(drift_, diffusion_, xa, xb, params_.n_steps, coupler_, rng, project_);
  std::copy(pair.left.data(), pair.left.data() + 2, out_a.begin());
  std::copy(pair.right.data(), pair.right.data() + 2, out_b.begin());
  return pair.met;
}

}  // namespace smc
