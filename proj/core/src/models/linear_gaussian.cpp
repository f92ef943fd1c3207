#include "smcsmooth/models/linear_gaussian.hpp"

#include <cmath>

#include "smcsmooth/coupling.hpp"
#include "smcsmooth/errors.hpp"

namespace smc {

namespace {

bool is_spd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0 || !m.isApprox(m.transpose(), 1e-12)) return false;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  return llt.info() == Eigen::Success;
}

std::vector<double> row_major(const Eigen::MatrixXd& m) {
  std::vector<double> out(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
  }
  return out;
}

Eigen::VectorXd to_vector(State x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

}  // namespace

void LinearGaussianModel::validate() const {
  const Eigen::Index dx = fx.rows();
  if (dx == 0 || fx.cols() != dx) throw InvalidArgumentError("F_X must be square and nonempty");
  if (fy.cols() != dx || fy.rows() == 0) throw InvalidArgumentError("F_Y must have dim_X columns");
  if (cx.rows() != dx || !is_spd(cx)) throw InvalidArgumentError("C_X must be SPD of size dim_X");
  if (cy.rows() != fy.rows() || !is_spd(cy)) throw InvalidArgumentError("C_Y must be SPD of size dim_Y");
  if (initial_mean.size() != dx || initial_cov.rows() != dx || !is_spd(initial_cov)) {
    throw InvalidArgumentError("initial law must be a dim_X Gaussian with SPD covariance");
  }
  if (Eigen::FullPivLU<Eigen::MatrixXd>(fx).rank() != dx) throw InvalidArgumentError("F_X is not full rank");
  if (Eigen::FullPivLU<Eigen::MatrixXd>(fy).rank() != std::min(fy.rows(), fy.cols())) {
    throw InvalidArgumentError("F_Y is not full rank");
  }
}

LinearGaussianModel guarniero_model(std::size_t dim, double alpha, double sigma_y2) {
  const auto d = static_cast<Eigen::Index>(dim);
  LinearGaussianModel m;
  m.fx.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m.fx(i, j) = std::pow(alpha, 1.0 + static_cast<double>(std::abs(i - j)));
  }
  m.cx = Eigen::MatrixXd::Identity(d, d);
  m.fy = Eigen::MatrixXd::Identity(d, d);
  m.cy = sigma_y2 * Eigen::MatrixXd::Identity(d, d);
  m.initial_mean = Eigen::VectorXd::Zero(d);
  m.initial_cov = Eigen::MatrixXd::Identity(d, d);
  m.validate();
  return m;
}

LinearGaussianModel scalar_model(double sigma_y) {
  LinearGaussianModel m;
  m.fx = Eigen::MatrixXd::Constant(1, 1, 0.5);
  m.cx = Eigen::MatrixXd::Constant(1, 1, 1.0);
  m.fy = Eigen::MatrixXd::Constant(1, 1, 1.0);
  m.cy = Eigen::MatrixXd::Constant(1, 1, sigma_y * sigma_y);
  m.initial_mean = Eigen::VectorXd::Zero(1);
  m.initial_cov = Eigen::MatrixXd::Constant(1, 1, 1.0 / (1.0 - 0.25));
  m.validate();
  return m;
}

SimulatedData simulate_data(const LinearGaussianModel& model, std::size_t horizon, Rng& rng) {
  model.validate();
  const Eigen::MatrixXd l0 = model.initial_cov.llt().matrixL();
  const Eigen::MatrixXd lx = model.cx.llt().matrixL();
  const Eigen::MatrixXd ly = model.cy.llt().matrixL();
  auto noise = [&rng](Eigen::Index d) {
    Eigen::VectorXd z(d);
    for (Eigen::Index i = 0; i < d; ++i) z(i) = rng.normal();
    return z;
  };
  SimulatedData data;
  Eigen::VectorXd x = model.initial_mean + l0 * noise(l0.rows());
  for (std::size_t t = 0; t <= horizon; ++t) {
    if (t > 0) x = model.fx * x + lx * noise(lx.rows());
    data.states.push_back(x);
    data.observations.push_back(model.fy * x + ly * noise(ly.rows()));
  }
  return data;
}

LinearGaussianFK::LinearGaussianFK(LinearGaussianModel model, std::vector<Eigen::VectorXd> observations)
    : model_(std::move(model)), observations_(std::move(observations)) {
  model_.validate();
  if (observations_.empty()) throw InvalidArgumentError("need at least one observation");
  for (const auto& y : observations_) {
    if (y.size() != model_.fy.rows()) throw InvalidArgumentError("observation has the wrong dimension");
  }
  initial_ = GaussianNoise(model_.initial_cov);
  transition_ = GaussianNoise(model_.cx);
  emission_ = GaussianNoise(model_.cy);
  const Eigen::MatrixXd cx_inv = model_.cx.inverse();
  const Eigen::MatrixXd cy_inv = model_.cy.inverse();
  Eigen::MatrixXd p = (cx_inv + model_.fy.transpose() * cy_inv * model_.fy).inverse();
  p = 0.5 * (p + p.transpose());
  proposal_ = GaussianNoise(p);
  proposal_gain_x_ = p * cx_inv * model_.fx;
  proposal_gain_y_ = p * model_.fy.transpose() * cy_inv;
  fx_ = row_major(model_.fx);
  fy_ = row_major(model_.fy);
}

void LinearGaussianFK::mean_of(State prev, double* out) const {
  const std::size_t d = dim();
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += fx_[i * d + j] * prev[j];
    out[i] = s;
  }
}

void LinearGaussianFK::sample_initial(Rng& rng, MutableState out) const {
  initial_.sample(rng, out.data());
  for (std::size_t i = 0; i < dim(); ++i) out[i] += model_.initial_mean(static_cast<Eigen::Index>(i));
}

void LinearGaussianFK::sample_transition(std::size_t, State prev, Rng& rng, MutableState out) const {
  double mean[kMaxGaussianDim];
  mean_of(prev, mean);
  transition_.sample(rng, out.data());
  for (std::size_t i = 0; i < dim(); ++i) out[i] += mean[i];
}

double LinearGaussianFK::log_potential(std::size_t t, State x) const {
  const Eigen::VectorXd& y = observations_.at(t);
  const std::size_t dy = static_cast<std::size_t>(y.size());
  const std::size_t dx = dim();
  double r[kMaxGaussianDim];
  for (std::size_t i = 0; i < dy; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dx; ++j) s += fy_[i * dx + j] * x[j];
    r[i] = y(static_cast<Eigen::Index>(i)) - s;
  }
  return emission_.log_density_of_residual(r);
}

double LinearGaussianFK::log_transition_density(std::size_t, State prev, State x) const {
  double r[kMaxGaussianDim];
  mean_of(prev, r);
  for (std::size_t i = 0; i < dim(); ++i) r[i] = x[i] - r[i];
  return transition_.log_density_of_residual(r);
}

std::optional<double> LinearGaussianFK::log_transition_bound(std::size_t) const {
  return transition_.log_normalizer();
}

Eigen::VectorXd LinearGaussianFK::proposal_mean(std::size_t t, const Eigen::VectorXd& prev) const {
  return proposal_gain_x_ * prev + proposal_gain_y_ * observations_.at(t);
}

void LinearGaussianFK::sample_guided(std::size_t t, State prev, Rng& rng, MutableState out) const {
  const Eigen::VectorXd mean = proposal_mean(t, to_vector(prev));
  proposal_.sample(rng, out.data());
  for (std::size_t i = 0; i < dim(); ++i) out[i] += mean(static_cast<Eigen::Index>(i));
}

double LinearGaussianFK::log_guided_density(std::size_t t, State prev, State x) const {
  const Eigen::VectorXd r = to_vector(x) - proposal_mean(t, to_vector(prev));
  return proposal_.log_density_of_residual(r.data());
}

bool LinearGaussianFK::sample_coupled_transition(std::size_t t, State prev_a, State prev_b, Rng& rng,
                                                 MutableState out_a, MutableState out_b) const {
  const std::size_t d = dim();
  auto target = [this, t, d](State prev) {
    Eigen::VectorXd mean(static_cast<Eigen::Index>(d));
    mean_of(prev, mean.data());
    CouplingTarget target;
    target.log_density = [this, mean](const Eigen::VectorXd& x) {
      const Eigen::VectorXd r = x - mean;
      return transition_.log_density_of_residual(r.data());
    };
    target.sample = [this, mean](Rng& r) {
      Eigen::VectorXd x(mean.size());
      transition_.sample(r, x.data());
      return Eigen::VectorXd(x + mean);
    };
    (void)t;
    return target;
  };
  const CoupledPair pair = rejection_maximal_coupling(target(prev_a), target(prev_b), rng);
  std::copy(pair.left.data(), pair.left.data() + d, out_a.begin());
  std::copy(pair.right.data(), pair.right.data() + d, out_b.begin());
  return pair.met;
}

}  // namespace smc
