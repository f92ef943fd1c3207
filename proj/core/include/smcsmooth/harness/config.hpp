#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "smcsmooth/backward.hpp"
#include "smcsmooth/filter.hpp"
#include "smcsmooth/models/lotka_volterra.hpp"
#include "smcsmooth/resampling.hpp"
#include "smcsmooth/smoothers.hpp"

namespace smc {

enum class ModelFamily { Guarniero, Scalar, LotkaVolterra };

struct ModelSpec {
  ModelFamily family = ModelFamily::Guarniero;
  std::size_t dim = 2;       ///< guarniero
  double alpha = 0.4;        ///< guarniero
  double sigma_y2 = 0.5;     ///< guarniero
  double sigma_y = 0.5;      ///< scalar
  LotkaVolterraParams lv;    ///< lotka_volterra
};

enum class SmootherMode { Online, Offline };

/// Algorithm ids: a filter letter (B bootstrap, G guided) followed by a
/// backward letter (N genealogy tracking, P pure rejection, H hybrid
/// rejection, M MCMC, F dense FFBS); or ITR / ITRC.
struct AlgorithmSpec {
  std::string id;
  FilterKind filter = FilterKind::Bootstrap;
  BackwardMethod method = BackwardMethod::GenealogyTracking;
  FfbsSampler sampler = FfbsSampler::Direct;
};

/// Throws ConfigError for unknown ids.
AlgorithmSpec parse_algorithm(const std::string& id);

struct ExperimentConfig {
  ModelSpec model;
  std::string algorithm = "BM";
  SmootherMode mode = SmootherMode::Online;
  std::size_t n = 100;
  std::size_t horizon = 100;
  std::size_t n_tilde = 2;
  std::size_t hybrid_max_trials = 0;  ///< 0 selects K = N
  std::size_t n_traj = 0;             ///< offline only; 0 selects N
  ResamplingScheme resampling = ResamplingScheme::Systematic;
  std::size_t replicates = 10;
  std::uint64_t seed = 1;
  /// Seed of the simulated dataset, shared by every replicate.
  std::uint64_t data_seed = 0;
  std::size_t workers = 1;
  std::string output;

  /// Throws ConfigError when fields are out of range or the algorithm does
  /// not suit the model.
  void validate() const;
};

/// Reads a YAML document with `model:`, `algorithm:` and `run:` sections.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical YAML rendering; parse_config(to_yaml(c)) reproduces c.
std::string to_yaml(const ExperimentConfig& config);

/// Value of SMCSMOOTH_SEED if set. Throws ConfigError if it is not an integer.
std::optional<std::uint64_t> seed_from_environment();

std::string to_string(ModelFamily family);
std::string to_string(SmootherMode mode);
std::string to_string(ResamplingScheme scheme);

}  // namespace smc
