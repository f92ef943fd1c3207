#include "smcsmooth/harness/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "smcsmooth/errors.hpp"

namespace smc {

namespace {

template <typename T>
void read(const YAML::Node& section, const char* key, T& out) {
  if (!section || !section[key]) return;
  try {
    out = section[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

void read_matrix(const YAML::Node& section, const char* key, Eigen::Matrix2d& out) {
  if (!section || !section[key]) return;
  const YAML::Node node = section[key];
  if (!node.IsSequence() || node.size() != 4) throw ConfigError(std::string("'") + key + "' needs 4 numbers, row-major");
  for (int i = 0; i < 4; ++i) out(i / 2, i % 2) = node[i].as<double>();
}

void read_vector(const YAML::Node& section, const char* key, Eigen::Vector2d& out) {
  if (!section || !section[key]) return;
  const YAML::Node node = section[key];
  if (!node.IsSequence() || node.size() != 2) throw ConfigError(std::string("'") + key + "' needs 2 numbers");
  for (int i = 0; i < 2; ++i) out(i) = node[i].as<double>();
}

ModelFamily parse_family(const std::string& s) {
  if (s == "guarniero") return ModelFamily::Guarniero;
  if (s == "scalar") return ModelFamily::Scalar;
  if (s == "lotka_volterra") return ModelFamily::LotkaVolterra;
  throw ConfigError("unknown model family '" + s + "'");
}

SmootherMode parse_mode(const std::string& s) {
  if (s == "online") return SmootherMode::Online;
  if (s == "offline") return SmootherMode::Offline;
  throw ConfigError("unknown mode '" + s + "'");
}

ResamplingScheme parse_resampling(const std::string& s) {
  if (s == "systematic") return ResamplingScheme::Systematic;
  if (s == "multinomial") return ResamplingScheme::Multinomial;
  throw ConfigError("unknown resampling scheme '" + s + "'");
}

void check_known_keys(const YAML::Node& section, const char* name, std::initializer_list<const char*> keys) {
  if (!section) return;
  if (!section.IsMap()) throw ConfigError(std::string("section '") + name + "' must be a mapping");
  for (const auto& kv : section) {
    const auto key = kv.first.as<std::string>();
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw ConfigError(std::string("unknown key '") + key + "' in section '" + name + "'");
  }
}

}  // namespace

std::string to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::Guarniero: return "guarniero";
    case ModelFamily::Scalar: return "scalar";
    case ModelFamily::LotkaVolterra: return "lotka_volterra";
  }
  return "unknown";
}

std::string to_string(SmootherMode mode) { return mode == SmootherMode::Online ? "online" : "offline"; }

std::string to_string(ResamplingScheme scheme) {
  return scheme == ResamplingScheme::Systematic ? "systematic" : "multinomial";
}

AlgorithmSpec parse_algorithm(const std::string& id) {
  AlgorithmSpec spec;
  spec.id = id;
  if (id == "ITR" || id == "ITRC") {
    spec.method = id == "ITR" ? BackwardMethod::Itr : BackwardMethod::Itrc;
    return spec;
  }
  if (id.size() != 2) throw ConfigError("unknown algorithm id '" + id + "'");
  switch (id[0]) {
    case 'B': spec.filter = FilterKind::Bootstrap; break;
    case 'G': spec.filter = FilterKind::Guided; break;
    default: throw ConfigError("unknown filter letter in algorithm id '" + id + "'");
  }
  switch (id[1]) {
    case 'N': spec.method = BackwardMethod::GenealogyTracking; break;
    case 'P': spec.method = BackwardMethod::Paris; spec.sampler = FfbsSampler::PureRejection; break;
    case 'H': spec.method = BackwardMethod::Paris; spec.sampler = FfbsSampler::Hybrid; break;
    case 'M': spec.method = BackwardMethod::Imhp; break;
    case 'F': spec.method = BackwardMethod::FfbsDense; break;
    default: throw ConfigError("unknown backward letter in algorithm id '" + id + "'");
  }
  return spec;
}

void ExperimentConfig::validate() const {
  const AlgorithmSpec spec = parse_algorithm(algorithm);
  if (n == 0) throw ConfigError("N must be positive");
  if (horizon == 0) throw ConfigError("horizon must be positive");
  if (replicates == 0) throw ConfigError("replicates must be positive");
  if (workers == 0) throw ConfigError("workers must be positive");
  const bool tractable = model.family != ModelFamily::LotkaVolterra;
  const bool needs_density = spec.method == BackwardMethod::FfbsDense || spec.method == BackwardMethod::Paris ||
                             spec.method == BackwardMethod::Imhp;
  if (needs_density && !tractable) throw ConfigError("algorithm " + algorithm + " needs a tractable transition density");
  if (spec.filter == FilterKind::Guided && !tractable) throw ConfigError("guided filter needs a tractable proposal");
  if ((spec.method == BackwardMethod::Paris || spec.method == BackwardMethod::Imhp) && n_tilde == 0) {
    throw ConfigError("n_tilde must be positive");
  }
  if (spec.method == BackwardMethod::Itrc && n % 2 != 0) throw ConfigError("ITRC needs an even N");
  if (model.family == ModelFamily::Guarniero && (model.dim == 0 || model.dim > 8)) {
    throw ConfigError("guarniero dim must lie in [1, 8]");
  }
  if (model.family == ModelFamily::Guarniero && !(model.sigma_y2 > 0.0)) throw ConfigError("sigma_y2 must be positive");
  if (model.family == ModelFamily::Scalar && !(model.sigma_y > 0.0)) throw ConfigError("sigma_y must be positive");
  if (model.family == ModelFamily::LotkaVolterra) {
    try {
      model.lv.validate();
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
}

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("cannot parse config: ") + e.what());
  }
  if (!root || !root.IsMap()) throw ConfigError("config must be a mapping with model, algorithm and run sections");
  check_known_keys(root, "top level", {"model", "algorithm", "run"});
  const YAML::Node model = root["model"];
  const YAML::Node algorithm = root["algorithm"];
  const YAML::Node run = root["run"];
  check_known_keys(model, "model",
                   {"family", "dim", "alpha", "sigma_y2", "sigma_y", "beta0", "beta1", "tau0", "tau1", "noise_cov",
                    "obs_cov", "initial_mean", "initial_cov", "n_steps", "floor"});
  check_known_keys(algorithm, "algorithm", {"id", "mode", "n_tilde", "hybrid_max_trials", "n_traj", "resampling"});
  check_known_keys(run, "run", {"n", "horizon", "replicates", "seed", "data_seed", "workers", "output"});

  ExperimentConfig c;
  if (model && model["family"]) c.model.family = parse_family(model["family"].as<std::string>());
  read(model, "dim", c.model.dim);
  read(model, "alpha", c.model.alpha);
  read(model, "sigma_y2", c.model.sigma_y2);
  read(model, "sigma_y", c.model.sigma_y);
  read(model, "beta0", c.model.lv.beta0);
  read(model, "beta1", c.model.lv.beta1);
  read(model, "tau0", c.model.lv.tau0);
  read(model, "tau1", c.model.lv.tau1);
  read_matrix(model, "noise_cov", c.model.lv.noise_cov);
  read_matrix(model, "obs_cov", c.model.lv.obs_cov);
  read_vector(model, "initial_mean", c.model.lv.initial_mean);
  read_matrix(model, "initial_cov", c.model.lv.initial_cov);
  read(model, "n_steps", c.model.lv.n_steps);
  read(model, "floor", c.model.lv.floor);

  read(algorithm, "id", c.algorithm);
  if (algorithm && algorithm["mode"]) c.mode = parse_mode(algorithm["mode"].as<std::string>());
  read(algorithm, "n_tilde", c.n_tilde);
  read(algorithm, "hybrid_max_trials", c.hybrid_max_trials);
  read(algorithm, "n_traj", c.n_traj);
  if (algorithm && algorithm["resampling"]) c.resampling = parse_resampling(algorithm["resampling"].as<std::string>());

  read(run, "n", c.n);
  read(run, "horizon", c.horizon);
  read(run, "replicates", c.replicates);
  read(run, "seed", c.seed);
  read(run, "data_seed", c.data_seed);
  read(run, "workers", c.workers);
  read(run, "output", c.output);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_yaml(const ExperimentConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  auto matrix = [&out](const Eigen::Matrix2d& m) {
    out << YAML::Flow << YAML::BeginSeq << m(0, 0) << m(0, 1) << m(1, 0) << m(1, 1) << YAML::EndSeq;
  };
  out << YAML::BeginMap;
  out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "family" << YAML::Value << to_string(c.model.family);
  switch (c.model.family) {
    case ModelFamily::Guarniero:
      out << YAML::Key << "dim" << YAML::Value << c.model.dim;
      out << YAML::Key << "alpha" << YAML::Value << c.model.alpha;
      out << YAML::Key << "sigma_y2" << YAML::Value << c.model.sigma_y2;
      break;
    case ModelFamily::Scalar:
      out << YAML::Key << "sigma_y" << YAML::Value << c.model.sigma_y;
      break;
    case ModelFamily::LotkaVolterra: {
      const LotkaVolterraParams& p = c.model.lv;
      out << YAML::Key << "beta0" << YAML::Value << p.beta0;
      out << YAML::Key << "beta1" << YAML::Value << p.beta1;
      out << YAML::Key << "tau0" << YAML::Value << p.tau0;
      out << YAML::Key << "tau1" << YAML::Value << p.tau1;
      out << YAML::Key << "noise_cov" << YAML::Value;
      matrix(p.noise_cov);
      out << YAML::Key << "obs_cov" << YAML::Value;
      matrix(p.obs_cov);
      out << YAML::Key << "initial_mean" << YAML::Value << YAML::Flow << YAML::BeginSeq << p.initial_mean(0)
          << p.initial_mean(1) << YAML::EndSeq;
      out << YAML::Key << "initial_cov" << YAML::Value;
      matrix(p.initial_cov);
      out << YAML::Key << "n_steps" << YAML::Value << p.n_steps;
      out << YAML::Key << "floor" << YAML::Value << p.floor;
      break;
    }
  }
  out << YAML::EndMap;
  out << YAML::Key << "algorithm" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "id" << YAML::Value << c.algorithm;
  out << YAML::Key << "mode" << YAML::Value << to_string(c.mode);
  out << YAML::Key << "n_tilde" << YAML::Value << c.n_tilde;
  out << YAML::Key << "hybrid_max_trials" << YAML::Value << c.hybrid_max_trials;
  out << YAML::Key << "n_traj" << YAML::Value << c.n_traj;
  out << YAML::Key << "resampling" << YAML::Value << to_string(c.resampling);
  out << YAML::EndMap;
  out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n" << YAML::Value << c.n;
  out << YAML::Key << "horizon" << YAML::Value << c.horizon;
  out << YAML::Key << "replicates" << YAML::Value << c.replicates;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "data_seed" << YAML::Value << c.data_seed;
  out << YAML::Key << "workers" << YAML::Value << c.workers;
  out << YAML::Key << "output" << YAML::Value << c.output;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::optional<std::uint64_t> seed_from_environment() {
  const char* value = std::getenv("SMCSMOOTH_SEED");
  if (value == nullptr || *value == '\0') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long parsed = std::strtoull(value, &end, 10);
  if (errno != 0 || end == value || *end != '\0') throw ConfigError("SMCSMOOTH_SEED must be an unsigned integer");
  return static_cast<std::uint64_t>(parsed);
}

}  // namespace smc
