#include "smcsmooth/harness/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "smcsmooth/backward.hpp"
#include "smcsmooth/discrete_sampler.hpp"
#include "smcsmooth/errors.hpp"
#include "smcsmooth/models/kalman.hpp"
#include "smcsmooth/models/linear_gaussian.hpp"
#include "smcsmooth/models/lotka_volterra.hpp"

namespace smc {

namespace {

constexpr std::uint64_t kDataStream = 0xda7a5eedULL;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

LinearGaussianModel lg_model(const ModelSpec& spec) {
  return spec.family == ModelFamily::Scalar ? scalar_model(spec.sigma_y)
                                            : guarniero_model(spec.dim, spec.alpha, spec.sigma_y2);
}

/// Per-time cost deltas of a monotone counter.
class CostTrace {
 public:
  explicit CostTrace(const CostCounter& counter) : counter_(counter), last_(counter.evaluations()) {}
  std::uint64_t take() {
    const std::uint64_t now = counter_.evaluations();
    const std::uint64_t delta = now - last_;
    last_ = now;
    return delta;
  }

 private:
  const CostCounter& counter_;
  std::uint64_t last_;
};

void fill_counter_totals(RunRecord& record, const CostCounter& counter) {
  record.draws = counter.draws();
  record.trials = counter.trials();
  record.fallbacks = counter.fallbacks();
  record.max_trials = counter.max_trials();
}

void run_online(const ExperimentConfig& config, const ExperimentSetup& setup, const AlgorithmSpec& spec, Rng& rng,
                RunRecord& record) {
  OnlineOptions options;
  options.filter = spec.filter;
  options.method = spec.method;
  options.n_tilde = config.n_tilde;
  options.sampler = spec.sampler;
  options.hybrid_max_trials = config.hybrid_max_trials;
  options.resampling = config.resampling;
  OnlineSmoother smoother(*setup.model, setup.function, options, config.n, rng);
  CostTrace trace(smoother.cost());
  const std::size_t horizon = setup.model->horizon();
  record.estimate.reserve(horizon + 1);
  for (std::size_t t = 0; t <= horizon; ++t) {
    if (t > 0) smoother.step(rng);
    record.estimate.push_back(smoother.estimate());
    record.ess.push_back(ess(smoother.cloud().weights()));
    record.cost.push_back(trace.take());
  }
  fill_counter_totals(record, smoother.cost());
  record.coupled_pairs = smoother.coupled_pairs();
  record.met_pairs = smoother.met_pairs();
}

void run_offline(const ExperimentConfig& config, const ExperimentSetup& setup, const AlgorithmSpec& spec, Rng& rng,
                 RunRecord& record) {
  const FeynmanKacModel& model = *setup.model;
  const std::size_t horizon = model.horizon();
  const std::size_t n = config.n;
  CostCounter counter;
  std::vector<ParticleCloud> clouds;
  std::vector<BackwardKernel> kernels;
  clouds.reserve(horizon + 1);
  kernels.reserve(horizon);
  clouds.push_back(initial_cloud(model, n, rng));

  const bool coupled = spec.method == BackwardMethod::Itr || spec.method == BackwardMethod::Itrc;
  for (std::size_t t = 1; t <= horizon; ++t) {
    if (coupled) {
      CoupledForwardStep s = spec.method == BackwardMethod::Itr ? itr_forward_step(model, clouds.back(), rng)
                                                                 : itrc_forward_step(model, clouds.back(), rng);
      record.coupled_pairs += s.distinct_pairs;
      record.met_pairs += s.met_pairs;
      clouds.push_back(std::move(s.cloud));
      kernels.push_back(std::move(s.kernel));
    } else {
      clouds.push_back(filter_step(spec.filter, model, clouds.back(), config.resampling, rng));
    }
  }

  std::vector<AliasSampler> proposals;
  if (!coupled) {
    proposals.reserve(horizon);
    for (std::size_t t = 1; t <= horizon; ++t) {
      proposals.emplace_back(clouds[t - 1].weights());
      const ParticleCloud& prev = clouds[t - 1];
      const ParticleCloud& cur = clouds[t];
      switch (spec.method) {
        case BackwardMethod::GenealogyTracking:
          kernels.push_back(gt_kernel(cur));
          break;
        case BackwardMethod::FfbsDense:
          kernels.push_back(lazy_ffbs_kernel(model, prev, cur, FfbsSampler::Direct, 0, proposals.back(), counter));
          break;
        case BackwardMethod::Paris:
          kernels.push_back(lazy_ffbs_kernel(model, prev, cur, spec.sampler, config.hybrid_max_trials,
                                             proposals.back(), counter));
          break;
        case BackwardMethod::Imhp:
          kernels.push_back(imh_kernel(model, prev, cur, std::max<std::size_t>(1, config.n_tilde - 1),
                                       proposals.back(), counter));
          break;
        default:
          throw InvalidArgumentError("unsupported offline method");
      }
    }
  }

  record.cost.assign(horizon + 1, 0);
  CostTrace trace(counter);
  const std::size_t n_traj = config.n_traj == 0 ? n : config.n_traj;
  const std::vector<TrajectoryDraw> paths =
      offline_smoother(clouds, kernels, n_traj, rng, [&](std::size_t t) { record.cost[t] = trace.take(); });

  const std::size_t d = model.dim();
  std::vector<double> running(n_traj, 0.0);
  record.estimate.resize(horizon + 1);
  for (std::size_t t = 0; t <= horizon; ++t) {
    double total = 0.0;
    for (std::size_t k = 0; k < n_traj; ++k) {
      const double* x = paths[k].states.data();
      running[k] += t == 0 ? setup.function.initial(State{x, d})
                           : setup.function.increment(t, State{x + (t - 1) * d, d}, State{x + t * d, d});
      total += running[k];
    }
    record.estimate[t] = total / static_cast<double>(n_traj);
    record.ess.push_back(ess(clouds[t].weights()));
  }
  fill_counter_totals(record, counter);
}

}  // namespace

ExperimentSetup make_setup(const ExperimentConfig& config) {
  config.validate();
  ExperimentSetup setup;
  Rng data_rng = Rng::for_stream(config.data_seed, kDataStream);
  if (config.model.family == ModelFamily::LotkaVolterra) {
    LvData data = simulate_lv(config.model.lv, config.horizon, data_rng);
    setup.model = std::make_unique<LotkaVolterraFK>(config.model.lv, std::move(data.observations));
    setup.function = AdditiveFunction::coordinate_sum(0, config.model.lv.initial_mean(0));
    return setup;
  }
  const LinearGaussianModel lg = lg_model(config.model);
  SimulatedData data = simulate_data(lg, config.horizon, data_rng);
  setup.reference = config.mode == SmootherMode::Online
                        ? kalman_online_reference(lg, data.observations)
                        : kalman_additive_reference(kalman_filter_smoother(lg, data.observations));
  setup.model = std::make_unique<LinearGaussianFK>(lg, std::move(data.observations));
  setup.function = AdditiveFunction::coordinate_sum(0, 0.0);
  return setup;
}

RunRecord run_replicate(const ExperimentConfig& config, const ExperimentSetup& setup, std::size_t replicate) {
  RunRecord record;
  record.replicate = replicate;
  Rng rng = Rng::for_stream(config.seed, replicate);
  const auto start = std::chrono::steady_clock::now();
  try {
    const AlgorithmSpec spec = parse_algorithm(config.algorithm);
    if (config.mode == SmootherMode::Online) {
      run_online(config, setup, spec, rng, record);
    } else {
      run_offline(config, setup, spec, rng, record);
    }
  } catch (const std::exception& e) {
    record.failed = true;
    record.error = e.what();
    record.estimate.clear();
    record.ess.clear();
    record.cost.clear();
  }
  record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const ExperimentSetup setup = make_setup(config);
  ExperimentResult result;
  result.config = config;
  result.reference = setup.reference;
  result.records.resize(config.replicates);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t r = next.fetch_add(1); r < config.replicates; r = next.fetch_add(1)) {
      result.records[r] = run_replicate(config, setup, r);
    }
  };
  const std::size_t n_threads = std::min(config.workers, config.replicates);
  std::vector<std::thread> threads;
  for (std::size_t i = 1; i < n_threads; ++i) threads.emplace_back(worker);
  worker();
  for (auto& th : threads) th.join();
  return result;
}

void write_records_csv(const ExperimentResult& result, std::ostream& out) {
  const ExperimentConfig& c = result.config;
  out << "# smcsmooth results\n";
  out << "# algorithm: " << c.algorithm << '\n';
  out << "# mode: " << to_string(c.mode) << '\n';
  out << "# model: " << to_string(c.model.family) << '\n';
  out << "# n: " << c.n << '\n';
  out << "# horizon: " << c.horizon << '\n';
  out << "# n_tilde: " << c.n_tilde << '\n';
  out << "# replicates: " << c.replicates << '\n';
  out << "# seed: " << c.seed << '\n';
  out << "# data_seed: " << c.data_seed << '\n';
  for (const RunRecord& r : result.records) {
    if (r.failed) out << "# failed." << r.replicate << ": " << r.error << '\n';
  }
  out << "replicate,t,estimate,ess,cost\n";
  for (const RunRecord& r : result.records) {
    for (std::size_t t = 0; t < r.estimate.size(); ++t) {
      out << r.replicate << ',' << t << ',' << format_double(r.estimate[t]) << ',' << format_double(r.ess[t]) << ','
          << r.cost[t] << '\n';
    }
  }
}

void write_summary_json(const ExperimentResult& result, std::ostream& out) {
  nlohmann::ordered_json j;
  j["config"] = to_yaml(result.config);
  j["reference"] = result.reference;
  nlohmann::ordered_json reps = nlohmann::ordered_json::array();
  std::uint64_t pairs = 0;
  std::uint64_t met = 0;
  for (const RunRecord& r : result.records) {
    nlohmann::ordered_json e;
    e["replicate"] = r.replicate;
    e["failed"] = r.failed;
    if (r.failed) e["error"] = r.error;
    std::uint64_t total = 0;
    for (auto c : r.cost) total += c;
    e["total_cost"] = total;
    e["draws"] = r.draws;
    e["trials"] = r.trials;
    e["fallbacks"] = r.fallbacks;
    e["max_trials"] = r.max_trials;
    e["coupled_pairs"] = r.coupled_pairs;
    e["met_pairs"] = r.met_pairs;
    pairs += r.coupled_pairs;
    met += r.met_pairs;
    reps.push_back(std::move(e));
  }
  j["replicates"] = std::move(reps);
  j["meeting_frequency"] = pairs == 0 ? 0.0 : static_cast<double>(met) / static_cast<double>(pairs);
  out << j.dump(2) << '\n';
}

void write_results(const ExperimentResult& result, const std::string& path) {
  std::ofstream csv(path);
  if (!csv) throw ConfigError("cannot write '" + path + "'");
  write_records_csv(result, csv);
  std::ofstream json(path + ".json");
  if (!json) throw ConfigError("cannot write '" + path + ".json'");
  write_summary_json(result, json);
}

LoadedRecords read_records_csv(std::istream& in) {
  LoadedRecords loaded;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon != std::string::npos && line.size() > 2) {
        const std::string key = line.substr(2, colon - 2);
        std::string value = line.substr(colon + 1);
        if (!value.empty() && value[0] == ' ') value.erase(0, 1);
        loaded.metadata[key] = value;
      }
      continue;
    }
    if (!header_seen) {
      if (line != "replicate,t,estimate,ess,cost") throw ConfigError("unexpected CSV header: " + line);
      header_seen = true;
      continue;
    }
    std::istringstream fields(line);
    std::string cell[5];
    for (int i = 0; i < 5; ++i) {
      if (!std::getline(fields, cell[i], ',')) throw ConfigError("malformed record at line " + std::to_string(line_no));
    }
    try {
      const std::size_t rep = std::stoull(cell[0]);
      const std::size_t t = std::stoull(cell[1]);
      if (loaded.records.empty() || loaded.records.back().replicate != rep) {
        RunRecord r;
        r.replicate = rep;
        loaded.records.push_back(std::move(r));
      }
      RunRecord& r = loaded.records.back();
      if (t != r.estimate.size()) throw ConfigError("records out of order at line " + std::to_string(line_no));
      r.estimate.push_back(std::stod(cell[2]));
      r.ess.push_back(std::stod(cell[3]));
      r.cost.push_back(std::stoull(cell[4]));
    } catch (const std::logic_error&) {
      throw ConfigError("malformed number at line " + std::to_string(line_no));
    }
  }
  if (!header_seen) throw ConfigError("results file has no header");
  return loaded;
}

LoadedRecords read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_records_csv(in);
}

}  // namespace smc
