#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "smcsmooth/fk_model.hpp"
#include "smcsmooth/harness/config.hpp"
#include "smcsmooth/smoothers.hpp"

namespace smc {

/// Outcome of one replicate. Vectors are indexed by t = 0..T; cost[t] is the
/// number of transition-density evaluations charged at time t.
struct RunRecord {
  std::size_t replicate = 0;
  std::vector<double> estimate;
  std::vector<double> ess;
  std::vector<std::uint64_t> cost;
  std::uint64_t draws = 0;
  std::uint64_t trials = 0;
  std::uint64_t fallbacks = 0;
  std::uint64_t max_trials = 0;
  std::uint64_t coupled_pairs = 0;
  std::uint64_t met_pairs = 0;
  double wall_seconds = 0.0;
  bool failed = false;
  std::string error;
};

/// Model, observations and reference values shared by all replicates.
struct ExperimentSetup {
  std::unique_ptr<FeynmanKacModel> model;
  AdditiveFunction function;
  /// Exact Q_t(phi_t) per t when known (linear Gaussian models).
  std::vector<double> reference;
};

ExperimentSetup make_setup(const ExperimentConfig& config);

/// Runs replicate `replicate` with the generator Rng::for_stream(seed, replicate).
/// Errors are caught and recorded in the returned record.
RunRecord run_replicate(const ExperimentConfig& config, const ExperimentSetup& setup, std::size_t replicate);

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<double> reference;
  std::vector<RunRecord> records;  ///< ordered by replicate id
};

/// Runs every replicate on `config.workers` threads.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// CSV with a '#'-prefixed metadata header and columns
/// replicate,t,estimate,ess,cost. Deterministic for a given result.
void write_records_csv(const ExperimentResult& result, std::ostream& out);
/// JSON sidecar: config, reference, per-replicate totals and failures.
void write_summary_json(const ExperimentResult& result, std::ostream& out);
/// Writes `path` and `path + ".json"`.
void write_results(const ExperimentResult& result, const std::string& path);

struct LoadedRecords {
  std::map<std::string, std::string> metadata;
  std::vector<RunRecord> records;
};

/// Parses a CSV written by write_records_csv. Throws ConfigError on malformed input.
LoadedRecords read_records_csv(std::istream& in);
LoadedRecords read_records_csv(const std::string& path);

}  // namespace smc
