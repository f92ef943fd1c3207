// Command-line front end for the experiment harness.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smcsmooth/errors.hpp"
#include "smcsmooth/harness/config.hpp"
#include "smcsmooth/harness/experiment.hpp"
#include "smcsmooth/harness/report.hpp"
#include "smcsmooth/models/linear_gaussian.hpp"

namespace {

std::size_t metadata_size(const smc::LoadedRecords& loaded, const std::string& key) {
  const auto it = loaded.metadata.find(key);
  if (it == loaded.metadata.end()) throw smc::ConfigError("results file lacks '" + key + "' metadata");
  return std::stoull(it->second);
}

template <typename Write>
void emit(const std::string& path, Write&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw smc::ConfigError("cannot write '" + path + "'");
  write(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle smoothing experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_path;
  std::size_t workers = 0;
  auto* run = app.add_subcommand("run", "Run an experiment and write per-replicate records");
  run->add_option("--config", config_path, "YAML experiment config")->required()->check(CLI::ExistingFile);
  auto* seed_opt = run->add_option("--seed", seed, "Master seed (SMCSMOOTH_SEED overrides)");
  run->add_option("--out", out_path, "Output CSV path; a .json sidecar is written next to it");
  run->add_option("--workers", workers, "Replicates run concurrently");

  std::string in_path;
  std::string summary_out;
  std::optional<std::size_t> slope_from;
  std::optional<std::size_t> slope_to;
  auto* summarize = app.add_subcommand("summarize", "Per-time quantiles, squared IQR and slope fit");
  summarize->add_option("--in", in_path, "Results CSV")->required()->check(CLI::ExistingFile);
  summarize->add_option("--out", summary_out, "Summary CSV (stdout if omitted)");
  summarize->add_option("--from", slope_from, "First time of the slope window (default T/5)");
  summarize->add_option("--to", slope_to, "Last time of the slope window (default T)");

  std::optional<std::size_t> tail_time;
  auto* tails = app.add_subcommand("tails", "Per-replicate mean trials per particle");
  tails->add_option("--in", in_path, "Results CSV")->required()->check(CLI::ExistingFile);
  tails->add_option("--time", tail_time, "Use the cost at this time only (default: all times)");

  std::vector<std::size_t> grid{100, 1000, 10000};
  std::size_t growth_reps = 20;
  auto* growth = app.add_subcommand("hybrid-growth", "E[min(tau, N)] of hybrid rejection over an N grid");
  growth->add_option("--config", config_path, "YAML config with a linear Gaussian model")->required()->check(CLI::ExistingFile);
  growth->add_option("--grid", grid, "Particle counts")->delimiter(',');
  growth->add_option("--replicates", growth_reps, "Filters per grid point");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      smc::ExperimentConfig config = smc::load_config(config_path);
      if (*seed_opt) config.seed = seed;
      if (const auto env = smc::seed_from_environment()) config.seed = *env;
      if (workers > 0) config.workers = workers;
      if (!out_path.empty()) config.output = out_path;
      if (config.output.empty()) throw smc::ConfigError("no output path given (--out or run.output)");
      const smc::ExperimentResult result = smc::run_experiment(config);
      smc::write_results(result, config.output);
      double wall = 0.0;
      std::size_t failed = 0;
      for (const auto& r : result.records) {
        wall += r.wall_seconds;
        failed += r.failed ? 1 : 0;
      }
      std::cerr << "wrote " << config.output << " (" << result.records.size() << " replicates, " << failed
                << " failed, " << wall << " s of replicate time)\n";
      return failed == result.records.size() ? 1 : 0;
    }
    if (*summarize) {
      const smc::LoadedRecords loaded = smc::read_records_csv(in_path);
      const smc::Summary s = smc::summarize(loaded.records, metadata_size(loaded, "n"), slope_from, slope_to);
      emit(summary_out, [&](std::ostream& os) { smc::write_summary_csv(s, os); });
      return 0;
    }
    if (*tails) {
      const smc::LoadedRecords loaded = smc::read_records_csv(in_path);
      smc::write_tail_report(smc::tail_report(loaded.records, metadata_size(loaded, "n"), tail_time), std::cout);
      return 0;
    }
    if (*growth) {
      const smc::ExperimentConfig config = smc::load_config(config_path);
      if (config.model.family == smc::ModelFamily::LotkaVolterra) {
        throw smc::ConfigError("hybrid-growth needs a linear Gaussian model");
      }
      const smc::LinearGaussianModel model = config.model.family == smc::ModelFamily::Scalar
                                                 ? smc::scalar_model(config.model.sigma_y)
                                                 : smc::guarniero_model(config.model.dim, config.model.alpha,
                                                                        config.model.sigma_y2);
      std::uint64_t growth_seed = config.seed;
      if (const auto env = smc::seed_from_environment()) growth_seed = *env;
      const smc::HybridGrowthReport report =
          smc::hybrid_growth_report(model, config.horizon, grid, growth_reps, growth_seed, config.data_seed);
      smc::write_hybrid_growth_report(report, std::cout);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
