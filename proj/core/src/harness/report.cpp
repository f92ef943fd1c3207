#include "smcsmooth/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "smcsmooth/backward.hpp"
#include "smcsmooth/discrete_sampler.hpp"
#include "smcsmooth/errors.hpp"
#include "smcsmooth/filter.hpp"
#include "smcsmooth/harness/stats.hpp"

namespace smc {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<const RunRecord*> usable(const std::vector<RunRecord>& records) {
  std::vector<const RunRecord*> out;
  for (const auto& r : records) {
    if (!r.failed && !r.estimate.empty()) out.push_back(&r);
  }
  return out;
}

double total_cost(const RunRecord& r) {
  double total = 0.0;
  for (std::size_t t = 1; t < r.cost.size(); ++t) total += static_cast<double>(r.cost[t]);
  return total;
}

}  // namespace

Summary summarize(const std::vector<RunRecord>& records, std::size_t n, std::optional<std::size_t> slope_from,
                  std::optional<std::size_t> slope_to) {
  const auto reps = usable(records);
  if (reps.size() < 2) throw InvalidArgumentError("summary needs at least two successful replicates");
  const std::size_t len = reps.front()->estimate.size();
  for (const RunRecord* r : reps) {
    if (r->estimate.size() != len) throw InvalidArgumentError("replicates have different lengths");
  }
  if (n == 0) throw InvalidArgumentError("N must be positive");
  const std::size_t horizon = len - 1;
  Summary s;
  s.n = n;
  s.replicates = reps.size();
  std::vector<double> column(reps.size());
  for (std::size_t t = 0; t < len; ++t) {
    double ess_sum = 0.0;
    double cost_sum = 0.0;
    for (std::size_t k = 0; k < reps.size(); ++k) {
      column[k] = reps[k]->estimate[t];
      ess_sum += reps[k]->ess[t];
      cost_sum += static_cast<double>(reps[k]->cost[t]);
    }
    const double q25 = quantile(column, 0.25);
    const double q75 = quantile(column, 0.75);
    s.q25.push_back(q25);
    s.median.push_back(quantile(column, 0.5));
    s.q75.push_back(q75);
    s.iqr_squared.push_back((q75 - q25) * (q75 - q25));
    s.mean_ess.push_back(ess_sum / static_cast<double>(reps.size()));
    s.mean_cost_per_n.push_back(cost_sum / static_cast<double>(reps.size() * n));
  }
  s.slope_from = std::max<std::size_t>(1, slope_from.value_or(horizon / 5));
  s.slope_to = std::min(horizon, slope_to.value_or(horizon));
  std::vector<double> ts;
  std::vector<double> ys;
  for (std::size_t t = s.slope_from; t <= s.slope_to; ++t) {
    ts.push_back(static_cast<double>(t));
    ys.push_back(s.iqr_squared[t]);
  }
  if (ts.size() >= 2) {
    try {
      s.slope = log_log_fit(ts, ys).slope;
    } catch (const InvalidArgumentError&) {
      s.slope = 0.0;
    }
  }
  if (horizon > 0) {
    std::vector<double> per_nt;
    for (const RunRecord* r : reps) per_nt.push_back(total_cost(*r) / static_cast<double>(n * horizon));
    s.mean_cost_per_nt = mean(per_nt);
    s.median_cost_per_nt = median(per_nt);
  }
  return s;
}

void write_summary_csv(const Summary& s, std::ostream& out) {
  out << "# n: " << s.n << '\n';
  out << "# replicates: " << s.replicates << '\n';
  out << "# slope_window: " << s.slope_from << ' ' << s.slope_to << '\n';
  out << "# slope: " << fmt(s.slope) << '\n';
  out << "# mean_cost_per_nt: " << fmt(s.mean_cost_per_nt) << '\n';
  out << "# median_cost_per_nt: " << fmt(s.median_cost_per_nt) << '\n';
  out << "t,q25,median,q75,iqr_squared,mean_ess,mean_cost_per_n\n";
  for (std::size_t t = 0; t < s.median.size(); ++t) {
    out << t << ',' << fmt(s.q25[t]) << ',' << fmt(s.median[t]) << ',' << fmt(s.q75[t]) << ','
        << fmt(s.iqr_squared[t]) << ',' << fmt(s.mean_ess[t]) << ',' << fmt(s.mean_cost_per_n[t]) << '\n';
  }
}

TailReport tail_report(const std::vector<RunRecord>& records, std::size_t n, std::optional<std::size_t> time) {
  const auto reps = usable(records);
  if (reps.empty()) throw InvalidArgumentError("tail report needs at least one successful replicate");
  if (n == 0) throw InvalidArgumentError("N must be positive");
  TailReport report;
  for (const RunRecord* r : reps) {
    double value;
    if (time) {
      if (*time >= r->cost.size()) throw InvalidArgumentError("tail report time is past the horizon");
      value = static_cast<double>(r->cost[*time]) / static_cast<double>(n);
    } else {
      const std::size_t steps = r->cost.size() > 1 ? r->cost.size() - 1 : 1;
      value = total_cost(*r) / static_cast<double>(n * steps);
    }
    report.mean_trials_per_particle.push_back(value);
  }
  report.median = median(report.mean_trials_per_particle);
  report.max = *std::max_element(report.mean_trials_per_particle.begin(), report.mean_trials_per_particle.end());
  report.max_over_median = report.median > 0.0 ? report.max / report.median : (report.max > 0.0 ? INFINITY : 1.0);
  for (double v : report.mean_trials_per_particle) {
    if (v > 2.0 * report.median) ++report.above_2x;
    if (v > 5.0 * report.median) ++report.above_5x;
    if (v > 10.0 * report.median) ++report.above_10x;
  }
  return report;
}

void write_tail_report(const TailReport& r, std::ostream& out) {
  out << "replicates: " << r.mean_trials_per_particle.size() << '\n';
  out << "median_mean_trials_per_particle: " << fmt(r.median) << '\n';
  out << "max_mean_trials_per_particle: " << fmt(r.max) << '\n';
  out << "max_over_median: " << fmt(r.max_over_median) << '\n';
  out << "above_2x_median: " << r.above_2x << '\n';
  out << "above_5x_median: " << r.above_5x << '\n';
  out << "above_10x_median: " << r.above_10x << '\n';
}

HybridGrowthReport hybrid_growth_report(const LinearGaussianModel& model, std::size_t horizon,
                                        const std::vector<std::size_t>& grid, std::size_t replicates,
                                        std::uint64_t seed, std::uint64_t data_seed) {
  if (grid.empty() || replicates < 2 || horizon == 0) {
    throw InvalidArgumentError("hybrid growth needs a grid, two or more replicates and a positive horizon");
  }
  Rng data_rng = Rng::for_stream(data_seed, 0xda7a5eedULL);
  const LinearGaussianFK fk(model, simulate_data(model, horizon, data_rng).observations);
  HybridGrowthReport report;
  for (std::size_t n : grid) {
    std::vector<double> per_rep;
    std::uint64_t draws = 0;
    for (std::size_t r = 0; r < replicates; ++r) {
      Rng rng = Rng::for_stream(split_seed(seed, n), r);
      CostCounter counter;
      ParticleCloud prev = initial_cloud(fk, n, rng);
      for (std::size_t t = 1; t <= horizon; ++t) {
        ParticleCloud cur = bootstrap_step(fk, prev, ResamplingScheme::Systematic, rng);
        const AliasSampler proposal(prev.weights());
        for (std::size_t i = 0; i < n; ++i) sample_ffbs_hybrid(fk, prev, cur.state(i), proposal, counter, n, rng);
        prev = std::move(cur);
      }
      per_rep.push_back(static_cast<double>(counter.trials()) / static_cast<double>(counter.draws()));
      draws += counter.draws();
    }
    HybridGrowthPoint p;
    p.n = n;
    p.mean = mean(per_rep);
    const double half = 1.96 * std::sqrt(variance(per_rep) / static_cast<double>(per_rep.size()));
    p.ci_low = p.mean - half;
    p.ci_high = p.mean + half;
    p.draws = draws;
    report.points.push_back(p);
  }
  std::vector<double> ns;
  std::vector<double> means;
  for (const auto& p : report.points) {
    ns.push_back(static_cast<double>(p.n));
    means.push_back(p.mean);
  }
  if (ns.size() >= 2) report.gamma = log_log_fit(ns, means).slope;
  const double half_dim = 0.5 * static_cast<double>(model.dim_x());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double l = std::pow(std::log(ns[i]), half_dim);
    num += means[i] * l;
    den += l * l;
  }
  report.log_coefficient = den > 0.0 ? num / den : 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double fit = report.log_coefficient * std::pow(std::log(ns[i]), half_dim);
    sq += (means[i] - fit) * (means[i] - fit);
  }
  report.log_residual = std::sqrt(sq / static_cast<double>(ns.size()));
  report.monotone = true;
  for (std::size_t i = 1; i < report.points.size(); ++i) {
    report.monotone = report.monotone && report.points[i].mean > report.points[i - 1].mean;
  }
  return report;
}

void write_hybrid_growth_report(const HybridGrowthReport& r, std::ostream& out) {
  out << "n,mean_min_tau_n,ci_low,ci_high,draws\n";
  for (const auto& p : r.points) {
    out << p.n << ',' << fmt(p.mean) << ',' << fmt(p.ci_low) << ',' << fmt(p.ci_high) << ',' << p.draws << '\n';
  }
  out << "# gamma: " << fmt(r.gamma) << '\n';
  out << "# log_coefficient: " << fmt(r.log_coefficient) << '\n';
  out << "# log_fit_rms_residual: " << fmt(r.log_residual) << '\n';
  out << "# monotone: " << (r.monotone ? "true" : "false") << '\n';
}

}  // namespace smc
