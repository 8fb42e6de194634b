#include "montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "allocator.hpp"
#include "game.hpp"

namespace eepa {

void ExperimentConfig::validate() const {
  if (trials < 1) {
    throw std::invalid_argument("trials must be >= 1");
  }
  if (!std::isfinite(mean_gain) || mean_gain <= 0.0) {
    throw std::invalid_argument("mean_gain must be positive and finite");
  }
  if (user_counts.empty() || power_budgets.empty()) {
    throw std::invalid_argument("user_counts and power_budgets must be non-empty");
  }
  for (int k : user_counts) {
    if (k < 1) throw std::invalid_argument("user counts must be >= 1");
  }
  for (double p : power_budgets) {
    if (!std::isfinite(p) || p <= 0.0) {
      throw std::invalid_argument("power budgets must be positive and finite");
    }
  }
  if (threads < 0) {
    throw std::invalid_argument("threads must be >= 0");
  }
  CellConfig probe = cell;
  probe.num_users = user_counts.front();
  probe.power_budget = power_budgets.front();
  probe.validate();
}

GainVector sample_gains(int num_users, double mean_gain, SplitMix64& stream) {
  if (num_users < 0) {
    throw std::invalid_argument("num_users must be >= 0");
  }
  if (!std::isfinite(mean_gain) || mean_gain <= 0.0) {
    throw std::invalid_argument("mean_gain must be positive and finite");
  }
  GainVector gains(static_cast<std::size_t>(num_users));
  for (double& g : gains) {
    g = -mean_gain * std::log(1.0 - stream.next_uniform());
  }
  return gains;
}

namespace {

struct TrialStats {
  double ee_truthful = 0.0;
  double snr_truthful = 0.0;
  double ee_selfish = 0.0;
  double snr_selfish = 0.0;
};

// Static contiguous split of [0, trials) across workers; each worker owns a
// disjoint slice of the per-trial array, so the later sequential reduction
// is independent of the worker count.
void run_trials(const ExperimentConfig& config, const CellConfig& cell,
                std::uint64_t k_index, std::uint64_t p_index,
                std::vector<TrialStats>& stats) {
  const long long trials = config.trials;
  int workers = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = static_cast<int>(std::min<long long>(workers, trials));

  const auto trial_body = [&](long long t) {
    SplitMix64 stream(substream_seed(config.seed, k_index, p_index,
                                     static_cast<std::uint64_t>(t)));
    const GainVector gains = sample_gains(cell.num_users, config.mean_gain, stream);
    TrialStats& out = stats[static_cast<std::size_t>(t)];

    // Truthful users report their gain clipped to the feedback range [0, G];
    // utilities and SNR are still evaluated at the true gains.
    GainVector reports = gains;
    for (double& g : reports) g = std::min(g, cell.max_report);
    const AllocationResult truthful = allocate(reports, cell);
    out.ee_truthful = cell_utility(truthful.allocation.powers, gains, cell);
    double snr_sum = 0.0;
    for (std::size_t k = 0; k < gains.size(); ++k) {
      snr_sum += truthful.allocation.powers[k] * gains[k] / cell.noise_variance;
    }
    const double denom = config.served_only_snr
                             ? std::max<std::size_t>(truthful.served.size(), 1)
                             : gains.size();
    out.snr_truthful = snr_sum / static_cast<double>(denom);

    out.ee_selfish = actual_cell_utility_at_ne(gains, cell);
    double eq_snr_sum = 0.0;
    for (double h : gains) {
      eq_snr_sum += cell.power_budget * h / (cell.num_users * cell.noise_variance);
    }
    out.snr_selfish = eq_snr_sum / static_cast<double>(gains.size());
  };

  if (workers == 1) {
    for (long long t = 0; t < trials; ++t) trial_body(t);
    return;
  }

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const long long chunk = trials / workers;
  const long long rest = trials % workers;
  long long begin = 0;
  for (int w = 0; w < workers; ++w) {
    const long long end = begin + chunk + (w < rest ? 1 : 0);
    pool.emplace_back([&trial_body, begin, end]() {
      for (long long t = begin; t < end; ++t) trial_body(t);
    });
    begin = end;
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();

  std::vector<ExperimentRecord> records;
  records.reserve(config.user_counts.size() * config.power_budgets.size());

  for (std::size_t k_index = 0; k_index < config.user_counts.size(); ++k_index) {
    for (std::size_t p_index = 0; p_index < config.power_budgets.size(); ++p_index) {
      CellConfig cell = config.cell;
      cell.num_users = config.user_counts[k_index];
      cell.power_budget = config.power_budgets[p_index];

      ExperimentRecord rec;
      rec.num_users = cell.num_users;
      rec.power_budget = cell.power_budget;
      rec.trials = config.trials;
      rec.seed = config.seed;

      const double g_star =
          cell.num_users * cell.outage_threshold * cell.noise_variance /
          cell.power_budget;
      if (g_star > cell.max_report) {
        rec.skipped = true;
        records.push_back(rec);
        continue;
      }

      std::vector<TrialStats> stats(static_cast<std::size_t>(config.trials));
      run_trials(config, cell, k_index, p_index, stats);

      double ee_truthful = 0.0;
      double snr_truthful = 0.0;
      double ee_selfish = 0.0;
      double snr_selfish = 0.0;
      for (const TrialStats& s : stats) {  // fixed order, worker-count independent
        ee_truthful += s.ee_truthful;
        snr_truthful += s.snr_truthful;
        ee_selfish += s.ee_selfish;
        snr_selfish += s.snr_selfish;
      }
      const double n = static_cast<double>(config.trials);
      rec.ee_truthful = ee_truthful / n;
      rec.ee_selfish_actual = ee_selfish / n;
      rec.ee_selfish_believed = believed_cell_utility_at_ne(cell);
      rec.mean_snr_truthful_db = linear_to_db(snr_truthful / n);
      rec.mean_snr_selfish_db = linear_to_db(snr_selfish / n);
      records.push_back(rec);
    }
  }
  return records;
}

}  // namespace eepa
