// C ABI wrapper over the C++ core. Exceptions become status codes; the last
// failure message is kept per thread for eepa_last_error().
#include "eepa/eepa.h"

#include <cstring>
#include <exception>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "allocator.hpp"
#include "game.hpp"
#include "model.hpp"
#include "montecarlo.hpp"

struct eepa_cell {
  eepa::CellConfig cfg;
};

struct eepa_allocation {
  eepa::AllocationResult result;
};

struct eepa_experiment {
  eepa::ExperimentConfig cfg;
};

namespace {

thread_local std::string g_last_error;

void set_error(const char *what) { g_last_error = what ? what : ""; }

eepa_status fail(eepa_status code, const char *what) {
  set_error(what);
  return code;
}

// Maps the core exception hierarchy onto the ABI status enum. Order matters:
// the specific runtime_error subclasses must be tested before their bases.
template <typename Fn>
eepa_status guarded(Fn &&fn) {
  try {
    fn();
    return EEPA_OK;
  } catch (const eepa::DimensionError &e) {
    return fail(EEPA_ERR_DIMENSION, e.what());
  } catch (const eepa::CapabilityError &e) {
    return fail(EEPA_ERR_CAPABILITY, e.what());
  } catch (const eepa::InfeasibleEquilibrium &e) {
    return fail(EEPA_ERR_INFEASIBLE_EQUILIBRIUM, e.what());
  } catch (const std::domain_error &e) {
    return fail(EEPA_ERR_DOMAIN, e.what());
  } catch (const std::out_of_range &e) {
    return fail(EEPA_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::invalid_argument &e) {
    return fail(EEPA_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc &e) {
    return fail(EEPA_ERR_UNKNOWN, e.what());
  } catch (const std::exception &e) {
    return fail(EEPA_ERR_UNKNOWN, e.what());
  } catch (...) {
    return fail(EEPA_ERR_UNKNOWN, "unknown error");
  }
}

eepa_status require(bool ok, const char *what) {
  return ok ? EEPA_OK : fail(EEPA_ERR_INVALID_ARGUMENT, what);
}

std::vector<double> to_vec(const double *data, int count) {
  return std::vector<double>(data, data + count);
}

}  // namespace

extern "C" {

const char *eepa_status_name(eepa_status status) {
  switch (status) {
    case EEPA_OK: return "EEPA_OK";
    case EEPA_ERR_INVALID_ARGUMENT: return "EEPA_ERR_INVALID_ARGUMENT";
    case EEPA_ERR_DIMENSION: return "EEPA_ERR_DIMENSION";
    case EEPA_ERR_DOMAIN: return "EEPA_ERR_DOMAIN";
    case EEPA_ERR_CAPABILITY: return "EEPA_ERR_CAPABILITY";
    case EEPA_ERR_INFEASIBLE_EQUILIBRIUM: return "EEPA_ERR_INFEASIBLE_EQUILIBRIUM";
    case EEPA_ERR_UNKNOWN: return "EEPA_ERR_UNKNOWN";
  }
  return "EEPA_ERR_UNKNOWN";
}

const char *eepa_last_error(void) { return g_last_error.c_str(); }

const char *eepa_version(void) { return "0.1.0"; }

/* ---- cell ---------------------------------------------------------------- */

eepa_status eepa_cell_create(int num_users, double power_budget, double noise_variance,
                             double outage_threshold, double rate, double max_report,
                             eepa_cell **out) {
  if (eepa_status s = require(out != nullptr, "out is null"); s != EEPA_OK) return s;
  *out = nullptr;
  return guarded([&] {
    eepa::CellConfig cfg{num_users, power_budget, noise_variance,
                         outage_threshold, rate, max_report};
    cfg.validate();
    *out = new eepa_cell{cfg};
  });
}

eepa_status eepa_cell_create_from_bandwidth(int num_users, double power_budget,
                                            double noise_variance, double rate,
                                            double bandwidth, double max_report,
                                            eepa_cell **out) {
  if (eepa_status s = require(out != nullptr, "out is null"); s != EEPA_OK) return s;
  *out = nullptr;
  return guarded([&] {
    eepa::CellConfig cfg = eepa::cell_config_from_bandwidth(
        num_users, power_budget, noise_variance, rate, bandwidth, max_report);
    *out = new eepa_cell{cfg};
  });
}

void eepa_cell_destroy(eepa_cell *cell) { delete cell; }

int eepa_cell_num_users(const eepa_cell *cell) { return cell ? cell->cfg.num_users : 0; }
double eepa_cell_power_budget(const eepa_cell *cell) {
  return cell ? cell->cfg.power_budget : 0.0;
}
double eepa_cell_noise_variance(const eepa_cell *cell) {
  return cell ? cell->cfg.noise_variance : 0.0;
}
double eepa_cell_outage_threshold(const eepa_cell *cell) {
  return cell ? cell->cfg.outage_threshold : 0.0;
}
double eepa_cell_rate(const eepa_cell *cell) { return cell ? cell->cfg.rate : 0.0; }
double eepa_cell_max_report(const eepa_cell *cell) {
  return cell ? cell->cfg.max_report : 0.0;
}

/* ---- closed forms ---------------------------------------------------------- */

double eepa_db_to_linear(double db) { return eepa::db_to_linear(db); }
double eepa_linear_to_db(double linear) { return eepa::linear_to_db(linear); }

eepa_status eepa_snr(double power, double gain, double noise_variance, double *out) {
  if (eepa_status s = require(out != nullptr, "out is null"); s != EEPA_OK) return s;
  return guarded([&] { *out = eepa::snr(power, gain, noise_variance); });
}

eepa_status eepa_efficiency(double snr, double outage_threshold, double *out) {
  if (eepa_status s = require(out != nullptr, "out is null"); s != EEPA_OK) return s;
  return guarded([&] { *out = eepa::efficiency(snr, outage_threshold); });
}

eepa_status eepa_user_utility(const eepa_cell *cell, double power, double gain,
                              double *out) {
  if (eepa_status s = require(cell && out, "cell or out is null"); s != EEPA_OK)
    return s;
  return guarded([&] { *out = eepa::user_utility(power, gain, cell->cfg); });
}

eepa_status eepa_individual_optimal_power(const eepa_cell *cell, double gain,
                                          double *out) {
  if (eepa_status s = require(cell && out, "cell or out is null"); s != EEPA_OK)
    return s;
  return guarded([&] { *out = eepa::individual_optimal_power(gain, cell->cfg); });
}

eepa_status eepa_utility_slope(const eepa_cell *cell, double power, double gain,
                               double *out) {
  if (eepa_status s = require(cell && out, "cell or out is null"); s != EEPA_OK)
    return s;
  return guarded([&] { *out = eepa::utility_slope(power, gain, cell->cfg); });
}

eepa_status eepa_cell_utility(const eepa_cell *cell, const double *powers,
                              const double *gains, int count, double *out) {
  if (eepa_status s = require(cell && powers && gains && out, "null argument");
      s != EEPA_OK)
    return s;
  if (eepa_status s = require(count >= 0, "count is negative"); s != EEPA_OK) return s;
  return guarded([&] {
    eepa::PowerAllocation alloc{to_vec(powers, count)};
    *out = eepa::cell_utility(alloc.powers, to_vec(gains, count), cell->cfg);
  });
}

/* ---- allocation ------------------------------------------------------------ */

eepa_status eepa_allocate(const eepa_cell *cell, const double *reports, int count,
                          eepa_allocation **out) {
  if (eepa_status s = require(cell && reports && out, "null argument"); s != EEPA_OK)
    return s;
  if (eepa_status s = require(count >= 0, "count is negative"); s != EEPA_OK) return s;
  *out = nullptr;
  return guarded([&] {
    eepa::AllocationResult r = eepa::allocate(to_vec(reports, count), cell->cfg);
    *out = new eepa_allocation{std::move(r)};
  });
}

eepa_status eepa_oracle_allocate(const eepa_cell *cell, const double *gains, int count,
                                 int grid_points_per_axis, eepa_allocation **out) {
  if (eepa_status s = require(cell && gains && out, "null argument"); s != EEPA_OK)
    return s;
  if (eepa_status s = require(count >= 0, "count is negative"); s != EEPA_OK) return s;
  *out = nullptr;
  return guarded([&] {
    eepa::AllocationResult r =
        eepa::oracle_allocate(to_vec(gains, count), cell->cfg, grid_points_per_axis);
    *out = new eepa_allocation{std::move(r)};
  });
}

void eepa_allocation_destroy(eepa_allocation *alloc) { delete alloc; }

int eepa_allocation_size(const eepa_allocation *alloc) {
  return alloc ? static_cast<int>(alloc->result.allocation.powers.size()) : 0;
}

eepa_status eepa_allocation_powers(const eepa_allocation *alloc, double *out,
                                   int count) {
  if (eepa_status s = require(alloc && out, "allocation or out is null"); s != EEPA_OK)
    return s;
  const auto &p = alloc->result.allocation.powers;
  if (eepa_status s = require(count == static_cast<int>(p.size()), "count mismatch");
      s != EEPA_OK)
    return s;
  std::memcpy(out, p.data(), p.size() * sizeof(double));
  return EEPA_OK;
}

int eepa_allocation_saturated(const eepa_allocation *alloc) {
  return alloc && alloc->result.saturated ? 1 : 0;
}

int eepa_allocation_served_count(const eepa_allocation *alloc) {
  return alloc ? static_cast<int>(alloc->result.served.size()) : 0;
}

eepa_status eepa_allocation_served(const eepa_allocation *alloc, int *out, int count) {
  if (eepa_status s = require(alloc && out, "allocation or out is null"); s != EEPA_OK)
    return s;
  const auto &served = alloc->result.served;
  if (eepa_status s = require(count == static_cast<int>(served.size()), "count mismatch");
      s != EEPA_OK)
    return s;
  std::memcpy(out, served.data(), served.size() * sizeof(int));
  return EEPA_OK;
}

eepa_status eepa_kkt_diagnostics(const eepa_cell *cell, const eepa_allocation *alloc,
                                 const double *gains, int count, double *slopes,
                                 double *lambda_estimate, double *max_slope_spread) {
  if (eepa_status s = require(cell && alloc && gains && lambda_estimate &&
                                  max_slope_spread,
                              "null argument");
      s != EEPA_OK)
    return s;
  if (eepa_status s = require(count == eepa_allocation_size(alloc), "count mismatch");
      s != EEPA_OK)
    return s;
  return guarded([&] {
    eepa::KktDiagnostics d =
        eepa::kkt_diagnostics(alloc->result, to_vec(gains, count), cell->cfg);
    if (slopes)
      std::memcpy(slopes, d.slopes.data(), d.slopes.size() * sizeof(double));
    *lambda_estimate = d.lambda_estimate;
    *max_slope_spread = d.max_slope_spread;
  });
}

/* ---- game -------------------------------------------------------------------- */

eepa_status eepa_player_utility(const eepa_cell *cell, int player, const double *reports,
                                const double *true_gains, int count, double *out) {
  if (eepa_status s = require(cell && reports && true_gains && out, "null argument");
      s != EEPA_OK)
    return s;
  if (eepa_status s = require(count >= 0, "count is negative"); s != EEPA_OK) return s;
  return guarded([&] {
    *out = eepa::player_utility(player, to_vec(reports, count),
                                to_vec(true_gains, count), cell->cfg);
  });
}

eepa_status eepa_nash_report(const eepa_cell *cell, double *out) {
  if (eepa_status s = require(cell && out, "cell or out is null"); s != EEPA_OK)
    return s;
  return guarded([&] { *out = eepa::nash_report(cell->cfg); });
}

eepa_status eepa_audit_equilibrium(const eepa_cell *cell, const double *true_gains,
                                   int count, int deviation_grid,
                                   double *max_improvement) {
  if (eepa_status s = require(cell && true_gains && max_improvement, "null argument");
      s != EEPA_OK)
    return s;
  if (eepa_status s = require(count >= 0, "count is negative"); s != EEPA_OK) return s;
  return guarded([&] {
    *max_improvement =
        eepa::audit_equilibrium(to_vec(true_gains, count), cell->cfg, deviation_grid);
  });
}

eepa_status eepa_best_response(const eepa_cell *cell, int player, const double *reports,
                               const double *true_gains, int count, int grid,
                               double *out) {
  if (eepa_status s = require(cell && reports && true_gains && out, "null argument");
      s != EEPA_OK)
    return s;
  if (eepa_status s = require(count >= 0, "count is negative"); s != EEPA_OK) return s;
  return guarded([&] {
    *out = eepa::best_response(player, to_vec(reports, count),
                               to_vec(true_gains, count), cell->cfg, grid);
  });
}

eepa_status eepa_believed_cell_utility_at_ne(const eepa_cell *cell, double *out) {
  if (eepa_status s = require(cell && out, "cell or out is null"); s != EEPA_OK)
    return s;
  return guarded([&] { *out = eepa::believed_cell_utility_at_ne(cell->cfg); });
}

eepa_status eepa_actual_cell_utility_at_ne(const eepa_cell *cell,
                                           const double *true_gains, int count,
                                           double *out) {
  if (eepa_status s = require(cell && true_gains && out, "null argument"); s != EEPA_OK)
    return s;
  if (eepa_status s = require(count >= 0, "count is negative"); s != EEPA_OK) return s;
  return guarded([&] {
    *out = eepa::actual_cell_utility_at_ne(to_vec(true_gains, count), cell->cfg);
  });
}

eepa_status eepa_ne_efficiency_ratio(const eepa_cell *cell, const double *true_gains,
                                     int count, double *out) {
  if (eepa_status s = require(cell && true_gains && out, "null argument"); s != EEPA_OK)
    return s;
  if (eepa_status s = require(count >= 0, "count is negative"); s != EEPA_OK) return s;
  return guarded([&] {
    *out = eepa::ne_efficiency_ratio(to_vec(true_gains, count), cell->cfg);
  });
}

/* ---- experiments --------------------------------------------------------------- */

eepa_status eepa_experiment_create(eepa_experiment **out) {
  if (eepa_status s = require(out != nullptr, "out is null"); s != EEPA_OK) return s;
  *out = nullptr;
  return guarded([&] { *out = new eepa_experiment{eepa::ExperimentConfig{}}; });
}

void eepa_experiment_destroy(eepa_experiment *exp) { delete exp; }

eepa_status eepa_experiment_set_cell(eepa_experiment *exp, double noise_variance,
                                     double outage_threshold, double rate,
                                     double max_report) {
  if (eepa_status s = require(exp != nullptr, "experiment is null"); s != EEPA_OK)
    return s;
  exp->cfg.cell.noise_variance = noise_variance;
  exp->cfg.cell.outage_threshold = outage_threshold;
  exp->cfg.cell.rate = rate;
  exp->cfg.cell.max_report = max_report;
  return EEPA_OK;
}

eepa_status eepa_experiment_set_user_counts(eepa_experiment *exp, const int *counts,
                                            int n) {
  if (eepa_status s = require(exp && counts && n > 0, "null or empty counts");
      s != EEPA_OK)
    return s;
  exp->cfg.user_counts.assign(counts, counts + n);
  return EEPA_OK;
}

eepa_status eepa_experiment_set_power_budgets(eepa_experiment *exp,
                                              const double *budgets, int n) {
  if (eepa_status s = require(exp && budgets && n > 0, "null or empty budgets");
      s != EEPA_OK)
    return s;
  exp->cfg.power_budgets.assign(budgets, budgets + n);
  return EEPA_OK;
}

eepa_status eepa_experiment_set_mean_gain(eepa_experiment *exp, double mean_gain) {
  if (eepa_status s = require(exp != nullptr, "experiment is null"); s != EEPA_OK)
    return s;
  exp->cfg.mean_gain = mean_gain;
  return EEPA_OK;
}

eepa_status eepa_experiment_set_trials(eepa_experiment *exp, long long trials) {
  if (eepa_status s = require(exp != nullptr, "experiment is null"); s != EEPA_OK)
    return s;
  exp->cfg.trials = trials;
  return EEPA_OK;
}

eepa_status eepa_experiment_set_seed(eepa_experiment *exp, uint64_t seed) {
  if (eepa_status s = require(exp != nullptr, "experiment is null"); s != EEPA_OK)
    return s;
  exp->cfg.seed = seed;
  return EEPA_OK;
}

eepa_status eepa_experiment_set_threads(eepa_experiment *exp, int threads) {
  if (eepa_status s = require(exp != nullptr, "experiment is null"); s != EEPA_OK)
    return s;
  exp->cfg.threads = threads;
  return EEPA_OK;
}

eepa_status eepa_experiment_set_served_only_snr(eepa_experiment *exp, int enabled) {
  if (eepa_status s = require(exp != nullptr, "experiment is null"); s != EEPA_OK)
    return s;
  exp->cfg.served_only_snr = enabled != 0;
  return EEPA_OK;
}

int eepa_experiment_record_count(const eepa_experiment *exp) {
  if (!exp) return 0;
  return static_cast<int>(exp->cfg.user_counts.size() * exp->cfg.power_budgets.size());
}

eepa_status eepa_experiment_run(const eepa_experiment *exp, eepa_record *out,
                                int capacity, int *written) {
  if (eepa_status s = require(exp && out && written, "null argument"); s != EEPA_OK)
    return s;
  *written = 0;
  if (eepa_status s = require(capacity >= eepa_experiment_record_count(exp),
                              "capacity below record count");
      s != EEPA_OK)
    return s;
  return guarded([&] {
    std::vector<eepa::ExperimentRecord> records = eepa::run_experiment(exp->cfg);
    for (const eepa::ExperimentRecord &r : records) {
      eepa_record c{};
      c.num_users = r.num_users;
      c.power_budget = r.power_budget;
      c.ee_truthful = r.ee_truthful;
      c.ee_selfish_actual = r.ee_selfish_actual;
      c.ee_selfish_believed = r.ee_selfish_believed;
      c.mean_snr_truthful_db = r.mean_snr_truthful_db;
      c.mean_snr_selfish_db = r.mean_snr_selfish_db;
      c.trials = r.trials;
      c.seed = r.seed;
      c.skipped = r.skipped ? 1 : 0;
      out[(*written)++] = c;
    }
  });
}

/* ---- sampling -------------------------------------------------------------------- */

eepa_status eepa_sample_gains(int num_users, double mean_gain, uint64_t seed,
                              double *out) {
  if (eepa_status s = require(out != nullptr, "out is null"); s != EEPA_OK) return s;
  return guarded([&] {
    eepa::SplitMix64 stream(seed);
    std::vector<double> g = eepa::sample_gains(num_users, mean_gain, stream);
    std::memcpy(out, g.data(), g.size() * sizeof(double));
  });
}

uint64_t eepa_substream_seed(uint64_t seed, uint64_t k_index, uint64_t p_index,
                             uint64_t trial_index) {
  return eepa::substream_seed(seed, k_index, p_index, trial_index);
}

}  // extern "C"
