/* eepa - energy-efficient downlink power allocation and the selfish
 * channel-state-reporting game.
 *
 * C interface of the shared library. All state lives behind opaque handles;
 * every fallible call returns an eepa_status and writes results through out
 * pointers. Channel gains are linear (not dB) everywhere in this API.
 */
#ifndef EEPA_H
#define EEPA_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define EEPA_API __declspec(dllexport)
#else
#define EEPA_API __attribute__((visibility("default")))
#endif

typedef enum eepa_status {
  EEPA_OK = 0,
  EEPA_ERR_INVALID_ARGUMENT = 1,       /* bad constant, range or null pointer */
  EEPA_ERR_DIMENSION = 2,              /* per-user vector length mismatch */
  EEPA_ERR_DOMAIN = 3,                 /* input outside an operation's domain */
  EEPA_ERR_CAPABILITY = 4,             /* request beyond supported size */
  EEPA_ERR_INFEASIBLE_EQUILIBRIUM = 5, /* equilibrium report exceeds G */
  EEPA_ERR_UNKNOWN = 6
} eepa_status;

EEPA_API const char *eepa_status_name(eepa_status status);

/* Human-readable detail of the last failing call on this thread. */
EEPA_API const char *eepa_last_error(void);

EEPA_API const char *eepa_version(void);

/* ---- cell configuration ------------------------------------------------ */

typedef struct eepa_cell eepa_cell;

/* Scenario constants: K users, sum-power budget P [W], noise variance
 * sigma2 [W], outage threshold a, rate R [bit/s], report bound G (linear). */
EEPA_API eepa_status eepa_cell_create(int num_users, double power_budget,
                                      double noise_variance, double outage_threshold,
                                      double rate, double max_report,
                                      eepa_cell **out);

/* Same, with the outage threshold derived as 2^(rate/bandwidth) - 1. */
EEPA_API eepa_status eepa_cell_create_from_bandwidth(int num_users, double power_budget,
                                                     double noise_variance, double rate,
                                                     double bandwidth, double max_report,
                                                     eepa_cell **out);

EEPA_API void eepa_cell_destroy(eepa_cell *cell);

EEPA_API int eepa_cell_num_users(const eepa_cell *cell);
EEPA_API double eepa_cell_power_budget(const eepa_cell *cell);
EEPA_API double eepa_cell_noise_variance(const eepa_cell *cell);
EEPA_API double eepa_cell_outage_threshold(const eepa_cell *cell);
EEPA_API double eepa_cell_rate(const eepa_cell *cell);
EEPA_API double eepa_cell_max_report(const eepa_cell *cell);

/* ---- per-user closed forms --------------------------------------------- */

/* 10^(db/10) and its inverse. */
EEPA_API double eepa_db_to_linear(double db);
EEPA_API double eepa_linear_to_db(double linear);

/* Instantaneous SNR power*gain/noise_variance. */
EEPA_API eepa_status eepa_snr(double power, double gain, double noise_variance,
                              double *out);

/* Packet success probability exp(-a/snr); 0 at snr = 0. */
EEPA_API eepa_status eepa_efficiency(double snr, double outage_threshold, double *out);

/* Energy efficiency of one user in bit/Joule; 0 at power = 0. */
EEPA_API eepa_status eepa_user_utility(const eepa_cell *cell, double power, double gain,
                                       double *out);

/* min(sigma2*a/gain, P); P at gain = 0. */
EEPA_API eepa_status eepa_individual_optimal_power(const eepa_cell *cell, double gain,
                                                   double *out);

/* Derivative of the user utility in power; requires power > 0, gain > 0. */
EEPA_API eepa_status eepa_utility_slope(const eepa_cell *cell, double power,
                                        double gain, double *out);

/* Sum of user utilities. powers and gains hold `count` == K entries. */
EEPA_API eepa_status eepa_cell_utility(const eepa_cell *cell, const double *powers,
                                       const double *gains, int count, double *out);

/* ---- power allocation --------------------------------------------------- */

typedef struct eepa_allocation eepa_allocation;

/* Greedy allocation on reported gains: ascending individual-optimal-power
 * order, full demand while the budget lasts, remainder to the first
 * overflowing user, equal split across a run of tied demands. */
EEPA_API eepa_status eepa_allocate(const eepa_cell *cell, const double *reports,
                                   int count, eepa_allocation **out);

/* Reference optimizer (exhaustive grid + local refinement); K <= 4 only. */
EEPA_API eepa_status eepa_oracle_allocate(const eepa_cell *cell, const double *gains,
                                          int count, int grid_points_per_axis,
                                          eepa_allocation **out);

EEPA_API void eepa_allocation_destroy(eepa_allocation *alloc);

EEPA_API int eepa_allocation_size(const eepa_allocation *alloc);
EEPA_API eepa_status eepa_allocation_powers(const eepa_allocation *alloc, double *out,
                                            int count);
/* 1 when the powers sum to the budget within 1e-12 W. */
EEPA_API int eepa_allocation_saturated(const eepa_allocation *alloc);
EEPA_API int eepa_allocation_served_count(const eepa_allocation *alloc);
/* Indices of users with positive power, ascending. */
EEPA_API eepa_status eepa_allocation_served(const eepa_allocation *alloc, int *out,
                                            int count);

/* Utility slopes at an allocation. slopes may be NULL; it otherwise receives
 * `count` == K entries (0 for unserved users). */
EEPA_API eepa_status eepa_kkt_diagnostics(const eepa_cell *cell,
                                          const eepa_allocation *alloc,
                                          const double *gains, int count,
                                          double *slopes, double *lambda_estimate,
                                          double *max_slope_spread);

/* ---- channel-state reporting game ---------------------------------------- */

/* SNR of `player` after allocation on `reports`, at its true gain. */
EEPA_API eepa_status eepa_player_utility(const eepa_cell *cell, int player,
                                         const double *reports,
                                         const double *true_gains, int count,
                                         double *out);

/* The unique equilibrium report K*a*sigma2/P; fails with
 * EEPA_ERR_INFEASIBLE_EQUILIBRIUM when it exceeds G. */
EEPA_API eepa_status eepa_nash_report(const eepa_cell *cell, double *out);

/* Largest unilateral utility improvement over a deviation grid, relative to
 * each player's equilibrium utility. Nonpositive up to rounding. */
EEPA_API eepa_status eepa_audit_equilibrium(const eepa_cell *cell,
                                            const double *true_gains, int count,
                                            int deviation_grid,
                                            double *max_improvement);

/* Grid-search best response of `player`; its own entry of `reports` is
 * ignored. Ties break toward the largest report. */
EEPA_API eepa_status eepa_best_response(const eepa_cell *cell, int player,
                                        const double *reports,
                                        const double *true_gains, int count, int grid,
                                        double *out);

/* Closed forms at the equilibrium profile. */
EEPA_API eepa_status eepa_believed_cell_utility_at_ne(const eepa_cell *cell,
                                                      double *out);
EEPA_API eepa_status eepa_actual_cell_utility_at_ne(const eepa_cell *cell,
                                                    const double *true_gains, int count,
                                                    double *out);
EEPA_API eepa_status eepa_ne_efficiency_ratio(const eepa_cell *cell,
                                              const double *true_gains, int count,
                                              double *out);

/* ---- Monte-Carlo experiments --------------------------------------------- */

typedef struct eepa_experiment eepa_experiment;

typedef struct eepa_record {
  int num_users;
  double power_budget;
  double ee_truthful;          /* mean cell utility, truthful reports [bit/J] */
  double ee_selfish_actual;    /* mean actual cell utility at equilibrium */
  double ee_selfish_believed;  /* believed cell utility (deterministic) */
  double mean_snr_truthful_db;
  double mean_snr_selfish_db;
  long long trials;
  uint64_t seed;
  int skipped; /* 1 when the equilibrium report exceeds G; statistics unset */
} eepa_record;

/* Defaults: a=6, sigma2=5e-14, R=1, G=1, mean_gain=10^-11.2, trials=10000,
 * seed=42, user_counts=1..20, power_budgets={0.1,1}, threads=0 (auto). */
EEPA_API eepa_status eepa_experiment_create(eepa_experiment **out);
EEPA_API void eepa_experiment_destroy(eepa_experiment *exp);

EEPA_API eepa_status eepa_experiment_set_cell(eepa_experiment *exp,
                                              double noise_variance,
                                              double outage_threshold, double rate,
                                              double max_report);
EEPA_API eepa_status eepa_experiment_set_user_counts(eepa_experiment *exp,
                                                     const int *counts, int n);
EEPA_API eepa_status eepa_experiment_set_power_budgets(eepa_experiment *exp,
                                                       const double *budgets, int n);
EEPA_API eepa_status eepa_experiment_set_mean_gain(eepa_experiment *exp,
                                                   double mean_gain);
EEPA_API eepa_status eepa_experiment_set_trials(eepa_experiment *exp, long long trials);
EEPA_API eepa_status eepa_experiment_set_seed(eepa_experiment *exp, uint64_t seed);
/* Worker cap; 0 picks the hardware concurrency. Results do not depend on it. */
EEPA_API eepa_status eepa_experiment_set_threads(eepa_experiment *exp, int threads);
/* Average truthful SNR over served users only instead of all users. */
EEPA_API eepa_status eepa_experiment_set_served_only_snr(eepa_experiment *exp,
                                                         int enabled);

/* Number of records a run will produce (user_counts x power_budgets). */
EEPA_API int eepa_experiment_record_count(const eepa_experiment *exp);

/* Runs the sweep. Writes at most `capacity` records and stores the count in
 * *written. Bit-identical results for identical configurations. */
EEPA_API eepa_status eepa_experiment_run(const eepa_experiment *exp, eepa_record *out,
                                         int capacity, int *written);

/* ---- deterministic sampling ---------------------------------------------- */

/* K i.i.d. exponential gains via inverse CDF -mean*ln(1-u); the uniform
 * stream is splitmix64 seeded with `seed`. */
EEPA_API eepa_status eepa_sample_gains(int num_users, double mean_gain, uint64_t seed,
                                       double *out);

/* Substream seed hash: mix(mix(mix(mix(seed)^k_index)^p_index)^trial_index)
 * with mix the splitmix64 finalizer. */
EEPA_API uint64_t eepa_substream_seed(uint64_t seed, uint64_t k_index, uint64_t p_index,
                                      uint64_t trial_index);

#ifdef __cplusplus
}
#endif

#endif /* EEPA_H */
