#include "game.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace eepa {

namespace {

// Log-spaced grid on [lo, hi] with exact endpoints.
std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> grid(points);
  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  for (int i = 0; i < points; ++i) {
    grid[i] = std::exp(log_lo + (log_hi - log_lo) * i / (points - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

double equilibrium_report_scale(const CellConfig& cfg) {
  return cfg.num_users * cfg.outage_threshold * cfg.noise_variance / cfg.power_budget;
}

void check_player(int player, const CellConfig& cfg) {
  if (player < 0 || player >= cfg.num_users) {
    throw std::out_of_range("player index out of range");
  }
}

}  // namespace

GameOutcome play(std::span<const double> reports, std::span<const double> true_gains,
                 const CellConfig& cfg) {
  validate_gains(true_gains, cfg);
  AllocationResult result = allocate(reports, cfg);
  GameOutcome out;
  out.reports.assign(reports.begin(), reports.end());
  out.player_snrs.resize(reports.size());
  for (std::size_t k = 0; k < reports.size(); ++k) {
    out.player_snrs[k] =
        result.allocation.powers[k] * true_gains[k] / cfg.noise_variance;
  }
  out.believed_cell_utility = cell_utility(result.allocation.powers, reports, cfg);
  out.actual_cell_utility = cell_utility(result.allocation.powers, true_gains, cfg);
  out.allocation = std::move(result.allocation);
  return out;
}

double player_utility(int player, std::span<const double> reports,
                      std::span<const double> true_gains, const CellConfig& cfg) {
  check_player(player, cfg);
  validate_gains(true_gains, cfg);
  AllocationResult result = allocate(reports, cfg);
  return result.allocation.powers[player] * true_gains[player] / cfg.noise_variance;
}

double nash_report(const CellConfig& cfg) {
  cfg.validate();
  const double g_star = equilibrium_report_scale(cfg);
  if (g_star > cfg.max_report) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "equilibrium report K*a*sigma2/P = %g exceeds the action bound G = %g",
                  g_star, cfg.max_report);
    throw InfeasibleEquilibrium(msg);
  }
  return g_star;
}

double audit_equilibrium(std::span<const double> true_gains, const CellConfig& cfg,
                         int deviation_grid) {
  if (deviation_grid < 10) {
    throw std::invalid_argument("deviation_grid must be >= 10");
  }
  validate_gains(true_gains, cfg);
  const double g_star = nash_report(cfg);

  ReportVector profile(cfg.num_users, g_star);
  const AllocationResult at_ne = allocate(profile, cfg);

  std::vector<double> deviations = log_grid(1e-3 * g_star, cfg.max_report, deviation_grid);
  deviations.insert(deviations.begin(), 0.0);

  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < cfg.num_users; ++k) {
    const double u_eq =
        at_ne.allocation.powers[k] * true_gains[k] / cfg.noise_variance;
    for (double g : deviations) {
      profile[k] = g;
      const double u_dev = player_utility(k, profile, true_gains, cfg);
      const double improvement = u_eq > 0.0 ? (u_dev - u_eq) / u_eq : 0.0;
      worst = std::max(worst, improvement);
    }
    profile[k] = g_star;
  }
  return worst;
}

double best_response(int player, std::span<const double> reports,
                     std::span<const double> true_gains, const CellConfig& cfg,
                     int grid) {
  if (grid < 100) {
    throw std::invalid_argument("grid must be >= 100");
  }
  check_player(player, cfg);
  validate_gains(true_gains, cfg);

  const double scale = equilibrium_report_scale(cfg);
  std::vector<double> candidates =
      log_grid(std::min(1e-3 * scale, cfg.max_report), cfg.max_report, grid);
  candidates.insert(candidates.begin(), 0.0);

  ReportVector profile(reports.begin(), reports.end());
  double best_g = 0.0;
  double best_u = -std::numeric_limits<double>::infinity();
  for (double g : candidates) {
    profile[player] = g;
    const double u = player_utility(player, profile, true_gains, cfg);
    if (u >= best_u) {  // ties go to the largest report
      best_u = u;
      best_g = g;
    }
  }
  return best_g;
}

double believed_cell_utility_at_ne(const CellConfig& cfg) {
  cfg.validate();
  const double k_users = cfg.num_users;
  return cfg.rate * k_users * k_users * std::exp(-1.0) / cfg.power_budget;
}

double actual_cell_utility_at_ne(std::span<const double> true_gains,
                                 const CellConfig& cfg) {
  validate_gains(true_gains, cfg);
  const double g_star = equilibrium_report_scale(cfg);
  double sum = 0.0;
  for (double h : true_gains) {
    sum += h > 0.0 ? std::exp(-g_star / h) : 0.0;  // zero-gain terms vanish
  }
  return cfg.rate * cfg.num_users / cfg.power_budget * sum;
}

double ne_efficiency_ratio(std::span<const double> true_gains, const CellConfig& cfg) {
  validate_gains(true_gains, cfg);
  const double g_star = equilibrium_report_scale(cfg);
  double sum = 0.0;
  for (double h : true_gains) {
    sum += h > 0.0 ? std::exp(1.0 - g_star / h) : 0.0;
  }
  return sum / cfg.num_users;
}

}  // namespace eepa
