#ifndef EEPA_GAME_HPP
#define EEPA_GAME_HPP

#include <span>
#include <vector>

#include "allocator.hpp"
#include "model.hpp"

namespace eepa {

/// One play of the reporting game: the profile, the resulting allocation and
/// the cell utilities as seen through reported vs. true gains.
struct GameOutcome {
  ReportVector reports;
  PowerAllocation allocation;
  std::vector<double> player_snrs;     // p_k * |h_k|^2 / sigma2
  double believed_cell_utility = 0.0;  // cell utility computed on reports
  double actual_cell_utility = 0.0;    // cell utility computed on true gains
};

GameOutcome play(std::span<const double> reports, std::span<const double> true_gains,
                 const CellConfig& cfg);

/// Utility of one player: its SNR under the allocation the base station
/// computes from the reports, evaluated at the player's TRUE gain.
double player_utility(int player, std::span<const double> reports,
                      std::span<const double> true_gains, const CellConfig& cfg);

/// The common equilibrium report g* = K*a*sigma2/P, at which every user
/// demands exactly P/K. Throws InfeasibleEquilibrium when g* > G.
double nash_report(const CellConfig& cfg);

/// With all players at g*, scans unilateral deviations for every player over
/// {0} plus a log-spaced grid on (0, G] and returns the largest utility
/// improvement found, relative to the deviating player's equilibrium utility.
/// Nonpositive up to rounding when the equilibrium holds.
double audit_equilibrium(std::span<const double> true_gains, const CellConfig& cfg,
                         int deviation_grid);

/// Numeric best response of `player` against the other entries of `reports`
/// (the player's own entry is ignored). Searches {0} plus a log-spaced grid
/// ending at G; ties are broken toward the largest report.
double best_response(int player, std::span<const double> reports,
                     std::span<const double> true_gains, const CellConfig& cfg,
                     int grid);

/// Cell utility the base station believes it obtains at the equilibrium
/// profile: R * K^2 * e^-1 / P.
double believed_cell_utility_at_ne(const CellConfig& cfg);

/// Actual cell utility at the equilibrium (uniform P/K allocation):
/// R * (K/P) * sum_k exp(-g*/|h_k|^2).
double actual_cell_utility_at_ne(std::span<const double> true_gains,
                                 const CellConfig& cfg);

/// Ratio actual/believed in closed form: (1/K) * sum_k exp(1 - g*/|h_k|^2).
double ne_efficiency_ratio(std::span<const double> true_gains, const CellConfig& cfg);

}  // namespace eepa

#endif
