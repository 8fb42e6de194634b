#ifndef EEPA_ALLOCATOR_HPP
#define EEPA_ALLOCATOR_HPP

#include <span>
#include <vector>

#include "model.hpp"

namespace eepa {

struct AllocationResult {
  PowerAllocation allocation;
  std::vector<int> served;  // indices with positive power, ascending
  bool saturated = false;   // sum of powers equals P within kDefaultTolerance
};

struct KktDiagnostics {
  // d u_BS^(k)/dp at the allocated power; 0 for unserved users (limit at 0+).
  std::vector<double> slopes;
  double lambda_estimate = 0.0;   // mean slope over served users
  double max_slope_spread = 0.0;  // max pairwise slope difference among served
};

/// Analytic derivative of user_utility in p: R*exp(-c/p)*(c - p)/p^3 with
/// c = a*sigma2/gain. Throws std::domain_error unless p > 0 and gain > 0.
double utility_slope(double power, double gain, const CellConfig& cfg);

/// Greedy power allocation on reported gains. Users are granted their
/// individual optimal power in ascending demand order while the budget
/// lasts; the first overflowing user gets exactly the remainder, and a run
/// of users with equal demand splits the remainder evenly. Powers are
/// returned in the original user order. Ties are detected by exact equality
/// of the computed demands unless tie_tolerance > 0.
AllocationResult allocate(std::span<const double> reports, const CellConfig& cfg,
                          double tie_tolerance = 0.0);

/// Reference global optimizer for the cell utility under the sum-power
/// constraint. Exhaustively evaluates the simplex grid
/// {0, P/(n-1), ..., P}^K restricted to sum <= P, then refines the best
/// grid points by golden-section search along single coordinates and
/// pairwise power transfers. Deliberately never consults the closed-form
/// individual optimal power. Only small cells are supported (K <= 4).
AllocationResult oracle_allocate(std::span<const double> gains, const CellConfig& cfg,
                                 int grid_points_per_axis);

/// Slope diagnostics for an allocation: per-user utility derivatives, the
/// common-slope (lambda) estimate and the worst slope disagreement among
/// served users.
KktDiagnostics kkt_diagnostics(const AllocationResult& result,
                               std::span<const double> gains, const CellConfig& cfg);

}  // namespace eepa

#endif
