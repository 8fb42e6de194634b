#ifndef EEPA_MODEL_HPP
#define EEPA_MODEL_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace eepa {

// Default absolute tolerance when comparing physical quantities (in the
// units of the quantity being compared). Overridable per call site.
inline constexpr double kDefaultTolerance = 1e-12;

inline bool approx_equal(double x, double y, double abs_tol = kDefaultTolerance) {
  return std::abs(x - y) <= abs_tol;
}

/// Per-user vector length does not match the cell size.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Request outside what an operation supports (e.g. exhaustive search size).
struct CapabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The equilibrium report K*a*sigma2/P exceeds the action bound G.
struct InfeasibleEquilibrium : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Scenario constants for one downlink cell. All gains are linear; dB is a
/// presentation concern only.
struct CellConfig {
  int num_users = 1;              // K
  double power_budget = 1.0;      // P [W], sum-power constraint
  double noise_variance = 5e-14;  // sigma^2 [W]
  double outage_threshold = 6.0;  // a, SNR level below which transmission fails
  double rate = 1.0;              // R [bit/s]
  double max_report = 1.0;        // G, upper bound of the report action set

  /// Throws std::invalid_argument unless all constants are finite and positive.
  void validate() const;
};

/// Builds a config with outage threshold a = 2^{rate/bandwidth} - 1.
CellConfig cell_config_from_bandwidth(int num_users, double power_budget,
                                      double noise_variance, double rate,
                                      double bandwidth, double max_report);

/// Validates a == 2^{R/W} - 1 to relative 1e-9 when both a and W are known.
void check_threshold_consistency(const CellConfig& cfg, double bandwidth);

using GainVector = std::vector<double>;    // true channel gains |h_k|^2, linear
using ReportVector = std::vector<double>;  // reported gains g_k in [0, G]

struct PowerAllocation {
  std::vector<double> powers;  // per-user transmit power [W]

  double total() const;
};

void validate_gains(std::span<const double> gains, const CellConfig& cfg);
void validate_reports(std::span<const double> reports, const CellConfig& cfg);

double db_to_linear(double db);
double linear_to_db(double linear);

/// Instantaneous SNR p*gain/sigma2. Throws std::domain_error on non-finite
/// or negative input.
double snr(double power, double gain, double noise_variance);

/// Packet success probability exp(-a/snr), the limit value 0 at snr = 0.
double efficiency(double snr_value, double outage_threshold);

/// Energy efficiency of one user, R*f(snr)/p in bit/Joule; 0 at p = 0.
double user_utility(double power, double gain, const CellConfig& cfg);

/// Cell energy efficiency: sum of user utilities.
double cell_utility(std::span<const double> powers, std::span<const double> gains,
                    const CellConfig& cfg);

/// Power maximizing one user's energy efficiency: min(sigma2*a/gain, P).
/// A zero-gain user demands the full budget P.
double individual_optimal_power(double gain, const CellConfig& cfg);

}  // namespace eepa

#endif
