#include "model.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace eepa {

namespace {

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) {
    throw std::domain_error(std::string(name) + " must be finite");
  }
}

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw std::invalid_argument(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

void CellConfig::validate() const {
  if (num_users < 1) {
    throw std::invalid_argument("num_users must be >= 1");
  }
  require_positive(power_budget, "power_budget");
  require_positive(noise_variance, "noise_variance");
  require_positive(outage_threshold, "outage_threshold");
  require_positive(rate, "rate");
  require_positive(max_report, "max_report");
}

CellConfig cell_config_from_bandwidth(int num_users, double power_budget,
                                      double noise_variance, double rate,
                                      double bandwidth, double max_report) {
  require_positive(bandwidth, "bandwidth");
  require_positive(rate, "rate");
  CellConfig cfg;
  cfg.num_users = num_users;
  cfg.power_budget = power_budget;
  cfg.noise_variance = noise_variance;
  cfg.outage_threshold = std::exp2(rate / bandwidth) - 1.0;
  cfg.rate = rate;
  cfg.max_report = max_report;
  cfg.validate();
  return cfg;
}

void check_threshold_consistency(const CellConfig& cfg, double bandwidth) {
  require_positive(bandwidth, "bandwidth");
  const double derived = std::exp2(cfg.rate / bandwidth) - 1.0;
  if (std::abs(cfg.outage_threshold - derived) > 1e-9 * std::abs(derived)) {
    throw std::invalid_argument(
        "outage_threshold is inconsistent with 2^(rate/bandwidth) - 1");
  }
}

double PowerAllocation::total() const {
  return std::accumulate(powers.begin(), powers.end(), 0.0);
}

void validate_gains(std::span<const double> gains, const CellConfig& cfg) {
  if (gains.size() != static_cast<std::size_t>(cfg.num_users)) {
    throw DimensionError("gain vector length does not match num_users");
  }
  for (double g : gains) {
    if (!std::isfinite(g) || g < 0.0) {
      throw std::invalid_argument("channel gains must be finite and >= 0");
    }
  }
}

void validate_reports(std::span<const double> reports, const CellConfig& cfg) {
  if (reports.size() != static_cast<std::size_t>(cfg.num_users)) {
    throw DimensionError("report vector length does not match num_users");
  }
  for (double g : reports) {
    if (!std::isfinite(g) || g < 0.0 || g > cfg.max_report) {
      throw std::invalid_argument("reports must lie in [0, max_report]");
    }
  }
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double snr(double power, double gain, double noise_variance) {
  require_finite(power, "power");
  require_finite(gain, "gain");
  require_finite(noise_variance, "noise_variance");
  if (power < 0.0 || gain < 0.0 || noise_variance <= 0.0) {
    throw std::domain_error("snr requires power >= 0, gain >= 0, noise_variance > 0");
  }
  return power * gain / noise_variance;
}

double efficiency(double snr_value, double outage_threshold) {
  require_finite(snr_value, "snr");
  if (snr_value < 0.0 || outage_threshold <= 0.0) {
    throw std::domain_error("efficiency requires snr >= 0 and outage_threshold > 0");
  }
  if (snr_value == 0.0) {
    return 0.0;  // limit value
  }
  return std::exp(-outage_threshold / snr_value);
}

double user_utility(double power, double gain, const CellConfig& cfg) {
  if (power < 0.0 || !std::isfinite(power)) {
    throw std::domain_error("power must be finite and >= 0");
  }
  if (power == 0.0) {
    return 0.0;  // limit value
  }
  const double gamma = snr(power, gain, cfg.noise_variance);
  return cfg.rate * efficiency(gamma, cfg.outage_threshold) / power;
}

double cell_utility(std::span<const double> powers, std::span<const double> gains,
                    const CellConfig& cfg) {
  if (powers.size() != gains.size() ||
      powers.size() != static_cast<std::size_t>(cfg.num_users)) {
    throw DimensionError("powers and gains must both have length num_users");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < powers.size(); ++k) {
    sum += user_utility(powers[k], gains[k], cfg);
  }
  return sum;
}

double individual_optimal_power(double gain, const CellConfig& cfg) {
  if (!std::isfinite(gain) || gain < 0.0) {
    throw std::domain_error("gain must be finite and >= 0");
  }
  if (gain == 0.0) {
    return cfg.power_budget;
  }
  return std::min(cfg.noise_variance * cfg.outage_threshold / gain, cfg.power_budget);
}

}  // namespace eepa
