#ifndef EEPA_MONTECARLO_HPP
#define EEPA_MONTECARLO_HPP

#include <cstdint>
#include <vector>

#include "model.hpp"

namespace eepa {

// splitmix64 finalizer (Vigna). Also the mixing step for substream seeds, so
// any implementation of these two functions reproduces the gain streams.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of the independent stream used for one (user-count index, budget
/// index, trial index) cell, derived as nested mix64 applications. Keeps
/// results invariant to sweep order and worker count.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t k_index,
                                    std::uint64_t p_index, std::uint64_t trial_index) {
  return mix64(mix64(mix64(mix64(seed) ^ k_index) ^ p_index) ^ trial_index);
}

/// Minimal deterministic generator: state advances by the golden-ratio
/// increment, outputs are the mix64 finalizer. Uniforms take the top 53 bits.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double next_uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

struct ExperimentConfig {
  CellConfig cell;  // template; num_users and power_budget come from the sweep
  std::vector<int> user_counts;
  std::vector<double> power_budgets;
  double mean_gain = 6.309573444801943e-12;  // -112 dB, linear
  long long trials = 10000;
  std::uint64_t seed = 42;
  int threads = 0;               // worker cap, 0 = hardware concurrency
  bool served_only_snr = false;  // average truthful SNR over served users only

  void validate() const;
};

struct ExperimentRecord {
  int num_users = 0;
  double power_budget = 0.0;
  double ee_truthful = 0.0;
  double ee_selfish_actual = 0.0;
  double ee_selfish_believed = 0.0;
  double mean_snr_truthful_db = 0.0;
  double mean_snr_selfish_db = 0.0;
  long long trials = 0;
  std::uint64_t seed = 0;
  bool skipped = false;  // equilibrium report would exceed G; no statistics
};

/// K i.i.d. exponential gains with the given mean, drawn by inverse CDF
/// -mean*ln(1 - u) on uniforms from the stream.
GainVector sample_gains(int num_users, double mean_gain, SplitMix64& stream);

/// Sweeps user_counts x power_budgets; for each cell averages the truthful
/// scenario (greedy allocation on the true gains, clipped to the feedback
/// range [0, G]) and the selfish equilibrium scenario (uniform P/K, closed
/// forms) over `trials` independent draws. Bit-identical output for a fixed
/// config, regardless of worker count.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config);

}  // namespace eepa

#endif
