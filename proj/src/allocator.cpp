#include "allocator.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <limits>
#include <numeric>

namespace eepa {

namespace {

constexpr double kPowerSnapThreshold = 1e-15;  // W

// Golden-section maximization of a unimodal function on [lo, hi].
// Returns the argmax to within x_tol.
double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double x_tol) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - (b - a) * inv_phi;
  double d = a + (b - a) * inv_phi;
  double fc = f(c);
  double fd = f(d);
  while (b - a > x_tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * inv_phi;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * inv_phi;
      fd = f(d);
    }
  }
  const double mid = 0.5 * (a + b);
  // The endpoints of the original interval may beat the interior optimum
  // when the function is monotone on [lo, hi].
  double best_x = mid;
  double best_f = f(mid);
  if (f(lo) > best_f) {
    best_x = lo;
    best_f = f(lo);
  }
  if (f(hi) > best_f) {
    best_x = hi;
  }
  return best_x;
}

struct Candidate {
  double utility = -std::numeric_limits<double>::infinity();
  std::vector<double> powers;
};

// Lexicographic comparison used to break exact utility ties deterministically.
bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool better(const Candidate& a, const Candidate& b) {
  if (a.utility != b.utility) return a.utility > b.utility;
  return lex_less(a.powers, b.powers);
}

AllocationResult finish_result(std::vector<double> powers, const CellConfig& cfg) {
  AllocationResult out;
  out.allocation.powers = std::move(powers);
  for (std::size_t k = 0; k < out.allocation.powers.size(); ++k) {
    if (out.allocation.powers[k] > 0.0) {
      out.served.push_back(static_cast<int>(k));
    }
  }
  out.saturated = approx_equal(out.allocation.total(), cfg.power_budget);
  return out;
}

}  // namespace

double utility_slope(double power, double gain, const CellConfig& cfg) {
  if (!std::isfinite(power) || power <= 0.0) {
    throw std::domain_error("utility_slope requires power > 0");
  }
  if (!std::isfinite(gain) || gain <= 0.0) {
    throw std::domain_error("utility_slope requires gain > 0");
  }
  const double c = cfg.outage_threshold * cfg.noise_variance / gain;
  return cfg.rate * std::exp(-c / power) * (c - power) / (power * power * power);
}

AllocationResult allocate(std::span<const double> reports, const CellConfig& cfg,
                          double tie_tolerance) {
  cfg.validate();
  validate_reports(reports, cfg);
  const std::size_t n = reports.size();

  std::vector<double> demand(n);
  for (std::size_t k = 0; k < n; ++k) {
    demand[k] = individual_optimal_power(reports[k], cfg);
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return demand[i] < demand[j]; });

  std::vector<double> powers(n, 0.0);
  double allocated = 0.0;
  std::size_t i = 0;
  while (i < n && allocated < cfg.power_budget) {
    // Extend the run of users whose demand ties the run head.
    std::size_t j = i + 1;
    while (j < n && demand[order[j]] - demand[order[i]] <= tie_tolerance) {
      ++j;
    }
    double group_demand = 0.0;
    for (std::size_t m = i; m < j; ++m) {
      group_demand += demand[order[m]];
    }
    if (allocated + group_demand < cfg.power_budget) {
      for (std::size_t m = i; m < j; ++m) {
        powers[order[m]] = demand[order[m]];
      }
      allocated += group_demand;
    } else {
      const double share = (cfg.power_budget - allocated) / static_cast<double>(j - i);
      for (std::size_t m = i; m < j; ++m) {
        powers[order[m]] = share;
      }
      allocated = cfg.power_budget;
    }
    i = j;
  }

  return finish_result(std::move(powers), cfg);
}

AllocationResult oracle_allocate(std::span<const double> gains, const CellConfig& cfg,
                                 int grid_points_per_axis) {
  cfg.validate();
  validate_gains(gains, cfg);
  if (cfg.num_users > 4) {
    throw CapabilityError("oracle_allocate supports at most 4 users");
  }
  if (grid_points_per_axis < 2) {
    throw std::invalid_argument("grid_points_per_axis must be >= 2");
  }

  const int n_users = cfg.num_users;
  const int last = grid_points_per_axis - 1;
  const double step = cfg.power_budget / static_cast<double>(last);

  const auto evaluate = [&](const std::vector<double>& p) {
    return cell_utility(p, gains, cfg);
  };

  // Exhaustive sweep of the simplex grid, keeping the best few points as
  // refinement seeds. Indices are enumerated in lexicographic order so the
  // kept set is deterministic.
  constexpr std::size_t kSeeds = 8;
  std::vector<Candidate> seeds;
  std::vector<int> idx(n_users, 0);
  std::vector<double> point(n_users, 0.0);
  std::function<void(int, int)> sweep = [&](int coord, int remaining) {
    if (coord == n_users - 1) {
      for (int v = 0; v <= remaining; ++v) {
        idx[coord] = v;
        for (int k = 0; k < n_users; ++k) {
          point[k] = idx[k] == last ? cfg.power_budget : idx[k] * step;
        }
        const double u = evaluate(point);
        if (seeds.size() < kSeeds || u > seeds.back().utility ||
            (u == seeds.back().utility && lex_less(point, seeds.back().powers))) {
          Candidate cand{u, point};
          if (seeds.size() < kSeeds) {
            seeds.push_back(std::move(cand));
          } else {
            seeds.back() = std::move(cand);
          }
          std::sort(seeds.begin(), seeds.end(), better);
        }
      }
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      idx[coord] = v;
      sweep(coord + 1, remaining - v);
    }
  };
  sweep(0, last);

  const double x_tol = 1e-6 * cfg.power_budget;

  // Local refinement: alternate single-coordinate moves (absorbing budget
  // slack) with pairwise transfers, which are the only moves available along
  // the saturated face sum(p) = P. The transfer objective can be bimodal, so
  // a coarse scan brackets the golden-section search.
  const auto refine = [&](Candidate cand) {
    std::vector<double>& p = cand.powers;
    double current = cand.utility;
    for (int pass = 0; pass < 60; ++pass) {
      const double before = current;

      for (int k = 0; k < n_users; ++k) {
        double slack = cfg.power_budget - std::accumulate(p.begin(), p.end(), 0.0);
        if (slack < 0.0) slack = 0.0;
        const double hi = std::min(p[k] + slack, cfg.power_budget);
        const auto f = [&](double x) { return user_utility(x, gains[k], cfg); };
        const double x = golden_max(f, 0.0, hi, x_tol);
        if (f(x) > f(p[k])) {
          p[k] = x;
        }
      }

      for (int a = 0; a < n_users; ++a) {
        for (int b = a + 1; b < n_users; ++b) {
          const double lo = -p[a];
          const double hi = p[b];
          if (hi - lo <= 0.0) continue;
          // Clamp against 1-ulp overshoot at the scan endpoints, where
          // lo + (hi - lo) can land just past p[b] (or below -p[a]).
          const auto f = [&](double t) {
            const double pa = std::max(0.0, p[a] + t);
            const double pb = std::max(0.0, p[b] - t);
            return user_utility(pa, gains[a], cfg) +
                   user_utility(pb, gains[b], cfg);
          };
          // Coarse scan, then golden section inside the best bracket.
          constexpr int kScan = 64;
          int best_i = 0;
          double best_f = -std::numeric_limits<double>::infinity();
          for (int s = 0; s <= kScan; ++s) {
            const double t = lo + (hi - lo) * s / kScan;
            const double ft = f(t);
            if (ft > best_f) {
              best_f = ft;
              best_i = s;
            }
          }
          const double blo = lo + (hi - lo) * std::max(best_i - 1, 0) / kScan;
          const double bhi = lo + (hi - lo) * std::min(best_i + 1, kScan) / kScan;
          const double t = golden_max(f, blo, bhi, x_tol);
          if (f(t) > f(0.0)) {
            p[a] += t;
            p[b] -= t;
            if (p[a] < 0.0) p[a] = 0.0;
            if (p[b] < 0.0) p[b] = 0.0;
          }
        }
      }

      current = evaluate(p);
      if (current - before <= 1e-15 * std::max(1.0, std::abs(before))) {
        break;
      }
    }
    cand.utility = current;
    return cand;
  };

  Candidate best;
  for (const Candidate& seed : seeds) {
    Candidate refined = refine(seed);
    for (double& v : refined.powers) {
      if (v < kPowerSnapThreshold) v = 0.0;
    }
    refined.utility = evaluate(refined.powers);
    if (better(refined, best)) {
      best = std::move(refined);
    }
  }

  return finish_result(std::move(best.powers), cfg);
}

KktDiagnostics kkt_diagnostics(const AllocationResult& result,
                               std::span<const double> gains, const CellConfig& cfg) {
  validate_gains(gains, cfg);
  const std::vector<double>& powers = result.allocation.powers;
  if (powers.size() != gains.size()) {
    throw DimensionError("allocation does not match gain vector length");
  }

  KktDiagnostics diag;
  diag.slopes.assign(powers.size(), 0.0);
  for (std::size_t k = 0; k < powers.size(); ++k) {
    if (powers[k] > 0.0 && gains[k] > 0.0) {
      diag.slopes[k] = utility_slope(powers[k], gains[k], cfg);
    }
  }

  if (!result.served.empty()) {
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int k : result.served) {
      sum += diag.slopes[k];
      lo = std::min(lo, diag.slopes[k]);
      hi = std::max(hi, diag.slopes[k]);
    }
    diag.lambda_estimate = sum / static_cast<double>(result.served.size());
    diag.max_slope_spread = result.served.size() > 1 ? hi - lo : 0.0;
  }
  return diag;
}

}  // namespace eepa
