#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "allocator.hpp"
#include "doctest.h"
#include "model.hpp"
#include "montecarlo.hpp"

using namespace eepa;

namespace {

bool rel_close(double x, double y, double tol) {
  return std::abs(x - y) <= tol * std::max(std::abs(x), std::abs(y));
}

CellConfig cell(int k, double p, double s2, double a, double g_max = 1.0) {
  CellConfig cfg;
  cfg.num_users = k;
  cfg.power_budget = p;
  cfg.noise_variance = s2;
  cfg.outage_threshold = a;
  cfg.max_report = g_max;
  return cfg;
}

// Demand-style fixture: sigma2*a = 1 so a report g demands exactly 1/g.
CellConfig unit_cell(int k, double p) { return cell(k, p, 1.0, 1.0, 100.0); }

}  // namespace

TEST_CASE("utility slope formula") {
  const CellConfig cfg = cell(1, 1.0, 5e-14, 1.0);
  // c = a*sigma2/gain = 0.05 at gain 1e-12; slope at p = c/2
  CHECK(rel_close(utility_slope(0.025, 1e-12, cfg), 216.53645317858027, 1e-12));

  // exact zero at the stationary point p = c
  const double c = cfg.outage_threshold * cfg.noise_variance / 1e-12;
  CHECK(utility_slope(c, 1e-12, cfg) == 0.0);
  CHECK(utility_slope(0.5 * c, 1e-12, cfg) > 0.0);
  CHECK(utility_slope(2.0 * c, 1e-12, cfg) < 0.0);

  CHECK_THROWS_AS(utility_slope(0.0, 1e-12, cfg), std::domain_error);
  CHECK_THROWS_AS(utility_slope(-0.1, 1e-12, cfg), std::domain_error);
  CHECK_THROWS_AS(utility_slope(0.1, 0.0, cfg), std::domain_error);
  CHECK_THROWS_AS(utility_slope(0.1, -1e-12, cfg), std::domain_error);
}

TEST_CASE("utility slope matches a central finite difference") {
  const CellConfig cfg = cell(1, 1.0, 5e-14, 6.0);
  for (double gain : {4e-13, 1e-12, 7e-12}) {
    const double c = cfg.outage_threshold * cfg.noise_variance / gain;
    for (double s : {0.2, 0.5, 2.0, 5.0}) {  // stay away from the zero at p = c
      const double p = s * c;
      const double h = 1e-8 * p;
      const double fd =
          (user_utility(p + h, gain, cfg) - user_utility(p - h, gain, cfg)) /
          (2.0 * h);
      CHECK(rel_close(utility_slope(p, gain, cfg), fd, 1e-5));
    }
  }
}

TEST_CASE("allocate grants every demand when the budget is slack") {
  const CellConfig cfg = unit_cell(2, 1.0);
  const std::vector<double> reports{5.0, 10.0 / 3.0};  // demands 0.2, 0.3
  const AllocationResult r = allocate(reports, cfg);

  REQUIRE(r.allocation.powers.size() == 2);
  CHECK(r.allocation.powers[0] == individual_optimal_power(reports[0], cfg));
  CHECK(r.allocation.powers[1] == individual_optimal_power(reports[1], cfg));
  CHECK_FALSE(r.saturated);
  CHECK(r.served == std::vector<int>{0, 1});
}

TEST_CASE("allocate squeezes the first overflowing user to the remainder") {
  const CellConfig cfg = unit_cell(3, 1.0);
  const std::vector<double> reports{5.0, 10.0 / 3.0, 5.0 / 3.0};  // 0.2, 0.3, 0.6
  const AllocationResult r = allocate(reports, cfg);

  const double d0 = individual_optimal_power(reports[0], cfg);
  const double d1 = individual_optimal_power(reports[1], cfg);
  CHECK(r.allocation.powers[0] == d0);
  CHECK(r.allocation.powers[1] == d1);
  CHECK(r.allocation.powers[2] == cfg.power_budget - (d0 + d1));
  CHECK(r.saturated);
  CHECK(r.served == std::vector<int>{0, 1, 2});
}

TEST_CASE("allocate leaves users beyond an exact fit unserved") {
  const CellConfig cfg = unit_cell(3, 0.5);
  const std::vector<double> reports{5.0, 10.0 / 3.0, 5.0 / 3.0};
  const AllocationResult r = allocate(reports, cfg);

  CHECK(r.allocation.powers[0] == individual_optimal_power(reports[0], cfg));
  CHECK(r.allocation.powers[1] ==
        doctest::Approx(0.3).epsilon(1e-12));  // remainder after 0.2
  CHECK(r.allocation.powers[2] == 0.0);
  CHECK(r.saturated);
  CHECK(r.served == std::vector<int>{0, 1});
}

TEST_CASE("equal demands split the remainder evenly") {
  {
    const CellConfig cfg = unit_cell(2, 0.6);
    const std::vector<double> reports{2.5, 2.5};  // both demand 0.4
    const AllocationResult r = allocate(reports, cfg);
    CHECK(r.allocation.powers[0] == 0.3);
    CHECK(r.allocation.powers[1] == 0.3);
    CHECK(r.saturated);
  }
  {
    const CellConfig cfg = unit_cell(3, 0.6);
    const std::vector<double> reports{5.0, 2.5, 2.5};  // 0.2 then a 0.4-tie
    const AllocationResult r = allocate(reports, cfg);
    const double d0 = individual_optimal_power(reports[0], cfg);
    CHECK(r.allocation.powers[0] == d0);
    CHECK(r.allocation.powers[1] == (cfg.power_budget - d0) / 2.0);
    CHECK(r.allocation.powers[2] == r.allocation.powers[1]);
    CHECK(r.saturated);
  }
}

TEST_CASE("tie tolerance groups nearly equal demands") {
  const CellConfig cfg = unit_cell(2, 0.3);
  const double g0 = 5.0;
  const double g1 = 5.0 * (1.0 - 5e-14);  // demand larger by ~1e-14
  const std::vector<double> reports{g0, g1};

  const AllocationResult exact = allocate(reports, cfg);
  CHECK(exact.allocation.powers[0] == individual_optimal_power(g0, cfg));
  CHECK(rel_close(exact.allocation.powers[1], 0.1, 1e-9));

  const AllocationResult grouped = allocate(reports, cfg, 1e-12);
  CHECK(grouped.allocation.powers[0] == 0.15);
  CHECK(grouped.allocation.powers[1] == 0.15);
}

TEST_CASE("all-zero reports share the budget equally") {
  const CellConfig cfg = cell(3, 1.0, 5e-14, 6.0);
  const std::vector<double> reports{0.0, 0.0, 0.0};  // each demands the full budget
  const AllocationResult r = allocate(reports, cfg);
  for (double p : r.allocation.powers) CHECK(p == cfg.power_budget / 3.0);
  CHECK(r.saturated);
  CHECK(r.served.size() == 3);
}

TEST_CASE("three-user saturated regression") {
  // 10 dB threshold, gains straddling the budget: demands 1/3, 5/12, 1/2.
  const CellConfig cfg = cell(3, 1.0, 5e-14, 10.0);
  const std::vector<double> gains{1.5e-12, 1.2e-12, 1.0e-12};
  const AllocationResult r = allocate(gains, cfg);

  CHECK(rel_close(r.allocation.powers[0], 1.0 / 3.0, 1e-12));
  CHECK(rel_close(r.allocation.powers[1], 5.0 / 12.0, 1e-12));
  CHECK(rel_close(r.allocation.powers[2], 0.25, 1e-12));
  const double d0 = individual_optimal_power(gains[0], cfg);
  const double d1 = individual_optimal_power(gains[1], cfg);
  CHECK(r.allocation.powers[2] == cfg.power_budget - (d0 + d1));
  CHECK(r.saturated);
}

TEST_CASE("allocate input validation") {
  const CellConfig cfg = cell(2, 1.0, 5e-14, 6.0);
  const std::vector<double> short_vec{0.5};
  CHECK_THROWS_AS(allocate(short_vec, cfg), DimensionError);
  const std::vector<double> above_bound{0.5, 2.0};  // max_report = 1
  CHECK_THROWS_AS(allocate(above_bound, cfg), std::invalid_argument);
  const std::vector<double> negative{0.5, -0.1};
  CHECK_THROWS_AS(allocate(negative, cfg), std::invalid_argument);
}

TEST_CASE("allocate properties on random instances") {
  SplitMix64 rng(314159);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(rng.next() % 6);
    const double budget = rng.next_uniform() < 0.5 ? 0.1 : 1.0;
    const CellConfig cfg = cell(k, budget, 5e-14, 6.0);
    std::vector<double> reports(k);
    for (double& g : reports) {
      g = 1e-13 * std::pow(10.0, 2.0 * rng.next_uniform());  // 1e-13..1e-11
    }
    const AllocationResult r = allocate(reports, cfg);

    // feasibility
    double total = 0.0;
    for (double p : r.allocation.powers) {
      CHECK(p >= 0.0);
      total += p;
    }
    CHECK(total <= budget + 1e-12);

    // exactness when the budget constraint is inactive
    if (!r.saturated) {
      for (int u = 0; u < k; ++u) {
        CHECK(r.allocation.powers[u] == individual_optimal_power(reports[u], cfg));
      }
    }

    // strictly smaller demand is always served in full before a larger one
    std::vector<double> demand(k);
    for (int u = 0; u < k; ++u) demand[u] = individual_optimal_power(reports[u], cfg);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (demand[i] < demand[j] && r.allocation.powers[j] > 0.0) {
          CHECK(r.allocation.powers[i] == demand[i]);
        }
      }
    }

    // permutation equivariance: reversing users reverses the powers bitwise
    std::vector<double> reversed(reports.rbegin(), reports.rend());
    const AllocationResult rr = allocate(reversed, cfg);
    for (int u = 0; u < k; ++u) {
      CHECK(rr.allocation.powers[k - 1 - u] == r.allocation.powers[u]);
    }
  }
}

TEST_CASE("oracle recovers the single-user optimum") {
  const CellConfig cfg = cell(1, 1.0, 5e-14, 6.0);
  const std::vector<double> gains{2e-12};  // optimum 0.15, interior
  const AllocationResult r = oracle_allocate(gains, cfg, 101);
  const double p_star = individual_optimal_power(gains[0], cfg);
  CHECK(std::abs(r.allocation.powers[0] - p_star) <= 1e-4 * cfg.power_budget);
  CHECK(rel_close(user_utility(r.allocation.powers[0], gains[0], cfg),
                  user_utility(p_star, gains[0], cfg), 1e-8));
}

TEST_CASE("oracle agrees with the greedy rule off saturation") {
  const CellConfig cfg = cell(2, 1.0, 5e-14, 6.0);
  const std::vector<double> gains{2e-12, 3e-12};  // demands 0.15, 0.1
  const AllocationResult greedy = allocate(gains, cfg);
  const AllocationResult oracle = oracle_allocate(gains, cfg, 101);
  REQUIRE_FALSE(greedy.saturated);
  for (int u = 0; u < 2; ++u) {
    CHECK(std::abs(oracle.allocation.powers[u] - greedy.allocation.powers[u]) <=
          1e-4 * cfg.power_budget);
  }
}

TEST_CASE("oracle dominates the greedy rule when saturated") {
  const CellConfig cfg = cell(3, 1.0, 5e-14, 10.0);
  const std::vector<double> gains{1.5e-12, 1.2e-12, 1.0e-12};
  const AllocationResult greedy = allocate(gains, cfg);
  const AllocationResult oracle = oracle_allocate(gains, cfg, 101);
  REQUIRE(greedy.saturated);

  const double u_greedy = cell_utility(greedy.allocation.powers, gains, cfg);
  const double u_oracle = cell_utility(oracle.allocation.powers, gains, cfg);
  CHECK(u_oracle > u_greedy);  // greedy is simple, not optimal, under saturation
  CHECK((u_oracle - u_greedy) / u_oracle < 0.05);
}

TEST_CASE("oracle never loses to greedy on random small cells") {
  SplitMix64 rng(2718);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(rng.next() % 2);
    const double a = rng.next_uniform() < 0.5 ? 6.0 : 10.0;
    const CellConfig cfg = cell(k, 1.0, 5e-14, a);
    std::vector<double> gains(k);
    for (double& g : gains) {
      g = 1e-13 * std::pow(10.0, 2.0 * rng.next_uniform());
    }
    const double u_greedy =
        cell_utility(allocate(gains, cfg).allocation.powers, gains, cfg);
    const AllocationResult oracle = oracle_allocate(gains, cfg, 41);
    const double u_oracle = cell_utility(oracle.allocation.powers, gains, cfg);
    CHECK(u_oracle >= u_greedy - 1e-9 * std::max(1.0, u_greedy));

    double total = 0.0;
    for (double p : oracle.allocation.powers) {
      CHECK(p >= 0.0);
      total += p;
    }
    CHECK(total <= cfg.power_budget + 1e-9);
  }
}

TEST_CASE("oracle is deterministic and guards its limits") {
  const CellConfig cfg = cell(3, 1.0, 5e-14, 10.0);
  const std::vector<double> gains{1.5e-12, 1.2e-12, 1.0e-12};
  const AllocationResult a = oracle_allocate(gains, cfg, 41);
  const AllocationResult b = oracle_allocate(gains, cfg, 41);
  CHECK(a.allocation.powers == b.allocation.powers);

  const CellConfig big = cell(5, 1.0, 5e-14, 10.0);
  const std::vector<double> gains5(5, 1e-12);
  CHECK_THROWS_AS(oracle_allocate(gains5, big, 11), CapabilityError);
  CHECK_THROWS_AS(oracle_allocate(gains, cfg, 1), std::invalid_argument);
}

TEST_CASE("slope diagnostics") {
  // Slack budget: every served user sits at its stationary point.
  {
    const CellConfig cfg = cell(2, 1.0, 5e-14, 6.0);
    const std::vector<double> gains{2e-12, 3e-12};
    const AllocationResult r = allocate(gains, cfg);
    const KktDiagnostics d = kkt_diagnostics(r, gains, cfg);
    CHECK(d.slopes[0] == 0.0);
    CHECK(d.slopes[1] == 0.0);
    CHECK(d.lambda_estimate == 0.0);
    CHECK(d.max_slope_spread == 0.0);
  }

  const CellConfig cfg = cell(3, 1.0, 5e-14, 10.0);
  const std::vector<double> gains{1.5e-12, 1.2e-12, 1.0e-12};

  // Greedy under saturation: squeezed last user keeps a positive slope.
  {
    const AllocationResult r = allocate(gains, cfg);
    const KktDiagnostics d = kkt_diagnostics(r, gains, cfg);
    CHECK(d.slopes[0] == 0.0);
    CHECK(d.slopes[1] == 0.0);
    CHECK(d.slopes[2] > 0.0);
    CHECK(d.max_slope_spread > 0.0);
  }

  // Oracle under saturation: served slopes agree (common multiplier).
  {
    const AllocationResult r = oracle_allocate(gains, cfg, 101);
    const KktDiagnostics d = kkt_diagnostics(r, gains, cfg);
    REQUIRE(r.served.size() >= 2);
    CHECK(d.lambda_estimate > 0.0);
    CHECK(d.max_slope_spread <= 1e-2 * std::abs(d.lambda_estimate));
  }

  // Unserved users report a zero slope.
  {
    const CellConfig tight = unit_cell(3, 0.5);
    const std::vector<double> reports{5.0, 10.0 / 3.0, 5.0 / 3.0};
    const AllocationResult r = allocate(reports, tight);
    const KktDiagnostics d = kkt_diagnostics(r, reports, tight);
    CHECK(r.allocation.powers[2] == 0.0);
    CHECK(d.slopes[2] == 0.0);
  }

  // Length mismatch is rejected.
  {
    const AllocationResult r = allocate(gains, cfg);
    const std::vector<double> wrong{1.5e-12, 1.2e-12};
    CHECK_THROWS_AS(kkt_diagnostics(r, wrong, cfg), DimensionError);
  }
}
