// eepa command line front end: single allocations, equilibrium analysis and
// Monte-Carlo sweeps on top of the shared library's C interface.
//
// Exit codes: 0 ok, 2 usage/config error, 3 capability exceeded,
// 4 infeasible equilibrium, 5 output I/O failure.
#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eepa/eepa.h"
#include "json.hpp"

using nlohmann::json;

namespace {

// Shortest decimal string that parses back to the same double.
std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

// All gain-like inputs (gains, reports, mean gain, report bound) share one
// units switch; raw values are kept for lossless echo in the chosen units.
struct Options {
  std::string units = "linear";
  double a = 6.0;
  bool a_set = false;
  double bandwidth = 0.0;
  bool bandwidth_set = false;
  double sigma2 = 5e-14;
  double power_budget = 1.0;
  double rate = 1.0;
  double max_report_raw = 1.0;
  bool max_report_set = false;
  std::vector<double> gains_raw;
  std::vector<double> reported_raw;
  double mean_gain_linear = 6.309573444801943e-12;  // 10^(-112/10) W
  double mean_gain_raw = 0.0;
  bool mean_gain_set = false;
  std::vector<int> user_counts;
  std::vector<double> power_budgets{0.1, 1.0};
  long long trials = 10000;
  std::uint64_t seed = 42;
  std::string snr_averaging = "all";

  Options() {
    for (int k = 1; k <= 20; ++k) user_counts.push_back(k);
  }

  double to_linear(double raw) const {
    return units == "db" ? eepa_db_to_linear(raw) : raw;
  }
  double max_report_linear() const {
    return max_report_set ? to_linear(max_report_raw) : 1.0;
  }
  std::vector<double> linear(const std::vector<double>& raw) const {
    std::vector<double> out;
    out.reserve(raw.size());
    for (double v : raw) out.push_back(to_linear(v));
    return out;
  }
};

int usage_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 2;
}

int exit_for(eepa_status s) {
  switch (s) {
    case EEPA_OK: return 0;
    case EEPA_ERR_CAPABILITY: return 3;
    case EEPA_ERR_INFEASIBLE_EQUILIBRIUM: return 4;
    default: return 2;
  }
}

int report_status(eepa_status s) {
  std::cerr << "error: " << eepa_last_error() << "\n";
  return exit_for(s);
}

bool parse_list(const std::string& text, std::vector<double>& out) {
  out.clear();
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (end == begin || (end && *end != '\0')) return false;
    out.push_back(v);
  }
  return !out.empty() && text.back() != ',';
}

int load_config(const std::string& path, Options& o) {
  std::ifstream in(path);
  if (!in) return usage_error("cannot open config file " + path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    return usage_error(std::string("config parse failed: ") + e.what());
  }
  if (!cfg.is_object()) return usage_error("config root must be an object");

  static const std::set<std::string> known = {
      "a",         "sigma2",     "power_budget",  "rate",
      "bandwidth", "max_report", "units",         "gains",
      "reported",  "mean_gain",  "user_counts",   "power_budgets",
      "trials",    "seed",       "snr_averaging"};
  for (const auto& item : cfg.items())
    if (!known.count(item.key()))
      return usage_error("unknown config field \"" + item.key() + "\"");

  try {
    if (cfg.contains("units")) o.units = cfg["units"].get<std::string>();
    if (cfg.contains("a")) {
      o.a = cfg["a"].get<double>();
      o.a_set = true;
    }
    if (cfg.contains("bandwidth")) {
      o.bandwidth = cfg["bandwidth"].get<double>();
      o.bandwidth_set = true;
    }
    if (cfg.contains("sigma2")) o.sigma2 = cfg["sigma2"].get<double>();
    if (cfg.contains("power_budget")) o.power_budget = cfg["power_budget"].get<double>();
    if (cfg.contains("rate")) o.rate = cfg["rate"].get<double>();
    if (cfg.contains("max_report")) {
      o.max_report_raw = cfg["max_report"].get<double>();
      o.max_report_set = true;
    }
    if (cfg.contains("gains")) o.gains_raw = cfg["gains"].get<std::vector<double>>();
    if (cfg.contains("reported"))
      o.reported_raw = cfg["reported"].get<std::vector<double>>();
    if (cfg.contains("mean_gain")) {
      o.mean_gain_raw = cfg["mean_gain"].get<double>();
      o.mean_gain_set = true;
    }
    if (cfg.contains("user_counts"))
      o.user_counts = cfg["user_counts"].get<std::vector<int>>();
    if (cfg.contains("power_budgets"))
      o.power_budgets = cfg["power_budgets"].get<std::vector<double>>();
    if (cfg.contains("trials")) o.trials = cfg["trials"].get<long long>();
    if (cfg.contains("seed")) o.seed = cfg["seed"].get<std::uint64_t>();
    if (cfg.contains("snr_averaging"))
      o.snr_averaging = cfg["snr_averaging"].get<std::string>();
  } catch (const json::exception& e) {
    return usage_error(std::string("config field has wrong type: ") + e.what());
  }
  return 0;
}

int finalize(Options& o) {
  if (o.units != "db" && o.units != "linear")
    return usage_error("units must be \"db\" or \"linear\"");
  if (o.mean_gain_set) o.mean_gain_linear = o.to_linear(o.mean_gain_raw);
  if (o.snr_averaging != "all" && o.snr_averaging != "served")
    return usage_error("snr_averaging must be \"all\" or \"served\"");
  return 0;
}

// Builds the cell for K users. An explicit threshold wins; a bandwidth-derived
// one must agree with it to 1e-9 relative when both are given.
int make_cell(const Options& o, int num_users, eepa_cell** out) {
  *out = nullptr;
  if (o.bandwidth_set) {
    eepa_cell* derived = nullptr;
    eepa_status s = eepa_cell_create_from_bandwidth(num_users, o.power_budget, o.sigma2,
                                                    o.rate, o.bandwidth,
                                                    o.max_report_linear(), &derived);
    if (s != EEPA_OK) return report_status(s);
    if (!o.a_set) {
      *out = derived;
      return 0;
    }
    const double implied = eepa_cell_outage_threshold(derived);
    eepa_cell_destroy(derived);
    if (std::abs(implied - o.a) > 1e-9 * std::max(1.0, std::abs(o.a)))
      return usage_error("a=" + fmt(o.a) + " conflicts with bandwidth-derived " +
                         fmt(implied));
  }
  eepa_status s = eepa_cell_create(num_users, o.power_budget, o.sigma2, o.a, o.rate,
                                   o.max_report_linear(), out);
  if (s != EEPA_OK) return report_status(s);
  return 0;
}

json cell_json(const eepa_cell* cell) {
  return json{{"num_users", eepa_cell_num_users(cell)},
              {"power_budget", eepa_cell_power_budget(cell)},
              {"noise_variance", eepa_cell_noise_variance(cell)},
              {"outage_threshold", eepa_cell_outage_threshold(cell)},
              {"rate", eepa_cell_rate(cell)},
              {"max_report", eepa_cell_max_report(cell)}};
}

void print_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (width.size() <= c) width.resize(c + 1, 0);
      width[c] = std::max(width[c], row[c].size());
    }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - row[c].size() + 2, ' ');
    }
    std::cout << line << "\n";
  }
}

struct AllocationView {
  std::vector<double> powers;
  bool saturated = false;
  std::vector<int> served;
  std::vector<double> slopes;
  double lambda = 0.0;
  double spread = 0.0;
};

int view_allocation(const eepa_cell* cell, eepa_allocation* alloc,
                    const std::vector<double>& diag_gains, AllocationView& v) {
  const int n = eepa_allocation_size(alloc);
  v.powers.resize(n);
  if (n > 0) {
    eepa_status s = eepa_allocation_powers(alloc, v.powers.data(), n);
    if (s != EEPA_OK) return report_status(s);
  }
  v.saturated = eepa_allocation_saturated(alloc) != 0;
  v.served.resize(eepa_allocation_served_count(alloc));
  if (!v.served.empty()) {
    eepa_status s =
        eepa_allocation_served(alloc, v.served.data(), (int)v.served.size());
    if (s != EEPA_OK) return report_status(s);
  }
  v.slopes.resize(n);
  eepa_status s = eepa_kkt_diagnostics(cell, alloc, diag_gains.data(), n,
                                       v.slopes.data(), &v.lambda, &v.spread);
  if (s != EEPA_OK) return report_status(s);
  return 0;
}

/* ---- allocate -------------------------------------------------------------- */

int cmd_allocate(const Options& o, const std::string& format) {
  if (o.gains_raw.empty()) return usage_error("allocate requires --gains");
  const int n = (int)o.gains_raw.size();
  const bool with_reports = !o.reported_raw.empty();
  if (with_reports && (int)o.reported_raw.size() != n)
    return usage_error("reported list must match gains length");

  std::vector<double> gains = o.linear(o.gains_raw);
  std::vector<double> reports = with_reports ? o.linear(o.reported_raw) : gains;

  eepa_cell* cell = nullptr;
  if (int rc = make_cell(o, n, &cell); rc != 0) return rc;

  eepa_allocation* alloc = nullptr;
  eepa_status s = eepa_allocate(cell, reports.data(), n, &alloc);
  if (s != EEPA_OK) {
    eepa_cell_destroy(cell);
    return report_status(s);
  }

  AllocationView v;
  if (int rc = view_allocation(cell, alloc, reports, v); rc != 0) {
    eepa_allocation_destroy(alloc);
    eepa_cell_destroy(cell);
    return rc;
  }

  std::vector<double> demand(n), believed(n), actual(n);
  double cell_believed = 0.0, cell_actual = 0.0;
  eepa_status calc = EEPA_OK;
  for (int k = 0; k < n && calc == EEPA_OK; ++k) {
    calc = eepa_individual_optimal_power(cell, reports[k], &demand[k]);
    if (calc == EEPA_OK) calc = eepa_user_utility(cell, v.powers[k], reports[k], &believed[k]);
    if (calc == EEPA_OK) calc = eepa_user_utility(cell, v.powers[k], gains[k], &actual[k]);
  }
  if (calc == EEPA_OK)
    calc = eepa_cell_utility(cell, v.powers.data(), reports.data(), n, &cell_believed);
  if (calc == EEPA_OK)
    calc = eepa_cell_utility(cell, v.powers.data(), gains.data(), n, &cell_actual);
  eepa_allocation_destroy(alloc);
  json cell_meta = cell_json(cell);
  eepa_cell_destroy(cell);
  if (calc != EEPA_OK) return report_status(calc);

  if (format == "json") {
    json users = json::array();
    for (int k = 0; k < n; ++k) {
      json u{{"index", k},
             {"gain", o.gains_raw[k]},
             {"p_star", demand[k]},
             {"power", v.powers[k]},
             {"slope", v.slopes[k]}};
      if (with_reports) {
        u["report"] = o.reported_raw[k];
        u["believed_utility"] = believed[k];
        u["actual_utility"] = actual[k];
      } else {
        u["utility"] = actual[k];
      }
      users.push_back(u);
    }
    json out{{"units", o.units},
             {"cell", cell_meta},
             {"users", users},
             {"saturated", v.saturated},
             {"served", v.served},
             {"kkt",
              {{"slopes", v.slopes},
               {"lambda", v.lambda},
               {"max_slope_spread", v.spread}}}};
    if (with_reports) {
      out["cell_utility_believed"] = cell_believed;
      out["cell_utility_actual"] = cell_actual;
    } else {
      out["cell_utility"] = cell_actual;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  std::vector<std::vector<std::string>> rows;
  if (with_reports) {
    rows.push_back({"user", "gain(" + o.units + ")", "report(" + o.units + ")",
                    "p_star", "power", "believed_u", "actual_u", "slope"});
    for (int k = 0; k < n; ++k)
      rows.push_back({std::to_string(k), fmt(o.gains_raw[k]), fmt(o.reported_raw[k]),
                      fmt(demand[k]), fmt(v.powers[k]), fmt(believed[k]),
                      fmt(actual[k]), fmt(v.slopes[k])});
  } else {
    rows.push_back(
        {"user", "gain(" + o.units + ")", "p_star", "power", "utility", "slope"});
    for (int k = 0; k < n; ++k)
      rows.push_back({std::to_string(k), fmt(o.gains_raw[k]), fmt(demand[k]),
                      fmt(v.powers[k]), fmt(actual[k]), fmt(v.slopes[k])});
  }
  print_table(rows);
  if (with_reports) {
    std::cout << "cell utility (believed): " << fmt(cell_believed) << "\n";
    std::cout << "cell utility (actual):   " << fmt(cell_actual) << "\n";
  } else {
    std::cout << "cell utility: " << fmt(cell_actual) << "\n";
  }
  std::cout << "saturated: " << (v.saturated ? "yes" : "no") << "\n";
  std::cout << "served: " << v.served.size() << "/" << n
            << "  lambda: " << fmt(v.lambda)
            << "  slope spread: " << fmt(v.spread) << "\n";
  return 0;
}

/* ---- oracle ---------------------------------------------------------------- */

int cmd_oracle(const Options& o, int grid, const std::string& format) {
  if (o.gains_raw.empty()) return usage_error("oracle requires --gains");
  const int n = (int)o.gains_raw.size();
  std::vector<double> gains = o.linear(o.gains_raw);

  eepa_cell* cell = nullptr;
  if (int rc = make_cell(o, n, &cell); rc != 0) return rc;

  eepa_allocation* oracle = nullptr;
  eepa_status s = eepa_oracle_allocate(cell, gains.data(), n, grid, &oracle);
  if (s != EEPA_OK) {
    eepa_cell_destroy(cell);
    return report_status(s);
  }
  eepa_allocation* greedy = nullptr;
  s = eepa_allocate(cell, gains.data(), n, &greedy);
  if (s != EEPA_OK) {
    eepa_allocation_destroy(oracle);
    eepa_cell_destroy(cell);
    return report_status(s);
  }

  AllocationView vo, vg;
  int rc = view_allocation(cell, oracle, gains, vo);
  if (rc == 0) rc = view_allocation(cell, greedy, gains, vg);
  double u_oracle = 0.0, u_greedy = 0.0;
  eepa_status calc = EEPA_OK;
  if (rc == 0) {
    calc = eepa_cell_utility(cell, vo.powers.data(), gains.data(), n, &u_oracle);
    if (calc == EEPA_OK)
      calc = eepa_cell_utility(cell, vg.powers.data(), gains.data(), n, &u_greedy);
  }
  eepa_allocation_destroy(oracle);
  eepa_allocation_destroy(greedy);
  json cell_meta = cell_json(cell);
  eepa_cell_destroy(cell);
  if (rc != 0) return rc;
  if (calc != EEPA_OK) return report_status(calc);

  const double gap = u_oracle != 0.0 ? (u_oracle - u_greedy) / u_oracle : 0.0;

  if (format == "json") {
    json out{{"units", o.units},
             {"gains", o.gains_raw},
             {"cell", cell_meta},
             {"grid", grid},
             {"oracle",
              {{"powers", vo.powers},
               {"cell_utility", u_oracle},
               {"saturated", vo.saturated},
               {"slope_spread", vo.spread}}},
             {"allocator",
              {{"powers", vg.powers},
               {"cell_utility", u_greedy},
               {"saturated", vg.saturated},
               {"slope_spread", vg.spread}}},
             {"relative_gap", gap}};
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  std::vector<std::vector<std::string>> rows;
  rows.push_back({"user", "gain(" + o.units + ")", "oracle_power", "allocator_power"});
  for (int k = 0; k < n; ++k)
    rows.push_back(
        {std::to_string(k), fmt(o.gains_raw[k]), fmt(vo.powers[k]), fmt(vg.powers[k])});
  print_table(rows);
  std::cout << "cell utility: oracle " << fmt(u_oracle) << ", allocator "
            << fmt(u_greedy) << ", relative gap " << fmt(gap) << "\n";
  std::cout << "slope spread: oracle " << fmt(vo.spread) << ", allocator "
            << fmt(vg.spread) << "\n";
  return 0;
}

/* ---- nash ------------------------------------------------------------------ */

int cmd_nash(const Options& o, int audit_grid, const std::string& format) {
  if (o.gains_raw.empty()) return usage_error("nash requires --gains");
  const int n = (int)o.gains_raw.size();
  std::vector<double> gains = o.linear(o.gains_raw);

  eepa_cell* cell = nullptr;
  if (int rc = make_cell(o, n, &cell); rc != 0) return rc;

  double g_star = 0.0;
  eepa_status s = eepa_nash_report(cell, &g_star);
  if (s != EEPA_OK) {
    eepa_cell_destroy(cell);
    return report_status(s);
  }

  std::vector<double> reports(n, g_star), snrs(n);
  double believed = 0.0, actual = 0.0, ratio = 0.0, audit = 0.0;
  eepa_status calc = EEPA_OK;
  for (int k = 0; k < n && calc == EEPA_OK; ++k)
    calc = eepa_player_utility(cell, k, reports.data(), gains.data(), n, &snrs[k]);
  if (calc == EEPA_OK) calc = eepa_believed_cell_utility_at_ne(cell, &believed);
  if (calc == EEPA_OK)
    calc = eepa_actual_cell_utility_at_ne(cell, gains.data(), n, &actual);
  if (calc == EEPA_OK) calc = eepa_ne_efficiency_ratio(cell, gains.data(), n, &ratio);
  if (calc == EEPA_OK)
    calc = eepa_audit_equilibrium(cell, gains.data(), n, audit_grid, &audit);
  const double share = eepa_cell_power_budget(cell) / n;
  json cell_meta = cell_json(cell);
  eepa_cell_destroy(cell);
  if (calc != EEPA_OK) return report_status(calc);

  if (format == "json") {
    json out{{"units", o.units},
             {"gains", o.gains_raw},
             {"cell", cell_meta},
             {"equilibrium_report", g_star},
             {"equilibrium_report_db", eepa_linear_to_db(g_star)},
             {"power_per_user", share},
             {"player_snr", snrs},
             {"believed_cell_utility", believed},
             {"actual_cell_utility", actual},
             {"efficiency_ratio", ratio},
             {"audit_grid", audit_grid},
             {"audit_max_improvement", audit}};
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  std::cout << "equilibrium report: " << fmt(g_star) << " ("
            << fmt(eepa_linear_to_db(g_star)) << " dB)\n";
  std::cout << "power per user: " << fmt(share) << "\n";
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"user", "gain(" + o.units + ")", "snr"});
  for (int k = 0; k < n; ++k)
    rows.push_back({std::to_string(k), fmt(o.gains_raw[k]), fmt(snrs[k])});
  print_table(rows);
  std::cout << "cell utility: believed " << fmt(believed) << ", actual " << fmt(actual)
            << ", ratio " << fmt(ratio) << "\n";
  std::cout << "audit max improvement (" << audit_grid << "-point grid): " << fmt(audit)
            << "\n";
  return 0;
}

/* ---- simulate -------------------------------------------------------------- */

struct Checks {
  bool truthful_ge_selfish = true;
  bool snr_selfish_ge_truthful = true;
  bool has_two_budgets = false;
  int onset = -1;  // smallest K with high-budget efficiency at or below low-budget
};

Checks run_checks(const std::vector<eepa_record>& records) {
  Checks c;
  double lo = 0.0, hi = 0.0;
  std::set<double> budgets;
  for (const auto& r : records) budgets.insert(r.power_budget);
  c.has_two_budgets = budgets.size() >= 2;
  if (c.has_two_budgets) {
    lo = *budgets.begin();
    hi = *budgets.rbegin();
  }

  std::map<std::pair<int, double>, const eepa_record*> by_key;
  std::set<int> counts;
  for (const auto& r : records) {
    by_key[{r.num_users, r.power_budget}] = &r;
    counts.insert(r.num_users);
    if (r.skipped) continue;
    if (!(r.ee_truthful >= r.ee_selfish_actual)) c.truthful_ge_selfish = false;
    if (!(r.mean_snr_selfish_db >= r.mean_snr_truthful_db))
      c.snr_selfish_ge_truthful = false;
  }

  if (c.has_two_budgets) {
    std::vector<int> ks(counts.begin(), counts.end());
    for (std::size_t i = 0; i < ks.size(); ++i) {
      bool all = true;
      for (std::size_t j = i; j < ks.size() && all; ++j) {
        auto lo_it = by_key.find({ks[j], lo});
        auto hi_it = by_key.find({ks[j], hi});
        all = lo_it != by_key.end() && hi_it != by_key.end() &&
              !lo_it->second->skipped && !hi_it->second->skipped &&
              hi_it->second->ee_selfish_actual <= lo_it->second->ee_selfish_actual;
      }
      if (all) {
        c.onset = ks[i];
        break;
      }
    }
  }
  return c;
}

int write_csv(const std::string& path, const std::vector<eepa_record>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open " << path << " for writing\n";
    return 5;
  }
  out << "K,P,ee_truthful,ee_selfish_actual,ee_selfish_believed,"
         "mean_snr_truthful_db,mean_snr_selfish_db,trials,seed\n";
  for (const auto& r : records) {
    out << r.num_users << ',' << fmt(r.power_budget) << ',';
    if (r.skipped) {
      out << ",,,,,";  // equilibrium infeasible: no statistics for this row
    } else {
      out << fmt(r.ee_truthful) << ',' << fmt(r.ee_selfish_actual) << ','
          << fmt(r.ee_selfish_believed) << ',' << fmt(r.mean_snr_truthful_db) << ','
          << fmt(r.mean_snr_selfish_db) << ',';
    }
    out << r.trials << ',' << r.seed << '\n';
  }
  out.flush();
  if (!out) {
    std::cerr << "error: writing " << path << " failed\n";
    return 5;
  }
  return 0;
}

int cmd_simulate(const Options& o, const std::string& out_path,
                 const std::string& format) {
  int threads = 0;
  if (const char* env = std::getenv("EEPA_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0)
      return usage_error("EEPA_THREADS must be a nonnegative integer");
    threads = (int)v;
  }

  eepa_experiment* exp = nullptr;
  eepa_status s = eepa_experiment_create(&exp);
  if (s != EEPA_OK) return report_status(s);

  double a = o.a;
  if (o.bandwidth_set) {
    eepa_cell* probe = nullptr;
    s = eepa_cell_create_from_bandwidth(1, 1.0, o.sigma2, o.rate, o.bandwidth,
                                        o.max_report_linear(), &probe);
    if (s != EEPA_OK) {
      eepa_experiment_destroy(exp);
      return report_status(s);
    }
    const double implied = eepa_cell_outage_threshold(probe);
    eepa_cell_destroy(probe);
    if (o.a_set && std::abs(implied - a) > 1e-9 * std::max(1.0, std::abs(a))) {
      eepa_experiment_destroy(exp);
      return usage_error("a=" + fmt(a) + " conflicts with bandwidth-derived " +
                         fmt(implied));
    }
    if (!o.a_set) a = implied;
  }

  s = eepa_experiment_set_cell(exp, o.sigma2, a, o.rate, o.max_report_linear());
  if (s == EEPA_OK)
    s = eepa_experiment_set_user_counts(exp, o.user_counts.data(),
                                        (int)o.user_counts.size());
  if (s == EEPA_OK)
    s = eepa_experiment_set_power_budgets(exp, o.power_budgets.data(),
                                          (int)o.power_budgets.size());
  if (s == EEPA_OK) s = eepa_experiment_set_mean_gain(exp, o.mean_gain_linear);
  if (s == EEPA_OK) s = eepa_experiment_set_trials(exp, o.trials);
  if (s == EEPA_OK) s = eepa_experiment_set_seed(exp, o.seed);
  if (s == EEPA_OK) s = eepa_experiment_set_threads(exp, threads);
  if (s == EEPA_OK)
    s = eepa_experiment_set_served_only_snr(exp, o.snr_averaging == "served" ? 1 : 0);
  if (s != EEPA_OK) {
    eepa_experiment_destroy(exp);
    return report_status(s);
  }

  const int count = eepa_experiment_record_count(exp);
  std::vector<eepa_record> records((std::size_t)count);
  int written = 0;
  s = eepa_experiment_run(exp, records.data(), count, &written);
  eepa_experiment_destroy(exp);
  if (s != EEPA_OK) return report_status(s);
  records.resize((std::size_t)written);

  if (int rc = write_csv(out_path, records); rc != 0) return rc;

  const Checks c = run_checks(records);

  if (format == "json") {
    json rows = json::array();
    for (const auto& r : records) {
      json row{{"K", r.num_users}, {"P", r.power_budget},
               {"trials", r.trials}, {"seed", r.seed}, {"skipped", r.skipped != 0}};
      if (r.skipped) {
        row["ee_truthful"] = nullptr;
        row["ee_selfish_actual"] = nullptr;
        row["ee_selfish_believed"] = nullptr;
        row["mean_snr_truthful_db"] = nullptr;
        row["mean_snr_selfish_db"] = nullptr;
      } else {
        row["ee_truthful"] = r.ee_truthful;
        row["ee_selfish_actual"] = r.ee_selfish_actual;
        row["ee_selfish_believed"] = r.ee_selfish_believed;
        row["mean_snr_truthful_db"] = r.mean_snr_truthful_db;
        row["mean_snr_selfish_db"] = r.mean_snr_selfish_db;
      }
      rows.push_back(row);
    }
    json out{{"csv", out_path},
             {"records", rows},
             {"checks",
              {{"truthful_ge_selfish_actual", c.truthful_ge_selfish},
               {"selfish_snr_ge_truthful_snr", c.snr_selfish_ge_truthful},
               {"budget_inversion_onset",
                c.onset >= 0 ? json(c.onset) : json(nullptr)}}}};
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  std::cout << "wrote " << out_path << ": " << records.size() << " rows (trials="
            << o.trials << ", seed=" << o.seed << ")\n";
  std::cout << "checks\n";
  std::cout << "  truthful efficiency >= selfish actual efficiency   "
            << (c.truthful_ge_selfish ? "pass" : "fail") << "\n";
  std::cout << "  selfish mean SNR >= truthful mean SNR              "
            << (c.snr_selfish_ge_truthful ? "pass" : "fail") << "\n";
  std::cout << "  high-budget selfish efficiency falls below low     ";
  if (!c.has_two_budgets)
    std::cout << "n/a (single budget)\n";
  else if (c.onset >= 0)
    std::cout << "pass (K0 = " << c.onset << ")\n";
  else
    std::cout << "fail (no onset)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"energy-efficient downlink power allocation simulator"};
  app.require_subcommand(1);

  std::string config_path, format = "table", gains_text, reported_text, out_path;
  std::string units_flag;
  int grid = 101, audit_grid = 200;
  long long trials_flag = -1;
  std::uint64_t seed_flag = 0;
  bool seed_given = false;
  double mean_gain_flag = 0.0;
  bool mean_gain_given = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "JSON config file")
        ->check(CLI::ExistingFile);
    sub->add_option("--format", format, "output format: table or json")
        ->check(CLI::IsMember({"table", "json"}));
    sub->add_option("--units", units_flag, "db or linear for gain-like inputs")
        ->check(CLI::IsMember({"db", "linear"}));
  };

  CLI::App* alloc_cmd =
      app.add_subcommand("allocate", "allocate the power budget for given reports");
  add_common(alloc_cmd);
  alloc_cmd->add_option("--gains", gains_text, "comma-separated true gains");
  alloc_cmd->add_option("--reported", reported_text, "comma-separated reported gains");

  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "compare the allocator against the grid oracle");
  add_common(oracle_cmd);
  oracle_cmd->add_option("--gains", gains_text, "comma-separated true gains");
  oracle_cmd->add_option("--grid", grid, "oracle grid points per axis")
      ->check(CLI::PositiveNumber);

  CLI::App* nash_cmd =
      app.add_subcommand("nash", "equilibrium report, allocation and audit");
  add_common(nash_cmd);
  nash_cmd->add_option("--gains", gains_text, "comma-separated true gains");
  nash_cmd->add_option("--audit-grid", audit_grid, "deviation grid size")
      ->check(CLI::PositiveNumber);

  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo sweep to CSV");
  add_common(sim_cmd);
  sim_cmd->add_option("--out", out_path, "CSV output path")->required();
  sim_cmd->add_option("--trials", trials_flag, "trials per (K,P)")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", seed_flag, "base RNG seed")
      ->each([&](const std::string&) { seed_given = true; });
  sim_cmd->add_option("--mean-gain", mean_gain_flag, "mean channel gain")
      ->each([&](const std::string&) { mean_gain_given = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  Options o;
  if (!config_path.empty())
    if (int rc = load_config(config_path, o); rc != 0) return rc;

  if (!units_flag.empty()) o.units = units_flag;
  if (!gains_text.empty() && !parse_list(gains_text, o.gains_raw))
    return usage_error("malformed --gains list");
  if (!reported_text.empty() && !parse_list(reported_text, o.reported_raw))
    return usage_error("malformed --reported list");
  if (trials_flag > 0) o.trials = trials_flag;
  if (seed_given) o.seed = seed_flag;
  if (mean_gain_given) {
    o.mean_gain_raw = mean_gain_flag;
    o.mean_gain_set = true;
  }
  if (int rc = finalize(o); rc != 0) return rc;

  if (alloc_cmd->parsed()) return cmd_allocate(o, format);
  if (oracle_cmd->parsed()) return cmd_oracle(o, grid, format);
  if (nash_cmd->parsed()) return cmd_nash(o, audit_grid, format);
  return cmd_simulate(o, out_path, format);
}
