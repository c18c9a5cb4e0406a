#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "noma/csv.hpp"
#include "noma/json_io.hpp"
#include "noma/matching.hpp"
#include "noma/oracle.hpp"
#include "noma/two_user.hpp"
#include "noma/units.hpp"

namespace noma::cli {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitVerify = 3;

struct PmaxRange {
  double start_dbm = 0.0;
  double stop_dbm = 0.0;
  double step_dbm = 1.0;

  std::vector<double> values() const {
    std::vector<double> v;
    for (double x = start_dbm; x <= stop_dbm + 1e-9; x += step_dbm)
      v.push_back(x);
    return v;
  }
};

inline PmaxRange range_from_json(const json& j) {
  const auto arr = j.get<std::vector<double>>();
  if (arr.size() != 3 || arr[2] <= 0.0 || arr[1] < arr[0])
    throw std::invalid_argument("pmax_dbm_range must be [start, stop, step>0]");
  return {arr[0], arr[1], arr[2]};
}

struct SweepConfig {
  std::vector<double> gains;  // descending
  double min_rate = 1.5;
  double circuit_power_per_user = 1e-3;
  double noise_psd = -174.0;
  double rb_bandwidth = 180e3;
  PmaxRange pmax;
  std::vector<std::string> schemes;
  std::uint64_t seed = 0;
};

struct EnsembleConfig {
  int trials = 1000;
  int num_users = 12;
  int num_rbs = 4;
  Placement placement = DiskPlacement{150.0};
  std::vector<std::string> schemes;
  PmaxRange pmax;
  std::uint64_t seed = 1;
  double min_rate = 1.5;
  double circuit_power_per_user = 1e-3;
  double noise_psd = -174.0;
  double rb_bandwidth = 180e3;
};

namespace detail_cli {

inline json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open '" + path + "'");
  return json::parse(f);  // throws json::parse_error with byte context
}

inline std::string describe_parse_error(const std::string& path,
                                         const json::parse_error& e) {
  std::ifstream f(path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  std::size_t line = 1;
  for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return path + ":" + std::to_string(line) + ": " + e.what();
}

struct Output {
  std::ofstream file;
  std::ostream* stream = &std::cout;
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw std::invalid_argument("cannot write '" + path + "'");
      stream = &file;
    }
  }
  std::ostream& out() { return *stream; }
};

inline SweepConfig sweep_from_json(const json& j) {
  SweepConfig cfg;
  cfg.min_rate = j.value("min_rate", cfg.min_rate);
  cfg.circuit_power_per_user =
      j.value("circuit_power_per_user", cfg.circuit_power_per_user);
  cfg.noise_psd = j.value("noise_psd", cfg.noise_psd);
  cfg.rb_bandwidth = j.value("rb_bandwidth", cfg.rb_bandwidth);
  cfg.pmax = range_from_json(j.at("pmax_dbm_range"));
  cfg.schemes = j.at("schemes").get<std::vector<std::string>>();
  if (cfg.schemes.empty())
    throw std::invalid_argument("sweep: scheme list must be nonempty");
  if (j.contains("gains")) {
    cfg.gains = j.at("gains").get<std::vector<double>>();
  } else {
    // draw single-RB gains from a placement
    ScenarioConfig sc;
    sc.num_users = j.at("num_users").get<int>();
    sc.num_rbs = 1;
    if (j.contains("placement")) sc.placement = placement_from_json(j.at("placement"));
    sc.seed = j.value("seed", std::uint64_t{0});
    sc.noise_psd = cfg.noise_psd;
    sc.rb_bandwidth = cfg.rb_bandwidth;
    cfg.seed = sc.seed;
    const Scenario s = draw_scenario(sc);
    for (const auto& row : s.gains) cfg.gains.push_back(row[0]);
  }
  std::sort(cfg.gains.begin(), cfg.gains.end(), std::greater<>());
  if (cfg.gains.empty()) throw std::invalid_argument("sweep: no gains");
  for (double g : cfg.gains)
    if (!(g > 0.0)) throw std::invalid_argument("sweep: gains must be positive");
  return cfg;
}

inline EnsembleConfig ensemble_from_json(const json& j) {
  EnsembleConfig cfg;
  cfg.trials = j.value("trials", cfg.trials);
  cfg.num_users = j.at("num_users").get<int>();
  cfg.num_rbs = j.at("num_rbs").get<int>();
  if (j.contains("placement")) cfg.placement = placement_from_json(j.at("placement"));
  cfg.schemes = j.at("schemes").get<std::vector<std::string>>();
  cfg.pmax = range_from_json(j.at("pmax_dbm_range"));
  cfg.seed = j.value("seed", cfg.seed);
  cfg.min_rate = j.value("min_rate", cfg.min_rate);
  cfg.circuit_power_per_user =
      j.value("circuit_power_per_user", cfg.circuit_power_per_user);
  cfg.noise_psd = j.value("noise_psd", cfg.noise_psd);
  cfg.rb_bandwidth = j.value("rb_bandwidth", cfg.rb_bandwidth);
  if (cfg.trials < 1) throw std::invalid_argument("ensemble: trials must be >= 1");
  if (cfg.schemes.empty())
    throw std::invalid_argument("ensemble: scheme list must be nonempty");
  return cfg;
}

inline ClusterInstance instance_at(const SweepConfig& cfg, double pmax_dbm) {
  ClusterInstance in;
  in.gains = cfg.gains;
  in.min_rates.assign(cfg.gains.size(), cfg.min_rate);
  in.max_powers.assign(cfg.gains.size(), dbm_to_watt(pmax_dbm));
  in.circuit_power = cfg.circuit_power_per_user * cfg.gains.size();
  in.noise_power = noise_power(cfg.noise_psd, cfg.rb_bandwidth);
  return in;
}

inline EeSolution run_scheme(const std::string& scheme, const ClusterInstance& in) {
  if (scheme == "MaxEE-NOMA") return maximize_ee(in);
  if (scheme == "MaxSE-NOMA") return maximize_se(in);
  if (scheme == "MaxEE-OMA") return oma_maximize_ee(in);
  if (scheme == "CaseI") return solve_case1(in);
  if (scheme == "CaseII") return solve_case2(in);
  throw std::invalid_argument("unknown sweep scheme '" + scheme + "'");
}

}  // namespace detail_cli

/// `feasibility`: per-user minimum powers, margins, and the verdict.
inline int cmd_feasibility(const std::string& config_path) {
  const ClusterInstance in =
      cluster_from_json(detail_cli::load_json(config_path));
  const MinPowerReport rep = min_powers(in);
  std::cout << "user,p_min_w,p_max_w,margin_w\n";
  for (std::size_t l = 0; l < in.size(); ++l)
    std::cout << l << ',' << csv_double(rep.powers[l]) << ','
              << csv_double(in.max_powers[l]) << ','
              << csv_double(in.max_powers[l] - rep.powers[l]) << '\n';
  if (rep.feasible) {
    std::cout << "verdict,feasible\n";
  } else {
    std::cout << "verdict,infeasible,first_violation," << rep.first_violation
              << '\n';
  }
  return kExitOk;
}

/// `sweep`: EE/SE schemes across a common per-user power cap.
inline int cmd_sweep(const std::string& config_path, const std::string& out_path) {
  const SweepConfig cfg = detail_cli::sweep_from_json(detail_cli::load_json(config_path));
  for (const std::string& s : cfg.schemes) {
    if ((s == "CaseI" || s == "CaseII") && cfg.gains.size() != 2)
      throw std::invalid_argument("sweep: " + s + " needs exactly two users");
  }
  detail_cli::Output out(out_path);
  out.out() << "pmax_dbm,scheme,seed,"
            << ee_solution_csv_header(cfg.gains.size()) << '\n';
  for (const double dbm : cfg.pmax.values()) {
    const ClusterInstance in = detail_cli::instance_at(cfg, dbm);
    for (const std::string& scheme : cfg.schemes) {
      const EeSolution sol = detail_cli::run_scheme(scheme, in);
      out.out() << csv_double(dbm) << ',' << scheme << ',' << cfg.seed << ','
                << ee_solution_csv_row(sol, cfg.gains.size()) << '\n';
    }
  }
  return kExitOk;
}

/// `phase`: two-user boundary derivatives, phase labels, analytical and
/// iterative powers per cap.
inline int cmd_phase(const std::string& config_path, const std::string& out_path) {
  const SweepConfig cfg = detail_cli::sweep_from_json(detail_cli::load_json(config_path));
  if (cfg.gains.size() != 2)
    throw std::invalid_argument("phase: exactly two users required");
  detail_cli::Output out(out_path);
  out.out() << "pmax_dbm,feasible,dp1,dp2,dp3,case1_phase,case2_phase,"
               "case1_p1,case1_p2,case1_ee,case2_p1,case2_p2,case2_ee,"
               "alg2_p1,alg2_p2,alg2_ee\n";
  for (const double dbm : cfg.pmax.values()) {
    const ClusterInstance in = detail_cli::instance_at(cfg, dbm);
    if (!min_powers(in).feasible) {
      out.out() << csv_double(dbm) << ",0,,,,,,,,,,,,,,\n";
      continue;
    }
    const auto at_max = ee_gradient(in, {in.max_powers[0], in.max_powers[1]});
    const double p2min =
        (std::exp2(in.min_rates[1]) - 1.0) * in.noise_power / in.gains[1];
    const auto at_min = ee_gradient(in, {in.max_powers[0], p2min});
    const auto c1 = solve_case1(in);
    const auto c2 = solve_case2(in);
    const auto alg2 = maximize_ee(in);
    out.out() << csv_double(dbm) << ",1," << csv_double(at_max[0]) << ','
              << csv_double(at_max[1]) << ',' << csv_double(at_min[1]) << ','
              << classify_phase_case1(in).phase << ','
              << classify_phase_case2(in).phase << ','
              << csv_double(c1.powers[0]) << ',' << csv_double(c1.powers[1])
              << ',' << csv_double(c1.ee) << ','
              << (c2.feasible ? csv_double(c2.powers[0]) : "") << ','
              << (c2.feasible ? csv_double(c2.powers[1]) : "") << ','
              << (c2.feasible ? csv_double(c2.ee) : "") << ','
              << csv_double(alg2.powers[0]) << ',' << csv_double(alg2.powers[1])
              << ',' << csv_double(alg2.ee) << '\n';
  }
  return kExitOk;
}

/// One ensemble trial of one scheme on a drawn scenario.
inline SystemSolution run_ensemble_scheme(const std::string& scheme,
                                          const Scenario& s,
                                          std::uint64_t trial_seed) {
  if (scheme == "HMA-prop") return swap_match(s, RateModel::noma);
  if (scheme == "HMA-MWM") return system_ee(s, mwm_gain(s), RateModel::noma);
  if (scheme == "HMA-DC") return dc_match(s, RateModel::noma);
  if (scheme == "HMA-rand")
    return system_ee(s, random_match(s, trial_seed), RateModel::noma);
  if (scheme == "OMA-swap") return swap_match(s, RateModel::oma);
  if (scheme == "OMA-MWM") return oma_mwm(s);
  throw std::invalid_argument("unknown ensemble scheme '" + scheme + "'");
}

/// `ensemble`: paired Monte Carlo comparison of the association schemes.
/// All schemes inside one trial share the same scenario draw; per-trial rows
/// go to the CSV, mean/stderr summaries to stdout.
inline int cmd_ensemble(const EnsembleConfig& cfg, const std::string& out_path) {
  detail_cli::Output out(out_path);
  out.out() << "pmax_dbm,scheme,trial,seed,system_ee,swap_count,"
               "infeasible_clusters\n";
  std::ostringstream summary;
  summary << "pmax_dbm,scheme,trials,mean_ee,stderr_ee,infeasible_cluster_rate\n";
  for (const double dbm : cfg.pmax.values()) {
    ScenarioConfig sc;
    sc.num_users = cfg.num_users;
    sc.num_rbs = cfg.num_rbs;
    sc.placement = cfg.placement;
    sc.min_rate = cfg.min_rate;
    sc.max_power = dbm_to_watt(dbm);
    sc.circuit_power_per_user = cfg.circuit_power_per_user;
    sc.noise_psd = cfg.noise_psd;
    sc.rb_bandwidth = cfg.rb_bandwidth;
    std::vector<std::vector<double>> ees(cfg.schemes.size());
    std::vector<long> infeasible(cfg.schemes.size(), 0);
    for (int trial = 0; trial < cfg.trials; ++trial) {
      sc.seed = Rng::substream(cfg.seed, static_cast<std::uint64_t>(trial)).next_u64();
      const Scenario s = draw_scenario(sc);
      for (std::size_t i = 0; i < cfg.schemes.size(); ++i) {
        const SystemSolution sol = run_ensemble_scheme(cfg.schemes[i], s, sc.seed);
        ees[i].push_back(sol.system_ee);
        infeasible[i] += sol.infeasible_clusters;
        out.out() << csv_double(dbm) << ',' << cfg.schemes[i] << ',' << trial
                  << ',' << sc.seed << ',' << csv_double(sol.system_ee) << ','
                  << sol.swap_count << ',' << sol.infeasible_clusters << '\n';
      }
    }
    for (std::size_t i = 0; i < cfg.schemes.size(); ++i) {
      double mean = 0.0;
      for (double v : ees[i]) mean += v;
      mean /= ees[i].size();
      double var = 0.0;
      for (double v : ees[i]) var += (v - mean) * (v - mean);
      const double stderr_ee =
          ees[i].size() > 1 ? std::sqrt(var / (ees[i].size() - 1.0) /
                                        static_cast<double>(ees[i].size()))
                            : 0.0;
      summary << csv_double(dbm) << ',' << cfg.schemes[i] << ','
              << ees[i].size() << ',' << csv_double(mean) << ','
              << csv_double(stderr_ee) << ','
              << csv_double(static_cast<double>(infeasible[i]) /
                            (static_cast<double>(cfg.trials) * cfg.num_rbs))
              << '\n';
    }
  }
  // keep the per-trial CSV clean when it goes to stdout
  (out_path.empty() ? std::cerr : std::cout) << summary.str();
  return kExitOk;
}

/// `verify`: oracle cross-checks. Cluster scope compares the Dinkelbach
/// solver with the grid search on random feasible instances; matching scope
/// compares swap matching with exhaustive enumeration. Nonzero exit when a
/// gap exceeds tolerance.
inline int cmd_verify(const std::string& scope, std::uint64_t seed, bool quick) {
  bool failed = false;
  const double noise = noise_power(-174.0, 180e3);
  if (scope == "cluster" || scope == "all") {
    Rng rng = Rng::substream(seed, 101);
    const int trials = quick ? 12 : 60;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      const int users = 2 + static_cast<int>(rng.below(2));
      ClusterInstance in;
      for (int l = 0; l < users; ++l)
        in.gains.push_back(pathloss_linear(rng.uniform(0.05, 0.3)) *
                           rng.exponential());
      std::sort(in.gains.begin(), in.gains.end(), std::greater<>());
      in.min_rates.assign(users, 1.5);
      in.max_powers.assign(users, dbm_to_watt(20.0));
      in.circuit_power = 1e-3 * users;
      in.noise_power = noise;
      if (!min_powers(in).feasible) continue;
      const auto fast = maximize_ee(in);
      const auto slow = grid_search_ee(in);
      worst = std::max(worst, std::abs(fast.ee - slow.ee) / fast.ee);
    }
    const bool ok = worst < 1e-4;
    failed |= !ok;
    std::cout << (ok ? "PASS" : "FAIL")
              << " cluster: worst relative EE gap vs grid oracle = "
              << csv_double(worst) << " (tolerance 1e-4)\n";
  }
  if (scope == "matching" || scope == "all") {
    Rng rng = Rng::substream(seed, 202);
    const int trials = quick ? 8 : 25;
    double worst_ratio = 1.0, mean_ratio = 0.0;
    int counted = 0;
    bool sound = true;
    for (int t = 0; t < trials; ++t) {
      ScenarioConfig sc;
      sc.num_users = 4;
      sc.num_rbs = 2;
      sc.max_power = dbm_to_watt(20.0);
      sc.seed = rng.next_u64();
      const Scenario s = draw_scenario(sc);
      const auto heuristic = swap_match(s, RateModel::noma);
      const auto best = exhaustive_matching(s, RateModel::noma);
      if (best.system_ee <= 0.0) continue;
      const double ratio = heuristic.system_ee / best.system_ee;
      std::cout << "  trial " << t << " swap/exhaustive EE ratio = "
                << csv_double(ratio) << '\n';
      sound &= heuristic.system_ee <= best.system_ee * (1.0 + 1e-9);
      worst_ratio = std::min(worst_ratio, ratio);
      mean_ratio += ratio;
      ++counted;
    }
    mean_ratio = counted ? mean_ratio / counted : 0.0;
    const bool ok = sound && counted > 0;
    failed |= !ok;
    std::cout << (ok ? "PASS" : "FAIL")
              << " matching: mean swap/exhaustive ratio = " << csv_double(mean_ratio)
              << ", worst = " << csv_double(worst_ratio)
              << (sound ? "" : " (heuristic exceeded the oracle!)") << '\n';
  }
  return failed ? kExitVerify : kExitOk;
}

/// Full command-line entry point; returns the process exit status.
inline int run(std::vector<std::string> args) {
  CLI::App app{"Energy-efficiency maximization for uplink hybrid NOMA-OMA: "
               "per-cluster power allocation, two-user closed forms, and "
               "user-RB swap matching"};
  app.require_subcommand(1);

  std::string config_path, out_path, scope = "all";
  std::optional<std::uint64_t> seed_flag;
  std::optional<int> trials_flag;
  bool quick = false;

  auto* feas = app.add_subcommand("feasibility", "per-user minimum-power report");
  feas->add_option("--config", config_path, "instance JSON")->required();

  auto* sweep = app.add_subcommand("sweep", "EE/SE schemes vs max transmit power");
  sweep->add_option("--config", config_path, "sweep JSON")->required();
  sweep->add_option("--out", out_path, "output CSV (default stdout)");

  auto* phase = app.add_subcommand("phase", "two-user phase diagram data");
  phase->add_option("--config", config_path, "phase JSON")->required();
  phase->add_option("--out", out_path, "output CSV (default stdout)");

  auto* ens = app.add_subcommand("ensemble", "Monte Carlo scheme comparison");
  ens->add_option("--config", config_path, "ensemble JSON")->required();
  ens->add_option("--out", out_path, "per-trial CSV (default stdout)");
  ens->add_option("--seed", seed_flag, "override the base seed");
  ens->add_option("--trials", trials_flag, "override the trial count");
  ens->add_flag("--quick", quick, "cap trials at 50 for smoke runs");

  auto* ver = app.add_subcommand("verify", "oracle cross-checks");
  ver->add_option("--scope", scope, "cluster|matching|all")
      ->check(CLI::IsMember({"cluster", "matching", "all"}));
  ver->add_option("--seed", seed_flag, "randomization seed");
  ver->add_flag("--quick", quick, "fewer instances");

  std::reverse(args.begin(), args.end());  // CLI11 wants reversed argv order
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitParse;
  }

  try {
    if (feas->parsed()) return cmd_feasibility(config_path);
    if (sweep->parsed()) return cmd_sweep(config_path, out_path);
    if (phase->parsed()) return cmd_phase(config_path, out_path);
    if (ens->parsed()) {
      EnsembleConfig cfg =
          detail_cli::ensemble_from_json(detail_cli::load_json(config_path));
      if (seed_flag) cfg.seed = *seed_flag;
      if (trials_flag) cfg.trials = *trials_flag;
      if (quick) cfg.trials = std::min(cfg.trials, 50);
      return cmd_ensemble(cfg, out_path);
    }
    if (ver->parsed()) return cmd_verify(scope, seed_flag.value_or(1), quick);
  } catch (const json::parse_error& e) {
    std::cerr << "parse error: " << detail_cli::describe_parse_error(config_path, e)
              << '\n';
    return kExitParse;
  } catch (const json::exception& e) {
    std::cerr << "config error in '" << config_path << "': " << e.what() << '\n';
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitParse;
  }
  return kExitOk;
}

}  // namespace noma::cli
