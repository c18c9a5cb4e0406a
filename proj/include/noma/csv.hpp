#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "noma/matching.hpp"
#include "noma/types.hpp"

namespace noma {

/// Shortest round-trippable decimal form, '.' separator, locale-free.
inline std::string csv_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string csv_join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line;
}

/// Header for flat EeSolution rows with `num_users` power columns.
inline std::string ee_solution_csv_header(std::size_t num_users) {
  std::string h = "feasible,ee,sum_rate,total_power_w,dinkelbach_iterations,inner_iterations";
  for (std::size_t l = 0; l < num_users; ++l) h += ",p" + std::to_string(l);
  return h;
}

inline std::string ee_solution_csv_row(const EeSolution& sol, std::size_t num_users) {
  std::vector<std::string> cells{
      sol.feasible ? "1" : "0",     csv_double(sol.ee),
      csv_double(sol.sum_rate),     csv_double(sol.total_power),
      std::to_string(sol.dinkelbach_iterations),
      std::to_string(sol.inner_iterations)};
  for (std::size_t l = 0; l < num_users; ++l)
    cells.push_back(l < sol.powers.size() ? csv_double(sol.powers[l]) : "");
  return csv_join(cells);
}

/// Per-cluster rows plus a summary row for a solved system.
inline std::string system_solution_csv(const SystemSolution& sol) {
  std::string out = "row,rb,users,feasible,ee,sum_rate,total_power_w\n";
  for (std::size_t rb = 0; rb < sol.clusters.size(); ++rb) {
    const EeSolution& c = sol.clusters[rb];
    std::string users;
    for (std::size_t i = 0; i < sol.matching.users_of_rb[rb].size(); ++i) {
      if (i) users += ' ';
      users += std::to_string(sol.matching.users_of_rb[rb][i]);
    }
    out += csv_join({"cluster", std::to_string(rb), users, c.feasible ? "1" : "0",
                     csv_double(c.ee), csv_double(c.sum_rate),
                     csv_double(c.total_power)}) +
           "\n";
  }
  const auto clusters = static_cast<int>(sol.clusters.size());
  out += csv_join({"summary", "", "",
                   std::to_string(clusters - sol.infeasible_clusters) + "/" +
                       std::to_string(clusters),
                   csv_double(sol.system_ee), "", ""}) +
         "\n";
  return out;
}

inline std::string swap_trace_csv(const SystemSolution& sol) {
  std::string out = "pass,u,k,ee_before,ee_after\n";
  for (const SwapRecord& r : sol.swap_trace)
    out += csv_join({std::to_string(r.pass), std::to_string(r.user_a),
                     std::to_string(r.user_b), csv_double(r.ee_before),
                     csv_double(r.ee_after)}) +
           "\n";
  return out;
}

}  // namespace noma
