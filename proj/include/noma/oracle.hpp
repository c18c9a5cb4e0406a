#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "noma/cluster.hpp"
#include "noma/matching.hpp"
#include "noma/types.hpp"

namespace noma {

/// Brute-force grid refinement settings.
struct GridSpec {
  int points_per_axis = 32;
  int refinement_rounds = 4;   ///< minimum rounds; more run until target resolution
  double shrink_factor = 0.25; ///< box shrink per round, centered on the incumbent
};

struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(long long n)
      : std::runtime_error("exhaustive_matching: " + std::to_string(n) +
                           " matchings exceed the enumeration budget"),
        count(n) {}
  long long count;
};

namespace detail_oracle {

// QoS check with relative slack; the grid works at received-power scales
// around 1e-14 W where any absolute epsilon would be wrong.
inline bool qos_feasible(const ClusterInstance& in, const PowerVector& p) {
  const std::size_t n = in.size();
  double interference = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double gamma = std::exp2(in.min_rates[i]) - 1.0;
    if (p[i] * in.gains[i] <
        gamma * (interference + in.noise_power) * (1.0 - 1e-12))
      return false;
    interference += p[i] * in.gains[i];
  }
  return true;
}

// Exact feasible interval of coordinate l with the others held fixed.
inline std::pair<double, double> coord_interval(const ClusterInstance& in,
                                                const PowerVector& p,
                                                std::size_t l) {
  const std::size_t n = in.size();
  double interference = 0.0;
  for (std::size_t k = l + 1; k < n; ++k) interference += p[k] * in.gains[k];
  const double gamma_l = std::exp2(in.min_rates[l]) - 1.0;
  double lb = gamma_l * (interference + in.noise_power) / in.gains[l];
  double ub = in.max_powers[l];
  for (std::size_t j = 0; j < l; ++j) {
    const double gamma_j = std::exp2(in.min_rates[j]) - 1.0;
    if (gamma_j <= 0.0) continue;
    double seen = 0.0;
    for (std::size_t k = j + 1; k < n; ++k)
      if (k != l) seen += p[k] * in.gains[k];
    ub = std::min(ub, (p[j] * in.gains[j] / gamma_j - in.noise_power - seen) /
                          in.gains[l]);
  }
  return {lb, ub};
}

}  // namespace detail_oracle

/// Reference EE maximizer for small clusters (L <= 4): exhaustive grid over
/// [min_powers, max_powers] filtered by the exact QoS constraints, with each
/// visited point also projected onto its per-coordinate feasibility bounds so
/// boundary optima are sampled exactly. Refines around the incumbent until
/// the spacing is below 1e-4 * min(P^max).
inline EeSolution grid_search_ee(const ClusterInstance& in, const GridSpec& spec = {}) {
  check_instance(in);
  if (in.size() > 4)
    throw std::invalid_argument("grid_search_ee: meant for L <= 4");
  if (spec.points_per_axis < 8 || spec.shrink_factor <= 0.0 ||
      spec.shrink_factor >= 1.0)
    throw std::invalid_argument("grid_search_ee: bad grid spec");
  const MinPowerReport mp = min_powers(in);
  if (!mp.feasible) {
    EeSolution sol;
    sol.note = "infeasible";
    return sol;
  }
  const std::size_t n = in.size();
  const int pts = spec.points_per_axis;
  // contractual resolution is 1e-4 * min(P^max); refine two decades past it
  // so the quadratic error at interior optima drops below 1e-6 relative
  const double target =
      *std::min_element(in.max_powers.begin(), in.max_powers.end()) * 1e-6;

  std::vector<double> lo = mp.powers, hi = in.max_powers;
  PowerVector best_p = mp.powers;
  double best = ee_value(in, best_p);

  const auto consider = [&](const PowerVector& p) {
    if (!detail_oracle::qos_feasible(in, p)) return;
    const double v = ee_value(in, p);
    if (v > best) {
      best = v;
      best_p = p;
    }
  };

  int round = 0;
  while (true) {
    ++round;
    PowerVector p(n);
    std::vector<int> idx(n, 0);
    const auto axis_value = [&](std::size_t l, int i) {
      return pts == 1 ? lo[l]
                      : lo[l] + (hi[l] - lo[l]) * static_cast<double>(i) /
                                    static_cast<double>(pts - 1);
    };
    // odometer over the grid, lexicographic for a deterministic tie-break
    while (true) {
      for (std::size_t l = 0; l < n; ++l) p[l] = axis_value(l, idx[l]);
      consider(p);
      for (std::size_t l = 0; l < n; ++l) {
        const auto [clo, chi] = detail_oracle::coord_interval(in, p, l);
        PowerVector q = p;
        if (clo >= mp.powers[l] && clo <= in.max_powers[l]) {
          q[l] = clo;
          consider(q);
        }
        if (chi >= mp.powers[l] && chi <= in.max_powers[l]) {
          q[l] = chi;
          consider(q);
        }
      }
      std::size_t carry = 0;
      while (carry < n && ++idx[carry] == pts) idx[carry++] = 0;
      if (carry == n) break;
    }
    double spacing = 0.0;
    for (std::size_t l = 0; l < n; ++l)
      spacing = std::max(spacing, (hi[l] - lo[l]) / static_cast<double>(pts - 1));
    if (round >= spec.refinement_rounds && spacing <= target) break;
    if (round > 64) break;  // resolution exhausted; avoids fp stagnation
    for (std::size_t l = 0; l < n; ++l) {
      const double half = (hi[l] - lo[l]) * spec.shrink_factor * 0.5;
      lo[l] = std::max(mp.powers[l], best_p[l] - half);
      hi[l] = std::min(in.max_powers[l], best_p[l] + half);
    }
  }
  EeSolution sol = evaluate_solution(in, std::move(best_p));
  sol.inner_iterations = round;
  return sol;
}

/// Number of distinct balanced matchings of U users onto M RBs.
inline long long count_matchings(int num_users, int num_rbs) {
  const std::vector<int> base = balanced_cluster_sizes(num_users, num_rbs);
  const int hi = (num_users + num_rbs - 1) / num_rbs;
  int extras = 0;
  for (int sz : base) extras += (sz == hi) ? 1 : 0;
  // multinomial count per size vector, times the number of ways to pick
  // which RBs carry the extra user
  const auto multinomial = [&](const std::vector<int>& sizes) {
    double v = 1.0;
    int placed = 0;
    for (int sz : sizes)
      for (int i = 1; i <= sz; ++i) v = v * static_cast<double>(++placed) / i;
    return v;
  };
  const auto choose = [](int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
  };
  const double total =
      (num_users % num_rbs == 0)
          ? multinomial(base)
          : multinomial(base) * choose(num_rbs, extras);
  return static_cast<long long>(std::llround(total));
}

/// Enumerates every balanced matching, solves each cluster, and returns the
/// best system EE. Refuses (BudgetExceeded) when the count is above budget.
inline SystemSolution exhaustive_matching(const Scenario& s,
                                          const ClusterSolver& solver,
                                          long long budget = 100000) {
  const int U = s.num_users(), M = s.num_rbs();
  const long long count = count_matchings(U, M);
  if (count > budget) throw BudgetExceeded(count);

  const int hi = (U + M - 1) / M;
  const int extras = U - M * (hi - 1);

  // cluster EE cache: member sets repeat across matchings
  std::map<std::pair<int, std::vector<int>>, double> cache;
  const auto cluster_value = [&](int rb, const std::vector<int>& members) {
    const auto key = std::make_pair(rb, members);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const double v =
        detail_match::contribution(detail_match::solve_members(s, members, rb, solver));
    cache.emplace(key, v);
    return v;
  };

  SystemSolution best;
  best.system_ee = -1.0;
  std::vector<int> rb_of_user(U, -1);
  std::vector<int> load(M, 0);
  std::vector<int> cap(M, 0);

  const std::function<void(int)> assign_user = [&](int u) {
    if (u == U) {
      Matching m = matching_from_assignment(rb_of_user, M);
      double total = 0.0;
      for (int rb = 0; rb < M; ++rb) total += cluster_value(rb, m.users_of_rb[rb]);
      if (total > best.system_ee) {
        best.system_ee = total;
        best.matching = std::move(m);
      }
      return;
    }
    for (int m = 0; m < M; ++m) {
      if (load[m] == cap[m]) continue;
      ++load[m];
      rb_of_user[u] = m;
      assign_user(u + 1);
      --load[m];
    }
  };

  // choose which RBs take the extra seat, then enumerate assignments
  std::vector<int> pick(M, 0);
  const std::function<void(int, int)> choose_extras = [&](int m, int left) {
    if (M - m < left) return;
    if (m == M) {
      if (left != 0) return;
      for (int i = 0; i < M; ++i) cap[i] = hi - 1 + pick[i];
      assign_user(0);
      return;
    }
    pick[m] = 1;
    if (left > 0) choose_extras(m + 1, left - 1);
    pick[m] = 0;
    choose_extras(m + 1, left);
  };
  choose_extras(0, extras);

  best.clusters.resize(M);
  for (int rb = 0; rb < M; ++rb) {
    best.clusters[rb] =
        detail_match::solve_members(s, best.matching.users_of_rb[rb], rb, solver);
    if (!best.matching.users_of_rb[rb].empty() && !best.clusters[rb].feasible)
      ++best.infeasible_clusters;
  }
  return best;
}

inline SystemSolution exhaustive_matching(const Scenario& s, RateModel model,
                                          long long budget = 100000) {
  return exhaustive_matching(s, solver_for(model), budget);
}

}  // namespace noma
