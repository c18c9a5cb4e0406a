#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "noma/assignment.hpp"
#include "noma/channel.hpp"
#include "noma/cluster.hpp"
#include "noma/oma.hpp"
#include "noma/rng.hpp"
#include "noma/types.hpp"

namespace noma {

/// Many-to-one user-to-RB association. Both directions are stored; a valid
/// matching keeps them consistent and the per-RB loads balanced to within one
/// user.
struct Matching {
  std::vector<int> rb_of_user;
  std::vector<std::vector<int>> users_of_rb;
};

struct SwapRecord {
  int pass = 0;
  int user_a = 0;
  int user_b = 0;
  double ee_before = 0.0;  ///< two-cluster EE sum before the swap
  double ee_after = 0.0;
};

/// A solved system: association plus per-cluster allocations. Infeasible
/// clusters stay in the list with feasible=false and contribute zero EE.
struct SystemSolution {
  Matching matching;
  std::vector<EeSolution> clusters;  ///< one per RB
  double system_ee = 0.0;
  int swap_count = 0;
  std::vector<SwapRecord> swap_trace;
  std::vector<int> forced_users;  ///< users no RB accepted (deferred acceptance)
  int infeasible_clusters = 0;
};

enum class RateModel { noma, oma };

using ClusterSolver = std::function<EeSolution(const ClusterInstance&)>;

inline ClusterSolver solver_for(RateModel model) {
  if (model == RateModel::noma)
    return [](const ClusterInstance& in) { return maximize_ee(in); };
  return [](const ClusterInstance& in) { return oma_maximize_ee(in); };
}

inline Matching matching_from_assignment(std::vector<int> rb_of_user, int num_rbs) {
  Matching m;
  m.users_of_rb.assign(num_rbs, {});
  for (std::size_t u = 0; u < rb_of_user.size(); ++u) {
    const int rb = rb_of_user[u];
    if (rb < 0 || rb >= num_rbs)
      throw std::invalid_argument("matching: user assigned out of range");
    m.users_of_rb[rb].push_back(static_cast<int>(u));
  }
  m.rb_of_user = std::move(rb_of_user);
  return m;
}

/// Checks the many-to-one conditions: every user on exactly one RB, inverse
/// consistent, and load balance |Phi(m)| within {ceil(U/M)-1, ceil(U/M)}.
inline bool matching_valid(const Scenario& s, const Matching& m) {
  const int U = s.num_users(), M = s.num_rbs();
  if (static_cast<int>(m.rb_of_user.size()) != U ||
      static_cast<int>(m.users_of_rb.size()) != M)
    return false;
  const int hi = (U + M - 1) / M;
  int total = 0;
  for (int rb = 0; rb < M; ++rb) {
    const int sz = static_cast<int>(m.users_of_rb[rb].size());
    if (sz < hi - 1 || sz > hi) return false;
    total += sz;
    for (int u : m.users_of_rb[rb])
      if (u < 0 || u >= U || m.rb_of_user[u] != rb) return false;
  }
  return total == U;
}

/// Builds the decode-ordered instance for one RB's members (descending gain
/// on that RB). `order_out`, when given, receives the user ids in decode
/// order so powers can be mapped back.
inline ClusterInstance cluster_instance_for(const Scenario& s,
                                            std::vector<int> members, int rb,
                                            std::vector<int>* order_out = nullptr) {
  std::stable_sort(members.begin(), members.end(), [&](int a, int b) {
    return s.gains[a][rb] > s.gains[b][rb];
  });
  ClusterInstance in;
  in.noise_power = s.noise_power;
  in.circuit_power = s.circuit_power_per_user * static_cast<double>(members.size());
  for (int u : members) {
    in.gains.push_back(s.gains[u][rb]);
    in.min_rates.push_back(s.min_rates[u]);
    in.max_powers.push_back(s.max_powers[u]);
  }
  if (order_out) *order_out = std::move(members);
  return in;
}

namespace detail_match {

inline double contribution(const EeSolution& sol) {
  return sol.feasible ? sol.ee : 0.0;
}

inline EeSolution solve_members(const Scenario& s, const std::vector<int>& members,
                                int rb, const ClusterSolver& solver) {
  if (members.empty()) return {};
  return solver(cluster_instance_for(s, members, rb));
}

}  // namespace detail_match

/// Greedy initialization: ceil(U/M) rounds; within a round, repeatedly give
/// the globally best remaining (user, RB) gain its match and retire both
/// until the RBs are spent or the users run out.
inline Matching greedy_init(const Scenario& s) {
  const int U = s.num_users(), M = s.num_rbs();
  const int rounds = (U + M - 1) / M;
  std::vector<int> rb_of_user(U, -1);
  std::vector<char> user_done(U, 0);
  int assigned = 0;
  for (int k = 0; k < rounds && assigned < U; ++k) {
    std::vector<char> rb_done(M, 0);
    for (int count = 0; count < M && assigned < U; ++count) {
      int bu = -1, bm = -1;
      double best = -1.0;
      for (int u = 0; u < U; ++u) {
        if (user_done[u]) continue;
        for (int m = 0; m < M; ++m) {
          if (rb_done[m]) continue;
          if (s.gains[u][m] > best) {
            best = s.gains[u][m];
            bu = u;
            bm = m;
          }
        }
      }
      rb_of_user[bu] = bm;
      user_done[bu] = 1;
      rb_done[bm] = 1;
      ++assigned;
    }
  }
  return matching_from_assignment(std::move(rb_of_user), M);
}

/// Solves every cluster under the given matching and sums the EEs;
/// clusters on different RBs are independent.
inline SystemSolution system_ee(const Scenario& s, const Matching& m,
                                const ClusterSolver& solver) {
  if (!matching_valid(s, m))
    throw std::invalid_argument("system_ee: matching violates the association rules");
  SystemSolution out;
  out.matching = m;
  out.clusters.resize(s.num_rbs());
  for (int rb = 0; rb < s.num_rbs(); ++rb) {
    out.clusters[rb] = detail_match::solve_members(s, m.users_of_rb[rb], rb, solver);
    if (!m.users_of_rb[rb].empty() && !out.clusters[rb].feasible)
      ++out.infeasible_clusters;
    out.system_ee += detail_match::contribution(out.clusters[rb]);
  }
  return out;
}

inline SystemSolution system_ee(const Scenario& s, const Matching& m,
                                RateModel model) {
  return system_ee(s, m, solver_for(model));
}

/// Joint association and power allocation: greedy init, then passes of
/// pairwise swaps committed whenever the two affected clusters' EE sum
/// strictly improves; stops at the first pass with no commit. The recorded
/// EE sum is strictly increasing across commits, which bounds the number of
/// swaps.
inline SystemSolution swap_match(const Scenario& s, const ClusterSolver& solver,
                                 bool record_trace = false) {
  const int U = s.num_users();
  Matching m = greedy_init(s);
  SystemSolution sol = system_ee(s, m, solver);
  // strict improvement threshold; EE ties must not cycle
  constexpr double kMinGain = 1e-10;
  bool improved = true;
  int pass = 0;
  while (improved) {
    improved = false;
    ++pass;
    for (int u = 0; u < U; ++u) {
      for (int k = 0; k < U; ++k) {
        const int mu = sol.matching.rb_of_user[u];
        const int mk = sol.matching.rb_of_user[k];
        if (mu == mk) continue;
        const double before = detail_match::contribution(sol.clusters[mu]) +
                              detail_match::contribution(sol.clusters[mk]);
        std::vector<int> mem_u = sol.matching.users_of_rb[mu];
        std::vector<int> mem_k = sol.matching.users_of_rb[mk];
        std::replace(mem_u.begin(), mem_u.end(), u, k);
        std::replace(mem_k.begin(), mem_k.end(), k, u);
        EeSolution cu = detail_match::solve_members(s, mem_u, mu, solver);
        EeSolution ck = detail_match::solve_members(s, mem_k, mk, solver);
        const double after =
            detail_match::contribution(cu) + detail_match::contribution(ck);
        if (after > before + kMinGain) {
          sol.matching.users_of_rb[mu] = std::move(mem_u);
          sol.matching.users_of_rb[mk] = std::move(mem_k);
          sol.matching.rb_of_user[u] = mk;
          sol.matching.rb_of_user[k] = mu;
          sol.clusters[mu] = std::move(cu);
          sol.clusters[mk] = std::move(ck);
          ++sol.swap_count;
          improved = true;
          if (record_trace)
            sol.swap_trace.push_back({pass, u, k, before, after});
        }
      }
    }
  }
  sol.system_ee = 0.0;
  sol.infeasible_clusters = 0;
  for (int rb = 0; rb < s.num_rbs(); ++rb) {
    sol.system_ee += detail_match::contribution(sol.clusters[rb]);
    if (!sol.matching.users_of_rb[rb].empty() && !sol.clusters[rb].feasible)
      ++sol.infeasible_clusters;
  }
  return sol;
}

inline SystemSolution swap_match(const Scenario& s, RateModel model,
                                 bool record_trace = false) {
  return swap_match(s, solver_for(model), record_trace);
}

/// Max-weight matching on raw channel gains: each RB is replicated into one
/// slot per seat, the U-by-U assignment problem is solved exactly, and slots
/// collapse back to RBs.
inline Matching mwm_gain(const Scenario& s) {
  const int U = s.num_users(), M = s.num_rbs();
  std::vector<int> slot_rb;
  for (int m = 0; m < M; ++m)
    for (int i = 0; i < s.cluster_sizes[m]; ++i) slot_rb.push_back(m);
  std::vector<std::vector<double>> w(U, std::vector<double>(U));
  for (int u = 0; u < U; ++u)
    for (int c = 0; c < U; ++c) w[u][c] = s.gains[u][slot_rb[c]];
  const std::vector<int> cols = max_weight_assignment(w);
  std::vector<int> rb_of_user(U);
  for (int u = 0; u < U; ++u) rb_of_user[u] = slot_rb[cols[u]];
  return matching_from_assignment(std::move(rb_of_user), M);
}

/// OMA baseline alternating exact assignment (weights = OMA rates at current
/// powers, which depend only on the candidate RB) with per-cluster OMA power
/// allocation. A new matching is kept only if the re-solved system EE
/// improves, so the EE sequence is non-decreasing and the loop terminates.
/// `ee_trace`, when given, receives the accepted system EE per alternation.
inline SystemSolution oma_mwm(const Scenario& s, int max_alternations = 50,
                              std::vector<double>* ee_trace = nullptr) {
  const int U = s.num_users(), M = s.num_rbs();
  const ClusterSolver solver = solver_for(RateModel::oma);
  std::vector<int> slot_rb;
  for (int m = 0; m < M; ++m)
    for (int i = 0; i < s.cluster_sizes[m]; ++i) slot_rb.push_back(m);

  std::vector<double> powers(s.max_powers);  // initial PA: full power
  SystemSolution best;
  best.system_ee = -1.0;
  for (int it = 0; it < max_alternations; ++it) {
    std::vector<std::vector<double>> w(U, std::vector<double>(U));
    for (int u = 0; u < U; ++u) {
      for (int c = 0; c < U; ++c) {
        const int m = slot_rb[c];
        const double L = static_cast<double>(s.cluster_sizes[m]);
        w[u][c] =
            std::log2(1.0 + L * powers[u] * s.gains[u][m] / s.noise_power) / L;
      }
    }
    const std::vector<int> cols = max_weight_assignment(w);
    std::vector<int> rb_of_user(U);
    for (int u = 0; u < U; ++u) rb_of_user[u] = slot_rb[cols[u]];
    SystemSolution cand = system_ee(s, matching_from_assignment(std::move(rb_of_user), M), solver);
    if (cand.system_ee <= best.system_ee + 1e-8 && it > 0) break;
    if (cand.system_ee > best.system_ee) best = std::move(cand);
    if (ee_trace) ee_trace->push_back(best.system_ee);
    // refresh powers from the accepted allocation
    for (int rb = 0; rb < M; ++rb) {
      std::vector<int> order;
      cluster_instance_for(s, best.matching.users_of_rb[rb], rb, &order);
      const EeSolution& c = best.clusters[rb];
      for (std::size_t i = 0; i < order.size() && c.feasible; ++i)
        powers[order[i]] = c.powers[i];
    }
  }
  return best;
}

/// Deferred acceptance on channel-gain preference lists: an over-subscribed
/// RB keeps the subset that greedily maximizes its cluster EE, one member at
/// a time, and rejects the rest. A user every RB has rejected is force-fit
/// into any remaining seat and flagged.
inline SystemSolution dc_match(const Scenario& s, const ClusterSolver& solver) {
  const int U = s.num_users(), M = s.num_rbs();
  std::vector<std::vector<int>> prefs(U);
  for (int u = 0; u < U; ++u) {
    prefs[u].resize(M);
    std::iota(prefs[u].begin(), prefs[u].end(), 0);
    std::stable_sort(prefs[u].begin(), prefs[u].end(), [&](int a, int b) {
      return s.gains[u][a] > s.gains[u][b];
    });
  }
  std::vector<int> next_pref(U, 0);
  std::vector<std::vector<int>> members(M);
  std::vector<int> forced;
  std::vector<int> unmatched(U);
  std::iota(unmatched.begin(), unmatched.end(), 0);

  while (!unmatched.empty()) {
    std::vector<std::vector<int>> proposals(M);
    std::vector<int> still;
    for (int u : unmatched) {
      if (next_pref[u] >= M) {
        for (int m = 0; m < M; ++m) {
          if (static_cast<int>(members[m].size()) < s.cluster_sizes[m]) {
            members[m].push_back(u);
            forced.push_back(u);
            break;
          }
        }
        continue;
      }
      proposals[prefs[u][next_pref[u]]].push_back(u);
      ++next_pref[u];
    }
    for (int m = 0; m < M; ++m) {
      if (proposals[m].empty()) continue;
      std::vector<int> candidates = members[m];
      candidates.insert(candidates.end(), proposals[m].begin(), proposals[m].end());
      if (static_cast<int>(candidates.size()) <= s.cluster_sizes[m]) {
        members[m] = std::move(candidates);
        continue;
      }
      std::vector<int> chosen;
      std::vector<char> taken(candidates.size(), 0);
      while (static_cast<int>(chosen.size()) < s.cluster_sizes[m]) {
        double best = -1.0;
        int best_i = -1;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
          if (taken[i]) continue;
          std::vector<int> trial = chosen;
          trial.push_back(candidates[i]);
          const double v = detail_match::contribution(
              detail_match::solve_members(s, trial, m, solver));
          if (v > best) {
            best = v;
            best_i = static_cast<int>(i);
          }
        }
        taken[best_i] = 1;
        chosen.push_back(candidates[best_i]);
      }
      for (std::size_t i = 0; i < candidates.size(); ++i)
        if (!taken[i]) still.push_back(candidates[i]);
      members[m] = std::move(chosen);
    }
    unmatched = std::move(still);
  }

  std::vector<int> rb_of_user(U, -1);
  for (int m = 0; m < M; ++m)
    for (int u : members[m]) rb_of_user[u] = m;
  SystemSolution sol = system_ee(s, matching_from_assignment(std::move(rb_of_user), M), solver);
  sol.forced_users = std::move(forced);
  return sol;
}

inline SystemSolution dc_match(const Scenario& s, RateModel model = RateModel::noma) {
  return dc_match(s, solver_for(model));
}

/// Uniformly random association honoring the scenario's cluster sizes;
/// deterministic per seed.
inline Matching random_match(const Scenario& s, std::uint64_t seed) {
  const int U = s.num_users(), M = s.num_rbs();
  std::vector<int> order(U);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng::substream(seed, 0x72616e64);
  for (int i = U - 1; i > 0; --i)
    std::swap(order[i], order[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  std::vector<int> rb_of_user(U, -1);
  int idx = 0;
  for (int m = 0; m < M; ++m)
    for (int i = 0; i < s.cluster_sizes[m]; ++i) rb_of_user[order[idx++]] = m;
  return matching_from_assignment(std::move(rb_of_user), M);
}

}  // namespace noma
