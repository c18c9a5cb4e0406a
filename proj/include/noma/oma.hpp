#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "noma/cluster.hpp"
#include "noma/types.hpp"

namespace noma {

/// OMA rates with equal degrees of freedom: each of the L users gets a 1/L
/// orthogonal share and concentrates its power in it, so there is no
/// inter-user interference.
inline std::vector<double> oma_rates(const ClusterInstance& in,
                                     const PowerVector& powers) {
  const std::size_t n = in.size();
  if (powers.size() != n)
    throw std::invalid_argument("oma_rates: power vector length mismatch");
  const double L = static_cast<double>(n);
  std::vector<double> rates(n);
  for (std::size_t l = 0; l < n; ++l)
    rates[l] =
        std::log2(1.0 + L * powers[l] * in.gains[l] / in.noise_power) / L;
  return rates;
}

/// Inverts the OMA rate floor: P_l >= (2^(L R_l) - 1) sigma^2 / (L |h_l|^2).
inline MinPowerReport oma_min_powers(const ClusterInstance& in) {
  check_instance(in);
  const std::size_t n = in.size();
  const double L = static_cast<double>(n);
  MinPowerReport rep;
  rep.powers.assign(n, 0.0);
  for (std::size_t l = 0; l < n; ++l) {
    rep.powers[l] =
        (std::exp2(L * in.min_rates[l]) - 1.0) * in.noise_power / (L * in.gains[l]);
    if (rep.feasible && rep.powers[l] > in.max_powers[l]) {
      rep.feasible = false;
      rep.first_violation = static_cast<int>(l);
    }
  }
  return rep;
}

namespace detail_oma {

inline EeSolution evaluate(const ClusterInstance& in, PowerVector powers) {
  EeSolution sol;
  sol.feasible = true;
  sol.rates = oma_rates(in, powers);
  sol.sum_rate = 0.0;
  for (double r : sol.rates) sol.sum_rate += r;
  sol.total_power = 0.0;
  for (double p : powers) sol.total_power += p;
  sol.ee = sol.sum_rate / (in.circuit_power + sol.total_power);
  sol.powers = std::move(powers);
  return sol;
}

}  // namespace detail_oma

/// EE-optimal OMA allocation: same Dinkelbach outer loop as the NOMA solver,
/// but the inner problem separates per user with stationary point
/// 1/(L beta ln2) - sigma^2/(L |h_l|^2), so no sweeping is needed.
inline EeSolution oma_maximize_ee(const ClusterInstance& in,
                                  const SolverOptions& opts = {}) {
  const MinPowerReport mp = oma_min_powers(in);
  if (!mp.feasible) {
    EeSolution sol;
    sol.note = "oma infeasible: user " + std::to_string(mp.first_violation);
    return sol;
  }
  double floor_power = in.circuit_power;
  for (double p : mp.powers) floor_power += p;
  if (!(floor_power > 0.0))
    throw std::domain_error(
        "oma_maximize_ee: EE has no maximizer with zero circuit power and zero rate floors");

  const std::size_t n = in.size();
  const double L = static_cast<double>(n);
  const double s2 = in.noise_power;
  double beta = 0.0;
  PowerVector p(n);
  int outer = 0;
  bool cap_hit = true;
  while (outer < opts.max_outer) {
    ++outer;
    const double target = beta > 0.0
                              ? 1.0 / (L * beta * std::numbers::ln2)
                              : std::numeric_limits<double>::infinity();
    double rate = 0.0, total = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      p[l] = std::clamp(target - s2 / (L * in.gains[l]), mp.powers[l],
                        in.max_powers[l]);
      rate += std::log2(1.0 + L * p[l] * in.gains[l] / s2) / L;
      total += p[l];
    }
    const double objective = rate - beta * (in.circuit_power + total);
    beta = rate / (in.circuit_power + total);
    if (objective <= opts.epsilon) {
      cap_hit = false;
      break;
    }
  }
  EeSolution sol = detail_oma::evaluate(in, std::move(p));
  sol.dinkelbach_iterations = outer;
  sol.iteration_cap_hit = cap_hit;
  if (cap_hit) sol.note = "dinkelbach iteration cap reached";
  return sol;
}

}  // namespace noma
