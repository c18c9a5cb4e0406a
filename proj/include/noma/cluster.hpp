#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "noma/types.hpp"

namespace noma {

/// Per-user achievable rates under SIC: user l is decoded with users k > l
/// still treated as interference, the last user decodes interference-free.
inline std::vector<double> per_user_rates(const ClusterInstance& in,
                                          const PowerVector& powers) {
  const std::size_t n = in.size();
  if (powers.size() != n)
    throw std::invalid_argument("per_user_rates: power vector length mismatch");
  std::vector<double> rates(n);
  double interference = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    rates[i] = std::log2(1.0 + powers[i] * in.gains[i] /
                               (interference + in.noise_power));
    interference += powers[i] * in.gains[i];
  }
  return rates;
}

/// Cluster sum rate. Telescopes to a single log regardless of decode order.
inline double sum_rate(const ClusterInstance& in, const PowerVector& powers) {
  double received = 0.0;
  for (std::size_t l = 0; l < in.size(); ++l) received += powers[l] * in.gains[l];
  return std::log2(1.0 + received / in.noise_power);
}

/// Energy efficiency: sum rate over circuit-plus-transmit power.
inline double ee_value(const ClusterInstance& in, const PowerVector& powers) {
  double total = 0.0;
  for (double p : powers) total += p;
  const double denom = in.circuit_power + total;
  if (!(denom > 0.0))
    throw std::domain_error("ee_value: zero total power");
  return sum_rate(in, powers) / denom;
}

/// Gradient of the EE w.r.t. each user's transmit power. Components follow
/// the gain order, so under the canonical sort grad[0] >= ... >= grad[L-1].
inline std::vector<double> ee_gradient(const ClusterInstance& in,
                                       const PowerVector& powers) {
  const std::size_t n = in.size();
  double received = 0.0, total = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    received += powers[l] * in.gains[l];
    total += powers[l];
  }
  const double denom = in.circuit_power + total;
  const double rate = std::log2(1.0 + received / in.noise_power);
  std::vector<double> grad(n);
  for (std::size_t l = 0; l < n; ++l)
    grad[l] = in.gains[l] /
                  ((in.noise_power + received) * denom * std::numbers::ln2) -
              rate / (denom * denom);
  return grad;
}

/// Minimum feasible powers: met QoS with equality from the last decoded user
/// upward, so P_l^min = 2^(sum of later min rates) (2^R_l - 1) sigma^2 / |h_l|^2.
inline MinPowerReport min_powers(const ClusterInstance& in) {
  check_instance(in);
  const std::size_t n = in.size();
  MinPowerReport rep;
  rep.powers.assign(n, 0.0);
  double later_rates = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    rep.powers[i] = std::exp2(later_rates) * (std::exp2(in.min_rates[i]) - 1.0) *
                    in.noise_power / in.gains[i];
    later_rates += in.min_rates[i];
  }
  for (std::size_t l = 0; l < n; ++l) {
    if (rep.powers[l] > in.max_powers[l]) {
      rep.feasible = false;
      rep.first_violation = static_cast<int>(l);
      break;
    }
  }
  return rep;
}

/// How the inner subproblem clips each coordinate update.
enum class InnerMode {
  /// Clip to the dynamic interval that keeps the whole vector jointly
  /// feasible: the lower bound is the user's QoS response to current later
  /// powers, the upper bound the tightest cap any earlier user's QoS puts on
  /// it. Every sweep ends at a feasible point and the fixed point is the
  /// global maximizer of the concave subproblem.
  dynamic_bounds,
  /// Literal static box [P_l^min, P_l^max] in ascending user order. Kept for
  /// comparison; intermediate sweeps may leave the coupled QoS region.
  static_box,
};

struct SolverOptions {
  double epsilon = 1e-8;         ///< Dinkelbach stop: subtractive optimum <= epsilon
  double sweep_tolerance = 1e-9; ///< inner stop: max-norm power change per sweep
  int max_outer = 100;
  int max_sweeps = 10000;
  InnerMode mode = InnerMode::dynamic_bounds;
};

namespace detail {

// received power from everyone but user `skip`
inline double received_sum(const ClusterInstance& in, const PowerVector& p,
                           std::size_t skip) {
  double s = 0.0;
  for (std::size_t k = 0; k < in.size(); ++k)
    if (k != skip) s += p[k] * in.gains[k];
  return s;
}

}  // namespace detail

/// Maximize F(P) = log2(1 + sum P|h|^2 / sigma^2) - beta (P_f + sum P) over
/// the QoS region and power caps via coordinate updates of the closed-form
/// stationary point, starting at min_powers. The caller must have checked
/// feasibility. `sweeps_out`, when given, receives the sweep count.
inline PowerVector solve_inner(const ClusterInstance& in, double beta,
                               const SolverOptions& opts = {},
                               int* sweeps_out = nullptr) {
  const std::size_t n = in.size();
  const MinPowerReport mp = min_powers(in);
  if (!mp.feasible)
    throw std::invalid_argument("solve_inner: infeasible instance");
  if (beta < 0.0) throw std::invalid_argument("solve_inner: negative beta");

  const double s2 = in.noise_power;
  std::vector<double> gamma(n);
  for (std::size_t l = 0; l < n; ++l) gamma[l] = std::exp2(in.min_rates[l]) - 1.0;

  PowerVector p = mp.powers;
  const double target = beta > 0.0 ? 1.0 / (beta * std::numbers::ln2)
                                   : std::numeric_limits<double>::infinity();
  int sweeps = 0;
  while (sweeps < opts.max_sweeps) {
    ++sweeps;
    double delta = 0.0;
    if (opts.mode == InnerMode::dynamic_bounds) {
      // Descending order: by the time user l updates, all interferers k > l
      // hold their final values for this sweep, so the QoS lower bound is
      // exact and the sweep exits jointly feasible.
      for (std::size_t i = n; i-- > 0;) {
        double interference = 0.0;
        for (std::size_t k = i + 1; k < n; ++k) interference += p[k] * in.gains[k];
        double lb = gamma[i] * (interference + s2) / in.gains[i];
        double ub = in.max_powers[i];
        for (std::size_t j = 0; j < i; ++j) {
          if (gamma[j] <= 0.0) continue;
          double seen_by_j = 0.0;  // received power behind user j, excluding i
          for (std::size_t k = j + 1; k < n; ++k)
            if (k != i) seen_by_j += p[k] * in.gains[k];
          const double cap =
              (p[j] * in.gains[j] / gamma[j] - s2 - seen_by_j) / in.gains[i];
          ub = std::min(ub, cap);
        }
        if (ub < lb) ub = lb;  // fp rounding when an earlier cap is exactly tight
        const double p0 = target - (detail::received_sum(in, p, i) + s2) / in.gains[i];
        const double np = std::clamp(p0, lb, ub);
        delta = std::max(delta, std::abs(np - p[i]));
        p[i] = np;
      }
    } else {
      for (std::size_t l = 0; l < n; ++l) {
        const double p0 = target - (detail::received_sum(in, p, l) + s2) / in.gains[l];
        const double np = std::clamp(p0, mp.powers[l], in.max_powers[l]);
        delta = std::max(delta, std::abs(np - p[l]));
        p[l] = np;
      }
    }
    if (delta < opts.sweep_tolerance) break;
  }
  if (sweeps_out) *sweeps_out = sweeps;
  return p;
}

/// Fills rates/EE bookkeeping for a feasible power vector.
inline EeSolution evaluate_solution(const ClusterInstance& in, PowerVector powers) {
  EeSolution sol;
  sol.feasible = true;
  sol.rates = per_user_rates(in, powers);
  sol.sum_rate = sum_rate(in, powers);
  sol.total_power = 0.0;
  for (double p : powers) sol.total_power += p;
  sol.ee = sol.sum_rate / (in.circuit_power + sol.total_power);
  sol.powers = std::move(powers);
  return sol;
}

/// Optional record of the Dinkelbach trajectory, mostly for tests.
struct DinkelbachTrace {
  std::vector<double> betas;              ///< ratio after each outer iteration
  std::vector<double> inner_objectives;   ///< F value at each inner optimum
};

/// EE-optimal power allocation for one cluster: Dinkelbach outer loop with
/// the coordinate inner solver. Infeasible instances come back with
/// feasible=false rather than throwing.
inline EeSolution maximize_ee(const ClusterInstance& in,
                              const SolverOptions& opts = {},
                              DinkelbachTrace* trace = nullptr) {
  const MinPowerReport mp = min_powers(in);
  if (!mp.feasible) {
    EeSolution sol;
    sol.feasible = false;
    sol.note = "infeasible: user " + std::to_string(mp.first_violation) +
               " cannot meet its rate floor";
    return sol;
  }
  double floor_power = in.circuit_power;
  for (double p : mp.powers) floor_power += p;
  if (!(floor_power > 0.0))
    throw std::domain_error(
        "maximize_ee: EE has no maximizer with zero circuit power and zero rate floors");

  double beta = 0.0;
  PowerVector p = mp.powers;
  int outer = 0, total_sweeps = 0;
  bool cap_hit = true;
  while (outer < opts.max_outer) {
    ++outer;
    int sweeps = 0;
    p = solve_inner(in, beta, opts, &sweeps);
    total_sweeps += sweeps;
    double total = 0.0;
    for (double x : p) total += x;
    const double rate = sum_rate(in, p);
    const double objective = rate - beta * (in.circuit_power + total);
    beta = rate / (in.circuit_power + total);
    if (trace) {
      trace->betas.push_back(beta);
      trace->inner_objectives.push_back(objective);
    }
    if (objective <= opts.epsilon) {
      cap_hit = false;
      break;
    }
  }
  EeSolution sol = evaluate_solution(in, std::move(p));
  sol.dinkelbach_iterations = outer;
  sol.inner_iterations = total_sweeps;
  sol.iteration_cap_hit = cap_hit;
  if (cap_hit) sol.note = "dinkelbach iteration cap reached";
  return sol;
}

/// SE-maximizing baseline: sequential fill in decode order. User l takes the
/// largest power that neither exceeds its own cap nor pushes any earlier
/// user's QoS past what that user's committed power can absorb, with later
/// users held at their cascade minima. Ties prefer lower-index (higher-gain)
/// users by construction.
inline EeSolution maximize_se(const ClusterInstance& in) {
  const MinPowerReport mp = min_powers(in);
  if (!mp.feasible) {
    EeSolution sol;
    sol.feasible = false;
    sol.note = "infeasible: user " + std::to_string(mp.first_violation) +
               " cannot meet its rate floor";
    return sol;
  }
  const std::size_t n = in.size();
  const double s2 = in.noise_power;
  PowerVector p = mp.powers;
  for (std::size_t l = 0; l < n; ++l) {
    double ub = in.max_powers[l];
    for (std::size_t j = 0; j < l; ++j) {
      const double gamma_j = std::exp2(in.min_rates[j]) - 1.0;
      if (gamma_j <= 0.0) continue;
      double seen_by_j = 0.0;
      for (std::size_t k = j + 1; k < n; ++k)
        if (k != l) seen_by_j += p[k] * in.gains[k];
      const double cap =
          (p[j] * in.gains[j] / gamma_j - s2 - seen_by_j) / in.gains[l];
      ub = std::min(ub, cap);
    }
    p[l] = std::max(p[l], ub);
  }
  return evaluate_solution(in, std::move(p));
}

}  // namespace noma
