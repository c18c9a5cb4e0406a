#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "noma/cluster.hpp"
#include "noma/types.hpp"

namespace noma {

/// Which user the BS decodes first. CaseI decodes the strong user (index 0)
/// first; CaseII decodes the weak user first.
enum class SicCase { case1, case2 };

/// Classification regime for the two-user closed forms. CaseII has no
/// phase 4: its low-gradient corner falls through to the phase-3 formulas.
struct TwoUserPhase {
  SicCase sic = SicCase::case1;
  int phase = 1;  ///< 1..4
};

/// Geometry of the user-2 QoS line used by the Case II solution: the tight
/// constraint pins P1 = k*P2 + b.
struct CaseIIGeometry {
  double k = 0.0;           ///< |h2|^2 / ((2^R2 - 1) |h1|^2), slope
  double b = 0.0;           ///< -sigma^2 / |h1|^2, watts
  double p1_bar_min = 0.0;  ///< (2^R1 - 1) sigma^2 / |h1|^2, watts
};

/// Bisection root finder for a sign-changing continuous f on [lo, hi].
/// Converges to within `delta` in at most ceil(log2((hi-lo)/delta)) steps.
template <class F>
double bisect_root(F&& f, double lo, double hi, double delta) {
  if (!(hi >= lo)) throw std::invalid_argument("bisect_root: empty interval");
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0))
    throw std::invalid_argument("bisect_root: no sign change over the bracket");
  while (hi - lo > delta) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval below fp resolution
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace detail2u {

constexpr double kRootDelta = 1e-12;  // watts

inline void require_two_users(const ClusterInstance& in) {
  check_instance(in);
  if (in.size() != 2)
    throw std::invalid_argument("two_user: instance must have exactly 2 users");
}

struct GradPoints {
  double at_max_max_p1, at_max_max_p2;  // gradient at (P1max, P2max)
  double at_max_min_p1, at_max_min_p2;  // gradient at (P1max, P2min)
  double p2_min;                        // (2^R2 - 1) sigma^2 / |h2|^2
};

inline GradPoints eval_boundary_gradients(const ClusterInstance& in) {
  GradPoints g;
  g.p2_min = (std::exp2(in.min_rates[1]) - 1.0) * in.noise_power / in.gains[1];
  const auto gmax = ee_gradient(in, {in.max_powers[0], in.max_powers[1]});
  const auto gmin = ee_gradient(in, {in.max_powers[0], g.p2_min});
  g.at_max_max_p1 = gmax[0];
  g.at_max_max_p2 = gmax[1];
  g.at_max_min_p1 = gmin[0];
  g.at_max_min_p2 = gmin[1];
  return g;
}

inline double grad_p1(const ClusterInstance& in, double p1, double p2) {
  return ee_gradient(in, {p1, p2})[0];
}

inline double grad_p2(const ClusterInstance& in, double p1, double p2) {
  return ee_gradient(in, {p1, p2})[1];
}

}  // namespace detail2u

/// Phase under the strong-user-first order, from the boundary gradients.
/// Ties at exactly zero resolve to the lower-numbered phase.
inline TwoUserPhase classify_phase_case1(const ClusterInstance& in) {
  detail2u::require_two_users(in);
  if (!min_powers(in).feasible)
    throw std::invalid_argument("classify_phase_case1: infeasible instance");
  const auto g = detail2u::eval_boundary_gradients(in);
  TwoUserPhase ph{SicCase::case1, 4};
  if (g.at_max_max_p2 >= 0.0)
    ph.phase = 1;
  else if (g.at_max_max_p1 >= 0.0 && g.at_max_min_p1 >= 0.0)
    ph.phase = 2;
  else if (g.at_max_min_p1 >= 0.0)
    ph.phase = 3;
  return ph;
}

/// Phase under the weak-user-first order; same gradient conditions at
/// (P1max, P2max), but only phases 1..3 exist.
inline TwoUserPhase classify_phase_case2(const ClusterInstance& in) {
  detail2u::require_two_users(in);
  const auto g = ee_gradient(in, {in.max_powers[0], in.max_powers[1]});
  TwoUserPhase ph{SicCase::case2, 3};
  if (g[1] >= 0.0)
    ph.phase = 1;
  else if (g[0] >= 0.0)
    ph.phase = 2;
  return ph;
}

inline CaseIIGeometry case2_geometry(const ClusterInstance& in) {
  detail2u::require_two_users(in);
  CaseIIGeometry geo;
  const double gamma2 = std::exp2(in.min_rates[1]) - 1.0;
  geo.k = gamma2 > 0.0 ? in.gains[1] / (gamma2 * in.gains[0])
                       : std::numeric_limits<double>::infinity();
  geo.b = -in.noise_power / in.gains[0];
  geo.p1_bar_min =
      (std::exp2(in.min_rates[0]) - 1.0) * in.noise_power / in.gains[0];
  return geo;
}

/// Closed-form EE optimum when user 1 is decoded first. The strong user
/// transmits at full power in phases 1-3 and the weak user's power is either
/// capped by user 1's QoS budget, the stationary point of the EE, or its own
/// minimum; phase 4 pins the weak user at minimum and moves user 1 to the
/// stationary point.
inline EeSolution solve_case1(const ClusterInstance& in) {
  detail2u::require_two_users(in);
  const MinPowerReport mp = min_powers(in);
  if (!mp.feasible) {
    EeSolution sol;
    sol.note = "case1 infeasible";
    return sol;
  }
  const double s2 = in.noise_power;
  const double a1 = in.gains[0], a2 = in.gains[1];
  const double gamma1 = std::exp2(in.min_rates[0]) - 1.0;
  const double p1max = in.max_powers[0], p2max = in.max_powers[1];
  const auto g = detail2u::eval_boundary_gradients(in);
  const double p2min = g.p2_min;
  // Largest P2 that still leaves user 1's QoS satisfiable at full power.
  const double qos_cap = gamma1 > 0.0
                             ? (p1max * a1 / gamma1 - s2) / a2
                             : std::numeric_limits<double>::infinity();
  double p1 = p1max, p2 = p2min;
  int phase;
  if (g.at_max_max_p2 >= 0.0) {
    phase = 1;
    p2 = std::min(p2max, qos_cap);
  } else if (g.at_max_min_p1 >= 0.0) {
    phase = g.at_max_max_p1 >= 0.0 ? 2 : 3;
    if (g.at_max_min_p2 <= 0.0) {
      p2 = p2min;  // stationary point lies at or below the floor
    } else {
      const double root = bisect_root(
          [&](double x) { return detail2u::grad_p2(in, p1max, x); }, p2min,
          p2max, detail2u::kRootDelta);
      p2 = std::min(root, qos_cap);
    }
  } else {
    phase = 4;
    p2 = p2min;
    const double p1min = mp.powers[0];
    if (detail2u::grad_p1(in, p1min, p2min) <= 0.0) {
      p1 = p1min;
    } else {
      p1 = std::max(bisect_root(
                        [&](double x) { return detail2u::grad_p1(in, x, p2min); },
                        p1min, p1max, detail2u::kRootDelta),
                    p1min);
    }
  }
  EeSolution sol = evaluate_solution(in, {p1, p2});
  sol.note = "phase " + std::to_string(phase);
  return sol;
}

/// EE optimum when user 2 is decoded first. Phases 2/3 substitute user 2's
/// tight QoS line P1 = k P2 + b and optimize the resulting single-variable
/// ratio, branching on where its stationary point falls relative to user 1's
/// own floor and cap; the line/cap corners are genuine KKT regimes and are
/// returned directly.
inline EeSolution solve_case2(const ClusterInstance& in) {
  detail2u::require_two_users(in);
  const double s2 = in.noise_power;
  const double a1 = in.gains[0], a2 = in.gains[1];
  const double r1 = in.min_rates[0], r2 = in.min_rates[1];
  const double gamma1 = std::exp2(r1) - 1.0, gamma2 = std::exp2(r2) - 1.0;
  const double p1max = in.max_powers[0], p2max = in.max_powers[1];

  // Decode order [user2, user1]: user 1 is decoded last, interference-free.
  const double p1_bar_min = gamma1 * s2 / a1;
  const double p2_min2 = gamma2 * std::exp2(r1) * s2 / a2;
  EeSolution sol;
  if (p1_bar_min > p1max || p2_min2 > p2max) {
    sol.note = "case2 infeasible";
    return sol;
  }

  const auto case2_rates = [&](double p1, double p2) {
    std::vector<double> r(2);
    r[0] = std::log2(1.0 + p1 * a1 / s2);
    r[1] = std::log2(1.0 + p2 * a2 / (p1 * a1 + s2));
    return r;
  };
  const auto finish = [&](double p1, double p2, int phase,
                          const char* extra = nullptr) {
    EeSolution out;
    out.feasible = true;
    out.powers = {p1, p2};
    out.rates = case2_rates(p1, p2);
    out.sum_rate = sum_rate(in, out.powers);
    out.total_power = p1 + p2;
    out.ee = out.sum_rate / (in.circuit_power + out.total_power);
    out.note = "phase " + std::to_string(phase);
    if (extra) out.note += std::string("; ") + extra;
    return out;
  };

  const auto g = ee_gradient(in, {p1max, p2max});
  if (g[1] >= 0.0) {
    // Phase 1: user 2 at full power, user 1 capped by user 2's QoS.
    const double cap = gamma2 > 0.0
                           ? (p2max * a2 / gamma2 - s2) / a1
                           : std::numeric_limits<double>::infinity();
    return finish(std::min(p1max, cap), p2max, 1);
  }
  const int phase = g[0] >= 0.0 ? 2 : 3;

  if (gamma2 <= 0.0) {
    // User 2's QoS is vacuous; its line collapses onto the P2 = 0 axis.
    double p1;
    if (detail2u::grad_p1(in, p1_bar_min, 0.0) <= 0.0)
      p1 = p1_bar_min;
    else if (detail2u::grad_p1(in, p1max, 0.0) >= 0.0)
      p1 = p1max;
    else
      p1 = bisect_root([&](double x) { return detail2u::grad_p1(in, x, 0.0); },
                       p1_bar_min, p1max, detail2u::kRootDelta);
    EeSolution best = finish(p1, 0.0, phase);
    if (detail2u::grad_p2(in, p1max, 0.0) > 0.0) {
      const double p2c =
          detail2u::grad_p2(in, p1max, p2max) < 0.0
              ? bisect_root(
                    [&](double x) { return detail2u::grad_p2(in, p1max, x); },
                    0.0, p2max, detail2u::kRootDelta)
              : p2max;
      EeSolution alt = finish(p1max, p2c, phase);
      if (alt.ee > best.ee) best = alt;
    }
    return best;
  }

  const CaseIIGeometry geo = case2_geometry(in);
  const double k = geo.k, b = geo.b;
  // Sign of f'(P2) for the EE restricted to the line P1 = k P2 + b.
  const auto fprime_sign = [&](double p2) {
    const double received = (k * p2 + b) * a1 + p2 * a2;
    const double numer = std::log2(1.0 + received / s2);
    const double numer_d = (k * a1 + a2) / (std::numbers::ln2 * (s2 + received));
    const double denom = in.circuit_power + (k + 1.0) * p2 + b;
    return numer_d * denom - numer * (k + 1.0);
  };

  const double lo = (p1_bar_min - b) / k;          // line point where R1 is tight
  const double hi_line = (p1max - b) / k;          // line point where P1 = P1max
  const double hi = std::min(hi_line, p2max);

  EeSolution best;
  const double s_lo = fprime_sign(lo);
  if (s_lo <= 0.0) {
    // Both users at their floors; no dedicated phase covers this corner,
    // so flag it.
    const bool corner = detail2u::grad_p1(in, p1_bar_min, lo) <= 0.0 &&
                        detail2u::grad_p2(in, p1_bar_min, lo) <= 0.0;
    best = finish(p1_bar_min, lo, phase, corner ? "floor corner" : nullptr);
  } else if (fprime_sign(hi) >= 0.0) {
    if (hi >= p2max) {
      // Line leaves through P2max first; corner coincides with phase 1's cap.
      best = finish(std::min(k * p2max + b, p1max), p2max, phase);
    } else if (detail2u::grad_p2(in, p1max, hi_line) <= 0.0) {
      // Climbing the line pays only through its P1 component; at the P1 cap
      // the corner itself is the optimum.
      best = finish(p1max, hi_line, phase);
    } else {
      const double p2r =
          detail2u::grad_p2(in, p1max, p2max) < 0.0
              ? bisect_root(
                    [&](double x) { return detail2u::grad_p2(in, p1max, x); },
                    hi_line, p2max, detail2u::kRootDelta)
              : p2max;
      best = finish(p1max, p2r, phase);
    }
  } else {
    const double p2s = bisect_root(fprime_sign, lo, hi, detail2u::kRootDelta);
    best = finish(std::min(k * p2s + b, p1max), std::min(p2s, p2max), phase);
  }
  return best;
}

}  // namespace noma
