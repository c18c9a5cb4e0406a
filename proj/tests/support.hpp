#pragma once

// Shared test utilities: instance generators and small independent oracles
// (golden section, finite differences, feasible-region grid). These stay in
// test code so the checks do not share a code path with the solvers they
// judge.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "noma/cluster.hpp"
#include "noma/rng.hpp"
#include "noma/types.hpp"
#include "noma/units.hpp"

namespace testutil {

constexpr double kNoisePsdDbmHz = -174.0;
constexpr double kRbBandwidthHz = 180e3;
constexpr double kCircuitPerUser = 1e-3;     // 0 dBm

inline double thermal_noise() {
  return noma::noise_power(kNoisePsdDbmHz, kRbBandwidthHz);
}

/// Cell-edge style cluster: users dropped between 50 m and 300 m with
/// unit-mean fading, sorted by descending gain. Redraws until feasible when
/// requested.
inline noma::ClusterInstance random_instance(noma::Rng& rng, int users,
                                             double pmax_w = 0.1,
                                             double min_rate = 1.5,
                                             bool ensure_feasible = true) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<double> gains(users);
    for (int l = 0; l < users; ++l) {
      const double d_km = rng.uniform(0.05, 0.3);
      gains[l] = noma::pathloss_linear(d_km) * rng.exponential();
    }
    std::sort(gains.begin(), gains.end(), std::greater<>());
    noma::ClusterInstance in;
    in.gains = std::move(gains);
    in.min_rates.assign(users, min_rate);
    in.max_powers.assign(users, pmax_w);
    in.circuit_power = kCircuitPerUser * users;
    in.noise_power = thermal_noise();
    if (!ensure_feasible || noma::min_powers(in).feasible) return in;
  }
  throw std::runtime_error("random_instance: could not draw a feasible instance");
}

/// Golden-section maximizer of a unimodal f on [lo, hi].
inline double golden_max(const std::function<double(double)>& f, double lo,
                         double hi, double tol = 1e-12) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

/// Central finite differences of a scalar field at p.
inline std::vector<double> fd_gradient(
    const std::function<double(const noma::PowerVector&)>& f,
    const noma::PowerVector& p, double rel_step = 1e-7) {
  std::vector<double> g(p.size());
  for (std::size_t l = 0; l < p.size(); ++l) {
    const double h = std::max(p[l], 1e-6) * rel_step;
    noma::PowerVector up = p, dn = p;
    up[l] += h;
    dn[l] -= h;
    g[l] = (f(up) - f(dn)) / (2.0 * h);
  }
  return g;
}

/// Brute-force maximizer of an arbitrary objective over the QoS-feasible box
/// of an instance, with refinement. Used as the oracle for the inner
/// subproblem; independent of the production grid search.
inline noma::PowerVector brute_force_max(
    const noma::ClusterInstance& in,
    const std::function<double(const noma::PowerVector&)>& objective,
    int points = 24, int rounds = 7) {
  const auto mp = noma::min_powers(in);
  const std::size_t n = in.size();
  const double s2 = in.noise_power;
  const auto feasible = [&](const noma::PowerVector& p) {
    double interference = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      const double gamma = std::exp2(in.min_rates[i]) - 1.0;
      if (p[i] * in.gains[i] < gamma * (interference + s2) * (1.0 - 1e-12))
        return false;
      interference += p[i] * in.gains[i];
    }
    return true;
  };
  std::vector<double> lo = mp.powers, hi = in.max_powers;
  noma::PowerVector best_p = mp.powers;
  double best = objective(best_p);
  for (int round = 0; round < rounds; ++round) {
    std::vector<int> idx(n, 0);
    noma::PowerVector p(n);
    while (true) {
      for (std::size_t l = 0; l < n; ++l)
        p[l] = lo[l] + (hi[l] - lo[l]) * idx[l] / double(points - 1);
      // snap each coordinate onto its exact bounds too
      for (int variant = -1; variant < int(2 * n); ++variant) {
        noma::PowerVector q = p;
        if (variant >= 0) {
          const std::size_t l = variant / 2;
          double interference = 0.0;
          for (std::size_t k = l + 1; k < n; ++k) interference += p[k] * in.gains[k];
          const double gamma_l = std::exp2(in.min_rates[l]) - 1.0;
          if (variant % 2 == 0) {
            q[l] = gamma_l * (interference + s2) / in.gains[l];
          } else {
            double ub = in.max_powers[l];
            for (std::size_t j = 0; j < l; ++j) {
              const double gamma_j = std::exp2(in.min_rates[j]) - 1.0;
              if (gamma_j <= 0.0) continue;
              double seen = 0.0;
              for (std::size_t k = j + 1; k < n; ++k)
                if (k != l) seen += p[k] * in.gains[k];
              ub = std::min(ub, (p[j] * in.gains[j] / gamma_j - s2 - seen) /
                                    in.gains[l]);
            }
            q[l] = ub;
          }
          if (q[l] < mp.powers[l] || q[l] > in.max_powers[l]) continue;
        }
        if (feasible(q)) {
          const double v = objective(q);
          if (v > best) {
            best = v;
            best_p = q;
          }
        }
      }
      std::size_t carry = 0;
      while (carry < n && ++idx[carry] == points) idx[carry++] = 0;
      if (carry == n) break;
    }
    for (std::size_t l = 0; l < n; ++l) {
      const double half = (hi[l] - lo[l]) * 0.125;
      lo[l] = std::max(mp.powers[l], best_p[l] - half);
      hi[l] = std::min(in.max_powers[l], best_p[l] + half);
    }
  }
  return best_p;
}

}  // namespace testutil
