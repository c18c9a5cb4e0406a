#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace noma {

using PowerVector = std::vector<double>;

/// One resource block's users in SIC decode order: index 0 is decoded first
/// and therefore sees interference from every later index; the last index is
/// decoded interference-free. The canonical construction sorts users by
/// descending channel gain, which fixes the "strong user first" order.
struct ClusterInstance {
  std::vector<double> gains;       ///< |h_l|^2, linear power gains
  std::vector<double> min_rates;   ///< per-user QoS floor, bit/s/Hz
  std::vector<double> max_powers;  ///< per-user transmit cap, watts
  double circuit_power = 0.0;      ///< fixed cluster power P_f, watts
  double noise_power = 0.0;        ///< sigma^2 over the RB bandwidth, watts

  std::size_t size() const { return gains.size(); }
};

/// Result of a per-cluster power allocation.
struct EeSolution {
  PowerVector powers;              ///< watts, decode order
  std::vector<double> rates;       ///< bit/s/Hz, decode order
  double sum_rate = 0.0;           ///< bit/s/Hz
  double total_power = 0.0;        ///< transmit power only, watts
  double ee = 0.0;                 ///< sum_rate / (circuit + transmit), per watt
  int dinkelbach_iterations = 0;
  int inner_iterations = 0;        ///< coordinate sweeps summed over outer iterations
  bool feasible = false;
  bool iteration_cap_hit = false;
  std::string note;                ///< solver diagnostics, empty when unremarkable
};

/// Minimum-power point, or the first user whose QoS cannot be met.
struct MinPowerReport {
  PowerVector powers;
  bool feasible = true;
  int first_violation = -1;  ///< user index with P_min > P_max, -1 if none
};

inline void check_instance(const ClusterInstance& in) {
  const std::size_t n = in.size();
  if (n == 0) throw std::invalid_argument("cluster: empty instance");
  if (in.min_rates.size() != n || in.max_powers.size() != n)
    throw std::invalid_argument("cluster: field length mismatch");
  if (!(in.noise_power > 0.0))
    throw std::invalid_argument("cluster: noise power must be positive");
  if (in.circuit_power < 0.0)
    throw std::invalid_argument("cluster: negative circuit power");
  for (std::size_t l = 0; l < n; ++l) {
    if (!(in.gains[l] > 0.0))
      throw std::invalid_argument("cluster: gains must be positive");
    if (in.min_rates[l] < 0.0)
      throw std::invalid_argument("cluster: negative min rate");
    if (!(in.max_powers[l] > 0.0))
      throw std::invalid_argument("cluster: max powers must be positive");
  }
}

/// True when gains follow the canonical descending decode order.
inline bool gains_descending(const ClusterInstance& in) {
  for (std::size_t l = 1; l < in.size(); ++l)
    if (in.gains[l] > in.gains[l - 1]) return false;
  return true;
}

/// Re-index an instance so that decode order becomes `order` (order[i] is the
/// original index decoded at position i). The solvers assume descending-gain
/// order; this is the hook for studying any other SIC order.
inline ClusterInstance reorder_instance(const ClusterInstance& in,
                                        const std::vector<int>& order) {
  if (order.size() != in.size())
    throw std::invalid_argument("reorder_instance: bad permutation size");
  ClusterInstance out;
  out.circuit_power = in.circuit_power;
  out.noise_power = in.noise_power;
  out.gains.reserve(in.size());
  out.min_rates.reserve(in.size());
  out.max_powers.reserve(in.size());
  std::vector<char> seen(in.size(), 0);
  for (int idx : order) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= in.size() || seen[idx])
      throw std::invalid_argument("reorder_instance: not a permutation");
    seen[idx] = 1;
    out.gains.push_back(in.gains[idx]);
    out.min_rates.push_back(in.min_rates[idx]);
    out.max_powers.push_back(in.max_powers[idx]);
  }
  return out;
}

}  // namespace noma
