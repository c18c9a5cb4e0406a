#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "noma/rng.hpp"
#include "noma/units.hpp"

namespace noma {

/// Users dropped area-uniformly on a disk of the given radius around the BS.
struct DiskPlacement {
  double radius_m = 150.0;
};

/// Users placed exactly on circles of the given radii, split equally across
/// the rings (remainders round-robin).
struct RingedPlacement {
  std::vector<double> radii_m;
};

using Placement = std::variant<DiskPlacement, RingedPlacement>;

struct ScenarioConfig {
  int num_users = 0;
  int num_rbs = 0;
  Placement placement = DiskPlacement{};
  double min_rate = 1.5;                 ///< bit/s/Hz, every user
  double max_power = 0.1;                ///< watts, every user
  double circuit_power_per_user = 1e-3;  ///< watts
  double noise_psd = -174.0;             ///< dBm/Hz
  double rb_bandwidth = 180e3;           ///< Hz
  std::uint64_t seed = 0;
};

/// A drawn system realization: independent per-RB fading for every user.
struct Scenario {
  std::vector<std::vector<double>> gains;  ///< [user][rb], linear power gains
  std::vector<int> cluster_sizes;          ///< per RB, balanced to within 1
  std::vector<double> min_rates;           ///< per user
  std::vector<double> max_powers;          ///< per user
  double circuit_power_per_user = 0.0;
  double noise_power = 0.0;

  int num_users() const { return static_cast<int>(gains.size()); }
  int num_rbs() const { return static_cast<int>(cluster_sizes.size()); }
};

inline void check_config(const ScenarioConfig& cfg) {
  if (cfg.num_users < 1 || cfg.num_rbs < 1 || cfg.num_users < cfg.num_rbs)
    throw std::invalid_argument("scenario: need U >= M >= 1");
  if (!(cfg.rb_bandwidth > 0.0))
    throw std::invalid_argument("scenario: bandwidth must be positive");
  if (const auto* d = std::get_if<DiskPlacement>(&cfg.placement)) {
    if (!(d->radius_m > 0.0))
      throw std::invalid_argument("scenario: radius must be positive");
  } else {
    const auto& rings = std::get<RingedPlacement>(cfg.placement).radii_m;
    if (rings.empty())
      throw std::invalid_argument("scenario: ringed placement needs radii");
    for (double r : rings)
      if (!(r > 0.0))
        throw std::invalid_argument("scenario: radius must be positive");
  }
}

/// Balanced cluster sizes: the first U mod M RBs take the extra user.
inline std::vector<int> balanced_cluster_sizes(int num_users, int num_rbs) {
  const int base = num_users / num_rbs;
  const int extra = num_users % num_rbs;
  std::vector<int> sizes(num_rbs, base);
  for (int m = 0; m < extra; ++m) sizes[m] += 1;
  return sizes;
}

/// User distances in km for a config. Separated out so placement statistics
/// are testable; cell-center users are kept at least 1 m away from the BS.
inline std::vector<double> draw_distances_km(const ScenarioConfig& cfg, Rng& rng) {
  check_config(cfg);
  std::vector<double> d(cfg.num_users);
  if (const auto* disk = std::get_if<DiskPlacement>(&cfg.placement)) {
    for (int u = 0; u < cfg.num_users; ++u) {
      const double r_m = disk->radius_m * std::sqrt(rng.uniform01());
      d[u] = std::max(r_m, 1.0) * 1e-3;
    }
  } else {
    const auto& rings = std::get<RingedPlacement>(cfg.placement).radii_m;
    for (int u = 0; u < cfg.num_users; ++u)
      d[u] = std::max(rings[u % rings.size()], 1.0) * 1e-3;
  }
  return d;
}

/// Draws a scenario: path loss from placement, Rayleigh fading power drawn
/// independently per (user, RB). Deterministic in cfg.seed.
inline Scenario draw_scenario(const ScenarioConfig& cfg) {
  check_config(cfg);
  Scenario s;
  Rng placement_rng = Rng::substream(cfg.seed, 0);
  Rng fading_rng = Rng::substream(cfg.seed, 1);
  const std::vector<double> dist = draw_distances_km(cfg, placement_rng);
  s.gains.assign(cfg.num_users, std::vector<double>(cfg.num_rbs));
  for (int u = 0; u < cfg.num_users; ++u) {
    const double pl = pathloss_linear(dist[u]);
    for (int m = 0; m < cfg.num_rbs; ++m)
      s.gains[u][m] = pl * fading_rng.exponential();
  }
  s.cluster_sizes = balanced_cluster_sizes(cfg.num_users, cfg.num_rbs);
  s.min_rates.assign(cfg.num_users, cfg.min_rate);
  s.max_powers.assign(cfg.num_users, cfg.max_power);
  s.circuit_power_per_user = cfg.circuit_power_per_user;
  s.noise_power = noise_power(cfg.noise_psd, cfg.rb_bandwidth);
  return s;
}

}  // namespace noma
