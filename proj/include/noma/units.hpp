#pragma once

#include <cmath>
#include <stdexcept>

namespace noma {

/// Path loss in dB for a link of `distance_km` kilometers: 128 + 35*log10(d).
inline double pathloss_db(double distance_km) {
  if (!(distance_km > 0.0))
    throw std::domain_error("pathloss_db: distance must be positive");
  return 128.0 + 35.0 * std::log10(distance_km);
}

/// Linear power gain corresponding to a path loss in dB.
inline double pathloss_linear(double distance_km) {
  return std::pow(10.0, -pathloss_db(distance_km) / 10.0);
}

inline double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

inline double watt_to_dbm(double watt) {
  if (!(watt > 0.0))
    throw std::domain_error("watt_to_dbm: power must be positive");
  return 10.0 * std::log10(watt * 1e3);
}

/// Thermal noise power in watts over `bandwidth_hz` from a PSD in dBm/Hz.
inline double noise_power(double psd_dbm_hz, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0))
    throw std::domain_error("noise_power: bandwidth must be positive");
  return dbm_to_watt(psd_dbm_hz + 10.0 * std::log10(bandwidth_hz));
}

}  // namespace noma
