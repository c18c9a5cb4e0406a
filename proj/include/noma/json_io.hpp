#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "noma/channel.hpp"
#include "noma/types.hpp"

namespace noma {

using json = nlohmann::json;

inline json to_json(const ClusterInstance& in) {
  return json{{"gains", in.gains},
              {"min_rates", in.min_rates},
              {"max_powers", in.max_powers},
              {"circuit_power", in.circuit_power},
              {"noise_power", in.noise_power}};
}

inline ClusterInstance cluster_from_json(const json& j) {
  ClusterInstance in;
  in.gains = j.at("gains").get<std::vector<double>>();
  in.min_rates = j.at("min_rates").get<std::vector<double>>();
  in.max_powers = j.at("max_powers").get<std::vector<double>>();
  in.circuit_power = j.at("circuit_power").get<double>();
  in.noise_power = j.at("noise_power").get<double>();
  check_instance(in);
  return in;
}

inline json to_json(const Placement& p) {
  if (const auto* disk = std::get_if<DiskPlacement>(&p))
    return json{{"type", "uniform-disk"}, {"radius", disk->radius_m}};
  return json{{"type", "ringed"},
              {"radii", std::get<RingedPlacement>(p).radii_m}};
}

inline Placement placement_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "uniform-disk")
    return DiskPlacement{j.at("radius").get<double>()};
  if (type == "ringed")
    return RingedPlacement{j.at("radii").get<std::vector<double>>()};
  throw std::invalid_argument("placement: unknown type '" + type + "'");
}

inline json to_json(const ScenarioConfig& cfg) {
  return json{{"num_users", cfg.num_users},
              {"num_rbs", cfg.num_rbs},
              {"placement", to_json(cfg.placement)},
              {"min_rate", cfg.min_rate},
              {"max_power", cfg.max_power},
              {"circuit_power_per_user", cfg.circuit_power_per_user},
              {"noise_psd", cfg.noise_psd},
              {"rb_bandwidth", cfg.rb_bandwidth},
              {"seed", cfg.seed}};
}

inline ScenarioConfig scenario_config_from_json(const json& j) {
  ScenarioConfig cfg;
  cfg.num_users = j.at("num_users").get<int>();
  cfg.num_rbs = j.at("num_rbs").get<int>();
  if (j.contains("placement")) cfg.placement = placement_from_json(j.at("placement"));
  cfg.min_rate = j.value("min_rate", cfg.min_rate);
  cfg.max_power = j.value("max_power", cfg.max_power);
  cfg.circuit_power_per_user =
      j.value("circuit_power_per_user", cfg.circuit_power_per_user);
  cfg.noise_psd = j.value("noise_psd", cfg.noise_psd);
  cfg.rb_bandwidth = j.value("rb_bandwidth", cfg.rb_bandwidth);
  cfg.seed = j.value("seed", cfg.seed);
  check_config(cfg);
  return cfg;
}

inline json to_json(const Scenario& s) {
  return json{{"gains", s.gains},
              {"cluster_sizes", s.cluster_sizes},
              {"min_rates", s.min_rates},
              {"max_powers", s.max_powers},
              {"circuit_power_per_user", s.circuit_power_per_user},
              {"noise_power", s.noise_power}};
}

inline Scenario scenario_from_json(const json& j) {
  Scenario s;
  s.gains = j.at("gains").get<std::vector<std::vector<double>>>();
  s.cluster_sizes = j.at("cluster_sizes").get<std::vector<int>>();
  s.min_rates = j.at("min_rates").get<std::vector<double>>();
  s.max_powers = j.at("max_powers").get<std::vector<double>>();
  s.circuit_power_per_user = j.at("circuit_power_per_user").get<double>();
  s.noise_power = j.at("noise_power").get<double>();
  return s;
}

}  // namespace noma
