#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "tws/locomotion.hpp"
#include "tws/scenario.hpp"
#include "tws/tunnel.hpp"

namespace tws {

struct RunConfig {
  /// "default:L1", "default:L2" or the path the layout was loaded from.
  std::string scenario = "default:L1";
  Technique technique = Technique::Tunnel;
  GainStrategy gain = FixedGain{30.0};
  TunnelParams tunnel;
  PhaseDurations phases;
  TeleportConfig teleport;
  AgentProfile agent;
  ScenarioLayout layout;
  std::uint64_t seed = 0;
  double ticks_per_second = 90.0;
  /// Simulated-time guard against agents that never finish.
  double max_sim_seconds = 7200.0;

  void validate() const;
};

/// Full, canonical serialization (every field, fixed key order).
nlohmann::ordered_json config_to_json(const RunConfig& cfg);
/// Applies the keys present in `j` on top of `base`; unknown keys and bad
/// values are Config errors.
RunConfig config_from_json(const nlohmann::ordered_json& j, RunConfig base = {});

/// Scenario file (YAML, same keys as the JSON form). Throws Io or Config.
RunConfig load_config_file(const std::string& path, RunConfig base = {});
RunConfig parse_config_yaml(const std::string& text, RunConfig base = {});

/// Resolves "default:L1" / "default:L2" or a file path.
RunConfig resolve_scenario_source(const std::string& source, RunConfig base = {});

std::string gain_strategy_name(const GainStrategy& g);
/// Parses "fixed-gain" / "fixed-cabin-length" / "adaptive" with its value.
GainStrategy make_gain_strategy(const std::string& name, double value);

}  // namespace tws
