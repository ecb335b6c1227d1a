#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tws/config.hpp"
#include "tws/flow.hpp"
#include "tws/scenario.hpp"
#include "tws/trace.hpp"

namespace tws {

struct SimulationResult {
  Trace trace;
  Scenario scenario;
  std::int64_t ticks = 0;
};

/// Fixed-step run of one agent through the scenario. Throws Config for an
/// invalid configuration and Simulation (with tick context) when the run
/// cannot complete.
SimulationResult simulate(const RunConfig& cfg, const FlowConfig& flow = {});

/// `count` runs with seeds seed, seed+1, ... on worker threads.
std::vector<SimulationResult> simulate_batch(const RunConfig& cfg, int count, int threads = 0);

/// Full pre-flight check: configuration, scenario geometry and, for the
/// tunnel technique, that every leg's cabin fits from its departure point.
/// Returns a human-readable summary.
std::string describe_setup(const RunConfig& cfg);

/// Default parameter values, one "key = value" per line.
std::string describe_defaults();

struct VerifyResult {
  bool identical = true;
  /// 1-based line of the first difference.
  std::size_t line = 0;
  std::int64_t index = -1;
  std::int64_t tick = -1;
  std::string message;
};

/// Re-simulates from the trace header and byte-compares with `text`.
VerifyResult verify_trace(const std::string& text);

}  // namespace tws
