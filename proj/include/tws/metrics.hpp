#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tws/trace.hpp"

namespace tws {

struct LegMetrics {
  int leg = 0;
  double start_t = 0.0;
  double end_t = 0.0;
  double travel_time = 0.0;
  /// LegStart to button press (tunnel) or first aim (teleport).
  double approach_time = 0.0;
  /// Button press until the doors are open.
  double wait_time = 0.0;
  /// First parent to final unparent.
  double traversal_time = 0.0;
  double physical_distance = 0.0;
  double local_distance = 0.0;
  double tunnel_distance = 0.0;
  double virtual_distance = 0.0;
  double true_path_length = 0.0;
  int teleports = 0;
  int aborts = 0;
  /// Externally supplied distance estimate, if any.
  std::optional<double> estimate;
};

struct FlowStats {
  double mean = 0.0;
  double max = 0.0;
  double fast_fraction_mean = 0.0;
  std::size_t samples = 0;
};

struct MetricsReport {
  std::string technique;
  std::uint64_t seed = 0;
  std::string scenario_hash;
  double ticks_per_second = 0.0;
  double duration = 0.0;
  std::vector<LegMetrics> legs;
  double local_walk = 0.0;
  double tunnel_walk = 0.0;
  double total_walk = 0.0;
  double travel_time = 0.0;
  int teleports = 0;
  FlowStats flow_local;
  FlowStats flow_tunnel;
};

/// Pure over the events; throws CorruptTrace when leg markers are unpaired.
MetricsReport compute_report(const Trace& trace);

struct MetricComparison {
  std::string name;
  double a = 0.0;
  double b = 0.0;
  /// a / b, with 0 / 0 defined as 1.
  double ratio = 1.0;
  double difference = 0.0;
};

struct ComparisonSummary {
  std::string technique_a;
  std::string technique_b;
  std::vector<MetricComparison> metrics;
  /// Direction-of-effect flags, e.g. "total_walk_a_gt_b".
  std::vector<std::pair<std::string, bool>> flags;

  const MetricComparison& metric(const std::string& name) const;
  bool flag(const std::string& name) const;
};

/// Throws ScenarioMismatch unless both reports share scenario geometry.
ComparisonSummary compare(const MetricsReport& a, const MetricsReport& b);

struct EstimationError {
  double mse = 0.0;
  double me = 0.0;
};

/// Mean squared and mean signed error of estimates against true lengths.
EstimationError estimation_error(const std::vector<double>& estimates, const std::vector<double>& truth);

std::string report_csv(const MetricsReport& r);
std::string report_text(const MetricsReport& r);
std::string comparison_csv(const ComparisonSummary& s);
std::string comparison_text(const ComparisonSummary& s);

}  // namespace tws
