#include "tws/metrics.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "tws/error.hpp"

namespace tws {

namespace {

double ratio_of(double a, double b) {
  if (a == 0.0 && b == 0.0) return 1.0;
  return a / b;
}

void add_flow(FlowStats& s, double mean, double fast) {
  s.mean += mean;
  s.max = std::max(s.max, mean);
  s.fast_fraction_mean += fast;
  ++s.samples;
}

void finish_flow(FlowStats& s) {
  if (s.samples == 0) return;
  s.mean /= static_cast<double>(s.samples);
  s.fast_fraction_mean /= static_cast<double>(s.samples);
}

double num(const TraceEvent& e, const char* key) {
  if (!e.payload.contains(key) || !e.payload[key].is_number()) {
    throw Error(ErrorCode::CorruptTrace,
                fmt::format("event {} ({}) lacks numeric '{}'", e.index, to_string(e.kind), key));
  }
  return e.payload[key].get<double>();
}

}  // namespace

MetricsReport compute_report(const Trace& trace) {
  MetricsReport r;
  const auto& cfg = trace.header.config;
  r.technique = cfg.value("technique", std::string("?"));
  r.seed = trace.header.seed;
  r.scenario_hash = trace.header.scenario_hash;
  r.ticks_per_second = cfg.value("ticks_per_second", 0.0);
  if (!trace.events.empty()) r.duration = trace.events.back().t;

  LegMetrics* open = nullptr;
  std::optional<double> invoke_t, open_t, first_parent_t, last_unparent_t, first_aim_t;
  for (const TraceEvent& e : trace.events) {
    switch (e.kind) {
      case EventKind::Step: {
        const double walk = num(e, "walk_m");
        const double local = num(e, "local_m");
        const double tunnel = num(e, "tunnel_m");
        r.total_walk += walk;
        r.local_walk += local;
        r.tunnel_walk += tunnel;
        if (open) {
          open->physical_distance += walk;
          open->local_distance += local;
          open->tunnel_distance += tunnel;
        }
        const bool in_tunnel = e.payload.value("mode", std::string()) == "tunnel";
        add_flow(in_tunnel ? r.flow_tunnel : r.flow_local, num(e, "flow"), num(e, "flow_fast"));
        break;
      }
      case EventKind::LegStart: {
        if (open) throw Error(ErrorCode::CorruptTrace, fmt::format("event {}: LegStart inside an open leg", e.index));
        r.legs.push_back({});
        open = &r.legs.back();
        open->leg = static_cast<int>(num(e, "leg"));
        open->start_t = e.t;
        open->true_path_length = num(e, "true_m");
        invoke_t = open_t = first_parent_t = last_unparent_t = first_aim_t = std::nullopt;
        break;
      }
      case EventKind::Invoke:
        if (open && !invoke_t) invoke_t = e.t;
        break;
      case EventKind::PhaseChange:
        if (open && invoke_t && !open_t && e.payload.value("to", std::string()) == "Open") open_t = e.t;
        break;
      case EventKind::Parent:
        if (open && !first_parent_t) first_parent_t = e.t;
        break;
      case EventKind::Unparent:
        if (open) last_unparent_t = e.t;
        break;
      case EventKind::Abort:
        if (open) ++open->aborts;
        break;
      case EventKind::TeleportAim:
        if (open && !first_aim_t) first_aim_t = e.t;
        break;
      case EventKind::TeleportExec:
        ++r.teleports;
        if (open) ++open->teleports;
        break;
      case EventKind::LegEnd: {
        if (!open) throw Error(ErrorCode::CorruptTrace, fmt::format("event {}: LegEnd without LegStart", e.index));
        open->end_t = e.t;
        open->travel_time = e.t - open->start_t;
        open->virtual_distance = num(e, "virtual_m");
        const double began = invoke_t ? *invoke_t : first_aim_t.value_or(e.t);
        open->approach_time = began - open->start_t;
        if (invoke_t && open_t) open->wait_time = *open_t - *invoke_t;
        if (first_parent_t && last_unparent_t) open->traversal_time = *last_unparent_t - *first_parent_t;
        if (e.payload.contains("estimate_m") && e.payload["estimate_m"].is_number()) {
          open->estimate = e.payload["estimate_m"].get<double>();
        }
        r.travel_time += open->travel_time;
        open = nullptr;
        break;
      }
      default: break;
    }
  }
  if (open) throw Error(ErrorCode::CorruptTrace, "trace ends inside an open leg");
  finish_flow(r.flow_local);
  finish_flow(r.flow_tunnel);
  return r;
}

const MetricComparison& ComparisonSummary::metric(const std::string& name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "no metric named '" + name + "'");
}

bool ComparisonSummary::flag(const std::string& name) const {
  for (const auto& [n, v] : flags) {
    if (n == name) return v;
  }
  throw Error(ErrorCode::InvalidArgument, "no flag named '" + name + "'");
}

ComparisonSummary compare(const MetricsReport& a, const MetricsReport& b) {
  if (a.scenario_hash != b.scenario_hash) {
    throw Error(ErrorCode::ScenarioMismatch,
                "scenario geometry differs (" + a.scenario_hash + " vs " + b.scenario_hash + ")");
  }
  if (a.legs.size() != b.legs.size()) throw Error(ErrorCode::ScenarioMismatch, "leg counts differ");
  for (std::size_t i = 0; i < a.legs.size(); ++i) {
    if (std::abs(a.legs[i].true_path_length - b.legs[i].true_path_length) > 1e-9) {
      throw Error(ErrorCode::ScenarioMismatch, fmt::format("path length of leg {} differs", i));
    }
  }

  ComparisonSummary s;
  s.technique_a = a.technique;
  s.technique_b = b.technique;
  auto add = [&](const char* name, double va, double vb) {
    s.metrics.push_back({name, va, vb, ratio_of(va, vb), va - vb});
    s.flags.emplace_back(std::string(name) + "_a_gt_b", va > vb);
  };
  add("total_walk", a.total_walk, b.total_walk);
  add("local_walk", a.local_walk, b.local_walk);
  add("tunnel_walk", a.tunnel_walk, b.tunnel_walk);
  add("travel_time", a.travel_time, b.travel_time);
  add("teleports", a.teleports, b.teleports);
  add("flow_local_mean", a.flow_local.mean, b.flow_local.mean);
  add("flow_tunnel_mean", a.flow_tunnel.mean, b.flow_tunnel.mean);
  add("duration", a.duration, b.duration);
  return s;
}

EstimationError estimation_error(const std::vector<double>& estimates, const std::vector<double>& truth) {
  if (estimates.size() != truth.size() || estimates.empty()) {
    throw Error(ErrorCode::InvalidArgument, "estimates and true lengths must be non-empty and equally long");
  }
  EstimationError e;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double d = estimates[i] - truth[i];
    e.mse += d * d;
    e.me += d;
  }
  e.mse /= static_cast<double>(estimates.size());
  e.me /= static_cast<double>(estimates.size());
  return e;
}

std::string report_csv(const MetricsReport& r) {
  std::string out =
      "leg,travel_time_s,approach_time_s,wait_time_s,traversal_time_s,physical_m,local_m,tunnel_m,virtual_m,"
      "true_m,teleports\n";
  for (const auto& l : r.legs) {
    out += fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", l.leg,
                       l.travel_time, l.approach_time, l.wait_time, l.traversal_time, l.physical_distance,
                       l.local_distance, l.tunnel_distance, l.virtual_distance, l.true_path_length, l.teleports);
  }
  double true_sum = 0.0, virtual_sum = 0.0;
  for (const auto& l : r.legs) {
    true_sum += l.true_path_length;
    virtual_sum += l.virtual_distance;
  }
  out += fmt::format("total,{:.6f},,,,{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", r.travel_time, r.total_walk,
                     r.local_walk, r.tunnel_walk, virtual_sum, true_sum, r.teleports);
  return out;
}

std::string report_text(const MetricsReport& r) {
  std::string out;
  out += fmt::format("technique      {}\n", r.technique);
  out += fmt::format("seed           {}\n", r.seed);
  out += fmt::format("scenario hash  {}\n", r.scenario_hash);
  out += fmt::format("tick rate      {:.1f} Hz\n", r.ticks_per_second);
  out += fmt::format("duration       {:.3f} s\n\n", r.duration);
  out += fmt::format("{:>3} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>4}\n", "leg", "travel_s", "wait_s",
                     "cross_s", "walk_m", "local_m", "tunnel_m", "virtual_m", "true_m", "tp");
  for (const auto& l : r.legs) {
    out += fmt::format("{:>3} {:>9.3f} {:>9.3f} {:>9.3f} {:>9.3f} {:>9.3f} {:>9.3f} {:>9.3f} {:>9.3f} {:>4}\n", l.leg,
                       l.travel_time, l.wait_time, l.traversal_time, l.physical_distance, l.local_distance,
                       l.tunnel_distance, l.virtual_distance, l.true_path_length, l.teleports);
  }
  out += fmt::format("\nwalk total     {:.6f} m\n", r.total_walk);
  out += fmt::format("  local        {:.6f} m\n", r.local_walk);
  out += fmt::format("  tunnel       {:.6f} m\n", r.tunnel_walk);
  out += fmt::format("travel time    {:.3f} s\n", r.travel_time);
  out += fmt::format("teleports      {}\n", r.teleports);
  out += fmt::format("flow local     mean {:.6f} rad/s, max {:.6f} rad/s, fast fraction {:.4f} ({} samples)\n", r.flow_local.mean,
                     r.flow_local.max, r.flow_local.fast_fraction_mean, r.flow_local.samples);
  out += fmt::format("flow tunnel    mean {:.6f} rad/s, max {:.6f} rad/s, fast fraction {:.4f} ({} samples)\n", r.flow_tunnel.mean,
                     r.flow_tunnel.max, r.flow_tunnel.fast_fraction_mean, r.flow_tunnel.samples);
  return out;
}

std::string comparison_csv(const ComparisonSummary& s) {
  std::string out = "metric,a,b,ratio,difference\n";
  for (const auto& m : s.metrics) {
    out += fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f}\n", m.name, m.a, m.b, m.ratio, m.difference);
  }
  for (const auto& [name, v] : s.flags) out += fmt::format("{},{},,,\n", name, v ? 1 : 0);
  return out;
}

std::string comparison_text(const ComparisonSummary& s) {
  std::string out = fmt::format("a = {}, b = {}\n\n", s.technique_a, s.technique_b);
  out += fmt::format("{:<18} {:>14} {:>14} {:>10} {:>14}\n", "metric", "a", "b", "a/b", "a-b");
  for (const auto& m : s.metrics) {
    out += fmt::format("{:<18} {:>14.6f} {:>14.6f} {:>10.6f} {:>14.6f}\n", m.name, m.a, m.b, m.ratio, m.difference);
  }
  out += "\n";
  for (const auto& [name, v] : s.flags) out += fmt::format("{:<28} {}\n", name, v ? "yes" : "no");
  return out;
}

}  // namespace tws
