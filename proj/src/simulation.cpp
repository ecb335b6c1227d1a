#include "tws/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "tws/error.hpp"
#include "tws/locomotion.hpp"

namespace tws {

using ojson = nlohmann::ordered_json;

namespace {

ojson vj(const Vec3& v) { return {v.x, v.y, v.z}; }

class Run {
 public:
  Run(const RunConfig& cfg, const FlowConfig& flow)
      : cfg_(cfg),
        scenario_(build_scenario(cfg.layout)),
        agent_(cfg.agent, scenario_, cfg.technique, cfg.teleport, cfg.seed),
        controller_(cfg.phases),
        teleporter_(cfg.teleport),
        bundle_(make_bundle(flow)),
        distances_(flow.distances),
        dt_(1.0 / cfg.ticks_per_second) {
    rig_ = scenario_.checkpoints.front() - from_floor(scenario_.playspace.origin());
    trace_.header.seed = cfg.seed;
    trace_.header.scenario_hash = scenario_hash(scenario_);
    trace_.header.config = config_to_json(cfg);
    trace_.header.seed_tag = seed_tag(cfg.seed, trace_.header.scenario_hash, trace_.header.config);
  }

  SimulationResult run() {
    settle();
    const auto max_ticks = static_cast<std::int64_t>(std::ceil(cfg_.max_sim_seconds * cfg_.ticks_per_second));
    while (!finished_) {
      ++tick_;
      if (tick_ > max_ticks) {
        fail("agent did not finish within " + std::to_string(cfg_.max_sim_seconds) + " s of simulated time");
      }
      step();
      settle();
    }
    return {std::move(trace_), std::move(scenario_), tick_};
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    std::string ctx = "tick " + std::to_string(tick_);
    if (!trace_.events.empty()) {
      const TraceEvent& last = trace_.events.back();
      ctx += ", after event " + std::to_string(last.index) + " (" + to_string(last.kind) + ")";
    }
    throw Error(ErrorCode::Simulation, what + " [" + ctx + "]");
  }

  double now() const { return static_cast<double>(tick_) / cfg_.ticks_per_second; }

  TraceEvent& emit(EventKind kind, ojson payload, std::optional<Vec3> world = std::nullopt) {
    TraceEvent e;
    e.index = static_cast<std::int64_t>(trace_.events.size());
    e.tick = tick_;
    e.t = now();
    e.kind = kind;
    e.physical = agent_.head();
    e.world = world.value_or(rig_ + e.physical);
    e.payload = std::move(payload);
    trace_.events.push_back(std::move(e));
    return trace_.events.back();
  }

  void step() {
    const auto motion = agent_.move(dt_);
    const bool parented_before = controller_.rig_parented();
    const TraversalState state_before = controller_.traversal();

    std::optional<RigMotion> rig_motion;
    if (motion) {
      RigMotion m{rig_ + motion->head_before, motion->head_after - motion->head_before, std::nullopt};
      if (cfg_.tunnel.driver == ScalingDriver::CenterOfMass) m.driver_step = motion->floor_after - motion->floor_before;
      rig_motion = m;
    }
    TickOutput out;
    try {
      out = controller_.tick(dt_, rig_motion);
    } catch (const Error& e) {
      fail(e.what());
    }

    if (motion) {
      const Vec3 world_before = rig_motion->world_before;
      rig_ = out.world_after - motion->head_after;
      const double walked = norm(motion->floor_after - motion->floor_before);
      const double f = out.cabin_fraction;

      FlowInput fin;
      const Vec3 gaze = motion->floor_after - motion->floor_before;
      fin.head_before = {world_before, norm(gaze) > 0.0 ? Quat::look_along(gaze) : Quat::identity()};
      fin.head_after = out.world_after;
      fin.physical_step = rig_motion->step;
      fin.dt = dt_;
      const bool in_cabin = parented_before || controller_.rig_parented();
      if (in_cabin && controller_.spec()) {
        fin.spec = &*controller_.spec();
        fin.cabin_before = parented_before ? state_before : controller_.traversal();
        fin.cabin_after = controller_.traversal();
      }
      const FlowSample flow = flow_proxy(fin, bundle_, distances_);

      ojson p;
      p["walk_m"] = walked;
      p["local_m"] = walked * (1.0 - f);
      p["tunnel_m"] = walked * f;
      p["parented"] = controller_.rig_parented();
      p["x"] = controller_.rig_parented() ? controller_.traversal().x : 0.0;
      p["mode"] = in_cabin ? "tunnel" : "local";
      p["flow"] = flow.mean_angular_speed;
      p["flow_fast"] = flow.visible_fraction_fast;
      emit(EventKind::Step, std::move(p));
    }

    for (const Effect& fx : out.effects) {
      ojson p;
      if (fx.kind == EffectKind::PhaseChange) {
        p["from"] = to_string(fx.from);
        p["to"] = to_string(fx.to);
        emit(EventKind::PhaseChange, std::move(p));
        continue;
      }
      p["leg"] = leg_;
      p["phase"] = to_string(fx.from);
      const EventKind kind = fx.kind == EffectKind::ParentRigToCabin ? EventKind::Parent
                             : fx.kind == EffectKind::UnparentRig    ? EventKind::Unparent
                             : fx.kind == EffectKind::Abort          ? EventKind::Abort
                                                                     : EventKind::StartTeardown;
      if (kind == EventKind::Parent || kind == EventKind::Unparent) p["x"] = controller_.traversal().x;
      emit(kind, std::move(p), fx.world_position);
      if (kind == EventKind::Unparent && controller_.exited() && leg_open_) end_leg(fx.world_position);
    }
  }

  void end_leg(const Vec3& world) {
    const Segment& path = scenario_.paths[static_cast<std::size_t>(leg_)];
    ojson p;
    p["leg"] = leg_;
    p["true_m"] = path.length();
    p["virtual_m"] = dot(world - leg_origin_, path.direction());
    emit(EventKind::LegEnd, std::move(p), world);
    leg_open_ = false;
  }

  void settle() {
    while (!finished_) {
      const std::vector<Intent> intents = agent_.settle(view(), cfg_.ticks_per_second);
      if (intents.empty()) break;
      for (const Intent& in : intents) handle(in);
    }
  }

  AgentView view() const {
    AgentView view;
    view.tick = tick_;
    view.rig_translation = rig_;
    view.phase = controller_.phase();
    view.parented = controller_.rig_parented();
    view.tunnel_exited = controller_.exited();
    view.cabin_length = controller_.spec() ? controller_.spec()->cabin_length : 0.0;
    return view;
  }

  void handle(const Intent& in) {
    const std::size_t k = static_cast<std::size_t>(in.leg);
    switch (in.kind) {
      case IntentKind::TaskPickup:
      case IntentKind::TaskDrop:
        emit(EventKind::TaskAction, {{"checkpoint", in.checkpoint},
                                     {"item", in.item},
                                     {"action", in.kind == IntentKind::TaskPickup ? "pickup" : "drop"}});
        break;
      case IntentKind::CheckpointComplete: emit(EventKind::CheckpointComplete, {{"checkpoint", in.checkpoint}}); break;
      case IntentKind::LegStart: {
        leg_ = in.leg;
        leg_open_ = true;
        leg_origin_ = rig_ + from_floor(scenario_.departures[k]);
        emit(EventKind::LegStart, {{"leg", in.leg},
                                   {"from", in.leg},
                                   {"to", in.checkpoint},
                                   {"true_m", scenario_.paths[k].length()},
                                   {"technique", to_string(cfg_.technique)}});
        break;
      }
      case IntentKind::LegEnd: end_leg(rig_ + agent_.floor()); break;
      case IntentKind::PressButton: press(k); break;
      case IntentKind::AimTeleport: aim(in.target); break;
      case IntentKind::ExecuteTeleport: execute_teleport(); break;
      case IntentKind::Finish: finished_ = true; break;
    }
  }

  void press(std::size_t k) {
    const Segment& canonical = scenario_.paths[k];
    const Vec3 start = leg_origin_;
    const Segment path(start, start + canonical.direction() * canonical.length());
    InvocationAnchor anchor = scenario_.anchors[k];
    anchor.platform_center = rig_ + anchor.platform_center;
    anchor.button_position = rig_ + anchor.button_position;
    const TunnelRequest request{path, cfg_.gain, cfg_.tunnel, scenario_.playspace};
    const TunnelPhase before = controller_.phase();
    try {
      const TunnelSpec& spec =
          controller_.invoke(anchor, rig_ + agent_.floor(), Transform::translate(rig_), request);
      emit(EventKind::Invoke, {{"leg", leg_},
                               {"gain", spec.gain},
                               {"hull_m", spec.hull_length},
                               {"cabin_m", spec.cabin_length},
                               {"p_s", vj(spec.path.start())},
                               {"p_e", vj(spec.path.end())}});
    } catch (const Error& e) {
      fail(std::string("tunnel invocation failed: ") + std::string(to_string(e.code())) + ": " + e.what());
    }
    emit(EventKind::PhaseChange, {{"from", to_string(before)}, {"to", to_string(controller_.phase())}});
  }

  void aim(const Vec3& target) {
    const Vec3 head = rig_ + agent_.head();
    const auto dir = aim_direction(head, target, cfg_.teleport);
    std::optional<Vec3> hit;
    if (dir) hit = teleport_aim({head, Quat::identity()}, *dir, cfg_.teleport, scenario_.navigable);
    ojson p;
    p["leg"] = leg_;
    p["target"] = vj(target);
    p["valid"] = hit.has_value();
    if (hit) p["hit"] = vj(*hit);
    emit(EventKind::TeleportAim, std::move(p));
    if (!hit) fail("teleport aim toward the next checkpoint is invalid");
    pending_ = hit;
  }

  void execute_teleport() {
    if (!pending_) fail("teleport executed without a valid aim");
    const Vec3 from = rig_ + agent_.floor();
    Pose moved;
    try {
      moved = teleporter_.execute({from, Quat::identity()}, *pending_, now());
    } catch (const Error& e) {
      fail(e.what());
    }
    rig_ = rig_ + (moved.position - from);
    pending_.reset();
    emit(EventKind::TeleportExec, {{"leg", leg_}, {"from", vj(from)}, {"to", vj(moved.position)}});
  }

  const RunConfig& cfg_;
  Scenario scenario_;
  Agent agent_;
  TunnelController controller_;
  Teleporter teleporter_;
  DirectionBundle bundle_;
  std::vector<double> distances_;
  double dt_;

  Trace trace_;
  Vec3 rig_{};
  std::int64_t tick_ = 0;
  bool finished_ = false;
  int leg_ = 0;
  bool leg_open_ = false;
  Vec3 leg_origin_{};
  std::optional<Vec3> pending_;
};

}  // namespace

SimulationResult simulate(const RunConfig& cfg, const FlowConfig& flow) {
  cfg.validate();
  Run run(cfg, flow);
  return run.run();
}

std::vector<SimulationResult> simulate_batch(const RunConfig& cfg, int count, int threads) {
  if (count <= 0) throw Error(ErrorCode::Config, "batch count must be > 0");
  cfg.validate();
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, count);

  std::vector<std::optional<SimulationResult>> results(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        RunConfig c = cfg;
        c.seed = cfg.seed + static_cast<std::uint64_t>(i);
        try {
          results[static_cast<std::size_t>(i)] = simulate(c);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<SimulationResult> out;
  out.reserve(results.size());
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

std::string describe_setup(const RunConfig& cfg) {
  cfg.validate();
  const Scenario sc = build_scenario(cfg.layout);
  std::string out;
  out += fmt::format("scenario       {} ({}, {})\n", cfg.scenario, sc.level_id, sc.task_name);
  out += fmt::format("scenario hash  {}\n", scenario_hash(sc));
  out += fmt::format("technique      {}\n", to_string(cfg.technique));
  out += fmt::format("checkpoints    {}\n", sc.checkpoints.size());
  out += fmt::format("route length   {:.6f} m\n", sc.total_length());
  const auto angles = turning_angles(sc);
  for (std::size_t i = 0; i < sc.paths.size(); ++i) {
    const Segment& path = sc.paths[i];
    std::string line = fmt::format("{:<15}{:.6f} m", fmt::format("leg {}", i), path.length());
    if (i > 0) line += fmt::format(", turn {:+.1f} deg", angles[i - 1]);
    if (cfg.technique == Technique::Tunnel) {
      const Vec3 entry = from_floor(sc.departures[i]);
      const Segment local(entry, entry + path.direction() * path.length());
      try {
        const TunnelSpec spec = tunnel_build(local, cfg.gain, cfg.tunnel, sc.playspace, {entry, Quat::identity()});
        line += fmt::format(", cabin {:.6f} m at gain {:.6f}", spec.cabin_length, spec.gain);
      } catch (const Error& e) {
        throw Error(ErrorCode::Config, fmt::format("leg {}: {}", i, e.what()));
      }
    }
    out += line + "\n";
  }
  return out;
}

std::string describe_defaults() {
  const RunConfig cfg;
  const FlowConfig flow;
  std::string out = config_to_json(cfg).dump(2);
  out += "\n";
  out += fmt::format("flow.fov_deg = {}\n", flow.fov_deg);
  out += fmt::format("flow.directions = {}\n", flow.directions);
  out += fmt::format("flow.distances = [{}]\n", fmt::join(flow.distances, ", "));
  return out;
}

VerifyResult verify_trace(const std::string& text) {
  const Trace recorded = parse_trace(text);
  RunConfig cfg;
  try {
    cfg = config_from_json(recorded.header.config);
  } catch (const Error& e) {
    throw Error(ErrorCode::CorruptTrace, std::string("line 1: trace header config: ") + e.what(), 1);
  }
  const std::string fresh = serialize(simulate(cfg).trace);

  VerifyResult r;
  std::istringstream a(text), b(fresh);
  std::string la, lb;
  std::size_t line = 0;
  while (true) {
    const bool ha = static_cast<bool>(std::getline(a, la));
    const bool hb = static_cast<bool>(std::getline(b, lb));
    ++line;
    if (!ha && !hb) break;
    if (ha && hb && la == lb) continue;
    r.identical = false;
    r.line = line;
    if (line >= 2 && line - 2 < recorded.events.size()) {
      r.index = recorded.events[line - 2].index;
      r.tick = recorded.events[line - 2].tick;
    }
    r.message = "first divergence at line " + std::to_string(line) +
                (r.tick >= 0 ? " (event " + std::to_string(r.index) + ", tick " + std::to_string(r.tick) + ")" : "");
    break;
  }
  if (r.identical && text != fresh) {
    r.identical = false;
    r.line = line;
    r.message = "trailing bytes differ";
  }
  return r;
}

}  // namespace tws
