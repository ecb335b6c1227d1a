// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <functional>
#include <random>
#include <string>

#include "flow_cases.hpp"
#include "oracles.hpp"
#include "tws/error.hpp"
#include "tws/locomotion.hpp"
#include "tws/metrics.hpp"
#include "tws/scenario.hpp"
#include "tws/simulation.hpp"
#include "tws/trace.hpp"
#include "tws/tunnel.hpp"

using namespace tws;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int n, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = budget_s <= 0.0 || secs < budget_s;
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  std::string timing = fmt::format("{:.3f}s", secs);
  if (budget_s > 0.0) timing += fmt::format(" < {:g}s{}", budget_s, in_time ? "" : " EXCEEDED");
  std::printf("%s %d %s: %s [%s]\n", ok ? "PASS" : "FAIL", n, name, o.detail.c_str(), timing.c_str());
  std::fflush(stdout);
}

SimulationResult run(Technique t, std::uint64_t seed = 7) {
  RunConfig cfg;
  cfg.technique = t;
  cfg.seed = seed;
  return simulate(cfg);
}

Outcome cabin_compression() {
  const PlaySpace room({2, 2});
  const Pose entry{{-1.3, 0, 0}, Quat::identity()};
  const double a = tunnel_build(Segment({0, 0, 0}, {75, 0, 0}), FixedGain{30}, {}, room, entry).cabin_length;
  const double b = tunnel_build(Segment({0, 0, 0}, {60, 0, 0}), FixedGain{30}, {}, room, entry).cabin_length;
  bool ok = std::abs(a - 2.5) <= 1e-12 && std::abs(b - 2.0) <= 1e-12;

  const Scenario sc = build_default_scenario(Level::L1, room);
  const double expected[] = {2.0, 2.5, 1.5, 2.5, 1.5, 2.0};
  std::string lens;
  for (std::size_t i = 0; i < sc.leg_count(); ++i) {
    const Vec3 start = from_floor(sc.departures[i]);
    const Segment path(start, start + sc.paths[i].direction() * sc.paths[i].length());
    const double l = tunnel_build(path, FixedGain{30}, {}, sc.playspace, {start, Quat::identity()}).cabin_length;
    ok = ok && i < 6 && std::abs(l - expected[i]) <= 1e-12;
    lens += fmt::format("{}{:.12g}", i ? "," : "", l);
  }
  ok = ok && sc.leg_count() == 6;
  return {ok, fmt::format("75m->{:.15g} 60m->{:.15g}, default legs {{{}}}", a, b, lens)};
}

Outcome exit_invariant() {
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double d = oracle::uniform(rng, 10, 500), g = oracle::uniform(rng, 2, 100);
    const double yaw = oracle::uniform(rng, -M_PI, M_PI);
    const Vec3 s{oracle::uniform(rng, -100, 100), 0, oracle::uniform(rng, -100, 100)};
    const TunnelSpec spec = make_tunnel(Segment(s, s + Vec3{std::cos(yaw), 0, std::sin(yaw)} * d), g);
    TraversalState st = enter_cabin(spec, spec.path.start());
    const int steps = std::uniform_int_distribution<int>(1, 80)(rng);
    for (int k = 0; k < steps; ++k) {
      const double fwd = std::clamp(st.x + oracle::uniform(rng, -0.4, 0.6), 0.0, spec.cabin_length) - st.x;
      const Vec3 step = spec.axis * fwd + spec.up * oracle::uniform(rng, -0.05, 0.05) +
                        spec.side * oracle::uniform(rng, -0.2, 0.2);
      st = advance_traversal(st, spec, step).state;
    }
    const Vec3 last = spec.axis * (spec.cabin_length - st.x) - spec.up * st.lateral.x - spec.side * st.lateral.y;
    st = advance_traversal(st, spec, last).state;
    worst = std::max(worst, norm(traversal_world_position(spec, st) - spec.path.end()));
  }
  return {worst <= 1e-9, fmt::format("1000 tunnels, max |rig - p_e| = {:.3e} m", worst)};
}

Outcome portal_continuity() {
  // Before the crossing the content beyond a portal is rendered through the
  // portal transform; after it (cabin at the corresponding hull end) it is
  // seen directly. Both must put it at the same world point.
  std::mt19937_64 rng(1002);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double d = oracle::uniform(rng, 10, 500), g = oracle::uniform(rng, 2, 100);
    const double yaw = oracle::uniform(rng, -M_PI, M_PI);
    const Vec3 s{oracle::uniform(rng, -100, 100), 0, oracle::uniform(rng, -100, 100)};
    const TunnelSpec spec = make_tunnel(Segment(s, s + Vec3{std::cos(yaw), 0, std::sin(yaw)} * d), g);
    TraversalState pre = enter_cabin(spec, spec.path.start());
    pre.x = oracle::uniform(rng, 0, spec.cabin_length);
    pre.cabin_offset = (g - 1) * pre.x;
    pre.lateral = {oracle::uniform(rng, 1.2, 1.9), oracle::uniform(rng, -0.6, 0.6)};
    const Vec3 head = traversal_world_position(spec, pre);
    for (int r = 0; r < 100; ++r) {
      const PortalSide side = r % 2 ? PortalSide::Exit : PortalSide::Entry;
      TraversalState post = pre;
      post.x = side == PortalSide::Exit ? spec.cabin_length : 0.0;
      post.cabin_offset = (g - 1) * post.x;

      const double u = oracle::uniform(rng, -0.45, 0.45) * spec.height;
      const double v = oracle::uniform(rng, -0.45, 0.45) * spec.width;
      const Pose face_pre = portal_surface_pose(spec, pre, side);
      const Vec3 hit = face_pre.position + spec.up * u + spec.side * v;
      const Vec3 dir = normalized(hit - head);
      const double beyond = oracle::uniform(rng, 0.01, 100.0);
      const Vec3 seen_pre = portal_view_transform(spec, pre, side).apply_point(hit + dir * beyond);

      const Pose face_post = portal_surface_pose(spec, post, side);
      const Vec3 seen_post = face_post.position + spec.up * u + spec.side * v + dir * beyond;
      const Transform t_post = portal_view_transform(spec, post, side);
      worst = std::max({worst, norm(seen_pre - seen_post), norm(t_post.apply_point(seen_post) - seen_post)});
    }
  }
  return {worst <= 1e-9, fmt::format("100 states x 100 rays, max gap = {:.3e} m", worst)};
}

Outcome head_bob() {
  const TunnelSpec spec = make_tunnel(Segment({0, 0, 0}, {75, 0, 0}), 30);
  TraversalState st = enter_cabin(spec, spec.path.start());
  const Vec3 w0 = traversal_world_position(spec, st);
  const double dt = 1.0 / 90, f = 1.8, av = 0.025, al = 0.015;
  double wv[2] = {0, 0}, wl[2] = {0, 0}, pv[2] = {0, 0}, pl[2] = {0, 0}, worst_axis = 0.0, fwd = 0.0;
  Vec3 prev{};
  for (int k = 1; k * dt < spec.cabin_length; ++k) {
    const double t = k * dt;
    const Vec3 bob = spec.up * (av * std::sin(2 * M_PI * f * t)) + spec.side * (al * std::sin(M_PI * f * t));
    st = advance_traversal(st, spec, spec.axis * dt + (bob - prev)).state;
    prev = bob;
    fwd += dt;
    const Vec3 rel = traversal_world_position(spec, st) - w0;
    wv[0] = std::min(wv[0], rel.y), wv[1] = std::max(wv[1], rel.y);
    wl[0] = std::min(wl[0], dot(rel, spec.side)), wl[1] = std::max(wl[1], dot(rel, spec.side));
    pv[0] = std::min(pv[0], bob.y), pv[1] = std::max(pv[1], bob.y);
    pl[0] = std::min(pl[0], dot(bob, spec.side)), pl[1] = std::max(pl[1], dot(bob, spec.side));
    worst_axis = std::max(worst_axis, std::abs(dot(rel, spec.axis) / fwd - spec.gain));
  }
  const double rv = (wv[1] - wv[0]) / (pv[1] - pv[0]);
  const double rl = (wl[1] - wl[0]) / (pl[1] - pl[0]);
  const bool ok = std::abs(rv - 1) <= 1e-9 && std::abs(rl - 1) <= 1e-9 && worst_axis <= 1e-9;
  return {ok, fmt::format("bob ratio vertical {:.12f} lateral {:.12f}, axis ratio deviation {:.3e}", rv, rl,
                          worst_axis)};
}

Outcome flow_shielding() {
  const auto s = flowcase::sweep(flowcase::window_facing());
  const auto fwd = flowcase::sweep(flowcase::forward_gaze());
  bool monotone = true, fwd_monotone = true;
  for (std::size_t i = 1; i < s.coverage.size(); ++i) {
    monotone = monotone && s.coverage[i] > s.coverage[i - 1];
    fwd_monotone = fwd_monotone && fwd.coverage[i] >= fwd.coverage[i - 1];
  }
  const double low = s.coverage.front() / s.physical;
  const double high = s.coverage.back() / s.naked;
  const bool order = s.naked > s.default_stripes && s.default_stripes > s.coverage.front();
  const bool fwd_order = fwd.naked > fwd.default_stripes && fwd.default_stripes > fwd.coverage.front() &&
                         std::abs(fwd.coverage.front() / fwd.physical - 1) <= 0.02;
  const bool ok = order && monotone && std::abs(low - 1) <= 0.02 && std::abs(high - 1) <= 0.02 && fwd_order &&
                  fwd_monotone;
  return {ok, fmt::format("naked {:.4f} > stripes {:.4f} > bare {:.4f} ~ physical {:.4f} rad/s; endpoints "
                          "{:.4f}/{:.4f}; coverage sweep [{:.4f}]; forward gaze {:.4f} > {:.4f} > {:.4f}",
                          s.naked, s.default_stripes, s.coverage.front(), s.physical, low, high,
                          fmt::join(s.coverage, ", "), fwd.naked, fwd.default_stripes, fwd.coverage.front())};
}

Outcome walking_distance(const SimulationResult& tun, const SimulationResult& tel) {
  const MetricsReport a = compute_report(tun.trace);
  const MetricsReport b = compute_report(tel.trace);
  const double step = 1.0 / 90.0;  // walk speed 1 m/s at 90 Hz
  const double decomposition = std::abs(a.total_walk - (a.local_walk + a.tunnel_walk));
  const bool ok = a.total_walk > b.total_walk && decomposition <= 1e-9 && std::abs(a.tunnel_walk - 12.0) <= step;
  return {ok, fmt::format("tunnel {:.6f} m > teleport {:.6f} m; local {:.6f} + tunnel {:.9f} (gap {:.1e}); "
                          "{:+.2f}% walk",
                          a.total_walk, b.total_walk, a.local_walk, a.tunnel_walk, decomposition,
                          100.0 * (a.total_walk / b.total_walk - 1.0))};
}

Outcome travel_time(const SimulationResult& tun) {
  const MetricsReport r = compute_report(tun.trace);
  std::vector<double> starts, ends, invokes, opens;
  for (const TraceEvent& e : tun.trace.events) {
    if (e.kind == EventKind::LegStart) starts.push_back(e.t);
    if (e.kind == EventKind::LegEnd) ends.push_back(e.t);
    if (e.kind == EventKind::Invoke) invokes.push_back(e.t);
    if (e.kind == EventKind::PhaseChange && e.payload["to"] == "Open") opens.push_back(e.t);
  }
  bool ok = starts.size() == r.legs.size() && ends.size() == r.legs.size() && invokes.size() == r.legs.size() &&
            opens.size() == r.legs.size();
  double sum = 0.0;
  for (std::size_t i = 0; ok && i < r.legs.size(); ++i) {
    const LegMetrics& l = r.legs[i];
    ok = l.travel_time == ends[i] - starts[i] && invokes[i] >= starts[i] && opens[i] <= ends[i] &&
         l.wait_time == opens[i] - invokes[i] && l.travel_time >= l.approach_time + l.wait_time + l.traversal_time;
    sum += ends[i] - starts[i];
  }
  ok = ok && r.travel_time == sum;
  std::string waits;
  for (const auto& l : r.legs) waits += fmt::format("{}{:.3f}", waits.empty() ? "" : ",", l.wait_time);
  return {ok, fmt::format("{} legs, total {:.4f} s == sum of LegEnd-LegStart; waits {{{}}} s", r.legs.size(),
                          r.travel_time, waits)};
}

int cli_exit(const std::string& args) {
  const int status = std::system((std::string(TWS_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism(const SimulationResult& tun) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string second = serialize(run(Technique::Tunnel).trace);
  const double run_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::string first = serialize(tun.trace);
  const bool identical = first == second;

  const fs::path dir = fs::temp_directory_path() / "tws-acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_text_file((dir / "trace.jsonl").string(), first);
  const int clean = cli_exit("replay " + (dir / "trace.jsonl").string() + " --verify");

  std::string tampered = first;
  const std::size_t at = tampered.find("\"walk_m\":", tampered.size() / 2) + 9;
  tampered[at] = tampered[at] == '1' ? '2' : '1';
  write_text_file((dir / "tampered.jsonl").string(), tampered);
  const int dirty = cli_exit("replay " + (dir / "tampered.jsonl").string() + " --verify");
  const VerifyResult v = verify_trace(tampered);
  fs::remove_all(dir);

  const bool ok = identical && clean == 0 && dirty == 5 && !v.identical && run_s < 30.0;
  return {ok, fmt::format("two runs {} ({} bytes, {:.2f}s per run); replay --verify exit {}; tamper exit {} at line {}",
                          identical ? "byte-identical" : "DIFFER", first.size(), run_s, clean, dirty, v.line)};
}

Outcome fuzz() {
  std::mt19937_64 rng(1009);
  const TunnelRequest req{Segment({0, 0, 0}, {60, 0, 0}), FixedGain{30}, {}, PlaySpace({2, 2})};
  const InvocationAnchor anchor{{-0.5, 0, 0}, 0.4, {0, 1, 0}, 1};
  const Transform rig = Transform::translate({1.3, 0, 0});
  std::size_t transitions = 0, violations = 0, crashes = 0;
  for (int seq = 0; seq < 100000; ++seq) {
    TunnelController c;
    Vec3 pos{oracle::uniform(rng, -1, 1), 1.7, oracle::uniform(rng, -0.5, 0.5)};
    const int events = std::uniform_int_distribution<int>(1, 40)(rng);
    for (int e = 0; e < events; ++e) {
      const int what = std::uniform_int_distribution<int>(0, 9)(rng);
      try {
        if (what == 0) {
          c.invoke(anchor, {oracle::uniform(rng, -1, 0), 0, oracle::uniform(rng, -0.4, 0.4)}, rig, req);
          continue;
        }
        std::optional<RigMotion> motion;
        if (what >= 3) {
          motion = RigMotion{pos, {oracle::uniform(rng, -1.0, 1.5), 0, oracle::uniform(rng, -0.2, 0.2)}, std::nullopt};
        }
        TunnelPhase cur = c.phase();
        const TickOutput out = c.tick(oracle::uniform(rng, 1e-3, what == 1 ? 3.0 : 0.1), motion);
        for (const Effect& eff : out.effects) {
          if (eff.kind != EffectKind::PhaseChange) continue;
          if (eff.from != cur || eff.to != next_phase(eff.from)) ++violations;
          cur = eff.to;
          ++transitions;
        }
        if (cur != c.phase()) ++violations;
        if (motion) pos = out.world_after;
      } catch (const Error& err) {
        if (err.code() != ErrorCode::TunnelAlreadyActive && err.code() != ErrorCode::NotOnPlatform) ++crashes;
      } catch (...) {
        ++crashes;
      }
    }
  }
  return {violations == 0 && crashes == 0,
          fmt::format("100000 sequences, {} transitions, {} out-of-order, {} unexpected errors", transitions,
                      violations, crashes)};
}

}  // namespace

int main() {
  criterion(1, "cabin compression", 1.0, cabin_compression);
  criterion(2, "exit invariant", 10.0, exit_invariant);
  criterion(3, "portal continuity", 0.0, portal_continuity);
  criterion(4, "head-bob isolation", 0.0, head_bob);
  criterion(5, "flow shielding", 0.0, flow_shielding);

  const SimulationResult tun = run(Technique::Tunnel);
  const SimulationResult tel = run(Technique::Teleport);
  criterion(6, "walking distance", 0.0, [&] { return walking_distance(tun, tel); });
  criterion(7, "travel-time bookkeeping", 0.0, [&] { return travel_time(tun); });
  criterion(8, "determinism", 30.0, [&] { return determinism(tun); });
  criterion(9, "state-machine fuzz", 0.0, fuzz);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}
