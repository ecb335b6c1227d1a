// tws: command-line front end over the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tws/tws.h"

namespace {

int exit_code(tws_status s) {
  switch (s) {
    case TWS_OK: return 0;
    case TWS_ERR_SIMULATION: return 3;
    case TWS_ERR_SCENARIO_MISMATCH: return 4;
    case TWS_ERR_DIVERGENCE:
    case TWS_ERR_SEED_MISMATCH: return 5;
    case TWS_ERR_UNKNOWN: return 1;
    default: return 2;
  }
}

struct Failure {
  tws_status status;
};

void check(tws_status s) {
  if (s != TWS_OK) throw Failure{s};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  tws_string_free(s);
  return out;
}

using ConfigPtr = std::unique_ptr<tws_config, decltype(&tws_config_destroy)>;
using ReportPtr = std::unique_ptr<tws_report, decltype(&tws_report_destroy)>;
using RunPtr = std::unique_ptr<tws_run, decltype(&tws_run_destroy)>;

struct ConfigFlags {
  std::string scenario = "default:L1";
  std::optional<std::string> technique;
  std::optional<std::string> gain_strategy;
  std::optional<double> gain;
  std::optional<double> cabin_length;
  std::optional<std::uint64_t> seed;
  std::optional<double> ticks_per_second;
  std::optional<double> walk_speed;
  std::optional<double> teleport_threshold;
  std::optional<double> jitter;
  std::vector<std::string> sets;

  void attach(CLI::App* app) {
    app->add_option("--scenario", scenario, "default:L1, default:L2 or a YAML scenario file");
    app->add_option("--technique", technique, "tunnel or teleport");
    app->add_option("--gain-strategy", gain_strategy, "fixed-gain, fixed-cabin-length or adaptive");
    app->add_option("--gain", gain, "translational gain (fixed-gain)");
    app->add_option("--cabin-length", cabin_length, "cabin length in meters (fixed-cabin-length)");
    app->add_option("--seed", seed, "64-bit seed");
    app->add_option("--ticks-per-second", ticks_per_second, "simulation rate in Hz");
    app->add_option("--walk-speed", walk_speed, "agent walking speed (m/s)");
    app->add_option("--teleport-threshold", teleport_threshold, "teleport while the goal is farther (m)");
    app->add_option("--jitter", jitter, "per-tick lateral jitter amplitude (m)");
    app->add_option("--set", sets, "override any configuration key: key=value (repeatable)");
  }

  ConfigPtr build() const {
    tws_config* raw = nullptr;
    check(tws_config_load(scenario.c_str(), &raw));
    ConfigPtr cfg(raw, &tws_config_destroy);
    auto set = [&](const char* key, const std::string& value) { check(tws_config_set(cfg.get(), key, value.c_str())); };
    auto num = [](double v) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    if (technique) set("technique", "\"" + *technique + "\"");
    if (gain_strategy) set("gain.strategy", "\"" + *gain_strategy + "\"");
    if (cabin_length) {
      if (!gain_strategy) set("gain.strategy", "\"fixed-cabin-length\"");
      set("gain.value", num(*cabin_length));
    }
    if (gain) {
      if (!gain_strategy && !cabin_length) set("gain.strategy", "\"fixed-gain\"");
      set("gain.value", num(*gain));
    }
    if (seed) set("seed", std::to_string(*seed));
    if (ticks_per_second) set("ticks_per_second", num(*ticks_per_second));
    if (walk_speed) set("agent.walk_speed", num(*walk_speed));
    if (teleport_threshold) set("agent.teleport_threshold", num(*teleport_threshold));
    if (jitter) set("agent.jitter", num(*jitter));
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) {
        std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
        throw Failure{TWS_ERR_CONFIG};
      }
      set(kv.substr(0, eq).c_str(), kv.substr(eq + 1));
    }
    return cfg;
  }
};

ReportPtr load_report(const std::string& path) {
  tws_report* raw = nullptr;
  check(tws_report_load(path.c_str(), &raw));
  return ReportPtr(raw, &tws_report_destroy);
}

std::string resolve_out(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("TWS_OUT_DIR"); env && *env) return env;
  return "tws-out";
}

int cmd_run(const ConfigFlags& flags, const std::string& out_flag, int batch, int threads) {
  ConfigPtr cfg = flags.build();
  const std::string out = resolve_out(out_flag);
  if (batch <= 1) {
    tws_run* raw = nullptr;
    check(tws_simulate(cfg.get(), &raw));
    RunPtr run(raw, &tws_run_destroy);
    check(tws_run_write(run.get(), out.c_str()));
    tws_report* rep = nullptr;
    check(tws_run_report(run.get(), &rep));
    ReportPtr report(rep, &tws_report_destroy);
    char* text = nullptr;
    check(tws_report_text(report.get(), &text));
    std::cout << take(text) << "output         " << out << "\n";
    return 0;
  }
  std::vector<tws_run*> raw(static_cast<std::size_t>(batch), nullptr);
  check(tws_simulate_batch(cfg.get(), batch, threads, raw.data()));
  std::vector<RunPtr> runs;
  for (tws_run* r : raw) runs.emplace_back(r, &tws_run_destroy);
  std::printf("%-8s %-22s %12s %12s %12s\n", "run", "dir", "total_m", "tunnel_m", "travel_s");
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string dir = (std::filesystem::path(out) / ("seed-" + std::to_string(tws_run_seed(runs[i].get())))).string();
    check(tws_run_write(runs[i].get(), dir.c_str()));
    tws_report* rep = nullptr;
    check(tws_run_report(runs[i].get(), &rep));
    ReportPtr report(rep, &tws_report_destroy);
    tws_totals t{};
    check(tws_report_totals(report.get(), &t));
    std::printf("%-8zu %-22s %12.6f %12.6f %12.3f\n", i, dir.c_str(), t.total_walk, t.tunnel_walk, t.travel_time);
  }
  return 0;
}

int cmd_compare(const std::string& a, const std::string& b, const std::string& csv_path) {
  ReportPtr ra = load_report(a);
  ReportPtr rb = load_report(b);
  char* text = nullptr;
  char* csv = nullptr;
  check(tws_compare(ra.get(), rb.get(), &text, &csv));
  const std::string t = take(text);
  const std::string c = take(csv);
  std::cout << t;
  if (!csv_path.empty()) {
    std::ofstream f(csv_path, std::ios::binary);
    if (!f || !(f << c)) {
      std::cerr << "error: cannot write '" << csv_path << "'\n";
      return 2;
    }
  } else {
    std::cout << "\n" << c;
  }
  return 0;
}

int cmd_replay(const std::string& path, bool verify) {
  if (!verify) {
    ReportPtr r = load_report(path);
    char* text = nullptr;
    check(tws_report_text(r.get(), &text));
    std::cout << take(text);
    return 0;
  }
  tws_verify v{};
  const tws_status s = tws_replay_verify(path.c_str(), &v);
  if (s == TWS_ERR_DIVERGENCE) {
    std::cout << "divergence: first differing line " << v.line;
    if (v.tick >= 0) std::cout << ", event " << v.index << ", tick " << v.tick;
    std::cout << "\n";
    return 5;
  }
  check(s);
  std::cout << "identical\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tunnel-walking locomotion simulator"};
  app.require_subcommand(1);

  ConfigFlags run_flags;
  std::string run_out;
  int batch = 1;
  int threads = 0;
  CLI::App* run = app.add_subcommand("run", "simulate one (or --batch N) runs and write trace and reports");
  run_flags.attach(run);
  run->add_option("--out", run_out, "output directory (fallback: $TWS_OUT_DIR, then ./tws-out)");
  run->add_option("--batch", batch, "number of seed-varied runs")->check(CLI::PositiveNumber);
  run->add_option("--threads", threads, "worker threads for --batch (0 = all cores)");

  std::string cmp_a, cmp_b, cmp_csv;
  CLI::App* cmp = app.add_subcommand("compare", "compare two runs (directories or trace files)");
  cmp->add_option("run_a", cmp_a)->required();
  cmp->add_option("run_b", cmp_b)->required();
  cmp->add_option("--csv", cmp_csv, "write the comparison CSV here instead of stdout");

  std::string replay_path;
  bool verify = false;
  CLI::App* rep = app.add_subcommand("replay", "report from a trace, or --verify by re-simulation");
  rep->add_option("trace", replay_path)->required();
  rep->add_flag("--verify", verify, "re-simulate from the recorded seed and byte-compare");

  ConfigFlags val_flags;
  CLI::App* val = app.add_subcommand("validate", "check a configuration and scenario");
  val_flags.attach(val);

  app.add_subcommand("describe-defaults", "print every default parameter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run) return cmd_run(run_flags, run_out, batch, threads);
    if (*cmp) return cmd_compare(cmp_a, cmp_b, cmp_csv);
    if (*rep) return cmd_replay(replay_path, verify);
    if (*val) {
      ConfigPtr cfg = val_flags.build();
      char* text = nullptr;
      check(tws_config_describe(cfg.get(), &text));
      std::cout << take(text) << "valid\n";
      return 0;
    }
    char* text = nullptr;
    check(tws_describe_defaults(&text));
    std::cout << take(text);
    return 0;
  } catch (const Failure& f) {
    std::cerr << "error: " << tws_last_error() << "\n";
    return exit_code(f.status);
  }
}
