#include "tws/tws.h"

#include <cstring>
#include <filesystem>
#include <string>

#include "tws/config.hpp"
#include "tws/error.hpp"
#include "tws/metrics.hpp"
#include "tws/simulation.hpp"
#include "tws/tunnel.hpp"

struct tws_config {
  tws::RunConfig cfg;
};

struct tws_run {
  tws::SimulationResult result;
};

struct tws_report {
  tws::MetricsReport report;
};

struct tws_tunnel {
  tws::TunnelSpec spec;
};

namespace {

thread_local std::string g_last_error;

tws_status map_code(tws::ErrorCode code) {
  using tws::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return TWS_ERR_INVALID_ARGUMENT;
    case ErrorCode::DegeneratePath:
    case ErrorCode::NonHorizontalPath:
    case ErrorCode::GainBelowOne:
    case ErrorCode::CabinDoesNotFit:
    case ErrorCode::PlayspaceTooSmall:
    case ErrorCode::Config: return TWS_ERR_CONFIG;
    case ErrorCode::NotInCabin:
    case ErrorCode::HeadOutsideCabin:
    case ErrorCode::NotOnPlatform:
    case ErrorCode::TunnelAlreadyActive:
    case ErrorCode::CooldownActive:
    case ErrorCode::Simulation: return TWS_ERR_SIMULATION;
    case ErrorCode::CorruptTrace: return TWS_ERR_CORRUPT_TRACE;
    case ErrorCode::SeedMismatch: return TWS_ERR_SEED_MISMATCH;
    case ErrorCode::ScenarioMismatch: return TWS_ERR_SCENARIO_MISMATCH;
    case ErrorCode::Io: return TWS_ERR_IO;
  }
  return TWS_ERR_UNKNOWN;
}

template <class F>
tws_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const tws::Error& e) {
    g_last_error = std::string(tws::to_string(e.code())) + ": " + e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TWS_ERR_UNKNOWN;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TWS_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown error";
    return TWS_ERR_UNKNOWN;
  }
}

tws_status invalid(const char* what) {
  g_last_error = what;
  return TWS_ERR_INVALID_ARGUMENT;
}

char* dup(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::ordered_json parse_value(const char* value) {
  try {
    return nlohmann::ordered_json::parse(value);
  } catch (const nlohmann::json::exception&) {
    return std::string(value);
  }
}

tws::Trace load_trace(const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path p = fs::is_directory(path) ? fs::path(path) / "trace.jsonl" : fs::path(path);
  return tws::read_trace_file(p.string());
}

}  // namespace

extern "C" {

const char* tws_version(void) { return "1.0.0"; }
const char* tws_last_error(void) { return g_last_error.c_str(); }
void tws_string_free(char* s) { delete[] s; }

tws_status tws_config_create(tws_config** out) {
  if (!out) return invalid("out is null");
  return guarded([&] {
    *out = new tws_config{};
    return TWS_OK;
  });
}

tws_status tws_config_load(const char* source, tws_config** out) {
  if (!source || !out) return invalid("source and out must be non-null");
  return guarded([&] {
    *out = new tws_config{tws::resolve_scenario_source(source)};
    return TWS_OK;
  });
}

tws_status tws_config_set(tws_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return invalid("config, key and value must be non-null");
  return guarded([&] {
    const std::string k = key;
    if (k == "scenario") {
      cfg->cfg = tws::resolve_scenario_source(value, cfg->cfg);
      return TWS_OK;
    }
    nlohmann::ordered_json patch = nlohmann::ordered_json::object();
    nlohmann::ordered_json* node = &patch;
    std::size_t begin = 0;
    while (true) {
      const std::size_t dot = k.find('.', begin);
      const std::string part = k.substr(begin, dot == std::string::npos ? std::string::npos : dot - begin);
      if (part.empty()) throw tws::Error(tws::ErrorCode::Config, "malformed key '" + k + "'");
      if (dot == std::string::npos) {
        (*node)[part] = parse_value(value);
        break;
      }
      node = &(*node)[part];
      begin = dot + 1;
    }
    cfg->cfg = tws::config_from_json(patch, cfg->cfg);
    return TWS_OK;
  });
}

tws_status tws_config_validate(const tws_config* cfg) {
  if (!cfg) return invalid("config is null");
  return guarded([&] {
    tws::describe_setup(cfg->cfg);
    return TWS_OK;
  });
}

tws_status tws_config_describe(const tws_config* cfg, char** out) {
  if (!cfg || !out) return invalid("config and out must be non-null");
  return guarded([&] {
    *out = dup(tws::describe_setup(cfg->cfg));
    return TWS_OK;
  });
}

tws_status tws_config_json(const tws_config* cfg, char** out) {
  if (!cfg || !out) return invalid("config and out must be non-null");
  return guarded([&] {
    *out = dup(tws::config_to_json(cfg->cfg).dump(2));
    return TWS_OK;
  });
}

void tws_config_destroy(tws_config* cfg) { delete cfg; }

tws_status tws_simulate(const tws_config* cfg, tws_run** out) {
  if (!cfg || !out) return invalid("config and out must be non-null");
  return guarded([&] {
    *out = new tws_run{tws::simulate(cfg->cfg)};
    return TWS_OK;
  });
}

tws_status tws_simulate_batch(const tws_config* cfg, int count, int threads, tws_run** runs) {
  if (!cfg || !runs) return invalid("config and runs must be non-null");
  if (count <= 0) return invalid("count must be > 0");
  return guarded([&] {
    auto results = tws::simulate_batch(cfg->cfg, count, threads);
    for (std::size_t i = 0; i < results.size(); ++i) runs[i] = new tws_run{std::move(results[i])};
    return TWS_OK;
  });
}

tws_status tws_run_write(const tws_run* run, const char* dir) {
  if (!run || !dir) return invalid("run and dir must be non-null");
  return guarded([&] {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw tws::Error(tws::ErrorCode::Io, "cannot create '" + std::string(dir) + "': " + ec.message());
    const fs::path base(dir);
    const tws::MetricsReport report = tws::compute_report(run->result.trace);
    tws::write_text_file((base / "trace.jsonl").string(), tws::serialize(run->result.trace));
    tws::write_text_file((base / "report.csv").string(), tws::report_csv(report));
    tws::write_text_file((base / "report.txt").string(), tws::report_text(report));
    return TWS_OK;
  });
}

uint64_t tws_run_seed(const tws_run* run) { return run ? run->result.trace.header.seed : 0; }

tws_status tws_run_trace(const tws_run* run, char** out) {
  if (!run || !out) return invalid("run and out must be non-null");
  return guarded([&] {
    *out = dup(tws::serialize(run->result.trace));
    return TWS_OK;
  });
}

tws_status tws_run_report(const tws_run* run, tws_report** out) {
  if (!run || !out) return invalid("run and out must be non-null");
  return guarded([&] {
    *out = new tws_report{tws::compute_report(run->result.trace)};
    return TWS_OK;
  });
}

void tws_run_destroy(tws_run* run) { delete run; }

tws_status tws_report_load(const char* path, tws_report** out) {
  if (!path || !out) return invalid("path and out must be non-null");
  return guarded([&] {
    *out = new tws_report{tws::compute_report(load_trace(path))};
    return TWS_OK;
  });
}

size_t tws_report_leg_count(const tws_report* r) { return r ? r->report.legs.size() : 0; }

tws_status tws_report_leg(const tws_report* r, size_t i, tws_leg* out) {
  if (!r || !out) return invalid("report and out must be non-null");
  if (i >= r->report.legs.size()) return invalid("leg index out of range");
  const tws::LegMetrics& l = r->report.legs[i];
  *out = {l.leg,           l.travel_time,     l.approach_time,    l.wait_time,        l.traversal_time,
          l.physical_distance, l.local_distance, l.tunnel_distance, l.virtual_distance, l.true_path_length,
          l.teleports};
  return TWS_OK;
}

tws_status tws_report_totals(const tws_report* r, tws_totals* out) {
  if (!r || !out) return invalid("report and out must be non-null");
  const tws::MetricsReport& m = r->report;
  *out = {m.local_walk,       m.tunnel_walk,       m.total_walk, m.travel_time,
          m.duration,         m.flow_local.mean,   m.flow_tunnel.mean,
          m.teleports,        static_cast<int>(m.legs.size())};
  return TWS_OK;
}

tws_status tws_report_text(const tws_report* r, char** out) {
  if (!r || !out) return invalid("report and out must be non-null");
  return guarded([&] {
    *out = dup(tws::report_text(r->report));
    return TWS_OK;
  });
}

tws_status tws_report_csv(const tws_report* r, char** out) {
  if (!r || !out) return invalid("report and out must be non-null");
  return guarded([&] {
    *out = dup(tws::report_csv(r->report));
    return TWS_OK;
  });
}

void tws_report_destroy(tws_report* r) { delete r; }

tws_status tws_compare(const tws_report* a, const tws_report* b, char** text, char** csv) {
  if (!a || !b) return invalid("reports must be non-null");
  return guarded([&] {
    const tws::ComparisonSummary s = tws::compare(a->report, b->report);
    if (text) *text = dup(tws::comparison_text(s));
    if (csv) *csv = dup(tws::comparison_csv(s));
    return TWS_OK;
  });
}

tws_status tws_replay_verify(const char* trace_path, tws_verify* out) {
  if (!trace_path) return invalid("trace path is null");
  return guarded([&] {
    const tws::VerifyResult r = tws::verify_trace(tws::read_text_file(trace_path));
    if (out) *out = {r.identical ? 1 : 0, r.line, r.index, r.tick};
    if (!r.identical) {
      g_last_error = r.message;
      return TWS_ERR_DIVERGENCE;
    }
    return TWS_OK;
  });
}

tws_status tws_describe_defaults(char** out) {
  if (!out) return invalid("out is null");
  return guarded([&] {
    *out = dup(tws::describe_defaults());
    return TWS_OK;
  });
}

tws_status tws_tunnel_build(double start_x, double start_z, double end_x, double end_z, double gain,
                            tws_tunnel** out) {
  if (!out) return invalid("out is null");
  return guarded([&] {
    const tws::Segment path({start_x, 0.0, start_z}, {end_x, 0.0, end_z});
    *out = new tws_tunnel{tws::make_tunnel(path, gain)};
    return TWS_OK;
  });
}

double tws_tunnel_gain(const tws_tunnel* t) { return t ? t->spec.gain : 0.0; }
double tws_tunnel_cabin_length(const tws_tunnel* t) { return t ? t->spec.cabin_length : 0.0; }
double tws_tunnel_hull_length(const tws_tunnel* t) { return t ? t->spec.hull_length : 0.0; }
void tws_tunnel_destroy(tws_tunnel* t) { delete t; }

}  // extern "C"
