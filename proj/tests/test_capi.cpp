#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "tws/tws.h"

namespace fs = std::filesystem;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  tws_string_free(s);
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tws-capi-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(CApi, TunnelBuild) {
  tws_tunnel* t = nullptr;
  ASSERT_EQ(tws_tunnel_build(0, 0, 75, 0, 30, &t), TWS_OK);
  EXPECT_NEAR(tws_tunnel_cabin_length(t), 2.5, 1e-12);
  EXPECT_DOUBLE_EQ(tws_tunnel_hull_length(t), 75.0);
  EXPECT_DOUBLE_EQ(tws_tunnel_gain(t), 30.0);
  tws_tunnel_destroy(t);

  EXPECT_EQ(tws_tunnel_build(0, 0, 75, 0, 0.5, &t), TWS_ERR_CONFIG);
  EXPECT_NE(std::string(tws_last_error()), "");
  EXPECT_EQ(tws_tunnel_build(1, 1, 1, 1, 30, &t), TWS_ERR_CONFIG);
  EXPECT_EQ(tws_tunnel_build(0, 0, 1, 0, 30, nullptr), TWS_ERR_INVALID_ARGUMENT);
}

TEST(CApi, ConfigSetAndValidate) {
  tws_config* cfg = nullptr;
  ASSERT_EQ(tws_config_create(&cfg), TWS_OK);
  EXPECT_EQ(tws_config_set(cfg, "seed", "12"), TWS_OK);
  EXPECT_EQ(tws_config_set(cfg, "technique", "teleport"), TWS_OK);
  EXPECT_EQ(tws_config_set(cfg, "agent.walk_speed", "1.2"), TWS_OK);
  EXPECT_EQ(tws_config_set(cfg, "agent.nope", "1"), TWS_ERR_CONFIG);
  EXPECT_EQ(tws_config_validate(cfg), TWS_OK);
  char* json = nullptr;
  ASSERT_EQ(tws_config_json(cfg, &json), TWS_OK);
  const std::string j = take(json);
  EXPECT_NE(j.find("\"seed\": 12"), std::string::npos);
  EXPECT_NE(j.find("\"walk_speed\": 1.2"), std::string::npos);

  EXPECT_EQ(tws_config_set(cfg, "gain.value", "0.5"), TWS_OK);
  EXPECT_EQ(tws_config_validate(cfg), TWS_ERR_CONFIG);
  tws_config_destroy(cfg);

  EXPECT_EQ(tws_config_load("default:L7", &cfg), TWS_ERR_CONFIG);
  EXPECT_EQ(tws_config_load("/nonexistent.yaml", &cfg), TWS_ERR_IO);
}

TEST(CApi, SimulateWriteReportVerify) {
  tws_config* cfg = nullptr;
  ASSERT_EQ(tws_config_load("default:L1", &cfg), TWS_OK);
  ASSERT_EQ(tws_config_set(cfg, "technique", "teleport"), TWS_OK);
  tws_run* run = nullptr;
  ASSERT_EQ(tws_simulate(cfg, &run), TWS_OK);
  EXPECT_EQ(tws_run_seed(run), 0u);

  const fs::path dir = scratch("run");
  ASSERT_EQ(tws_run_write(run, dir.c_str()), TWS_OK);
  EXPECT_TRUE(fs::exists(dir / "trace.jsonl"));
  EXPECT_TRUE(fs::exists(dir / "report.csv"));
  EXPECT_TRUE(fs::exists(dir / "report.txt"));

  tws_report* report = nullptr;
  ASSERT_EQ(tws_report_load(dir.c_str(), &report), TWS_OK);
  EXPECT_EQ(tws_report_leg_count(report), 6u);
  tws_totals totals{};
  ASSERT_EQ(tws_report_totals(report, &totals), TWS_OK);
  EXPECT_EQ(totals.legs, 6);
  EXPECT_GT(totals.teleports, 0);
  EXPECT_NEAR(totals.total_walk, totals.local_walk + totals.tunnel_walk, 1e-9);
  tws_leg leg{};
  ASSERT_EQ(tws_report_leg(report, 1, &leg), TWS_OK);
  EXPECT_DOUBLE_EQ(leg.true_m, 75.0);
  EXPECT_EQ(tws_report_leg(report, 6, &leg), TWS_ERR_INVALID_ARGUMENT);

  tws_verify v{};
  EXPECT_EQ(tws_replay_verify((dir / "trace.jsonl").c_str(), &v), TWS_OK);
  EXPECT_EQ(v.identical, 1);

  char* text = nullptr;
  char* csv = nullptr;
  ASSERT_EQ(tws_compare(report, report, &text, &csv), TWS_OK);
  EXPECT_NE(take(text).find("total_walk"), std::string::npos);
  EXPECT_NE(take(csv).find("total_walk"), std::string::npos);

  tws_report_destroy(report);
  tws_run_destroy(run);
  tws_config_destroy(cfg);
  fs::remove_all(dir);
}

TEST(CApi, VerifyReportsDivergence) {
  tws_config* cfg = nullptr;
  ASSERT_EQ(tws_config_create(&cfg), TWS_OK);
  ASSERT_EQ(tws_config_set(cfg, "technique", "teleport"), TWS_OK);
  tws_run* run = nullptr;
  ASSERT_EQ(tws_simulate(cfg, &run), TWS_OK);
  char* trace = nullptr;
  ASSERT_EQ(tws_run_trace(run, &trace), TWS_OK);
  std::string text = take(trace);
  const std::size_t at = text.find("\"walk_m\":", text.size() / 2) + 9;
  text[at] = text[at] == '1' ? '2' : '1';
  const fs::path dir = scratch("tamper");
  std::ofstream(dir / "trace.jsonl", std::ios::binary) << text;

  tws_verify v{};
  EXPECT_EQ(tws_replay_verify((dir / "trace.jsonl").c_str(), &v), TWS_ERR_DIVERGENCE);
  EXPECT_EQ(v.identical, 0);
  EXPECT_GT(v.line, 1u);
  EXPECT_GE(v.index, 0);
  EXPECT_EQ(tws_replay_verify((dir / "missing.jsonl").c_str(), &v), TWS_ERR_IO);

  tws_run_destroy(run);
  tws_config_destroy(cfg);
  fs::remove_all(dir);
}

TEST(CApi, BatchAndDefaults) {
  tws_config* cfg = nullptr;
  ASSERT_EQ(tws_config_create(&cfg), TWS_OK);
  ASSERT_EQ(tws_config_set(cfg, "technique", "teleport"), TWS_OK);
  ASSERT_EQ(tws_config_set(cfg, "seed", "4"), TWS_OK);
  tws_run* runs[2] = {nullptr, nullptr};
  ASSERT_EQ(tws_simulate_batch(cfg, 2, 2, runs), TWS_OK);
  EXPECT_EQ(tws_run_seed(runs[0]), 4u);
  EXPECT_EQ(tws_run_seed(runs[1]), 5u);
  tws_run_destroy(runs[0]);
  tws_run_destroy(runs[1]);
  tws_config_destroy(cfg);

  char* defaults = nullptr;
  ASSERT_EQ(tws_describe_defaults(&defaults), TWS_OK);
  EXPECT_NE(take(defaults).find("\"ticks_per_second\""), std::string::npos);
  EXPECT_NE(std::string(tws_version()), "");
}
