// rrcstorm command-line front end.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rrcstorm/analytic.hpp"
#include "rrcstorm/harness.hpp"
#include "rrcstorm/telemetry.hpp"

namespace fs = std::filesystem;
using namespace rrcstorm;

namespace {

struct Overrides {
  std::string scenario;
  std::optional<std::int64_t> capacity;
  std::optional<std::int64_t> waiting_time_ms;
  std::optional<double> attack_rate;
  std::optional<double> occupancy_pct;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<std::int64_t> window_ms;
  std::optional<std::int64_t> hop_ms;
  std::optional<std::int64_t> watermark;
  std::optional<double> r1_threshold;
  std::optional<double> r2_threshold;
  std::optional<std::string> out;
};

void add_common_flags(CLI::App* cmd, Overrides& o, const std::string& default_scenario) {
  o.scenario = default_scenario;
  cmd->add_option("--scenario", o.scenario, "Preset name or config file (key=value or JSON)")
      ->capture_default_str();
  cmd->add_option("--capacity", o.capacity, "gNB UE-context capacity");
  cmd->add_option("--waiting-time-ms", o.waiting_time_ms, "Pending-context waiting time (ms)");
  cmd->add_option("--attack-rate", o.attack_rate, "Attacker Msg3 rate (messages/s)");
  cmd->add_option("--occupancy-pct", o.occupancy_pct, "Share of contexts connected at t=0 (%)");
  cmd->add_option("--seed", o.seed, "Base RNG seed");
  cmd->add_option("--reps", o.reps, "Repetitions (seeds base..base+reps-1)");
  cmd->add_option("--window-ms", o.window_ms, "Detector sliding window (ms)");
  cmd->add_option("--hop-ms", o.hop_ms, "Detector evaluation stride (ms)");
  cmd->add_option("--watermark", o.watermark, "Msg3 count per window above which traffic is abnormal");
  cmd->add_option("--r1-threshold", o.r1_threshold, "R1 threshold in (0,1)");
  cmd->add_option("--r2-threshold", o.r2_threshold, "R2 threshold in (0,1)");
  cmd->add_option("--out", o.out, "Output directory");
}

harness::ExperimentConfig build_config(const Overrides& o, std::size_t default_reps) {
  harness::ExperimentConfig c = harness::resolve_scenario(o.scenario);
  const bool reps_from_file = c.seeds.size() > 1;
  if (o.capacity) c.gnb.capacity = *o.capacity;
  if (o.waiting_time_ms) c.gnb.waiting_time_ms = *o.waiting_time_ms;
  if (o.attack_rate) c.scenario.attacker_rate_per_s = *o.attack_rate;
  if (o.occupancy_pct) harness::set_occupancy_pct(c, *o.occupancy_pct);
  const std::uint64_t base = o.seed.value_or(c.seeds.front());
  const std::size_t reps = o.reps.value_or(reps_from_file ? c.seeds.size() : default_reps);
  c.seeds = harness::seed_range(base, reps);
  if (o.window_ms) c.detector.window_ms = *o.window_ms;
  if (o.hop_ms) c.detector.hop_ms = *o.hop_ms;
  if (o.watermark) c.detector.msg3_watermark = *o.watermark;
  if (o.r1_threshold) c.detector.r1_threshold = *o.r1_threshold;
  if (o.r2_threshold) c.detector.r2_threshold = *o.r2_threshold;
  if (o.out) c.out_dir = *o.out;
  harness::validate(c);
  return c;
}

void write_to(const fs::path& path, const auto& writer) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path);
  if (!out) throw telemetry::IoError("cannot open " + path.string() + " for writing");
  writer(out);
  if (!out) throw telemetry::IoError("write failed: " + path.string());
}

int cmd_run(const Overrides& o) {
  const auto cfg = build_config(o, 1);
  const auto res = harness::run_experiment(cfg);
  for (std::size_t i = 0; i < res.results.size(); ++i) {
    const auto& r = res.results[i];
    std::cout << res.trace_files[i].string() << ": accepted=" << r.accepted_msg3
              << " rejected=" << r.rejected_msg3;
    if (r.drop_time_ms) std::cout << " drop_time_ms=" << *r.drop_time_ms;
    std::cout << '\n';
  }
  if (res.pooled_availability_pct) {
    std::cout << "pooled availability over first waiting period: " << *res.pooled_availability_pct
              << "%\n";
  }
  std::cout << "metrics: " << res.metrics_file.string() << '\n';
  return 0;
}

int cmd_table1(const Overrides& o, double effective_waiting_ms) {
  const auto cfg = build_config(o, 1);
  const auto rows = harness::table1(cfg, effective_waiting_ms);
  harness::write_table1_csv(rows, std::cout);
  if (o.out) {
    write_to(fs::path(*o.out) / "table1.csv",
             [&](std::ostream& out) { harness::write_table1_csv(rows, out); });
  }
  return 0;
}

int cmd_latency(const Overrides& o) {
  const auto cfg = build_config(o, 20);
  const auto summary = harness::latency_campaign(cfg);
  harness::write_latency_csv(summary, std::cout);
  std::cout << '\n';
  harness::write_latency_summary(summary, std::cout);
  if (o.out) {
    write_to(fs::path(*o.out) / (cfg.name + ".latency.csv"),
             [&](std::ostream& out) { harness::write_latency_csv(summary, out); });
    write_to(fs::path(*o.out) / (cfg.name + ".latency-summary.csv"),
             [&](std::ostream& out) { harness::write_latency_summary(summary, out); });
  }
  const bool needs_detection = summary.target != detector::GnbState::Normal;
  return needs_detection && summary.detected < summary.runs.size() ? 3 : 0;
}

int cmd_replay(const Overrides& o, const fs::path& trace) {
  detector::DetectorConfig det;
  if (o.scenario != "paper-attack-0") det = harness::resolve_scenario(o.scenario).detector;
  if (o.window_ms) det.window_ms = *o.window_ms;
  if (o.hop_ms) det.hop_ms = *o.hop_ms;
  if (o.watermark) det.msg3_watermark = *o.watermark;
  if (o.r1_threshold) det.r1_threshold = *o.r1_threshold;
  if (o.r2_threshold) det.r2_threshold = *o.r2_threshold;

  std::string stem = trace.filename().string();
  if (const std::string ext = telemetry::kTraceExtension; stem.ends_with(ext)) {
    stem.resize(stem.size() - ext.size());
  }
  const fs::path out_dir = o.out ? fs::path(*o.out) : trace.parent_path();
  if (!out_dir.empty()) fs::create_directories(out_dir);
  const fs::path out = out_dir / (stem + telemetry::kVerdictExtension);
  const auto verdicts = harness::replay(trace, det, out);
  std::cout << "wrote " << verdicts.size() << " verdicts to " << out.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and detector for RRC signaling storms"};
  app.require_subcommand(1);

  Overrides run_o, table_o, latency_o, replay_o;
  double effective_waiting_ms = analytic::presets::kEffectiveWaitingTimeMs;
  std::string trace_path;

  auto* run = app.add_subcommand("run", "Simulate a scenario; write trace, verdicts and metrics");
  add_common_flags(run, run_o, "paper-attack-0");

  auto* table = app.add_subcommand("table1", "Theoretical vs simulated availability table (CSV)");
  add_common_flags(table, table_o, "paper-attack-0");
  table->add_option("--effective-waiting-ms", effective_waiting_ms,
                    "Waiting time used for the theoretical rows")
      ->capture_default_str();

  auto* latency = app.add_subcommand("latency", "Seeded detection-latency campaign (CSV)");
  add_common_flags(latency, latency_o, "paper-attack-0");

  auto* replay = app.add_subcommand("replay", "Run the detector over a recorded trace");
  add_common_flags(replay, replay_o, "paper-attack-0");
  replay->add_option("trace", trace_path, "Path to a .rrctrace.jsonl file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_o);
    if (table->parsed()) return cmd_table1(table_o, effective_waiting_ms);
    if (latency->parsed()) return cmd_latency(latency_o);
    if (replay->parsed()) return cmd_replay(replay_o, trace_path);
  } catch (const harness::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const telemetry::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
