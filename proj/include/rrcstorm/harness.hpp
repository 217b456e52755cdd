#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rrcstorm/detector.hpp"
#include "rrcstorm/simnet.hpp"

namespace rrcstorm::harness {

struct ExperimentConfig {
  std::string name = "custom";
  simnet::ScenarioSpec scenario;
  simnet::GnbConfig gnb;
  detector::DetectorConfig detector;
  std::vector<std::uint64_t> seeds{1};
  std::filesystem::path out_dir = ".";
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ConfigError describing the first invalid field.
void validate(const ExperimentConfig& config);

std::vector<std::uint64_t> seed_range(std::uint64_t base, std::size_t count);

// Named presets: paper-attack-{0,25,50,75}, paper-highload, paper-normal.
std::vector<std::string> preset_names();
ExperimentConfig preset(std::string_view name);

/// Sets one field from its textual form, e.g. ("capacity", "16"). Keys are
/// listed in the README. Throws ConfigError on unknown keys or bad values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Loads `key=value` lines (# comments allowed) or a flat JSON object with
/// the same keys. A `preset` key, if present, is applied first.
ExperimentConfig load_config_file(const std::filesystem::path& path);

/// A preset name or a path to a config file.
ExperimentConfig resolve_scenario(std::string_view preset_or_file);

/// Preconnected UEs = round(pct/100 * capacity).
void set_occupancy_pct(ExperimentConfig& config, double pct);

// ---------------------------------------------------------------------------

struct LiveRun {
  simnet::SimResult sim;
  std::vector<detector::DetectionVerdict> verdicts;
};

/// Simulation with the detector fed in-process from the event sink.
LiveRun run_live(const simnet::ScenarioSpec& scenario, const simnet::GnbConfig& gnb,
                 const detector::DetectorConfig& det);

/// Runs fn(seed) for every seed concurrently; results come back in seed order.
template <typename Fn>
auto for_each_seed(std::span<const std::uint64_t> seeds, Fn fn)
    -> std::vector<decltype(fn(std::uint64_t{}))>;

// ---------------------------------------------------------------------------

struct TableOneRow {
  enum class Source : std::uint8_t { Theoretical, Simulated };

  std::string occupancy;  // e.g. "0%"
  Source source = Source::Theoretical;
  std::int64_t n_accepted = 0;
  std::int64_t n_rejected = 0;
  std::optional<double> drop_time_s;
  std::optional<double> dur_accept_s;
  std::optional<double> dur_reject_s;
  std::optional<double> avail_rate_pct;
};

inline constexpr double kTableOccupancies[] = {0.0, 25.0, 50.0, 75.0};

/// Eight rows, theoretical then simulated per occupancy. Theoretical rows use
/// `effective_waiting_ms`; simulated rows use `base.gnb` and pool `base.seeds`.
std::vector<TableOneRow> table1(const ExperimentConfig& base, double effective_waiting_ms);
void write_table1_csv(std::span<const TableOneRow> rows, std::ostream& out);

// ---------------------------------------------------------------------------

struct LatencyRun {
  std::uint64_t seed = 0;
  std::optional<TimeMs> onset_ms;
  std::optional<TimeMs> latency_ms;
  std::optional<TimeMs> drop_time_ms;
  std::optional<TimeMs> margin_ms;  // drop_time - latency
  std::int64_t normal_verdicts = 0;
  std::int64_t attack_verdicts = 0;
  std::int64_t high_load_verdicts = 0;
  std::int64_t overload_verdicts = 0;
  /// Normal -> Attack -> Overload appears in that order.
  bool attack_progression = false;
};

struct LatencySummary {
  detector::GnbState target = detector::GnbState::Attack;
  std::vector<LatencyRun> runs;
  std::size_t detected = 0;
  std::optional<double> mean_latency_ms;
  std::optional<TimeMs> min_latency_ms;
  std::optional<TimeMs> max_latency_ms;
  std::optional<double> mean_margin_ms;
};

/// Attack scenarios target Attack; HighLoad scenarios target HighLoad;
/// Normal scenarios report Normal as the target.
LatencySummary latency_campaign(const ExperimentConfig& config);
void write_latency_csv(const LatencySummary& summary, std::ostream& out);
void write_latency_summary(const LatencySummary& summary, std::ostream& out);

// ---------------------------------------------------------------------------

struct RunOutput {
  std::vector<std::filesystem::path> trace_files;
  std::vector<std::filesystem::path> verdict_files;
  std::filesystem::path metrics_file;
  std::vector<simnet::SimResult> results;  // traces moved out; metrics only
  std::optional<double> pooled_availability_pct;
};

/// Writes <out>/<name>-seed<S>.rrctrace.jsonl, .verdicts.jsonl and
/// <out>/<name>.metrics.csv. I/O failures throw telemetry::IoError with the path.
RunOutput run_experiment(const ExperimentConfig& config);

/// Re-runs the detector over a recorded trace; writes the verdict file if
/// `out` is given.
std::vector<detector::DetectionVerdict> replay(const std::filesystem::path& trace,
                                               const detector::DetectorConfig& det,
                                               const std::optional<std::filesystem::path>& out);

}  // namespace rrcstorm::harness

#include "rrcstorm/harness_inl.hpp"
