#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rrcstorm/events.hpp"
#include "rrcstorm/random.hpp"
#include "rrcstorm/resource_pool.hpp"

namespace rrcstorm::simnet {

struct GnbConfig {
  std::int64_t capacity = 16;
  TimeMs waiting_time_ms = 2700;
  TimeMs frame_ms = 7;
  std::int64_t max_msg1_per_frame = 1;
  TimeMs msg3_to_msg4_delay_ms = 1;
  /// Msg1 -> Msg2 and Msg2 -> Msg3 turnaround.
  TimeMs rach_delay_ms = 0;
};

enum class ScenarioKind : std::uint8_t { Attack, HighLoad, Normal };

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::Normal;
  TimeMs duration_ms = 60'000;
  std::uint64_t seed = 1;
  std::int64_t preconnected_bue = 0;

  double attacker_rate_per_s = 132.07;   // Attack only
  double benign_fleet_rate_per_s = 40.0; // HighLoad only
  /// Connected hold time of high-load fleet UEs; nullopt = never disconnect.
  std::optional<TimeMs> fleet_session_ms;

  /// Background benign traffic; nullopt disables it.
  std::optional<TruncatedPoissonSpec> background;
  /// Connected hold time of background UEs before they disconnect.
  TimeMs background_session_ms = 100;

  /// Start of the attack / high-load surge, plus a seeded offset drawn
  /// uniformly from [0, onset_jitter_ms).
  TimeMs onset_ms = 0;
  TimeMs onset_jitter_ms = 0;

  TimeMs msg4_to_msg5_delay_ms = 10;
  TimeMs t300_ms = 1000;
  std::int64_t benign_max_retries = 3;
  EstablishmentCause attacker_cause = EstablishmentCause::Emergency;
  EstablishmentCause benign_cause = EstablishmentCause::MoData;
};

/// Throws std::invalid_argument on an inconsistent configuration.
void validate(const GnbConfig& gnb);
void validate(const ScenarioSpec& spec, const GnbConfig& gnb);

std::string_view to_string(ScenarioKind kind);
std::optional<ScenarioKind> parse_scenario_kind(std::string_view text);

struct SimResult {
  std::vector<RrcEvent> trace;

  /// Ground-truth onset: first Msg3 of the attacker / high-load fleet.
  std::optional<TimeMs> onset_ms;
  /// Absolute time of the first Msg3 rejection at or after onset.
  std::optional<TimeMs> drop_at_ms;
  /// drop_at_ms - onset (or - 0 without an onset); equals duration of accept.
  std::optional<TimeMs> drop_time_ms;
  /// From the drop until the next context release; absent if none occurs.
  std::optional<TimeMs> duration_reject_ms;

  std::int64_t accepted_msg3 = 0;
  std::int64_t rejected_msg3 = 0;

  /// Counts over the first waiting period [onset, onset + T_W).
  std::int64_t period_accepted = 0;
  std::int64_t period_rejected = 0;
  std::optional<double> period_availability_pct;

  std::optional<TimeMs> duration_accept_ms() const { return drop_time_ms; }
};

/// Trace-derived metrics; used by run() and available for replayed traces.
SimResult measure(std::vector<RrcEvent> trace, std::optional<TimeMs> onset_ms,
                  TimeMs waiting_time_ms);

using EventSink = std::function<void(const RrcEvent&)>;

/// Runs one scenario to completion. Events are delivered to `sink` (if any)
/// in trace order as they are produced.
SimResult run(const ScenarioSpec& scenario, const GnbConfig& gnb, const EventSink& sink = {});

// gNB reactions, exposed for direct testing.

struct Msg3Decision {
  bool accepted = false;
  TimeMs msg4_at_ms = 0;  // valid when accepted
  TimeMs expiry_ms = 0;   // valid when accepted
};

Msg3Decision gnb_on_msg3(ResourcePool& pool, const RrcEvent& msg3, const GnbConfig& gnb);

enum class Msg5Outcome : std::uint8_t { Connected, Ignored };

Msg5Outcome gnb_on_msg5(ResourcePool& pool, const RrcEvent& msg5);

/// Nominal start of the k-th attack cycle: onset + round(k * 1000 / rate).
TimeMs attack_cycle_time(TimeMs onset_ms, double rate_per_s, std::int64_t k);

/// Prefixes the simulator uses for ue_ref values; only simulator-side code
/// and ground-truth tests may look at them.
namespace ue_prefix {
inline constexpr char kAttacker = 'x';
inline constexpr char kBackground = 'b';
inline constexpr char kFleet = 'f';
inline constexpr char kPreconnected = 'p';
}  // namespace ue_prefix

}  // namespace rrcstorm::simnet
