#pragma once

#include <cstdint>
#include <span>

// Closed-form model of a gNB under an RRC signaling storm. Times are in
// milliseconds and rates in messages per second. Counts are rounded half-up
// from the fractional products.

namespace rrcstorm::analytic {

struct AnalyticInputs {
  double waiting_time_ms = 0.0;      // T_W
  std::int64_t capacity = 0;         // N_UE
  double attacker_rate_per_s = 0.0;  // R_att
  double benign_rate_per_s = 0.0;    // R_BUE
  std::int64_t connected_benign = 0; // N_BUE
};

/// Throws std::invalid_argument when an input is out of its domain.
void validate(const AnalyticInputs& in);

struct Durations {
  double accept_ms = 0.0;
  double reject_ms = 0.0;
  /// False when the free contexts outlast one waiting time, i.e. the
  /// attacker never saturates the pool. reject_ms is 0 in that case.
  bool overload = true;
};

struct RejectedCounts {
  std::int64_t exact = 0;   // T_R * (R_att + R_BUE)
  std::int64_t approx = 0;  // T_R * R_att
  bool overload = true;
};

struct Availability {
  double available_pct = 0.0;
  double unavailable_pct = 0.0;
};

struct AnalyticOutputs {
  std::int64_t accepted = 0;  // N_A
  std::int64_t rejected = 0;  // N_R (exact form)
  double drop_time_ms = 0.0;  // T_D
  double accept_ms = 0.0;     // T_A
  double reject_ms = 0.0;     // T_R
  double availability_pct = 0.0;
  bool overload = true;
};

double drop_time_ms(const AnalyticInputs& in);
Durations accept_reject_durations(const AnalyticInputs& in);
std::int64_t accepted_count(const AnalyticInputs& in);
RejectedCounts rejected_count(const AnalyticInputs& in);
/// Rejections over a reject window of `reject_ms` at the given incoming rates.
RejectedCounts rejected_count(double reject_ms, double attacker_rate_per_s,
                              double benign_rate_per_s);

/// Pooled availability over repetitions (sum form). Throws
/// std::invalid_argument when the rate is undefined or the lists disagree.
Availability availability_rate(std::span<const std::int64_t> accepted,
                               std::span<const std::int64_t> rejected);

AnalyticOutputs full_model(const AnalyticInputs& in);

/// Rounds half-up to the nearest integer.
std::int64_t round_count(double value);

namespace presets {
/// Configured waiting time of the reference setup.
inline constexpr double kNominalWaitingTimeMs = 2700.0;
/// Waiting time that makes the reference theoretical table self-consistent
/// (every row satisfies T_A + T_R = 2.757 s).
inline constexpr double kEffectiveWaitingTimeMs = 2757.0;
inline constexpr std::int64_t kCapacity = 16;
inline constexpr double kAttackRatePerS = 132.07;
}  // namespace presets

}  // namespace rrcstorm::analytic
