#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "rrcstorm/events.hpp"

namespace rrcstorm::detector {

struct DetectorConfig {
  TimeMs window_ms = 625;
  TimeMs hop_ms = 25;
  double r1_threshold = 0.5;
  double r2_threshold = 0.5;
  /// Msg3 count per window above which traffic is abnormal.
  std::int64_t msg3_watermark = 8;
  /// Minimum Msg3 count for WindowFeatures::ratios_valid.
  std::int64_t min_msg3_for_ratios = 3;
};

/// Throws std::invalid_argument unless 0 < hop <= window, both thresholds
/// are in (0, 1) and the watermark is >= 1.
void validate(const DetectorConfig& config);

enum class GnbState : std::uint8_t { Normal, Attack, HighLoad, Overload };

std::string_view to_string(GnbState state);
std::optional<GnbState> parse_state(std::string_view text);

/// Message counts over (window_start_ms, window_end_ms] and the two ratios
/// R1 = Msg5/Msg3 and R2 = Msg5/Msg4, clamped to [0, 1].
struct WindowFeatures {
  TimeMs window_start_ms = 0;
  TimeMs window_end_ms = 0;
  std::int64_t n_msg3 = 0;
  std::int64_t n_msg4 = 0;
  std::int64_t n_msg5 = 0;
  double r1 = 1.0;
  double r2 = 1.0;
  bool ratios_valid = false;

  bool operator==(const WindowFeatures&) const = default;
};

struct DetectionVerdict {
  TimeMs t_ms = 0;
  GnbState state = GnbState::Normal;
  WindowFeatures features;

  bool operator==(const DetectionVerdict&) const = default;
};

/// Builds features from raw counts. Degenerate denominators: no Msg3 gives
/// R1 = 1; no Msg4 and no Msg5 gives R2 = 0 above the watermark (a silent
/// gNB under load) and R2 = 1 otherwise (idle).
WindowFeatures make_features(TimeMs window_end_ms, std::int64_t n_msg3, std::int64_t n_msg4,
                             std::int64_t n_msg5, const DetectorConfig& config);

GnbState classify_state(const WindowFeatures& features, const DetectorConfig& config);
DetectionVerdict classify(const WindowFeatures& features, const DetectorConfig& config);

class OrderingError : public std::runtime_error {
 public:
  OrderingError(TimeMs previous, TimeMs offending);
  TimeMs previous() const { return previous_; }
  TimeMs offending() const { return offending_; }

 private:
  TimeMs previous_;
  TimeMs offending_;
};

/// Sliding window over the observable Msg3/Msg4/Msg5 messages.
class SlidingWindow {
 public:
  explicit SlidingWindow(DetectorConfig config);

  /// Retains Msg3/Msg4/Msg5 and ignores the rest. Throws OrderingError if
  /// `event.t` is older than the newest ingested timestamp.
  void ingest(const RrcEvent& event);

  /// Features over (now - window_ms, now]. Exact for now >= newest ingested
  /// timestamp.
  WindowFeatures features(TimeMs now) const;

  std::size_t retained() const { return events_.size(); }
  const DetectorConfig& config() const { return config_; }

 private:
  struct Observed {
    TimeMs t;
    MsgKind kind;
  };

  DetectorConfig config_;
  std::deque<Observed> events_;
  std::optional<TimeMs> newest_;
};

/// Incremental detector: one verdict per hop at t = window_ms + k * hop_ms,
/// emitted once every event at or before that instant has been seen. The
/// stream end is the last observable event, so other kinds never change the
/// verdict timeline.
class StreamingDetector {
 public:
  explicit StreamingDetector(DetectorConfig config);

  /// Verdicts for hops strictly before `event.t`, then ingests the event.
  std::vector<DetectionVerdict> push(const RrcEvent& event);

  /// Remaining verdicts up to the last observable event.
  std::vector<DetectionVerdict> finish();

 private:
  void emit_until(TimeMs limit, bool inclusive, std::vector<DetectionVerdict>& out);

  SlidingWindow window_;
  TimeMs next_hop_;
  std::optional<TimeMs> last_any_;
  std::optional<TimeMs> last_observable_;
};

std::vector<DetectionVerdict> run_stream(std::span<const RrcEvent> events,
                                         const DetectorConfig& config);

/// Time from `onset_ms` to the first verdict at or after onset whose state
/// is `target`; nullopt when there is none.
std::optional<TimeMs> detection_latency(std::span<const DetectionVerdict> verdicts,
                                        TimeMs onset_ms, GnbState target);

}  // namespace rrcstorm::detector
