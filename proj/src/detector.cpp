#include "rrcstorm/detector.hpp"

#include <algorithm>
#include <string>

namespace rrcstorm::detector {

void validate(const DetectorConfig& config) {
  if (config.window_ms <= 0) throw std::invalid_argument("window_ms must be > 0");
  if (config.hop_ms <= 0 || config.hop_ms > config.window_ms) {
    throw std::invalid_argument("hop_ms must be in (0, window_ms]");
  }
  auto in_open_unit = [](double x) { return x > 0.0 && x < 1.0; };
  if (!in_open_unit(config.r1_threshold)) throw std::invalid_argument("r1_threshold must be in (0, 1)");
  if (!in_open_unit(config.r2_threshold)) throw std::invalid_argument("r2_threshold must be in (0, 1)");
  if (config.msg3_watermark < 1) throw std::invalid_argument("msg3_watermark must be >= 1");
  if (config.min_msg3_for_ratios < 0) throw std::invalid_argument("min_msg3_for_ratios must be >= 0");
}

std::string_view to_string(GnbState state) {
  switch (state) {
    case GnbState::Normal: return "normal";
    case GnbState::Attack: return "attack";
    case GnbState::HighLoad: return "high_load";
    case GnbState::Overload: return "overload";
  }
  return "unknown";
}

std::optional<GnbState> parse_state(std::string_view text) {
  for (GnbState s : {GnbState::Normal, GnbState::Attack, GnbState::HighLoad, GnbState::Overload}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

WindowFeatures make_features(TimeMs window_end_ms, std::int64_t n_msg3, std::int64_t n_msg4,
                             std::int64_t n_msg5, const DetectorConfig& config) {
  WindowFeatures f;
  f.window_end_ms = window_end_ms;
  f.window_start_ms = window_end_ms - config.window_ms;
  f.n_msg3 = n_msg3;
  f.n_msg4 = n_msg4;
  f.n_msg5 = n_msg5;
  f.ratios_valid = n_msg3 >= config.min_msg3_for_ratios;

  auto ratio = [](std::int64_t num, std::int64_t den) {
    return std::clamp(static_cast<double>(num) / static_cast<double>(den), 0.0, 1.0);
  };
  f.r1 = n_msg3 == 0 ? 1.0 : ratio(n_msg5, n_msg3);
  if (n_msg4 > 0) {
    f.r2 = ratio(n_msg5, n_msg4);
  } else if (n_msg5 > 0) {
    f.r2 = 1.0;  // completions whose Msg4 already left the window
  } else {
    f.r2 = n_msg3 > config.msg3_watermark ? 0.0 : 1.0;
  }
  return f;
}

GnbState classify_state(const WindowFeatures& f, const DetectorConfig& config) {
  if (f.n_msg3 <= config.msg3_watermark) return GnbState::Normal;
  // A silent gNB is Overload even though r1 = r2 = 0 would also read as Attack.
  if (f.n_msg4 == 0) return GnbState::Overload;
  if (f.r1 < config.r1_threshold) {
    return f.r2 < config.r2_threshold ? GnbState::Attack : GnbState::HighLoad;
  }
  return GnbState::Normal;
}

DetectionVerdict classify(const WindowFeatures& features, const DetectorConfig& config) {
  return DetectionVerdict{features.window_end_ms, classify_state(features, config), features};
}

OrderingError::OrderingError(TimeMs previous, TimeMs offending)
    : std::runtime_error("event at t=" + std::to_string(offending) +
                         " arrived after t=" + std::to_string(previous)),
      previous_(previous),
      offending_(offending) {}

SlidingWindow::SlidingWindow(DetectorConfig config) : config_(config) { validate(config_); }

void SlidingWindow::ingest(const RrcEvent& event) {
  if (newest_ && event.t < *newest_) throw OrderingError(*newest_, event.t);
  newest_ = event.t;
  if (is_observable(event.kind)) events_.push_back(Observed{event.t, event.kind});
  // Nothing at or before newest - window can fall inside a window ending at
  // or after newest.
  while (!events_.empty() && events_.front().t <= *newest_ - config_.window_ms) {
    events_.pop_front();
  }
}

WindowFeatures SlidingWindow::features(TimeMs now) const {
  std::int64_t n3 = 0, n4 = 0, n5 = 0;
  const TimeMs start = now - config_.window_ms;
  for (const Observed& o : events_) {
    if (o.t <= start || o.t > now) continue;
    switch (o.kind) {
      case MsgKind::Msg3: ++n3; break;
      case MsgKind::Msg4: ++n4; break;
      case MsgKind::Msg5: ++n5; break;
      default: break;
    }
  }
  return make_features(now, n3, n4, n5, config_);
}

StreamingDetector::StreamingDetector(DetectorConfig config)
    : window_(config), next_hop_(config.window_ms) {}

void StreamingDetector::emit_until(TimeMs limit, bool inclusive,
                                   std::vector<DetectionVerdict>& out) {
  const DetectorConfig& cfg = window_.config();
  while (inclusive ? next_hop_ <= limit : next_hop_ < limit) {
    out.push_back(classify(window_.features(next_hop_), cfg));
    next_hop_ += cfg.hop_ms;
  }
}

std::vector<DetectionVerdict> StreamingDetector::push(const RrcEvent& event) {
  if (last_any_ && event.t < *last_any_) throw OrderingError(*last_any_, event.t);
  last_any_ = event.t;
  std::vector<DetectionVerdict> out;
  if (!is_observable(event.kind)) return out;
  emit_until(event.t, false, out);
  window_.ingest(event);
  last_observable_ = event.t;
  return out;
}

std::vector<DetectionVerdict> StreamingDetector::finish() {
  std::vector<DetectionVerdict> out;
  if (last_observable_) emit_until(*last_observable_, true, out);
  return out;
}

std::vector<DetectionVerdict> run_stream(std::span<const RrcEvent> events,
                                         const DetectorConfig& config) {
  StreamingDetector det(config);
  std::vector<DetectionVerdict> verdicts;
  for (const RrcEvent& ev : events) {
    auto batch = det.push(ev);
    verdicts.insert(verdicts.end(), batch.begin(), batch.end());
  }
  auto tail = det.finish();
  verdicts.insert(verdicts.end(), tail.begin(), tail.end());
  return verdicts;
}

std::optional<TimeMs> detection_latency(std::span<const DetectionVerdict> verdicts,
                                        TimeMs onset_ms, GnbState target) {
  for (const DetectionVerdict& v : verdicts) {
    if (v.t_ms >= onset_ms && v.state == target) return v.t_ms - onset_ms;
  }
  return std::nullopt;
}

}  // namespace rrcstorm::detector
