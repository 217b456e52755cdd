#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "generators.hpp"
#include "rrcstorm/detector.hpp"

using namespace rrcstorm;
using namespace rrcstorm::detector;

namespace {

RrcEvent ev(TimeMs t, MsgKind k) {
  RrcEvent e{t, k, "u", std::nullopt};
  if (k == MsgKind::Msg3) e.cause = EstablishmentCause::MoData;
  return e;
}

GnbState state_of(std::int64_t n3, std::int64_t n4, std::int64_t n5, const DetectorConfig& c = {}) {
  return classify_state(make_features(0, n3, n4, n5, c), c);
}

// Brute force: every hop recounts the whole stream.
std::vector<DetectionVerdict> oracle(const std::vector<RrcEvent>& events, const DetectorConfig& c) {
  std::vector<DetectionVerdict> out;
  TimeMs last = -1;
  for (const auto& e : events) if (is_observable(e.kind)) last = e.t;
  if (last < 0) return out;
  for (TimeMs h = c.window_ms; h <= last; h += c.hop_ms) {
    std::int64_t n[3] = {0, 0, 0};
    for (const auto& e : events) {
      if (e.t <= h - c.window_ms || e.t > h) continue;
      if (e.kind == MsgKind::Msg3) ++n[0];
      if (e.kind == MsgKind::Msg4) ++n[1];
      if (e.kind == MsgKind::Msg5) ++n[2];
    }
    out.push_back(classify(make_features(h, n[0], n[1], n[2], c), c));
  }
  return out;
}

}  // namespace

TEST_CASE("feature ratios") {
  const DetectorConfig c;
  auto f = make_features(700, 10, 10, 10, c);
  CHECK(f.r1 == 1.0);
  CHECK(f.r2 == 1.0);
  CHECK(f.window_start_ms == 75);
  CHECK(f.ratios_valid);

  f = make_features(0, 80, 16, 0, c);
  CHECK(f.r1 == 0.0);
  CHECK(f.r2 == 0.0);

  f = make_features(0, 80, 16, 16, c);
  CHECK(f.r1 == doctest::Approx(0.2));
  CHECK(f.r2 == 1.0);
}

TEST_CASE("degenerate denominators") {
  const DetectorConfig c;
  auto f = make_features(0, 0, 0, 0, c);
  CHECK(f.r1 == 1.0);
  CHECK(f.r2 == 1.0);
  CHECK_FALSE(f.ratios_valid);
  CHECK(make_features(0, 9, 0, 0, c).r2 == 0.0);  // silent under load
  CHECK(make_features(0, 8, 0, 0, c).r2 == 1.0);  // idle
  CHECK(make_features(0, 9, 0, 3, c).r2 == 1.0);  // Msg4 already left the window
  CHECK(make_features(0, 2, 5, 7, c).r1 == 1.0);  // clamped
}

TEST_CASE("classification rules") {
  CHECK(state_of(2, 2, 2) == GnbState::Normal);
  CHECK(state_of(80, 16, 0) == GnbState::Attack);
  CHECK(state_of(80, 0, 0) == GnbState::Overload);
  CHECK(state_of(80, 16, 16) == GnbState::HighLoad);
  CHECK(state_of(80, 80, 80) == GnbState::Normal);
  // Watermark is inclusive for Normal.
  CHECK(state_of(8, 0, 0) == GnbState::Normal);
  CHECK(state_of(9, 0, 0) == GnbState::Overload);
  // Threshold boundaries: strictly-below for Attack.
  CHECK(state_of(20, 10, 10) == GnbState::Normal);    // r1 = 0.5
  CHECK(state_of(20, 10, 5) == GnbState::HighLoad);   // r1 = 0.25, r2 = 0.5
  CHECK(state_of(20, 10, 4) == GnbState::Attack);     // r2 = 0.4
}

TEST_CASE("sliding window ingest") {
  SlidingWindow w(DetectorConfig{});
  w.ingest(ev(0, MsgKind::Msg3));
  CHECK(w.retained() == 1);
  w.ingest(ev(0, MsgKind::Msg3Rejected));
  w.ingest(ev(0, MsgKind::Msg1));
  CHECK(w.retained() == 1);
  CHECK(w.features(0).n_msg3 == 1);
  CHECK(w.features(624).n_msg3 == 1);
  CHECK(w.features(625).n_msg3 == 0);  // (now - 625, now] excludes t=0

  SlidingWindow o(DetectorConfig{});
  o.ingest(ev(2000, MsgKind::Msg3));
  try {
    o.ingest(ev(1000, MsgKind::Msg3));
    FAIL("expected OrderingError");
  } catch (const OrderingError& e) {
    CHECK(e.previous() == 2000);
    CHECK(e.offending() == 1000);
  }
}

TEST_CASE("streaming detector timeline") {
  const DetectorConfig c;
  CHECK(run_stream({}, c).empty());

  std::vector<RrcEvent> events{ev(10, MsgKind::Msg3), ev(700, MsgKind::Msg4)};
  auto v = run_stream(events, c);
  REQUIRE(v.size() == 4);  // 625, 650, 675, 700
  CHECK(v.front().t_ms == 625);
  CHECK(v.front().features.n_msg3 == 1);
  CHECK(v.back().t_ms == 700);
  CHECK(v.back().features.n_msg4 == 1);
  CHECK(v.back().features.n_msg3 == 0);

  // Trailing non-observable events do not extend the timeline.
  events.push_back(ev(5000, MsgKind::ContextReleased));
  CHECK(run_stream(events, c) == v);

  StreamingDetector d(c);
  d.push(ev(100, MsgKind::Msg3));
  CHECK_THROWS_AS(d.push(ev(99, MsgKind::Msg1)), OrderingError);
}

TEST_CASE("detection latency") {
  std::vector<DetectionVerdict> v(4);
  v[0] = {1000, GnbState::Normal, {}};
  v[1] = {1050, GnbState::Normal, {}};
  v[2] = {1090, GnbState::Attack, {}};
  v[3] = {1131, GnbState::HighLoad, {}};
  CHECK(detection_latency(v, 1000, GnbState::Attack) == 90);
  CHECK(detection_latency(v, 1000, GnbState::HighLoad) == 131);
  CHECK_FALSE(detection_latency(v, 1000, GnbState::Overload));
  // Verdicts before onset do not count.
  CHECK_FALSE(detection_latency(v, 1100, GnbState::Attack));
}

TEST_CASE("config validation") {
  DetectorConfig c;
  CHECK_NOTHROW(validate(c));
  c.r1_threshold = 1.0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = {};
  c.r2_threshold = 0.0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = {};
  c.hop_ms = 700;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = {};
  c.msg3_watermark = 0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  CHECK(parse_state("high_load") == GnbState::HighLoad);
  CHECK_FALSE(parse_state("storm"));
}

TEST_CASE("property: streaming verdicts equal the brute-force oracle") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    CAPTURE(seed);
    Rng rng(seed);
    DetectorConfig c;
    c.window_ms = 50 + static_cast<TimeMs>(rng.below(700));
    c.hop_ms = 1 + static_cast<TimeMs>(rng.below(static_cast<std::uint64_t>(c.window_ms)));
    c.msg3_watermark = 1 + static_cast<std::int64_t>(rng.below(12));
    const auto events = testgen::detector_trace(rng, 1500 + static_cast<TimeMs>(rng.below(2000)));
    REQUIRE(run_stream(events, c) == oracle(events, c));
  }
}

TEST_CASE("property: deleting non-observable events leaves verdicts unchanged") {
  for (std::uint64_t seed = 100; seed <= 160; ++seed) {
    CAPTURE(seed);
    Rng rng(seed);
    const DetectorConfig c;
    const auto events = testgen::detector_trace(rng, 3000);
    std::vector<RrcEvent> observable;
    std::copy_if(events.begin(), events.end(), std::back_inserter(observable),
                 [](const RrcEvent& e) { return is_observable(e.kind); });
    const auto full = run_stream(events, c);
    REQUIRE(full == run_stream(observable, c));
    // Verdicts are one per hop and never lose the Attack/HighLoad exclusivity.
    for (std::size_t i = 1; i < full.size(); ++i) CHECK(full[i].t_ms == full[i - 1].t_ms + c.hop_ms);
    for (const auto& v : full) {
      CHECK(classify_state(v.features, c) == v.state);
      if (v.features.n_msg3 <= c.msg3_watermark) CHECK(v.state == GnbState::Normal);
    }
  }
}

TEST_CASE("property: push in arbitrary batches matches run_stream") {
  Rng rng(5);
  const DetectorConfig c;
  const auto events = testgen::detector_trace(rng, 4000);
  StreamingDetector d(c);
  std::vector<DetectionVerdict> got;
  for (const auto& e : events) {
    const auto b = d.push(e);
    for (const auto& v : b) CHECK(v.t_ms < e.t);
    got.insert(got.end(), b.begin(), b.end());
  }
  const auto tail = d.finish();
  got.insert(got.end(), tail.begin(), tail.end());
  CHECK(got == run_stream(events, c));
  CHECK(d.finish().empty());
}
