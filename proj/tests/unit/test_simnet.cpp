#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "rrcstorm/simnet.hpp"

using namespace rrcstorm;
using namespace rrcstorm::simnet;

namespace {

std::int64_t count(const SimResult& r, MsgKind k) {
  return std::count_if(r.trace.begin(), r.trace.end(), [k](const RrcEvent& e) { return e.kind == k; });
}

ScenarioSpec attack(TimeMs duration, double rate = 132.07) {
  ScenarioSpec s;
  s.kind = ScenarioKind::Attack;
  s.duration_ms = duration;
  s.attacker_rate_per_s = rate;
  return s;
}

GnbConfig uncapped() {
  GnbConfig g;
  g.max_msg1_per_frame = 1'000'000;
  return g;
}

bool is_attacker(const RrcEvent& e) { return !e.ue_ref.empty() && e.ue_ref[0] == ue_prefix::kAttacker; }

// Pool occupancy implied by the trace never leaves [0, capacity].
void check_conservation(const SimResult& r, std::int64_t capacity, std::int64_t preconnected) {
  std::int64_t live = preconnected;
  std::int64_t msg3 = 0;
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const RrcEvent& e = r.trace[i];
    if (e.kind == MsgKind::Msg3) {
      ++msg3;
      ++live;
    } else if (e.kind == MsgKind::Msg3Rejected) {
      REQUIRE(i > 0);
      CHECK(r.trace[i - 1].kind == MsgKind::Msg3);
      CHECK(r.trace[i - 1].ue_ref == e.ue_ref);
      CHECK(r.trace[i - 1].t == e.t);
      --live;
    } else if (e.kind == MsgKind::ContextReleased) {
      --live;
    }
    // A rejected Msg3 is momentarily counted until its rejection record.
    const bool rejected_next = e.kind == MsgKind::Msg3 && i + 1 < r.trace.size() &&
                               r.trace[i + 1].kind == MsgKind::Msg3Rejected;
    REQUIRE(live >= 0);
    if (!rejected_next) REQUIRE(live <= capacity);
  }
  CHECK(r.accepted_msg3 + r.rejected_msg3 == msg3);
  CHECK(r.rejected_msg3 == count(r, MsgKind::Msg3Rejected));
}

}  // namespace

TEST_CASE("attack at reference settings drops after the free contexts fill") {
  const auto r = run(attack(3000), GnbConfig{});
  REQUIRE(r.onset_ms == 0);
  REQUIRE(r.drop_time_ms);
  CHECK(*r.drop_time_ms >= 120);
  CHECK(*r.drop_time_ms <= 160);
  CHECK(r.period_accepted == 16);
  CHECK(r.duration_accept_ms() == r.drop_time_ms);
  // First release is the first expiry, one waiting time after the first accept.
  REQUIRE(r.duration_reject_ms);
  CHECK(*r.drop_at_ms + *r.duration_reject_ms == 2700);
  check_conservation(r, 16, 0);
}

TEST_CASE("hand-traced capacity-2 schedule") {
  GnbConfig g = uncapped();
  g.capacity = 2;
  g.waiting_time_ms = 1000;
  g.msg3_to_msg4_delay_ms = 0;
  const auto r = run(attack(25, 100.0), g);

  std::vector<std::pair<TimeMs, MsgKind>> msg3s;
  for (const auto& e : r.trace) {
    if (e.kind == MsgKind::Msg3 || e.kind == MsgKind::Msg3Rejected) msg3s.emplace_back(e.t, e.kind);
  }
  const std::vector<std::pair<TimeMs, MsgKind>> expected{
      {0, MsgKind::Msg3}, {10, MsgKind::Msg3}, {20, MsgKind::Msg3}, {20, MsgKind::Msg3Rejected}};
  CHECK(msg3s == expected);
  CHECK(r.accepted_msg3 == 2);
  // The pool is full from t=10; the drop is measured at the first rejection.
  CHECK(r.drop_time_ms == 20);
}

TEST_CASE("attacker cadence follows the configured rate") {
  const auto r = run(attack(2999, 132.07), uncapped());
  const auto in = [&](TimeMs lo, TimeMs hi) {
    return std::count_if(r.trace.begin(), r.trace.end(), [&](const RrcEvent& e) {
      return e.kind == MsgKind::Msg3 && e.t >= lo && e.t < hi;
    });
  };
  CHECK(in(1000, 2000) == 132);

  const auto slow = run(attack(2999, 1.0), uncapped());
  std::vector<TimeMs> times;
  for (const auto& e : slow.trace) if (e.kind == MsgKind::Msg3) times.push_back(e.t);
  CHECK(times == std::vector<TimeMs>{0, 1000, 2000});

  CHECK(attack_cycle_time(1000, 132.07, 0) == 1000);
  CHECK(attack_cycle_time(1000, 132.07, 1) == 1008);
  CHECK(attack_cycle_time(0, 132.07, 132) == 999);
}

TEST_CASE("attacker never completes and uses a fresh identity per cycle") {
  const auto r = run(attack(2600), GnbConfig{});
  std::map<std::string, int> msg3_per_ref;
  for (const auto& e : r.trace) {
    CHECK(is_attacker(e));
    CHECK(e.kind != MsgKind::Msg5);
    if (e.kind == MsgKind::Msg3) {
      CHECK(e.cause == EstablishmentCause::Emergency);
      ++msg3_per_ref[e.ue_ref];
    }
  }
  for (const auto& [ref, n] : msg3_per_ref) CHECK(n == 1);
  CHECK(count(r, MsgKind::Msg4) == 16);
}

TEST_CASE("frame cap limits Msg1 admissions per frame") {
  const auto r = run(attack(1000, 500.0), GnbConfig{});
  std::map<TimeMs, int> per_frame;
  for (const auto& e : r.trace) if (e.kind == MsgKind::Msg1) ++per_frame[e.t / 7];
  for (const auto& [frame, n] : per_frame) CHECK(n <= 1);
}

TEST_CASE("benign UE completes after Msg4 and retries on T300") {
  ScenarioSpec s;
  s.kind = ScenarioKind::HighLoad;
  s.benign_fleet_rate_per_s = 1e-6;  // a single arrival at onset
  s.duration_ms = 10'000;
  s.onset_ms = 100;

  auto r = run(s, GnbConfig{});
  std::vector<std::pair<TimeMs, MsgKind>> got;
  for (const auto& e : r.trace) got.emplace_back(e.t, e.kind);
  const std::vector<std::pair<TimeMs, MsgKind>> ok{{100, MsgKind::Msg1}, {100, MsgKind::Msg2},
                                                   {100, MsgKind::Msg3}, {101, MsgKind::Msg4},
                                                   {111, MsgKind::Msg5}};
  CHECK(got == ok);
  CHECK(r.onset_ms == 100);
  CHECK(r.trace[2].cause == EstablishmentCause::MoData);

  // Full for the whole run: initial attempt plus three retransmissions, 1 s apart.
  s.preconnected_bue = 16;
  r = run(s, GnbConfig{});
  std::vector<TimeMs> msg3;
  for (const auto& e : r.trace) {
    CHECK(e.kind != MsgKind::Msg5);
    if (e.kind == MsgKind::Msg3) msg3.push_back(e.t);
  }
  CHECK(msg3 == std::vector<TimeMs>{100, 1100, 2100, 3100});
  CHECK(r.accepted_msg3 == 0);
  CHECK(r.drop_time_ms == 0);
}

TEST_CASE("normal background traffic never drops") {
  ScenarioSpec s;
  s.kind = ScenarioKind::Normal;
  s.background = TruncatedPoissonSpec{};
  s.duration_ms = 60'000;
  const auto r = run(s, GnbConfig{});
  CHECK_FALSE(r.drop_time_ms);
  CHECK(r.rejected_msg3 == 0);
  CHECK_FALSE(r.onset_ms);
  CHECK(r.accepted_msg3 > 0);
  // Roughly lambda-mean setups per tick.
  CHECK(r.accepted_msg3 > 600 * 1.4);
  CHECK(r.accepted_msg3 < 600 * 1.8);
  check_conservation(r, 16, 0);
}

TEST_CASE("onset jitter is seeded and bounded") {
  auto s = attack(1500);
  s.onset_ms = 1000;
  s.onset_jitter_ms = 100;
  std::set<TimeMs> onsets;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    s.seed = seed;
    const auto r = run(s, GnbConfig{});
    REQUIRE(r.onset_ms);
    CHECK(*r.onset_ms >= 1000);
    CHECK(*r.onset_ms < 1100 + 7);  // frame alignment may push the first Msg1
    onsets.insert(*r.onset_ms);
  }
  CHECK(onsets.size() > 5);
}

TEST_CASE("sink sees the trace in order") {
  std::vector<RrcEvent> seen;
  const auto r = run(attack(500), GnbConfig{}, [&](const RrcEvent& e) { seen.push_back(e); });
  CHECK(seen == r.trace);
  CHECK_FALSE(validate_stream(r.trace));
}

TEST_CASE("measure on a hand-built trace") {
  const std::vector<RrcEvent> t{
      {5, MsgKind::Msg3, "a", EstablishmentCause::MoData},
      {10, MsgKind::Msg3, "x1", EstablishmentCause::Emergency},
      {12, MsgKind::Msg3, "x2", EstablishmentCause::Emergency},
      {12, MsgKind::Msg3Rejected, "x2", std::nullopt},
      {30, MsgKind::ContextReleased, "a", std::nullopt},
      {40, MsgKind::Msg3, "x3", EstablishmentCause::Emergency},
  };
  const auto r = measure(t, 10, 25);
  CHECK(r.drop_at_ms == 12);
  CHECK(r.drop_time_ms == 2);
  CHECK(r.duration_reject_ms == 18);
  CHECK(r.accepted_msg3 == 3);
  CHECK(r.rejected_msg3 == 1);
  CHECK(r.period_accepted == 1);
  CHECK(r.period_rejected == 1);
  CHECK(r.period_availability_pct == doctest::Approx(50.0));

  const auto none = measure({}, std::nullopt, 100);
  CHECK_FALSE(none.drop_time_ms);
  CHECK_FALSE(none.period_availability_pct);
}

TEST_CASE("configuration validation") {
  GnbConfig g;
  g.capacity = 0;
  CHECK_THROWS_AS(validate(g), std::invalid_argument);
  g = GnbConfig{};
  g.frame_ms = 0;
  CHECK_THROWS_AS(validate(g), std::invalid_argument);

  auto s = attack(100);
  s.preconnected_bue = 17;
  CHECK_THROWS_AS(run(s, GnbConfig{}), std::invalid_argument);
  s = attack(100, 0.0);
  CHECK_THROWS_AS(run(s, GnbConfig{}), std::invalid_argument);
  s = attack(0);
  CHECK_THROWS_AS(run(s, GnbConfig{}), std::invalid_argument);
  CHECK(parse_scenario_kind("high_load") == ScenarioKind::HighLoad);
  CHECK_FALSE(parse_scenario_kind("storm"));
}

TEST_CASE("property: random scenarios are deterministic and conserve contexts") {
  Rng gen(77);
  for (int i = 0; i < 40; ++i) {
    ScenarioSpec s;
    GnbConfig g;
    g.capacity = 1 + static_cast<std::int64_t>(gen.below(20));
    g.waiting_time_ms = 5 + static_cast<TimeMs>(gen.below(1500));
    g.max_msg1_per_frame = 1 + static_cast<std::int64_t>(gen.below(4));
    g.msg3_to_msg4_delay_ms = static_cast<TimeMs>(gen.below(4));
    g.rach_delay_ms = static_cast<TimeMs>(gen.below(3));
    s.kind = static_cast<ScenarioKind>(gen.below(3));
    s.seed = gen.next_u64();
    s.duration_ms = 500 + static_cast<TimeMs>(gen.below(3000));
    s.preconnected_bue = static_cast<std::int64_t>(gen.below(static_cast<std::uint64_t>(g.capacity) + 1));
    s.attacker_rate_per_s = 10.0 + gen.uniform() * 300.0;
    s.benign_fleet_rate_per_s = 5.0 + gen.uniform() * 100.0;
    if (gen.below(2)) s.background = TruncatedPoissonSpec{};
    if (gen.below(2)) s.fleet_session_ms = static_cast<TimeMs>(gen.below(500));
    s.onset_ms = static_cast<TimeMs>(gen.below(300));
    s.onset_jitter_ms = static_cast<TimeMs>(gen.below(50));
    s.msg4_to_msg5_delay_ms = static_cast<TimeMs>(gen.below(40));
    s.t300_ms = 1 + static_cast<TimeMs>(gen.below(400));
    CAPTURE(i);

    const auto a = run(s, g);
    const auto b = run(s, g);
    REQUIRE(a.trace == b.trace);
    CHECK_FALSE(validate_stream(a.trace));
    check_conservation(a, g.capacity, s.preconnected_bue);
    for (const auto& e : a.trace) {
      CHECK(e.t <= s.duration_ms);
      if (is_attacker(e)) CHECK(e.kind != MsgKind::Msg5);
    }
    if (a.onset_ms) CHECK(*a.onset_ms >= s.onset_ms);
  }
}
