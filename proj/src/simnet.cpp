#include "rrcstorm/simnet.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <map>
#include <queue>
#include <stdexcept>

namespace rrcstorm::simnet {

void validate(const GnbConfig& gnb) {
  if (gnb.capacity < 1) throw std::invalid_argument("capacity must be >= 1");
  if (gnb.waiting_time_ms <= 0) throw std::invalid_argument("waiting_time_ms must be > 0");
  if (gnb.frame_ms < 1) throw std::invalid_argument("frame_ms must be >= 1");
  if (gnb.max_msg1_per_frame < 1) throw std::invalid_argument("max_msg1_per_frame must be >= 1");
  if (gnb.msg3_to_msg4_delay_ms < 0 || gnb.rach_delay_ms < 0) {
    throw std::invalid_argument("gNB delays must be >= 0");
  }
}

void validate(const ScenarioSpec& spec, const GnbConfig& gnb) {
  validate(gnb);
  if (spec.duration_ms <= 0) throw std::invalid_argument("duration_ms must be > 0");
  if (spec.preconnected_bue < 0 || spec.preconnected_bue > gnb.capacity) {
    throw std::invalid_argument("preconnected_bue must be in [0, capacity]");
  }
  if (spec.kind == ScenarioKind::Attack && !(spec.attacker_rate_per_s > 0.0)) {
    throw std::invalid_argument("attacker_rate_per_s must be > 0");
  }
  if (spec.kind == ScenarioKind::HighLoad && !(spec.benign_fleet_rate_per_s > 0.0)) {
    throw std::invalid_argument("benign_fleet_rate_per_s must be > 0");
  }
  if (spec.background) validate(*spec.background);
  if (spec.background_session_ms < 0) throw std::invalid_argument("background_session_ms must be >= 0");
  if (spec.fleet_session_ms && *spec.fleet_session_ms < 0) {
    throw std::invalid_argument("fleet_session_ms must be >= 0");
  }
  if (spec.onset_ms < 0 || spec.onset_jitter_ms < 0) {
    throw std::invalid_argument("onset_ms and onset_jitter_ms must be >= 0");
  }
  if (spec.msg4_to_msg5_delay_ms < 0) throw std::invalid_argument("msg4_to_msg5_delay_ms must be >= 0");
  if (spec.t300_ms < 1) throw std::invalid_argument("t300_ms must be >= 1");
  if (spec.benign_max_retries < 0) throw std::invalid_argument("benign_max_retries must be >= 0");
}

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Attack: return "attack";
    case ScenarioKind::HighLoad: return "high_load";
    case ScenarioKind::Normal: return "normal";
  }
  return "unknown";
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view text) {
  if (text == "attack") return ScenarioKind::Attack;
  if (text == "high_load" || text == "highload") return ScenarioKind::HighLoad;
  if (text == "normal") return ScenarioKind::Normal;
  return std::nullopt;
}

Msg3Decision gnb_on_msg3(ResourcePool& pool, const RrcEvent& msg3, const GnbConfig& gnb) {
  if (msg3.kind != MsgKind::Msg3) throw std::invalid_argument("gnb_on_msg3: event is not Msg3");
  const auto expiry = pool.reserve(msg3.ue_ref, msg3.t);
  if (!expiry) return Msg3Decision{};
  return Msg3Decision{true, msg3.t + gnb.msg3_to_msg4_delay_ms, *expiry};
}

Msg5Outcome gnb_on_msg5(ResourcePool& pool, const RrcEvent& msg5) {
  if (msg5.kind != MsgKind::Msg5) throw std::invalid_argument("gnb_on_msg5: event is not Msg5");
  return pool.complete(msg5.ue_ref, msg5.t) ? Msg5Outcome::Connected : Msg5Outcome::Ignored;
}

TimeMs attack_cycle_time(TimeMs onset_ms, double rate_per_s, std::int64_t k) {
  const double period_ms = 1000.0 / rate_per_s;
  return onset_ms + static_cast<TimeMs>(std::floor(static_cast<double>(k) * period_ms + 0.5));
}

SimResult measure(std::vector<RrcEvent> trace, std::optional<TimeMs> onset_ms,
                  TimeMs waiting_time_ms) {
  SimResult r;
  r.onset_ms = onset_ms;
  const TimeMs origin = onset_ms.value_or(0);

  std::int64_t total_msg3 = 0;
  std::optional<std::size_t> drop_index;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const RrcEvent& ev = trace[i];
    if (ev.kind == MsgKind::Msg3) ++total_msg3;
    if (ev.kind == MsgKind::Msg3Rejected) {
      ++r.rejected_msg3;
      if (!drop_index && ev.t >= origin) drop_index = i;
    }
    if (onset_ms && ev.t >= *onset_ms && ev.t < *onset_ms + waiting_time_ms) {
      if (ev.kind == MsgKind::Msg3) ++r.period_accepted;
      if (ev.kind == MsgKind::Msg3Rejected) {
        ++r.period_rejected;
        --r.period_accepted;
      }
    }
  }
  r.accepted_msg3 = total_msg3 - r.rejected_msg3;

  if (drop_index) {
    r.drop_at_ms = trace[*drop_index].t;
    r.drop_time_ms = *r.drop_at_ms - origin;
    for (std::size_t i = *drop_index + 1; i < trace.size(); ++i) {
      if (trace[i].kind == MsgKind::ContextReleased) {
        r.duration_reject_ms = trace[i].t - *r.drop_at_ms;
        break;
      }
    }
  }
  if (onset_ms && r.period_accepted + r.period_rejected > 0) {
    r.period_availability_pct = 100.0 * static_cast<double>(r.period_accepted) /
                                static_cast<double>(r.period_accepted + r.period_rejected);
  }
  r.trace = std::move(trace);
  return r;
}

namespace {

enum class Action : std::uint8_t {
  AttackCycle,
  BackgroundTick,
  FleetArrival,
  Msg1,
  Msg2,
  Msg3,
  Msg4,
  Msg5,
  Expiry,
  Disconnect,
  T300,
};

struct Scheduled {
  TimeMs t;
  std::uint64_t seq;
  Action action;
  std::uint32_t ue;
  std::int64_t aux;
};

struct Later {
  bool operator()(const Scheduled& a, const Scheduled& b) const {
    return a.t != b.t ? a.t > b.t : a.seq > b.seq;
  }
};

enum class Role : std::uint8_t { Attacker, Background, Fleet };

struct Ue {
  Role role;
  std::string ref;
  std::int64_t attempts = 0;
  bool awaiting_msg4 = false;
};

// Separate RNG streams so that, e.g., enabling background traffic does not
// perturb the attacker's identities.
enum Stream : std::uint64_t { kAttackerIds = 1, kBackground = 2, kFleet = 3, kOnset = 4 };

class Engine {
 public:
  Engine(const ScenarioSpec& spec, const GnbConfig& gnb, const EventSink& sink)
      : spec_(spec),
        gnb_(gnb),
        sink_(sink),
        pool_(gnb.capacity, gnb.waiting_time_ms),
        attacker_rng_(mix_seed(spec.seed, kAttackerIds)),
        background_rng_(mix_seed(spec.seed, kBackground)),
        fleet_rng_(mix_seed(spec.seed, kFleet)) {}

  SimResult run() {
    for (std::int64_t i = 0; i < spec_.preconnected_bue; ++i) {
      pool_.add_connected(std::string(1, ue_prefix::kPreconnected) + std::to_string(i));
    }

    Rng onset_rng(mix_seed(spec_.seed, kOnset));
    TimeMs onset = spec_.onset_ms;
    if (spec_.onset_jitter_ms > 0) {
      onset += static_cast<TimeMs>(onset_rng.below(static_cast<std::uint64_t>(spec_.onset_jitter_ms)));
    }
    if (spec_.background) schedule(0, Action::BackgroundTick, 0, 0);
    switch (spec_.kind) {
      case ScenarioKind::Attack:
        attack_onset_ = onset;
        schedule(onset, Action::AttackCycle, 0, 0);
        break;
      case ScenarioKind::HighLoad:
        fleet_clock_ms_ = static_cast<double>(onset);
        schedule(onset, Action::FleetArrival, 0, 0);
        break;
      case ScenarioKind::Normal:
        break;
    }

    while (!queue_.empty() && queue_.top().t <= spec_.duration_ms) {
      const Scheduled s = queue_.top();
      queue_.pop();
      dispatch(s);
    }
    return measure(std::move(trace_), onset_ms_, gnb_.waiting_time_ms);
  }

 private:
  void schedule(TimeMs t, Action a, std::uint32_t ue, std::int64_t aux) {
    queue_.push(Scheduled{t, next_seq_++, a, ue, aux});
  }

  void emit(TimeMs t, MsgKind kind, const std::string& ref,
            std::optional<EstablishmentCause> cause = std::nullopt) {
    trace_.push_back(RrcEvent{t, kind, ref, cause});
    if (sink_) sink_(trace_.back());
  }

  std::uint32_t spawn(Role role, std::string ref) {
    ues_.push_back(Ue{role, std::move(ref)});
    return static_cast<std::uint32_t>(ues_.size() - 1);
  }

  // Earliest instant >= t in a frame that still admits a Msg1.
  TimeMs admit_msg1(TimeMs t) {
    std::int64_t frame = t / gnb_.frame_ms;
    frame_load_.erase(frame_load_.begin(), frame_load_.lower_bound(frame));
    while (frame_load_[frame] >= gnb_.max_msg1_per_frame) ++frame;
    ++frame_load_[frame];
    return std::max(t, frame * gnb_.frame_ms);
  }

  void start_rach(std::uint32_t ue, TimeMs now) {
    schedule(admit_msg1(now), Action::Msg1, ue, 0);
  }

  std::string fresh_attacker_ref() {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%c%016" PRIx64, ue_prefix::kAttacker,
                  attacker_rng_.next_u64());
    return buf;
  }

  void dispatch(const Scheduled& s) {
    switch (s.action) {
      case Action::AttackCycle: on_attack_cycle(s.t, s.aux); break;
      case Action::BackgroundTick: on_background_tick(s.t); break;
      case Action::FleetArrival: on_fleet_arrival(s.t); break;
      case Action::Msg1:
        emit(s.t, MsgKind::Msg1, ues_[s.ue].ref);
        schedule(s.t + gnb_.rach_delay_ms, Action::Msg2, s.ue, 0);
        break;
      case Action::Msg2:
        emit(s.t, MsgKind::Msg2, ues_[s.ue].ref);
        schedule(s.t + gnb_.rach_delay_ms, Action::Msg3, s.ue, 0);
        break;
      case Action::Msg3: on_msg3(s.t, s.ue); break;
      case Action::Msg4: on_msg4(s.t, s.ue); break;
      case Action::Msg5: on_msg5(s.t, s.ue); break;
      case Action::Expiry:
        if (pool_.expire(ues_[s.ue].ref, s.aux, s.t)) {
          emit(s.t, MsgKind::ContextReleased, ues_[s.ue].ref);
        }
        break;
      case Action::Disconnect:
        if (pool_.disconnect(ues_[s.ue].ref)) emit(s.t, MsgKind::ContextReleased, ues_[s.ue].ref);
        break;
      case Action::T300: on_t300(s.t, s.ue, s.aux); break;
    }
  }

  // One Msg1 -> Msg2 -> Msg3 cycle under a fresh identity. Msg4 is ignored,
  // Msg5 is never sent and T300 is never armed.
  void on_attack_cycle(TimeMs now, std::int64_t k) {
    const std::uint32_t ue = spawn(Role::Attacker, fresh_attacker_ref());
    attack_cycle_of_[ue] = k;
    start_rach(ue, now);
  }

  void on_background_tick(TimeMs now) {
    const std::int64_t n = truncated_poisson_sample(*spec_.background, background_rng_);
    for (std::int64_t i = 0; i < n; ++i) {
      const std::uint32_t ue =
          spawn(Role::Background, std::string(1, ue_prefix::kBackground) + std::to_string(next_benign_id_++));
      start_rach(ue, now);
    }
    schedule(now + spec_.background->tick_ms, Action::BackgroundTick, 0, 0);
  }

  void on_fleet_arrival(TimeMs now) {
    const std::uint32_t ue =
        spawn(Role::Fleet, std::string(1, ue_prefix::kFleet) + std::to_string(next_benign_id_++));
    start_rach(ue, now);
    fleet_clock_ms_ += 1000.0 * fleet_rng_.exponential(spec_.benign_fleet_rate_per_s);
    const auto next = std::max(now, static_cast<TimeMs>(std::floor(fleet_clock_ms_ + 0.5)));
    schedule(next, Action::FleetArrival, 0, 0);
  }

  void on_msg3(TimeMs now, std::uint32_t id) {
    Ue& ue = ues_[id];
    const EstablishmentCause cause =
        ue.role == Role::Attacker ? spec_.attacker_cause : spec_.benign_cause;
    emit(now, MsgKind::Msg3, ue.ref, cause);
    if (!onset_ms_ && ue.role != Role::Background) onset_ms_ = now;

    const Msg3Decision d = gnb_on_msg3(pool_, trace_.back(), gnb_);
    if (d.accepted) {
      schedule(d.msg4_at_ms, Action::Msg4, id, 0);
      schedule(d.expiry_ms, Action::Expiry, id, d.expiry_ms);
    } else {
      emit(now, MsgKind::Msg3Rejected, ue.ref);
    }

    if (ue.role == Role::Attacker) {
      // Msg3 sent: trigger the next RACH on the nominal attack grid.
      const std::int64_t k = attack_cycle_of_.at(id) + 1;
      attack_cycle_of_.erase(id);
      const TimeMs next = attack_cycle_time(attack_onset_, spec_.attacker_rate_per_s, k);
      schedule(std::max(next, now), Action::AttackCycle, 0, k);
    } else {
      ++ue.attempts;
      ue.awaiting_msg4 = true;
      schedule(now + spec_.t300_ms, Action::T300, id, ue.attempts);
    }
  }

  void on_msg4(TimeMs now, std::uint32_t id) {
    Ue& ue = ues_[id];
    emit(now, MsgKind::Msg4, ue.ref);
    if (ue.role == Role::Attacker || !ue.awaiting_msg4) return;
    ue.awaiting_msg4 = false;
    schedule(now + spec_.msg4_to_msg5_delay_ms, Action::Msg5, id, 0);
  }

  void on_msg5(TimeMs now, std::uint32_t id) {
    const Ue& ue = ues_[id];
    emit(now, MsgKind::Msg5, ue.ref);
    const auto held = pool_.find(ue.ref);
    if (gnb_on_msg5(pool_, trace_.back()) != Msg5Outcome::Connected) {
      // A late Msg5 drops the pending context; record the release it implies.
      if (held && held->state == ResourcePool::State::Pending) {
        emit(now, MsgKind::ContextReleased, ue.ref);
      }
      return;
    }
    if (ue.role == Role::Background) {
      schedule(now + spec_.background_session_ms, Action::Disconnect, id, 0);
    } else if (ue.role == Role::Fleet && spec_.fleet_session_ms) {
      schedule(now + *spec_.fleet_session_ms, Action::Disconnect, id, 0);
    }
  }

  void on_t300(TimeMs now, std::uint32_t id, std::int64_t attempt) {
    Ue& ue = ues_[id];
    if (!ue.awaiting_msg4 || ue.attempts != attempt) return;
    if (pool_.find(ue.ref)) return;  // accepted, Msg4 still in flight
    if (ue.attempts - 1 >= spec_.benign_max_retries) {
      ue.awaiting_msg4 = false;  // give up
      return;
    }
    start_rach(id, now);
  }

  const ScenarioSpec& spec_;
  const GnbConfig& gnb_;
  const EventSink& sink_;
  ResourcePool pool_;
  Rng attacker_rng_;
  Rng background_rng_;
  Rng fleet_rng_;

  std::priority_queue<Scheduled, std::vector<Scheduled>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  std::vector<Ue> ues_;
  std::map<std::uint32_t, std::int64_t> attack_cycle_of_;
  std::map<std::int64_t, std::int64_t> frame_load_;
  std::vector<RrcEvent> trace_;

  std::optional<TimeMs> onset_ms_;
  TimeMs attack_onset_ = 0;
  double fleet_clock_ms_ = 0.0;
  std::uint64_t next_benign_id_ = 0;
};

}  // namespace

SimResult run(const ScenarioSpec& scenario, const GnbConfig& gnb, const EventSink& sink) {
  validate(scenario, gnb);
  return Engine(scenario, gnb, sink).run();
}

}  // namespace rrcstorm::simnet
