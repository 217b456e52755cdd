#include "rrcstorm/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace rrcstorm::analytic {

void validate(const AnalyticInputs& in) {
  if (!(in.waiting_time_ms > 0.0)) throw std::invalid_argument("waiting time must be > 0");
  if (in.capacity < 1) throw std::invalid_argument("capacity must be >= 1");
  if (in.connected_benign < 0 || in.connected_benign > in.capacity) {
    throw std::invalid_argument("connected benign UEs must be in [0, capacity]");
  }
  if (!(in.attacker_rate_per_s > 0.0)) throw std::invalid_argument("attacker rate must be > 0");
  if (!(in.benign_rate_per_s >= 0.0)) throw std::invalid_argument("benign rate must be >= 0");
}

std::int64_t round_count(double value) {
  return static_cast<std::int64_t>(std::floor(value + 0.5));
}

double drop_time_ms(const AnalyticInputs& in) {
  validate(in);
  // Free contexts divided by the attacker rate; with no connected UEs the
  // free count is simply the capacity.
  const auto free_contexts = static_cast<double>(in.capacity - in.connected_benign);
  return 1000.0 * free_contexts / in.attacker_rate_per_s;
}

Durations accept_reject_durations(const AnalyticInputs& in) {
  const double drop = drop_time_ms(in);
  if (drop > in.waiting_time_ms) return Durations{drop, 0.0, false};
  return Durations{drop, in.waiting_time_ms - drop, true};
}

std::int64_t accepted_count(const AnalyticInputs& in) {
  validate(in);
  return in.capacity - in.connected_benign;
}

RejectedCounts rejected_count(double reject_ms, double attacker_rate_per_s,
                              double benign_rate_per_s) {
  if (reject_ms < 0.0) throw std::invalid_argument("reject duration must be >= 0");
  if (attacker_rate_per_s < 0.0 || benign_rate_per_s < 0.0) {
    throw std::invalid_argument("rates must be >= 0");
  }
  const double reject_s = reject_ms / 1000.0;
  return RejectedCounts{round_count(reject_s * (attacker_rate_per_s + benign_rate_per_s)),
                        round_count(reject_s * attacker_rate_per_s), true};
}

RejectedCounts rejected_count(const AnalyticInputs& in) {
  const Durations d = accept_reject_durations(in);
  if (!d.overload) return RejectedCounts{0, 0, false};
  return rejected_count(d.reject_ms, in.attacker_rate_per_s, in.benign_rate_per_s);
}

Availability availability_rate(std::span<const std::int64_t> accepted,
                               std::span<const std::int64_t> rejected) {
  if (accepted.size() != rejected.size()) {
    throw std::invalid_argument("accepted and rejected lists differ in length");
  }
  if (accepted.empty()) throw std::invalid_argument("availability needs at least one repetition");
  std::int64_t sum_accepted = 0;
  std::int64_t sum_total = 0;
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    if (accepted[i] < 0 || rejected[i] < 0) throw std::invalid_argument("negative count");
    sum_accepted += accepted[i];
    sum_total += accepted[i] + rejected[i];
  }
  if (sum_total == 0) throw std::invalid_argument("availability undefined: no Msg3 observed");
  const double avail = 100.0 * static_cast<double>(sum_accepted) / static_cast<double>(sum_total);
  return Availability{avail, 100.0 - avail};
}

AnalyticOutputs full_model(const AnalyticInputs& in) {
  const Durations d = accept_reject_durations(in);
  AnalyticOutputs out;
  out.accepted = accepted_count(in);
  out.drop_time_ms = d.accept_ms;
  out.accept_ms = d.accept_ms;
  out.reject_ms = d.reject_ms;
  out.overload = d.overload;
  out.rejected = d.overload ? rejected_count(d.reject_ms, in.attacker_rate_per_s,
                                             in.benign_rate_per_s).exact
                            : 0;
  if (out.accepted + out.rejected == 0) {
    // Full occupancy and no overload window: nothing was offered to the pool.
    out.availability_pct = 0.0;
  } else {
    const std::int64_t a[] = {out.accepted};
    const std::int64_t r[] = {out.rejected};
    out.availability_pct = availability_rate(a, r).available_pct;
  }
  return out;
}

}  // namespace rrcstorm::analytic
