#pragma once

// Hand-rolled generators for property tests. Seeded, so a failure names the
// seed that reproduces it.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rrcstorm/events.hpp"
#include "rrcstorm/random.hpp"

namespace rrcstorm::testgen {

inline constexpr MsgKind kAllKinds[] = {MsgKind::Msg1, MsgKind::Msg2, MsgKind::Msg3,
                                        MsgKind::Msg4, MsgKind::Msg5, MsgKind::Msg3Rejected,
                                        MsgKind::ContextReleased};
inline constexpr EstablishmentCause kAllCauses[] = {
    EstablishmentCause::MoData, EstablishmentCause::MoSignalling, EstablishmentCause::Emergency,
    EstablishmentCause::HighPriorityAccess};

// ue refs that stress JSON escaping.
inline std::string ue_ref(Rng& rng) {
  static const char* const kPieces[] = {"a", "x1f", "ue-", "\"", "\\", "\n", "\t", "\x01",
                                        "\xc3\xa9", "\xe2\x82\xac", " ", "0", "/", "{}"};
  const std::size_t n = rng.below(6);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += kPieces[rng.below(std::size(kPieces))];
  return s;
}

/// A well-formed stream: non-decreasing timestamps, cause exactly on Msg3.
inline std::vector<RrcEvent> trace(Rng& rng, std::size_t max_len = 200, TimeMs max_step = 40) {
  std::vector<RrcEvent> out;
  const std::size_t n = rng.below(max_len + 1);
  TimeMs t = static_cast<TimeMs>(rng.below(1000));
  for (std::size_t i = 0; i < n; ++i) {
    // Long quiet gaps now and then, plus bursts at the same timestamp.
    t += rng.below(10) == 0 ? static_cast<TimeMs>(rng.below(2000))
                            : static_cast<TimeMs>(rng.below(static_cast<std::uint64_t>(max_step)));
    RrcEvent ev;
    ev.t = t;
    ev.kind = kAllKinds[rng.below(std::size(kAllKinds))];
    ev.ue_ref = ue_ref(rng);
    if (ev.kind == MsgKind::Msg3) ev.cause = kAllCauses[rng.below(std::size(kAllCauses))];
    out.push_back(std::move(ev));
  }
  return out;
}

/// Observable-heavy stream on a dense time grid, for detector properties.
inline std::vector<RrcEvent> detector_trace(Rng& rng, TimeMs span_ms) {
  std::vector<RrcEvent> out;
  const double p3 = rng.uniform() * 0.3;
  const double p4 = rng.uniform();
  const double p5 = rng.uniform();
  for (TimeMs t = 0; t < span_ms; ++t) {
    const auto roll = [&](double p, MsgKind k) {
      if (rng.uniform() < p) {
        RrcEvent ev{t, k, "u" + std::to_string(out.size()), std::nullopt};
        if (k == MsgKind::Msg3) ev.cause = EstablishmentCause::MoData;
        out.push_back(std::move(ev));
      }
    };
    roll(p3, MsgKind::Msg3);
    roll(p3 * p4, MsgKind::Msg4);
    roll(p3 * p4 * p5, MsgKind::Msg5);
    roll(0.05, MsgKind::Msg1);
    roll(0.03, MsgKind::ContextReleased);
    roll(0.02, MsgKind::Msg3Rejected);
  }
  return out;
}

/// Untruncated Poisson pmf ratio mean over [lo, hi].
inline double truncated_poisson_mean(double lambda, int lo, int hi) {
  double num = 0.0, den = 0.0;
  for (int k = lo; k <= hi; ++k) {
    const double p = std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
    num += k * p;
    den += p;
  }
  return num / den;
}

}  // namespace rrcstorm::testgen
