#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace rrcstorm {

/// Simulated clock, integer milliseconds from 0.
using TimeMs = std::int64_t;

enum class MsgKind : std::uint8_t {
  Msg1,             // RA preamble
  Msg2,             // RA response
  Msg3,             // RRC Setup Request
  Msg4,             // RRC Setup
  Msg5,             // RRC Setup Complete
  Msg3Rejected,     // gNB had no free context (simulator annotation)
  ContextReleased,  // waiting-time expiry or UE disconnect (simulator annotation)
};

enum class EstablishmentCause : std::uint8_t {
  MoData,
  MoSignalling,
  Emergency,
  HighPriorityAccess,
};

/// One observed control-plane message. `ue_ref` is opaque outside the
/// simulator; `cause` is set exactly on Msg3 events.
struct RrcEvent {
  TimeMs t = 0;
  MsgKind kind = MsgKind::Msg1;
  std::string ue_ref;
  std::optional<EstablishmentCause> cause;

  bool operator==(const RrcEvent&) const = default;
};

struct StreamViolation {
  enum class Reason : std::uint8_t {
    TimestampRegression,
    NegativeTimestamp,
    MissingCause,
    UnexpectedCause,
  };
  std::size_t index = 0;
  Reason reason = Reason::TimestampRegression;

  bool operator==(const StreamViolation&) const = default;
};

/// First violation in `events`, or nullopt when the stream is well formed.
std::optional<StreamViolation> validate_stream(std::span<const RrcEvent> events);

std::string_view to_string(MsgKind kind);
std::string_view to_string(EstablishmentCause cause);
std::string_view to_string(StreamViolation::Reason reason);

std::optional<MsgKind> parse_msg_kind(std::string_view text);
std::optional<EstablishmentCause> parse_cause(std::string_view text);

/// Msg3, Msg4 and Msg5 are the only kinds an external observer sees.
constexpr bool is_observable(MsgKind kind) {
  return kind == MsgKind::Msg3 || kind == MsgKind::Msg4 || kind == MsgKind::Msg5;
}

}  // namespace rrcstorm
