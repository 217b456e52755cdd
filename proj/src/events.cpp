#include "rrcstorm/events.hpp"

#include <array>
#include <utility>

namespace rrcstorm {

namespace {

constexpr std::array<std::pair<MsgKind, std::string_view>, 7> kKindNames{{
    {MsgKind::Msg1, "msg1"},
    {MsgKind::Msg2, "msg2"},
    {MsgKind::Msg3, "msg3"},
    {MsgKind::Msg4, "msg4"},
    {MsgKind::Msg5, "msg5"},
    {MsgKind::Msg3Rejected, "msg3_rejected"},
    {MsgKind::ContextReleased, "context_released"},
}};

constexpr std::array<std::pair<EstablishmentCause, std::string_view>, 4> kCauseNames{{
    {EstablishmentCause::MoData, "mo_data"},
    {EstablishmentCause::MoSignalling, "mo_signalling"},
    {EstablishmentCause::Emergency, "emergency"},
    {EstablishmentCause::HighPriorityAccess, "high_priority_access"},
}};

}  // namespace

std::optional<StreamViolation> validate_stream(std::span<const RrcEvent> events) {
  using Reason = StreamViolation::Reason;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const RrcEvent& ev = events[i];
    if (ev.t < 0) return StreamViolation{i, Reason::NegativeTimestamp};
    if (i > 0 && ev.t < events[i - 1].t) return StreamViolation{i, Reason::TimestampRegression};
    const bool is_msg3 = ev.kind == MsgKind::Msg3;
    if (is_msg3 && !ev.cause) return StreamViolation{i, Reason::MissingCause};
    if (!is_msg3 && ev.cause) return StreamViolation{i, Reason::UnexpectedCause};
  }
  return std::nullopt;
}

std::string_view to_string(MsgKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::string_view to_string(EstablishmentCause cause) {
  for (const auto& [c, name] : kCauseNames) {
    if (c == cause) return name;
  }
  return "unknown";
}

std::string_view to_string(StreamViolation::Reason reason) {
  switch (reason) {
    case StreamViolation::Reason::TimestampRegression: return "timestamp regression";
    case StreamViolation::Reason::NegativeTimestamp: return "negative timestamp";
    case StreamViolation::Reason::MissingCause: return "msg3 without establishment cause";
    case StreamViolation::Reason::UnexpectedCause: return "establishment cause on non-msg3 event";
  }
  return "unknown";
}

std::optional<MsgKind> parse_msg_kind(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

std::optional<EstablishmentCause> parse_cause(std::string_view text) {
  for (const auto& [c, name] : kCauseNames) {
    if (name == text) return c;
  }
  return std::nullopt;
}

}  // namespace rrcstorm
