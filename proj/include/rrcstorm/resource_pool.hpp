#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rrcstorm/events.hpp"

namespace rrcstorm::simnet {

/// The gNB's bounded set of UE contexts. A context is either Pending (held
/// for the waiting time while the gNB awaits Msg5) or Connected.
class ResourcePool {
 public:
  enum class State : std::uint8_t { Pending, Connected };

  struct Entry {
    State state = State::Pending;
    TimeMs expiry_ms = 0;  // meaningful only while Pending
  };

  ResourcePool(std::int64_t capacity, TimeMs waiting_time_ms);

  std::int64_t capacity() const { return capacity_; }
  TimeMs waiting_time_ms() const { return waiting_time_ms_; }
  std::int64_t size() const { return static_cast<std::int64_t>(contexts_.size()); }
  bool full() const { return size() >= capacity_; }
  std::int64_t pending_count() const;
  std::int64_t connected_count() const;

  /// Reserves a Pending context expiring at now + waiting time. Returns the
  /// expiry, or nullopt when no context is free. Reserving a ue_ref that
  /// already holds a context is a logic error.
  std::optional<TimeMs> reserve(const std::string& ue_ref, TimeMs now);

  /// Pending -> Connected when `now` is strictly before the expiry. A
  /// Pending entry whose expiry has passed is dropped and reported false.
  bool complete(const std::string& ue_ref, TimeMs now);

  /// Removes the Pending entry for `ue_ref` if its expiry is `expiry_ms` and
  /// has been reached. Stale expiries (entry since connected or replaced)
  /// are ignored.
  bool expire(const std::string& ue_ref, TimeMs expiry_ms, TimeMs now);

  /// Removes every Pending entry with expiry <= now, in ue_ref order.
  std::vector<std::string> expire_due(TimeMs now);

  /// Connected -> removed.
  bool disconnect(const std::string& ue_ref);

  /// Inserts an already-connected UE (pre-existing occupancy).
  void add_connected(const std::string& ue_ref);

  std::optional<Entry> find(const std::string& ue_ref) const;

 private:
  std::int64_t capacity_;
  TimeMs waiting_time_ms_;
  std::map<std::string, Entry> contexts_;
};

}  // namespace rrcstorm::simnet
