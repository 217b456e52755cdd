#include "rrcstorm/resource_pool.hpp"

#include <algorithm>
#include <stdexcept>

namespace rrcstorm::simnet {

ResourcePool::ResourcePool(std::int64_t capacity, TimeMs waiting_time_ms)
    : capacity_(capacity), waiting_time_ms_(waiting_time_ms) {
  if (capacity < 1) throw std::invalid_argument("pool capacity must be >= 1");
  if (waiting_time_ms <= 0) throw std::invalid_argument("waiting time must be > 0");
}

std::int64_t ResourcePool::pending_count() const {
  return std::count_if(contexts_.begin(), contexts_.end(),
                       [](const auto& kv) { return kv.second.state == State::Pending; });
}

std::int64_t ResourcePool::connected_count() const { return size() - pending_count(); }

std::optional<TimeMs> ResourcePool::reserve(const std::string& ue_ref, TimeMs now) {
  if (contexts_.contains(ue_ref)) {
    throw std::logic_error("ue_ref already holds a context: " + ue_ref);
  }
  if (full()) return std::nullopt;
  const TimeMs expiry = now + waiting_time_ms_;
  contexts_.emplace(ue_ref, Entry{State::Pending, expiry});
  return expiry;
}

bool ResourcePool::complete(const std::string& ue_ref, TimeMs now) {
  auto it = contexts_.find(ue_ref);
  if (it == contexts_.end() || it->second.state != State::Pending) return false;
  if (now >= it->second.expiry_ms) {
    contexts_.erase(it);
    return false;
  }
  it->second.state = State::Connected;
  return true;
}

bool ResourcePool::expire(const std::string& ue_ref, TimeMs expiry_ms, TimeMs now) {
  auto it = contexts_.find(ue_ref);
  if (it == contexts_.end()) return false;
  const Entry& e = it->second;
  if (e.state != State::Pending || e.expiry_ms != expiry_ms || now < e.expiry_ms) return false;
  contexts_.erase(it);
  return true;
}

std::vector<std::string> ResourcePool::expire_due(TimeMs now) {
  std::vector<std::string> released;
  for (auto it = contexts_.begin(); it != contexts_.end();) {
    if (it->second.state == State::Pending && it->second.expiry_ms <= now) {
      released.push_back(it->first);
      it = contexts_.erase(it);
    } else {
      ++it;
    }
  }
  return released;
}

bool ResourcePool::disconnect(const std::string& ue_ref) {
  auto it = contexts_.find(ue_ref);
  if (it == contexts_.end() || it->second.state != State::Connected) return false;
  contexts_.erase(it);
  return true;
}

void ResourcePool::add_connected(const std::string& ue_ref) {
  if (full()) throw std::logic_error("pool full: cannot add connected UE " + ue_ref);
  if (!contexts_.emplace(ue_ref, Entry{State::Connected, 0}).second) {
    throw std::logic_error("ue_ref already holds a context: " + ue_ref);
  }
}

std::optional<ResourcePool::Entry> ResourcePool::find(const std::string& ue_ref) const {
  auto it = contexts_.find(ue_ref);
  if (it == contexts_.end()) return std::nullopt;
  return it->second;
}

}  // namespace rrcstorm::simnet
