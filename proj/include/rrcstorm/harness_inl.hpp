#pragma once

#include <future>

namespace rrcstorm::harness {

template <typename Fn>
auto for_each_seed(std::span<const std::uint64_t> seeds, Fn fn)
    -> std::vector<decltype(fn(std::uint64_t{}))> {
  using Result = decltype(fn(std::uint64_t{}));
  std::vector<std::future<Result>> pending;
  pending.reserve(seeds.size());
  for (std::uint64_t seed : seeds) pending.push_back(std::async(std::launch::async, fn, seed));
  std::vector<Result> results;
  results.reserve(seeds.size());
  for (auto& f : pending) results.push_back(f.get());
  return results;
}

}  // namespace rrcstorm::harness
