#pragma once

#include <cstdint>
#include <random>

namespace rrcstorm {

// std:: distributions are implementation-defined, so traces would differ
// between standard libraries. Everything here is built on the raw
// mt19937_64 output, which the standard pins bit-for-bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Exponential with the given rate (events per unit).
  double exponential(double rate);

  /// Poisson(lambda) by sequential multiplication; lambda is small here.
  std::int64_t poisson(double lambda);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

struct TruncatedPoissonSpec {
  double lambda = 2.0;      // parameter of the untruncated law
  std::int64_t lower = 0;
  std::int64_t upper = 3;
  std::int64_t tick_ms = 100;
};

/// Throws std::invalid_argument unless lambda >= 0, 0 <= lower <= upper and tick_ms >= 1.
void validate(const TruncatedPoissonSpec& spec);

/// Poisson(lambda) conditioned on lower <= k <= upper, by rejection.
std::int64_t truncated_poisson_sample(const TruncatedPoissonSpec& spec, Rng& rng);

}  // namespace rrcstorm
