#include "rrcstorm/random.hpp"

#include <cmath>
#include <stdexcept>

namespace rrcstorm {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be > 0");
  // Rejection on the biased tail keeps the draw exactly uniform.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

double Rng::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("Rng::exponential: rate must be > 0");
  return -std::log1p(-uniform()) / rate;
}

std::int64_t Rng::poisson(double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("Rng::poisson: lambda must be >= 0");
  if (lambda == 0.0) return 0;
  const double limit = std::exp(-lambda);
  std::int64_t k = 0;
  double prod = uniform();
  while (prod > limit) {
    ++k;
    prod *= uniform();
  }
  return k;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void validate(const TruncatedPoissonSpec& spec) {
  if (!(spec.lambda >= 0.0)) throw std::invalid_argument("truncated poisson: lambda must be >= 0");
  if (spec.lower < 0 || spec.lower > spec.upper) {
    throw std::invalid_argument("truncated poisson: need 0 <= lower <= upper");
  }
  if (spec.tick_ms < 1) throw std::invalid_argument("truncated poisson: tick_ms must be >= 1");
  if (spec.lambda == 0.0 && spec.lower > 0) {
    throw std::invalid_argument("truncated poisson: lambda 0 has no mass above 0");
  }
}

std::int64_t truncated_poisson_sample(const TruncatedPoissonSpec& spec, Rng& rng) {
  for (;;) {
    const std::int64_t k = rng.poisson(spec.lambda);
    if (k >= spec.lower && k <= spec.upper) return k;
  }
}

}  // namespace rrcstorm
