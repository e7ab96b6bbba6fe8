#pragma once

#include <cstdint>
#include <random>

#include "hawkes/errors.hpp"

namespace hawkes {

// splitmix64 finalizer; good avalanche, used only to derive engine seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic random stream. Substreams are derived from the base seed and
// a stream id, never from engine state, so a fixed (seed, id) pair always
// yields the same draws regardless of what other streams consumed. Cascades,
// chains and replicates each own a substream; expansion order cannot change
// the result.
//
// Distribution objects are constructed per call. std:: distributions may
// carry internal state between calls; rebuilding them keeps every draw a
// pure function of the engine position.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : base_(seed), engine_(mix64(seed)) {}

  [[nodiscard]] Rng substream(std::uint64_t stream_id) const {
    return Rng(mix64(base_ ^ mix64(stream_id + 0x632be59bd9b4e019ULL)));
  }

  [[nodiscard]] std::uint64_t base_seed() const noexcept { return base_; }

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  double exponential(double rate) {
    if (!(rate > 0.0)) throw contract_error("exponential rate must be > 0");
    return std::exponential_distribution<double>(rate)(engine_);
  }

  // Shape-rate parameterisation (mean = shape / rate).
  double gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) {
      throw contract_error("gamma shape and rate must be > 0");
    }
    return std::gamma_distribution<double>(shape, 1.0 / rate)(engine_);
  }

  long poisson(double mean) {
    if (!(mean >= 0.0)) throw contract_error("poisson mean must be >= 0");
    if (mean == 0.0) return 0;
    return std::poisson_distribution<long>(mean)(engine_);
  }

  double normal(double mean, double sd) {
    return std::normal_distribution<double>(mean, sd)(engine_);
  }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw contract_error("below(0) is undefined");
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t base_;
  std::mt19937_64 engine_;
};

}  // namespace hawkes
