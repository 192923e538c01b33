#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace msnar {

// All randomness in the library flows through this header.  Draws are a pure
// function of the seed: mt19937_64 is fully specified by the standard and the
// uniform/normal transforms below avoid the implementation-defined
// std::*_distribution classes.

std::uint64_t splitmix64(std::uint64_t& state);

// k-th derived stream seed for a master seed.  Simulation uses streams 1 and 2
// (regime chain and innovations), estimation code derives further streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Rational approximation of the standard normal quantile (Acklam), relative
// error below 1.2e-9 over (0,1).
double inverse_normal_cdf(double p);

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0,1) with 53-bit resolution.
  double uniform01() {
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  double normal() { return inverse_normal_cdf(uniform01()); }

  // Index draw proportional to the given nonnegative weights.
  int categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

}  // namespace msnar
