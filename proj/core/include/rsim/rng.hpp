#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace rsim {

// Deterministic random stream. Streams are derived from a run seed plus a
// label, so each concern (arrivals, service times, fluctuation, replica
// choice, ...) draws from its own substream and scenario knobs do not
// perturb unrelated draws. mt19937_64 is fully specified by the standard;
// the value transforms below avoid std::*_distribution, whose output is
// implementation defined.
class RngStream {
 public:
  RngStream() : engine_(0) {}
  RngStream(std::uint64_t seed, std::string_view label)
      : engine_(derive_seed(seed, label)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    return engine_() % n;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Exponential with the given mean; strictly positive.
  double exponential(double mean) {
    return -mean * std::log(1.0 - uniform01());
  }

  static std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
    for (unsigned char c : label) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    return splitmix64(seed ^ h);
  }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rsim
