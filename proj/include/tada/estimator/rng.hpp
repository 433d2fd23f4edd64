#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace tada {

std::uint64_t splitmix64(std::uint64_t x);

// Seed for the stream addressed by `path` under `master`, e.g. (seed, scenario, replicate).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Seedable 64-bit Mersenne Twister with portable draw helpers (the
/// transforms do not depend on the standard library's distribution classes,
/// so streams are reproducible across toolchains).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  static Rng stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(master, path));
  }

  std::uint64_t next() { return engine_(); }
  // Uniform on the open interval (0, 1).
  double uniform_open();
  bool bernoulli(double p) { return uniform_open() < p; }
  double normal(double mean, double sd);
  // Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tada
