#pragma once

#include <cstdint>
#include <random>

namespace cm {

using Rng = std::mt19937_64;

// splitmix64 finalizer over (base, stream); used to give every replica and
// every sub-stage its own generator.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

// Uniform integer in [0, bound). bound must be positive.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double exponential(Rng& rng, double rate);
double standard_normal(Rng& rng);

// Polar-method normals that keep the second variate of each pair; for long
// paths where one generator feeds one stream of increments.
class NormalSource {
 public:
  explicit NormalSource(Rng& rng) : rng_(rng) {}
  double operator()();

 private:
  Rng& rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cm
