#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace oclu {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Stable child seed for an independent stream, e.g. derive_seed(master,
// "dataset", i) for the i-th stimulus. Identical arguments always give the
// same seed, on every platform.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t master, std::string_view stream, std::uint64_t index = 0) {
  return Rng(derive_seed(master, stream, index));
}

// Uniform real in [lo, hi) built from the raw 53 high bits, so the value
// sequence does not depend on the standard library's distribution code.
inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [lo, hi] (inclusive) by rejection.
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);

// Standard normal via the polar Box-Muller method.
double standard_normal(Rng& rng);

}  // namespace oclu
