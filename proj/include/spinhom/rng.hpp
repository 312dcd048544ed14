#pragma once

#include <array>
#include <cstdint>

namespace spinhom {

// Counter-based RNG (Philox4x32-10). All generators in this library derive
// their randomness from (seed, counter) pairs, never from mutable state, so
// that point sets are pure functions of their parameters and perturbed
// lattices are exactly stationary under integer translations: the draw for
// integer site i depends on the absolute coordinates of i only.
//
// Provenance records the generator as "philox4x32-10".

using PhiloxCtr = std::array<uint32_t, 4>;
using PhiloxKey = std::array<uint32_t, 2>;

PhiloxCtr philox4x32(PhiloxCtr ctr, PhiloxKey key);

// Two 32-bit words -> double in [0,1) with 53 random bits.
double to_unit_double(uint32_t hi, uint32_t lo);

// Uniform [0,1) keyed by an integer lattice site and a per-purpose stream id.
double site_uniform(uint64_t seed, int64_t i, int64_t j, int64_t k, uint32_t stream);

// Uniform [0,1) keyed by a sequence index (acceptance/attempt counters).
double seq_uniform(uint64_t seed, uint64_t index, uint32_t stream);

// Uniform integer in [0, n) keyed by a sequence index; n > 0.
uint64_t seq_below(uint64_t seed, uint64_t index, uint32_t stream, uint64_t n);

inline constexpr const char* kRngName = "philox4x32-10";

}  // namespace spinhom
