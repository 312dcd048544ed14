#include "spinhom/rng.hpp"

namespace spinhom {

namespace {

constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  uint64_t p = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(p >> 32);
  lo = static_cast<uint32_t>(p);
}

inline PhiloxCtr round_once(const PhiloxCtr& x, const PhiloxKey& k) {
  uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, x[0], hi0, lo0);
  mulhilo(kMul1, x[2], hi1, lo1);
  return {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

PhiloxCtr philox4x32(PhiloxCtr ctr, PhiloxKey key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    ctr = round_once(ctr, key);
  }
  return ctr;
}

double to_unit_double(uint32_t hi, uint32_t lo) {
  uint64_t bits = (static_cast<uint64_t>(hi) << 32) | lo;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

namespace {

inline PhiloxKey seed_key(uint64_t seed) {
  return {static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)};
}

}  // namespace

double site_uniform(uint64_t seed, int64_t i, int64_t j, int64_t k, uint32_t stream) {
  // Site coordinates are folded to 32 bits; boxes in this library stay far
  // below that range. The k word carries the third coordinate and the high
  // stream bits share the last word.
  PhiloxCtr ctr{static_cast<uint32_t>(i), static_cast<uint32_t>(j),
                static_cast<uint32_t>(k), stream};
  PhiloxCtr out = philox4x32(ctr, seed_key(seed));
  return to_unit_double(out[0], out[1]);
}

double seq_uniform(uint64_t seed, uint64_t index, uint32_t stream) {
  PhiloxCtr ctr{static_cast<uint32_t>(index), static_cast<uint32_t>(index >> 32),
                stream, 0x5e900001u};
  PhiloxCtr out = philox4x32(ctr, seed_key(seed));
  return to_unit_double(out[0], out[1]);
}

uint64_t seq_below(uint64_t seed, uint64_t index, uint32_t stream, uint64_t n) {
  PhiloxCtr ctr{static_cast<uint32_t>(index), static_cast<uint32_t>(index >> 32),
                stream, 0x1d2e3f40u};
  PhiloxCtr out = philox4x32(ctr, seed_key(seed));
  uint64_t bits = (static_cast<uint64_t>(out[0]) << 32) | out[1];
  // Multiply-shift reduction; bias is negligible for the n used here.
  return static_cast<uint64_t>((static_cast<unsigned __int128>(bits) * n) >> 64);
}

}  // namespace spinhom
