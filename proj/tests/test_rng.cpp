#include "doctest.h"
#include "spinhom/rng.hpp"

using namespace spinhom;

// Known answers for philox4x32-10 from the Random123 test vectors.
TEST_CASE("philox4x32-10 known answers") {
  {
    PhiloxCtr out = philox4x32({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);
  }
  {
    PhiloxCtr out = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                               {0xffffffffu, 0xffffffffu});
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);
  }
  {
    PhiloxCtr out = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                               {0xa4093822u, 0x299f31d0u});
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
  }
}

TEST_CASE("unit doubles land in [0,1) and are keyed, not stateful") {
  for (uint64_t i = 0; i < 1000; ++i) {
    double u = seq_uniform(42, i, 7);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(site_uniform(1, 5, -3, 0, 2) == site_uniform(1, 5, -3, 0, 2));
  CHECK(site_uniform(1, 5, -3, 0, 2) != site_uniform(2, 5, -3, 0, 2));
  CHECK(site_uniform(1, 5, -3, 0, 2) != site_uniform(1, 6, -3, 0, 2));
  CHECK(site_uniform(1, 5, -3, 0, 2) != site_uniform(1, 5, -3, 0, 3));
}

TEST_CASE("bounded draws stay below the bound") {
  for (uint64_t i = 0; i < 1000; ++i) CHECK(seq_below(9, i, 1, 17) < 17);
  bool seen[17] = {};
  for (uint64_t i = 0; i < 2000; ++i) seen[seq_below(9, i, 1, 17)] = true;
  for (bool s : seen) CHECK(s);
}
