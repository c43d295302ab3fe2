#include <set>

#include "doctest.h"
#include "dunkl/rng.hpp"

using dunkl::Philox;

TEST_CASE("philox4x32-10 known answers") {
  CHECK(Philox::block({0, 0, 0, 0}, {0, 0}) == Philox::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        Philox::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        Philox::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  Philox a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    CHECK((x != c() || x != d()));
  }
}

TEST_CASE("uniform stays in the open interval") {
  Philox r(1, 0);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal draws have unit variance") {
  Philox r(2, 0);
  double s1 = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s1 += z;
    s2 += z * z;
  }
  CHECK(std::abs(s1 / n) < 0.01);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("derived seeds differ per salt") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 50; ++s) seen.insert(dunkl::derive_seed(42, s));
  CHECK(seen.size() == 50);
  CHECK(dunkl::derive_seed(42, 1) == dunkl::derive_seed(42, 1));
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(1000, 0);
  dunkl::parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
}
