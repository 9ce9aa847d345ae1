#include <set>

#include "doctest.h"
#include "orl/random.hpp"

TEST_CASE("derive_seed is a pure function of base and stream") {
  CHECK(orl::derive_seed(7, "a") == orl::derive_seed(7, "a"));
  CHECK(orl::derive_seed(7, "a") != orl::derive_seed(7, "b"));
  CHECK(orl::derive_seed(7, "a") != orl::derive_seed(8, "a"));
  CHECK(orl::derive_seed(7, std::uint64_t{1}) != orl::derive_seed(7, std::uint64_t{2}));
}

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(orl::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(orl::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(orl::fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("hex64 pads to sixteen digits") {
  CHECK(orl::hex64(0) == "0000000000000000");
  CHECK(orl::hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("sample_without_replacement draws distinct in-range indices") {
  orl::Rng rng(3);
  std::vector<std::size_t> out;
  for (std::size_t pop : {1u, 5u, 100u, 1000u}) {
    for (std::size_t k : {std::size_t{0}, std::size_t{1}, pop / 2, pop}) {
      orl::sample_without_replacement(rng, pop, k, out);
      REQUIRE(out.size() == k);
      std::set<std::size_t> seen(out.begin(), out.end());
      CHECK(seen.size() == k);
      for (auto i : out) CHECK(i < pop);
    }
  }
}

TEST_CASE("sample_without_replacement covers the population uniformly") {
  orl::Rng rng(11);
  std::vector<int> hits(10, 0);
  std::vector<std::size_t> out;
  for (int trial = 0; trial < 20000; ++trial) {
    orl::sample_without_replacement(rng, 10, 3, out);
    for (auto i : out) ++hits[i];
  }
  // Each index is drawn with probability 0.3: mean 6000, sd ~65.
  for (int h : hits) CHECK(std::abs(h - 6000) < 400);
}
