// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "spm/random.hpp"

using spm::RandomSource;

TEST_CASE("equal seeds produce identical streams") {
  RandomSource a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
  RandomSource a(1), b(2);
  bool differ = false;
  for (int i = 0; i < 8 && !differ; ++i) differ = a.next_u64() != b.next_u64();
  CHECK(differ);
}

TEST_CASE("split streams are independent of the parent and each other") {
  RandomSource parent(7);
  RandomSource child0 = parent.split(0);
  RandomSource child1 = parent.split(1);
  RandomSource again = RandomSource(7).split(0);
  CHECK(child0.next_u64() == again.next_u64());
  CHECK(child0.next_u64() != child1.next_u64());

  // Consuming the parent does not shift the children.
  RandomSource parent2(7);
  parent2.next_u64();
  CHECK(parent2.split(1).next_u64() == parent.split(1).next_u64());
}

TEST_CASE("nested splits differ per level") {
  RandomSource root(99);
  CHECK(root.split(3).split(5).next_u64() != root.split(5).split(3).next_u64());
}

TEST_CASE("uniform_below is unbiased enough and in range") {
  RandomSource rng(123);
  int counts[5] = {0, 0, 0, 0, 0};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const auto v = rng.uniform_below(5);
    REQUIRE(v < 5);
    ++counts[v];
  }
  for (const int c : counts) {
    CHECK(c > draws / 5 - 1200);
    CHECK(c < draws / 5 + 1200);
  }
}

TEST_CASE("uniform_int covers the inclusive range") {
  RandomSource rng(5);
  bool saw_lo = false, saw_hi = false;
  for (int i = 0; i < 1000; ++i) {
    const auto v = rng.uniform_int(-2, 2);
    REQUIRE(v >= -2);
    REQUIRE(v <= 2);
    saw_lo |= v == -2;
    saw_hi |= v == 2;
  }
  CHECK(saw_lo);
  CHECK(saw_hi);
}

TEST_CASE("uniform_real stays in [0, 1)") {
  RandomSource rng(17);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform_real();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
  }
}
