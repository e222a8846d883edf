#include <cmath>
#include <vector>

#include "doctest.h"
#include "mintmc/rng.hpp"

using mintmc::RngStream;

TEST_CASE("identical (seed, stream) reproduces identical draws") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  RngStream c(42, 7), d(42, 7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(c.next_double() == d.next_double());
    CHECK(c.next_normal() == d.next_normal());
  }
}

TEST_CASE("distinct stream ids give different sequences") {
  RngStream a(42, 1), b(42, 2);
  int equal = 0;
  for (int i = 0; i < 100; ++i)
    if (a.next_u32() == b.next_u32()) ++equal;
  CHECK(equal < 3);
}

TEST_CASE("uniform doubles live in [0, 1) with mean near 1/2") {
  RngStream rng(3, 0);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  const double mean = sum / n;
  const double se = std::sqrt(1.0 / 12.0 / n);
  CHECK(std::abs(mean - 0.5) < 4 * se);
}

TEST_CASE("normals have the right first two moments") {
  RngStream rng(11, 5);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(std::sqrt(var) - 1.0) < 0.01);
}

TEST_CASE("bounded draws stay in range and cover all residues") {
  RngStream rng(9, 1);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const std::uint64_t v = rng.next_below(7);
    REQUIRE(v < 7);
    ++counts[static_cast<int>(v)];
  }
  for (const int c : counts) {
    CHECK(c > 9000);
    CHECK(c < 11000);
  }
}
