#include <doctest.h>

#include <set>

#include "hsigma/rng.hpp"

using namespace hsigma;

TEST_SUITE("rng") {
  TEST_CASE("Philox4x32-10 known-answer vector") {
    const auto out = Philox::generate({0, 0, 0, 0}, {0, 0});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);
  }

  TEST_CASE("Philox4x32-10 known-answer vector with all bits set") {
    const auto out = Philox::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);
  }

  TEST_CASE("streams are reproducible and distinct") {
    Philox a(42, 0), b(42, 0), c(42, 1), d(43, 0);
    std::set<std::uint32_t> seen;
    for (int i = 0; i < 16; ++i) {
      const auto x = a();
      CHECK(x == b());
      seen.insert(x);
      CHECK(x != c());
      CHECK(x != d());
    }
    CHECK(seen.size() == 16);
  }

  TEST_CASE("uniform lies in (0, 1) with mean 1/2") {
    Philox rng(1, 2);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double x = rng.uniform();
      REQUIRE(x > 0.0);
      REQUIRE(x < 1.0);
      sum += x;
    }
    // stderr of the mean is 1/sqrt(12 n) ~ 6.5e-4.
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.006));
  }

  TEST_CASE("mix_seed is a bijection on sampled inputs") {
    std::set<std::uint64_t> out;
    for (std::uint64_t i = 0; i < 1000; ++i) out.insert(mix_seed(i));
    CHECK(out.size() == 1000);
  }
}
