#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "tiprdc/rng.hpp"

using namespace tiprdc;

namespace {

// Twin engine: draws raw words from a separately constructed mt19937_64 and
// applies the distribution formulas re-derived here, not in the library.
struct Twin {
  std::mt19937_64 eng;
  explicit Twin(std::uint64_t seed) : eng(seed) {}
  double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
};

}  // namespace

TEST_CASE("hash primitives match published reference vectors") {
  // FNV-1a 64 test vectors.
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("abc") == 0xe71fa2190541574bull);
  // SplitMix64 reference: first output for seed 0.
  CHECK(mix64(0) == 0xe220a8397b1dcdafull);
  CHECK(mix64(1) == 0x910a2dec89025cc1ull);
}

TEST_CASE("hex64 prints zero-padded lowercase") {
  CHECK(hex64(0) == "0000000000000000");
  CHECK(hex64(0xdeadbeefull) == "00000000deadbeef");
  CHECK(hex64(~std::uint64_t{0}) == "ffffffffffffffff");
}

TEST_CASE("str_g prints short labels") {
  CHECK(str_g(0.9) == "0.9");
  CHECK(str_g(40.0) == "40");
  CHECK(str_g(0.1) == "0.1");
  CHECK(str_g(1.0) == "1");
  CHECK(str_g(0.0) == "0");
}

TEST_CASE("uniform matches the twin formula and stays in [0, 1)") {
  RngStream r(123);
  Twin t(123);
  for (int i = 0; i < 2000; ++i) {
    double u = r.uniform();
    CHECK(u == t.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal matches an independent Box-Muller replay") {
  RngStream r(7);
  Twin t(7);
  for (int i = 0; i < 500; ++i) {
    double expected;
    {
      double u1 = 1.0 - t.uniform();
      double u2 = t.uniform();
      expected = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    CHECK(r.normal() == expected);
  }
}

TEST_CASE("normal moments are calibrated") {
  RngStream r(99);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = r.normal(3.0, 2.0);
    s += x;
    s2 += x * x;
  }
  double mean = s / n;
  double var = s2 / n - mean * mean;
  CHECK(mean == doctest::Approx(3.0).epsilon(0.01));
  CHECK(std::sqrt(var) == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("laplace matches the inverse-CDF replay and its scale calibrates") {
  RngStream r(21);
  Twin t(21);
  for (int i = 0; i < 500; ++i) {
    double u = t.uniform() - 0.5;
    double sign = u < 0.0 ? -1.0 : 1.0;
    double expected = -2.5 * sign * std::log1p(-2.0 * std::abs(u));
    CHECK(r.laplace(2.5) == expected);
  }
  double abs_sum = 0.0;
  const int n = 100000;
  RngStream big(22);
  for (int i = 0; i < n; ++i) abs_sum += std::abs(big.laplace(2.5));
  // Mean absolute value of Laplace(b) is b.
  CHECK(abs_sum / n == doctest::Approx(2.5).epsilon(0.02));
}

TEST_CASE("below is unbiased rejection sampling over [0, n)") {
  RngStream r(5);
  Twin t(5);
  for (int i = 0; i < 2000; ++i) {
    std::uint64_t n = 1 + (i % 17);
    // Independent replay of the rejection loop.
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = t.eng();
    while (v >= limit) v = t.eng();
    CHECK(r.below(n) == v % n);
  }
  CHECK_THROWS_AS(r.below(0), ContractError);
}

TEST_CASE("permutation replays an independent Fisher-Yates") {
  RngStream r(31);
  Twin t(31);
  auto got = r.permutation(20);
  std::vector<Index> expected(20);
  for (Index i = 0; i < 20; ++i) expected[static_cast<std::size_t>(i)] = i;
  for (Index i = 19; i > 0; --i) {
    std::uint64_t n = static_cast<std::uint64_t>(i) + 1;
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = t.eng();
    while (v >= limit) v = t.eng();
    std::swap(expected[static_cast<std::size_t>(i)], expected[static_cast<std::size_t>(v % n)]);
  }
  CHECK(got == expected);
}

TEST_CASE("derangement has no fixed points and is a permutation") {
  RngStream r(8);
  for (int trial = 0; trial < 50; ++trial) {
    Index n = 2 + (trial % 9);
    auto p = r.derangement(n);
    std::set<Index> seen(p.begin(), p.end());
    CHECK(static_cast<Index>(seen.size()) == n);
    for (Index i = 0; i < n; ++i) CHECK(p[static_cast<std::size_t>(i)] != i);
  }
  CHECK_THROWS_AS(r.derangement(1), DataError);
  CHECK_THROWS_AS(r.derangement(0), DataError);
}

TEST_CASE("pool derivation is the documented mix of root and name") {
  RngPool pool(42);
  CHECK(pool.derive("abc") == mix64(42ull ^ fnv1a64("abc")));
  CHECK(pool.derive("abc", 3) == mix64(pool.derive("abc") ^ mix64(3)));
  CHECK(pool.derive("abc") != pool.derive("abd"));
  CHECK(RngPool(42).derive("x") != RngPool(43).derive("x"));

  // Streams with the same name are identical, different names diverge.
  RngStream a1 = pool.stream("alpha");
  RngStream a2 = pool.stream("alpha");
  RngStream b = pool.stream("beta");
  double first_a = a1.uniform();
  CHECK(first_a == a2.uniform());
  CHECK(first_a != b.uniform());
}
