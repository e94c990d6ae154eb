#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "pwl/rng.hpp"

using pwl::CounterRng;

TEST_CASE("frozen reference stream") {
  CounterRng r(42);
  CHECK(r.next() == 0x3c4602a84b6afa20ull);
  CHECK(r.next() == 0xc361dc9b58af486full);
  CHECK(r.next() == 0xc84429380f8937efull);
  CounterRng s(42, 7);
  CHECK(s.next() == 0xaedfd0f871525226ull);
}

TEST_CASE("determinism and stream separation") {
  CounterRng a(123), b(123), c(124), d(123, 1);
  bool same = true, diff_seed = false, diff_stream = false;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t x = a.next();
    same = same && (x == b.next());
    diff_seed = diff_seed || (x != c.next());
    diff_stream = diff_stream || (x != d.next());
  }
  CHECK(same);
  CHECK(diff_seed);
  CHECK(diff_stream);
  CHECK(a.counter() == 1000);
}

TEST_CASE("bounded draws stay in range and look uniform") {
  CounterRng r(7);
  for (int i = 0; i < 100; ++i) CHECK(r.bounded(1) == 0);
  int counts[6] = {0};
  const int n = 60000;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t v = r.bounded(6);
    REQUIRE(v < 6);
    ++counts[v];
  }
  for (int k = 0; k < 6; ++k) {
    CHECK(std::abs(counts[k] - n / 6) < 500);  // ~5.5 sigma
  }
}

TEST_CASE("uniform01 and uniform_open ranges") {
  CounterRng r(9);
  for (int i = 0; i < 20000; ++i) {
    const double u = r.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double v = r.uniform_open();
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("geometric_half has P(m) = 2^-m") {
  CounterRng r(11);
  const int n = 200000;
  double sum = 0.0;
  int c1 = 0, c2 = 0, c3 = 0;
  for (int i = 0; i < n; ++i) {
    const int m = r.geometric_half();
    REQUIRE(m >= 1);
    sum += m;
    c1 += (m == 1);
    c2 += (m == 2);
    c3 += (m == 3);
  }
  CHECK(sum / n == doctest::Approx(2.0).epsilon(0.02));
  CHECK((double)c1 / n == doctest::Approx(0.5).epsilon(0.02));
  CHECK((double)c2 / n == doctest::Approx(0.25).epsilon(0.03));
  CHECK((double)c3 / n == doctest::Approx(0.125).epsilon(0.05));
}

TEST_CASE("gaussian has unit moments") {
  CounterRng r(13);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = r.gaussian();
    s1 += g;
    s2 += g * g;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.012);       // ~5 sigma
  CHECK(std::abs(var - 1.0) < 0.025);  // ~5 sigma
}
