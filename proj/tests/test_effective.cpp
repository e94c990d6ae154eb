#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>

#include "pwl/effective.hpp"
#include "pwl/stats.hpp"

using namespace pwl;

TEST_CASE("increment law point masses and normalization") {
  IncrementLaw law;
  CHECK(law.pmf(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(law.pmf(1) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(law.pmf(-1) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(law.pmf(2) == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
  CHECK(law.pmf(-3) == doctest::Approx(1.0 / 24.0).epsilon(1e-15));

  double total = 0.0;
  for (int k = -60; k <= 60; ++k) total += law.pmf(k);
  // Remaining tails are 2 * (1/3) * 2^-60.
  CHECK(std::abs(1.0 - total) < 1e-15);
}

TEST_CASE("increment law cdf closed forms and quantile inversion") {
  IncrementLaw law;
  // cdf(k) = 1 - (1/3) 2^{-k} for k >= 0; (1/3) 2^{k+1} for k < 0.
  CHECK(law.cdf(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(law.cdf(1) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(law.cdf(-1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(law.cdf(-2) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));

  // quantile is the generalized inverse: smallest k with cdf(k) >= u.
  CHECK(law.quantile(0.5) == 0);
  CHECK(law.quantile(2.0 / 3.0) == 0);
  CHECK(law.quantile(2.0 / 3.0 + 1e-12) == 1);
  CHECK(law.quantile(1.0 / 3.0) == -1);
  CHECK(law.quantile(1.0 / 6.0) == -2);
  CHECK(law.quantile(1.0 / 6.0 + 1e-12) == -1);
  CHECK(law.quantile(1e-9) < -20);
  CHECK(law.quantile(1.0 - 1e-9) > 20);

  // Round trip: for each k, u just above cdf(k-1) maps to k.
  for (int k = -8; k <= 8; ++k) {
    double lo = law.cdf(k - 1);
    CHECK(law.quantile(lo + 1e-13) == k);
  }
}

TEST_CASE("increment sampler matches the law's moments and masses") {
  IncrementLaw law;
  CounterRng rng(2024);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  std::map<int, long long> counts;
  for (int i = 0; i < n; ++i) {
    int k = law.sample(rng);
    sum += k;
    sumsq += (double)k * k;
    counts[k]++;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 3.0 * 2.0 / std::sqrt((double)n));
  CHECK(var == doctest::Approx(4.0).epsilon(0.03));
  CHECK((double)counts[0] / n == doctest::Approx(1.0 / 3.0).epsilon(0.02));
  CHECK((double)counts[1] / n == doctest::Approx(1.0 / 6.0).epsilon(0.04));
  CHECK((double)counts[-2] / n == doctest::Approx(1.0 / 12.0).epsilon(0.06));
}

TEST_CASE("effective trajectories are reproducible and start at zero") {
  auto a = simulate_effective(500, 99);
  auto b = simulate_effective(500, 99);
  CHECK(a.values == b.values);
  CHECK(a.values.size() == 501);
  CHECK(a.values[0] == 0);
  for (std::size_t i = 1; i < a.values.size(); ++i)
    CHECK(a.values[i] - a.values[i - 1] == a.increments[i - 1]);
}

TEST_CASE("strip exit law: width one is geometric with ratio one third") {
  // From the sole interior site the walk stays with probability 1/3, so
  // P(eta_1 = m) = (1/3)^{m-1} (2/3).
  auto dist = exit_time_dp(1, 64);
  // p[i] holds P(eta = i + 1).
  for (int m = 1; m <= 20; ++m) {
    double expect = std::pow(1.0 / 3.0, m - 1) * (2.0 / 3.0);
    CHECK(dist.p[(std::size_t)(m - 1)] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("strip exit law: width two first-step exit mass is one half") {
  // From x=0 in {0,1}: exits are steps below (prob 1/3) or >= 2 jumps up
  // (prob 1/6); total 1/2.
  auto dist = exit_time_dp(2, 64);
  CHECK(dist.p[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("strip exit law conserves probability and bounds inputs") {
  auto dist = exit_time_dp(10, 2000);
  double total = dist.tail;
  for (double p : dist.p) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dist.survival(0) == doctest::Approx(1.0));
  // Survival is nonincreasing.
  for (int n = 1; n <= 100; ++n)
    CHECK(dist.survival(n) <= dist.survival(n - 1) + 1e-15);

  CHECK_THROWS_AS(exit_time_dp(0, 100), ScaleExceeded);
  CHECK_THROWS_AS(exit_time_dp(65, 100), ScaleExceeded);
  CHECK_THROWS_AS(exit_time_dp(10, 0), ScaleExceeded);
}

TEST_CASE("sampled exit times agree with the dynamic program") {
  const int L = 5;
  const long long N = 50000;
  auto dist = exit_time_dp(L, 2000);
  auto samples = exit_samples(L, N, 77);
  REQUIRE((long long)samples.size() == N);

  std::vector<long long> counts(dist.p.size(), 0);
  long long overflow = 0;
  for (const auto& s : samples) {
    CHECK(s.eta >= 1);
    CHECK(s.overshoot >= 0);
    if (s.eta <= (long long)counts.size())
      counts[(std::size_t)(s.eta - 1)]++;
    else
      ++overflow;
  }
  double tv = tv_distance(counts, overflow, dist.p, dist.tail);
  CHECK(tv < 0.012);
}

TEST_CASE("exit side and overshoot describe the exit position") {
  // With L=1 the walk starts at 0; exiting below to -d gives overshoot d-1,
  // exiting above to d gives overshoot d-1. Verify from raw samples that
  // overshoot 0 dominates (jump size 1 has the largest mass).
  auto samples = exit_samples(1, 20000, 31);
  long long below = 0, above = 0, zero_over = 0;
  for (const auto& s : samples) {
    if (s.side == ExitSide::Below) ++below;
    else ++above;
    if (s.overshoot == 0) ++zero_over;
  }
  // Symmetric law: both sides roughly half.
  CHECK(std::abs((double)below - (double)above) < 4.0 * std::sqrt(20000.0 / 4.0) * 2);
  // P(overshoot = 0 | exit) = sum_j P(|jump| = j gives overshoot 0) = 1/2 of
  // exit mass by the geometric structure: P(jump = +-1)/P(exit) = (1/3)/(2/3).
  CHECK((double)zero_over / 20000.0 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("strip survival estimates match exact values") {
  // Convention: the estimate is P(eta_L >= n). For L = 1 the exact values
  // are P(eta >= 1) = 1, P(eta >= 2) = 1/3, P(eta >= 3) = 1/9.
  auto e0 = gamblers_ruin_estimate(1, 1, 2000, 13);
  CHECK(e0.value == doctest::Approx(1.0));
  auto e1 = gamblers_ruin_estimate(1, 2, 50000, 13);
  CHECK(std::abs(e1.value - 1.0 / 3.0) < 4.0 * e1.stderr_ + 1e-12);
  auto e2 = gamblers_ruin_estimate(1, 3, 50000, 13);
  CHECK(std::abs(e2.value - 1.0 / 9.0) < 4.0 * e2.stderr_ + 1e-12);
  CHECK(e2.value <= e1.value);

  // The dynamic program's survival matches the same convention.
  auto dist = exit_time_dp(1, 64);
  CHECK(dist.survival(2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(dist.survival(3) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("conditional width law collector rejects abusive parameters") {
  CHECK_THROWS_AS(lemma1_check(LatticeKind::kSquare, 0, 100, 5), ScaleExceeded);
  CHECK_THROWS_AS(lemma1_check(LatticeKind::kSquare, 9, 100, 5), ScaleExceeded);
  CHECK_THROWS_AS(lemma1_check(LatticeKind::kSquare, 1, 0, 5), InsufficientSamples);
}

TEST_CASE("square-lattice width increments at height one follow the strip exit law") {
  // The first window of a square-lattice walk whose box is still one row
  // tall produces widths distributed exactly as the width-1 strip exit time.
  auto rep = lemma1_check(LatticeKind::kSquare, 1, 4000, 4242);
  CHECK(rep.n_events >= 100);
  CHECK(rep.p_value > 0.01);
}

TEST_CASE("bucketed exit-law distance: faithful sample, point mass, bounds") {
  // A faithful sampler concentrates far below the 0.01 comparison tolerance
  // on the coarse partition even for a wide window's long-tailed law.
  const auto samples = exit_samples(20, 100000, 515151);
  std::vector<long long> etas;
  etas.reserve(samples.size());
  for (const auto& s : samples) etas.push_back(s.eta);
  const auto dp = exit_time_dp(20, 512);
  CHECK(exit_law_tv(etas, dp) < 0.01);

  // All mass on eta = 1 against the width-1 law: TV = 1 - P(eta = 1) = 1/3.
  const auto dp1 = exit_time_dp(1, 512);
  const std::vector<long long> ones(100, 1);
  CHECK(exit_law_tv(ones, dp1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // The reference law must cover the full bucket range.
  CHECK_THROWS_AS(exit_law_tv(ones, exit_time_dp(1, 100)), ScaleExceeded);
}
