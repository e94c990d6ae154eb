#include "pwl/effective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pwl/prudent.hpp"
#include "pwl/stats.hpp"

namespace pwl {

double IncrementLaw::pmf(int k) {
  return std::ldexp(1.0, -std::abs(k)) / 3.0;
}

double IncrementLaw::cdf(int k) {
  if (k < 0) return std::ldexp(1.0, k + 1) / 3.0;       // (1/3) 2^{k+1}
  return 1.0 - std::ldexp(1.0, -k) / 3.0;               // 1 - (1/3) 2^{-k}
}

int IncrementLaw::quantile(double u) {
  // Walk outward from the centre; |k| can never exceed ~1080 for u in (0,1)
  // because the tails halve each step until they underflow.
  if (u <= cdf(-1)) {
    int k = -1;
    while (k > -1100 && u <= cdf(k - 1)) --k;
    return k;
  }
  if (u <= cdf(0)) return 0;
  int k = 1;
  while (k < 1100 && cdf(k) < u) ++k;
  return k;
}

int IncrementLaw::sample(CounterRng& rng) {
  if (rng.bounded(3) == 0) return 0;
  const int sign = rng.bounded(2) == 0 ? 1 : -1;
  return sign * rng.geometric_half();
}

EffectiveTrajectory simulate_effective(long long n, std::uint64_t seed) {
  EffectiveTrajectory traj;
  traj.seed = seed;
  traj.values.reserve(static_cast<std::size_t>(n) + 1);
  traj.increments.reserve(static_cast<std::size_t>(n));
  traj.values.push_back(0);
  CounterRng rng(seed);
  long long s = 0;
  for (long long i = 0; i < n; ++i) {
    const int xi = IncrementLaw::sample(rng);
    s += xi;
    traj.increments.push_back(xi);
    traj.values.push_back(s);
  }
  return traj;
}

ExitSample exit_time(int L, CounterRng& rng) {
  constexpr long long kCap = 1000000000LL;
  long long s = 0;
  for (long long step = 1; step <= kCap; ++step) {
    s += IncrementLaw::sample(rng);
    if (s < 0) return {L, step, ExitSide::Below, -s - 1};
    if (s >= L) return {L, step, ExitSide::Above, s - L};
  }
  throw std::runtime_error("exit_time: no exit after 1e9 steps (diagnostics cap)");
}

double ExitDistribution::survival(long long n) const {
  // P(eta >= n) = 1 - P(eta <= n-1).
  double cum = 0.0;
  const long long upto = std::min(n - 1, n_max);
  for (long long m = 1; m <= upto; ++m) cum += p[static_cast<std::size_t>(m - 1)];
  return 1.0 - cum;
}

ExitDistribution exit_time_dp(int L, long long n_max) {
  if (L < 1 || L > 64)
    throw ScaleExceeded("exit_time_dp: L = " + std::to_string(L) + " outside [1, 64]");
  if (n_max < 1 || n_max > 10000)
    throw ScaleExceeded("exit_time_dp: n_max = " + std::to_string(n_max) +
                        " outside [1, 1e4]");

  const std::size_t n = static_cast<std::size_t>(L);
  // trans[y][x] = P(xi = y - x); exit_mass[x] = P(jump from x leaves [0, L-1])
  // with both geometric tails in closed form.
  std::vector<std::vector<double>> trans(n, std::vector<double>(n));
  std::vector<double> exit_mass(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y)
      trans[y][x] = IncrementLaw::pmf(static_cast<int>(y) - static_cast<int>(x));
    const double below = IncrementLaw::cdf(-static_cast<int>(x) - 1);
    const double above = 1.0 - IncrementLaw::cdf(L - 1 - static_cast<int>(x));
    exit_mass[x] = below + above;
  }

  ExitDistribution dist;
  dist.L = L;
  dist.n_max = n_max;
  dist.p.resize(static_cast<std::size_t>(n_max));

  std::vector<double> q(n, 0.0), nq(n, 0.0);
  q[0] = 1.0;  // S_0 = 0 (left edge of the window)
  double alive = 1.0;
  for (long long m = 1; m <= n_max; ++m) {
    double exit_now = 0.0;
    for (std::size_t x = 0; x < n; ++x) exit_now += q[x] * exit_mass[x];
    dist.p[static_cast<std::size_t>(m - 1)] = exit_now;
    alive -= exit_now;
    for (std::size_t y = 0; y < n; ++y) {
      double s = 0.0;
      for (std::size_t x = 0; x < n; ++x) s += trans[y][x] * q[x];
      nq[y] = s;
    }
    std::swap(q, nq);
  }
  dist.tail = alive;
  return dist;
}

std::vector<ExitSample> exit_samples(int L, long long n_samples, std::uint64_t seed) {
  std::vector<ExitSample> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  for (long long i = 0; i < n_samples; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    out.push_back(exit_time(L, rng));
  }
  return out;
}

SurvivalEstimate gamblers_ruin_estimate(int L, long long n, long long n_samples,
                                        std::uint64_t seed) {
  long long hits = 0;
  for (long long i = 0; i < n_samples; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    if (exit_time(L, rng).eta >= n) ++hits;
  }
  SurvivalEstimate e;
  e.value = static_cast<double>(hits) / static_cast<double>(n_samples);
  e.stderr_ = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(n_samples));
  e.n_samples = n_samples;
  return e;
}

double exit_law_tv(const std::vector<long long>& etas, const ExitDistribution& dp) {
  if (dp.n_max < 512)
    throw ScaleExceeded("exit_law_tv: the reference law must extend to m = 512, got " +
                        std::to_string(dp.n_max));
  // Bucket boundaries: [1,1]..[4,4], then two buckets per doubling.
  std::vector<std::pair<long long, long long>> buckets;
  for (long long m = 1; m <= 4; ++m) buckets.emplace_back(m, m);
  for (long long lo = 5, span = 2; lo <= 512; lo += 2 * span, span *= 2) {
    buckets.emplace_back(lo, lo + span - 1);
    buckets.emplace_back(lo + span, lo + 2 * span - 1);
  }

  std::vector<long long> observed(buckets.size() + 1, 0);  // + tail
  for (long long eta : etas) {
    if (eta > 512) {
      ++observed.back();
      continue;
    }
    // Locate the bucket: exact cells, then the half-octave index.
    std::size_t b;
    if (eta <= 4) {
      b = static_cast<std::size_t>(eta - 1);
    } else {
      b = 4;
      while (buckets[b].second < eta) ++b;
    }
    ++observed[b];
  }

  const double n = static_cast<double>(etas.size());
  double head = 0.0, tv = 0.0;
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    double p = 0.0;
    for (long long m = buckets[b].first; m <= buckets[b].second; ++m)
      p += dp.p[static_cast<std::size_t>(m) - 1];
    head += p;
    tv += std::abs(static_cast<double>(observed[b]) / n - p);
  }
  tv += std::abs(static_cast<double>(observed.back()) / n - (1.0 - head));
  return 0.5 * tv;
}

ConditionalLawData collect_conditional_laws(LatticeKind kind,
                                            const std::vector<int>& heights,
                                            long long n_walks, long long n_steps,
                                            std::uint64_t seed) {
  constexpr std::size_t kCountCap = 512;  // X values above this go to overflow
  ConditionalLawData data;
  data.n_walks = n_walks;
  for (int h : heights) {
    ConditionalCell cell;
    cell.height = h;
    cell.counts.assign(kCountCap, 0);
    data.cells.push_back(std::move(cell));
  }

  const long long hard_cap = 10 * n_steps;
  for (long long i = 0; i < n_walks; ++i) {
    PrudentWalk walk(kind, seed + static_cast<std::uint64_t>(i),
                     /*track_visited=*/false);
    // Run past n_steps only until the last qualifying window has completed:
    // records complete in order, so once a window that STARTED after n_steps
    // completes, every qualifying one is already closed.
    {
      ExcursionCounter counter;
      std::size_t consumed = 0;
      long long last_start = 0;  // t_start of the most recently opened record
      bool done = false;
      while (!done && walk.time() < hard_cap) {
        if (!walk.advance()) break;
        const auto& ev = walk.growth_events();
        while (consumed < ev.size()) {
          const int before = counter.complete();
          counter.consume(ev[consumed]);
          if (counter.complete() > before) {
            if (last_start > n_steps) {
              done = true;
              break;
            }
            last_start = ev[consumed].t - 1;  // start of the next record
          }
          ++consumed;
        }
      }
    }
    if (walk.trapped()) ++data.n_trapped;

    const auto records = decompose_excursions(walk);
    const BoxDimsTimeline dims(walk);
    for (const ExcursionRecord& r : records) {
      if (r.t_start > n_steps) break;  // qualification is on the window start
      if (!r.complete) {
        ++data.n_censored;
        continue;
      }
      if (r.x == 0) {  // only window 0 can have zero width gain
        ++data.n_zero_dropped;
        continue;
      }
      const int h = dims.height_at(r.t_start);
      for (ConditionalCell& cell : data.cells) {
        if (cell.height != h) continue;
        ++cell.n_events;
        if (static_cast<std::size_t>(r.x) <= kCountCap)
          ++cell.counts[static_cast<std::size_t>(r.x) - 1];
        else
          ++cell.overflow;
        break;
      }
    }
  }
  return data;
}

Lemma1Report lemma1_check(LatticeKind kind, int height, long long n_walks,
                          std::uint64_t seed, long long n_steps) {
  if (height < 1 || height > 8)
    throw ScaleExceeded("lemma1_check: height " + std::to_string(height) +
                        " outside [1, 8]");
  const auto data = collect_conditional_laws(kind, {height}, n_walks, n_steps, seed);
  const ConditionalCell& cell = data.cells.front();
  if (cell.n_events < 100)
    throw InsufficientSamples("lemma1_check: only " + std::to_string(cell.n_events) +
                              " conditioning events at height " +
                              std::to_string(height));

  const ExitDistribution dp = exit_time_dp(height, 2000);
  // Reference cell probabilities for X = 1..512 plus everything beyond.
  std::vector<double> probs(cell.counts.size());
  double head = 0.0;
  for (std::size_t m = 0; m < probs.size(); ++m) {
    probs[m] = dp.p[m];
    head += dp.p[m];
  }

  const ChiSquareResult chi =
      chi_square_from_counts(cell.counts, probs, cell.overflow, 1.0 - head);
  Lemma1Report rep;
  rep.kind = kind;
  rep.height = height;
  rep.statistic = chi.statistic;
  rep.dof = chi.dof;
  rep.p_value = chi.p_value;
  rep.n_events = cell.n_events;
  rep.n_censored = data.n_censored;
  return rep;
}

}  // namespace pwl
