#pragma once
// The effective corner walk: an integer random walk whose increments have the
// two-sided geometric law p(k) = (1/3)(1/2)^|k| (mean 0, variance 4).  One
// increment corresponds to one unit of box growth of the prudent walk; the
// walk's first exit from a window [0, L-1] models how far the box grows in
// one direction before the transverse direction takes over.  This header also
// provides the exact exit-time distribution by dynamic programming and the
// conditional-law check that compares prudent-walk excursion data against it.

#include <cstdint>
#include <vector>

#include "pwl/errors.hpp"
#include "pwl/lattice.hpp"
#include "pwl/rng.hpp"

namespace pwl {

// Fixed increment law p(k) = (1/3)(1/2)^|k|.
struct IncrementLaw {
  static constexpr double kVariance = 4.0;
  static constexpr double kSigma = 2.0;

  // Exact point mass (1/3)*2^{-|k|}.
  static double pmf(int k);

  // Exact cumulative distribution P(xi <= k).
  static double cdf(int k);

  // Smallest k with cdf(k) >= u, for u in (0,1); the inverse-CDF transform
  // used when an increment must be paired with a Gaussian from one uniform.
  static int quantile(double u);

  // Sampling recipe: with probability 1/3 return 0; otherwise draw a uniform
  // sign and a Geometric(1/2) magnitude on {1,2,...}.
  static int sample(CounterRng& rng);
};

struct EffectiveTrajectory {
  std::vector<long long> values;  // S_0 = 0, S_1, ..., S_n
  std::vector<int> increments;    // xi_1..xi_n, values[i+1]-values[i] = increments[i]
  std::uint64_t seed = 0;
};

EffectiveTrajectory simulate_effective(long long n, std::uint64_t seed);

enum class ExitSide { Below, Above };

struct ExitSample {
  int L = 1;
  long long eta = 0;          // first time S leaves [0, L-1]
  ExitSide side = ExitSide::Below;
  long long overshoot = 0;    // distance past the first site outside the window
};

// Runs the walk from S_0 = 0 until it leaves [0, L-1].  The exit is almost
// sure; a defensive cap of 1e9 steps throws if ever hit.
ExitSample exit_time(int L, CounterRng& rng);

// Exact law of the exit time: p[m-1] = P(eta_L = m) for m = 1..n_max, and the
// remaining tail mass P(eta_L > n_max).  Computed by propagating the exact
// occupancy vector on [0, L-1]; the per-step exit mass aggregates the
// increment law's two geometric tails in closed form.
struct ExitDistribution {
  int L = 1;
  long long n_max = 0;
  std::vector<double> p;
  double tail = 0.0;

  double survival(long long n) const;  // P(eta_L >= n), n >= 1
};

// Valid for 1 <= L <= 64 and 1 <= n_max <= 10^4; throws ScaleExceeded beyond.
ExitDistribution exit_time_dp(int L, long long n_max);

// Convenience batch sampler for exit experiments (substreams of `seed`).
std::vector<ExitSample> exit_samples(int L, long long n_samples, std::uint64_t seed);

// Monte Carlo estimate of the survival probability P(eta_L >= n).
struct SurvivalEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  long long n_samples = 0;
};
SurvivalEstimate gamblers_ruin_estimate(int L, long long n, long long n_samples,
                                        std::uint64_t seed);

// Total-variation distance between an exit-time sample and the exact law on a
// fixed coarse partition: exact cells m = 1..4, half-octave buckets [5,6],
// [7,8], [9,12], [13,16], ... up to 512, and one tail cell.  On the raw per-m
// partition the statistic's own sampling noise at N ~ 10^5 reaches the 0.01
// comparison tolerance for wide windows (the law's m^{-3/2} stretch spreads
// tiny masses over hundreds of cells), so agreement checks bucket first: a
// faithful sampler concentrates well below the tolerance while any real mass
// defect still lands in a visible bucket.  Requires dp.n_max >= 512.
double exit_law_tv(const std::vector<long long>& etas, const ExitDistribution& dp);

// --- Conditional width-growth law -----------------------------------------
//
// For each completed excursion window k of a prudent walk, the width gain
// X_k is recorded together with the box height h = H at the window start.
// The comparison law is the exact exit-time distribution for a window of
// size h.  Collection rule, chosen so the sample is unbiased: a window
// qualifies if it STARTS by time n_steps (a past-measurable event), and the
// walk is run up to 10 * n_steps so that qualifying windows can finish;
// windows still open at the hard cap are counted as censored and excluded.
// Window 0 events with zero width gain (paths whose first move is vertical)
// are excluded as well since the exit law's support starts at 1; the count
// is reported.

struct ConditionalCell {
  int height = 0;
  std::vector<long long> counts;  // counts[m-1] = #events with X = m, m = 1..cap
  long long overflow = 0;         // events with X beyond the count array
  long long n_events = 0;
};

struct ConditionalLawData {
  std::vector<ConditionalCell> cells;   // one per requested height, in order
  long long n_walks = 0;
  long long n_censored = 0;             // qualifying windows unfinished at the cap
  long long n_zero_dropped = 0;         // window-0 events with X = 0
  long long n_trapped = 0;              // walks that trapped before the cap
};

ConditionalLawData collect_conditional_laws(LatticeKind kind,
                                            const std::vector<int>& heights,
                                            long long n_walks, long long n_steps,
                                            std::uint64_t seed);

struct Lemma1Report {
  LatticeKind kind = LatticeKind::kSquare;
  int height = 0;
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  long long n_events = 0;
  long long n_censored = 0;
};

// Chi-square comparison of the conditional width-gain law at one height
// against the exact exit-time law.  Throws InsufficientSamples below 100
// conditioning events.  1 <= height <= 8.
Lemma1Report lemma1_check(LatticeKind kind, int height, long long n_walks,
                          std::uint64_t seed, long long n_steps = 1000);

}  // namespace pwl
