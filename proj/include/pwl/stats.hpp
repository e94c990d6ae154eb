#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pwl/errors.hpp"
#include "pwl/rng.hpp"

namespace pwl {

// A Monte Carlo point estimate with its standard error and provenance.
struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
  long long n_samples = 0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> meta;
};

// Binomial estimate of P(event). The event functor receives a generator
// seeded with substream i of `seed`, so trials are independent and the whole
// estimate is reproducible. stderr = sqrt(p(1-p)/N).
Estimate estimate_event_probability(const std::function<bool(CounterRng&)>& event,
                                    long long n_trials, std::uint64_t seed);

// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_sf(double statistic, double dof);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  int n_bins = 0;        // bins actually used after merging
  long long n_samples = 0;
};

// Pearson goodness-of-fit of observed counts against a discrete law given as
// cell probabilities (must sum to <= 1; the deficit, if any, is treated as an
// extra tail cell with observed count `tail_count`). Adjacent cells are merged
// left-to-right until every merged cell has expected count >= min_expected;
// the merge is deterministic. dof = (#merged cells - 1).
ChiSquareResult chi_square_from_counts(const std::vector<long long>& observed,
                                       const std::vector<double>& probs,
                                       long long tail_count = 0, double tail_prob = 0.0,
                                       double min_expected = 5.0);

// Classic one-sample Kolmogorov-Smirnov statistic sup_x |F_hat(x) - F(x)|.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

// Total-variation distance between an empirical distribution over cells
// 0..K-1 plus an overflow cell and a reference law (p, tail): counts beyond
// the reference support contribute to the overflow comparison.
double tv_distance(const std::vector<long long>& counts, long long overflow_count,
                   const std::vector<double>& probs, double tail_prob);

// Energy distance 2 E||a-b|| - E||a-a'|| - E||b-b'|| between planar samples.
// Above `subsample_cap` points per side a seeded subsample is used so the
// cost stays quadratic in the cap, not the sample size.
double energy_distance_2d(const std::vector<std::array<double, 2>>& a,
                          const std::vector<std::array<double, 2>>& b,
                          std::uint64_t seed = 0, std::size_t subsample_cap = 2000);

// Permutation null for the energy distance: pools the samples, re-splits them
// uniformly n_perm times, and returns the requested upper quantile of the
// resulting statistics (and the achieved p-value of the observed statistic).
struct PermutationTest {
  double observed = 0.0;
  double null_quantile = 0.0;   // e.g. 95th percentile of the permutation null
  double p_value = 1.0;
  int n_permutations = 0;
};
PermutationTest energy_permutation_test(const std::vector<std::array<double, 2>>& a,
                                        const std::vector<std::array<double, 2>>& b,
                                        int n_perm, double quantile, std::uint64_t seed,
                                        std::size_t subsample_cap = 2000);

struct TailFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> k_values;       // points used in the fit
  std::vector<Estimate> estimates;    // parallel to k_values
  int n_dropped = 0;                  // zero/negative estimates excluded
};

// OLS on (log k, log p_hat); zero-probability cells are dropped and counted,
// never imputed. Throws InsufficientData when fewer than 3 usable points
// remain.
TailFit fit_tail_exponent(const std::vector<double>& k_values,
                          const std::vector<Estimate>& estimates);

// Simple-regression helper: least-squares fit y = intercept + slope * x.
// Returns {slope, intercept, r_squared}.
std::array<double, 3> ols_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pwl
