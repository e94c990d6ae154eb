#include "pwl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

namespace pwl {

Estimate estimate_event_probability(const std::function<bool(CounterRng&)>& event,
                                    long long n_trials, std::uint64_t seed) {
  long long hits = 0;
  for (long long i = 0; i < n_trials; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    if (event(rng)) ++hits;
  }
  Estimate e;
  e.value = static_cast<double>(hits) / static_cast<double>(n_trials);
  e.stderr_ = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(n_trials));
  e.n_samples = n_trials;
  e.seed = seed;
  return e;
}

double chi_square_sf(double statistic, double dof) {
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

ChiSquareResult chi_square_from_counts(const std::vector<long long>& observed,
                                       const std::vector<double>& probs,
                                       long long tail_count, double tail_prob,
                                       double min_expected) {
  long long n = std::accumulate(observed.begin(), observed.end(), 0LL) + tail_count;
  // Build the full cell list (explicit cells followed by the tail cell), then
  // merge adjacent cells left-to-right until each merged cell's expected count
  // reaches min_expected. A trailing underfull merge is folded into the
  // previous cell so every final cell meets the floor.
  std::vector<double> merged_exp;
  std::vector<double> merged_obs;
  double acc_exp = 0.0;
  double acc_obs = 0.0;
  auto push_cell = [&](double exp_c, double obs_c) {
    acc_exp += exp_c;
    acc_obs += obs_c;
    if (acc_exp >= min_expected) {
      merged_exp.push_back(acc_exp);
      merged_obs.push_back(acc_obs);
      acc_exp = 0.0;
      acc_obs = 0.0;
    }
  };
  for (std::size_t i = 0; i < observed.size(); ++i)
    push_cell(static_cast<double>(n) * probs[i], static_cast<double>(observed[i]));
  if (tail_prob > 0.0 || tail_count > 0)
    push_cell(static_cast<double>(n) * tail_prob, static_cast<double>(tail_count));
  if (acc_exp > 0.0 || acc_obs > 0.0) {
    if (!merged_exp.empty()) {
      merged_exp.back() += acc_exp;
      merged_obs.back() += acc_obs;
    } else {
      merged_exp.push_back(acc_exp);
      merged_obs.push_back(acc_obs);
    }
  }

  ChiSquareResult r;
  r.n_samples = n;
  r.n_bins = static_cast<int>(merged_exp.size());
  r.dof = std::max(0, r.n_bins - 1);
  for (std::size_t i = 0; i < merged_exp.size(); ++i) {
    double d = merged_obs[i] - merged_exp[i];
    if (merged_exp[i] > 0.0) r.statistic += d * d / merged_exp[i];
  }
  r.p_value = r.dof > 0 ? chi_square_sf(r.statistic, static_cast<double>(r.dof)) : 1.0;
  return r;
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double f = cdf(sample[i]);
    sup = std::max(sup, std::abs(static_cast<double>(i + 1) / n - f));
    sup = std::max(sup, std::abs(f - static_cast<double>(i) / n));
  }
  return sup;
}

double tv_distance(const std::vector<long long>& counts, long long overflow_count,
                   const std::vector<double>& probs, double tail_prob) {
  long long n = std::accumulate(counts.begin(), counts.end(), 0LL) + overflow_count;
  double tv = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    double emp = i < counts.size() ? static_cast<double>(counts[i]) / n : 0.0;
    tv += std::abs(emp - probs[i]);
  }
  double emp_tail = static_cast<double>(overflow_count) / n;
  // Any empirical cells beyond the reference support were required to be
  // folded into overflow_count by the caller.
  tv += std::abs(emp_tail - tail_prob);
  return tv / 2.0;
}

namespace {

double mean_cross_distance(const std::vector<std::array<double, 2>>& a,
                           const std::vector<std::array<double, 2>>& b) {
  double s = 0.0;
  for (const auto& p : a)
    for (const auto& q : b) {
      double dx = p[0] - q[0];
      double dy = p[1] - q[1];
      s += std::sqrt(dx * dx + dy * dy);
    }
  return s / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double mean_within_distance(const std::vector<std::array<double, 2>>& a) {
  if (a.size() < 2) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      double dx = a[i][0] - a[j][0];
      double dy = a[i][1] - a[j][1];
      s += std::sqrt(dx * dx + dy * dy);
    }
  // V-statistic normalization (diagonal zeros included) so that the energy
  // statistic of a sample against itself is exactly zero.
  return 2.0 * s / (static_cast<double>(a.size()) * static_cast<double>(a.size()));
}

std::vector<std::array<double, 2>> subsample(const std::vector<std::array<double, 2>>& a,
                                             std::size_t cap, CounterRng& rng) {
  if (a.size() <= cap) return a;
  // Partial Fisher-Yates: the first `cap` entries of a seeded shuffle.
  std::vector<std::uint32_t> idx(a.size());
  std::iota(idx.begin(), idx.end(), 0u);
  for (std::size_t i = 0; i < cap; ++i) {
    std::size_t j = i + rng.bounded(static_cast<std::uint64_t>(a.size() - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<std::array<double, 2>> out(cap);
  for (std::size_t i = 0; i < cap; ++i) out[i] = a[idx[i]];
  return out;
}

double energy_statistic(const std::vector<std::array<double, 2>>& a,
                        const std::vector<std::array<double, 2>>& b) {
  return 2.0 * mean_cross_distance(a, b) - mean_within_distance(a) - mean_within_distance(b);
}

}  // namespace

double energy_distance_2d(const std::vector<std::array<double, 2>>& a,
                          const std::vector<std::array<double, 2>>& b,
                          std::uint64_t seed, std::size_t subsample_cap) {
  CounterRng rng(seed, 0xE5E5E5E5ULL);
  auto sa = subsample(a, subsample_cap, rng);
  auto sb = subsample(b, subsample_cap, rng);
  return energy_statistic(sa, sb);
}

PermutationTest energy_permutation_test(const std::vector<std::array<double, 2>>& a,
                                        const std::vector<std::array<double, 2>>& b,
                                        int n_perm, double quantile, std::uint64_t seed,
                                        std::size_t subsample_cap) {
  PermutationTest t;
  t.observed = energy_distance_2d(a, b, seed, subsample_cap);
  t.n_permutations = n_perm;

  std::vector<std::array<double, 2>> pool;
  pool.reserve(a.size() + b.size());
  pool.insert(pool.end(), a.begin(), a.end());
  pool.insert(pool.end(), b.begin(), b.end());

  std::vector<double> null_stats(static_cast<std::size_t>(n_perm));
  int n_ge = 0;
  for (int p = 0; p < n_perm; ++p) {
    CounterRng rng(seed, 0x9E9E0000ULL + static_cast<std::uint64_t>(p));
    std::vector<std::array<double, 2>> shuffled = pool;
    for (std::size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[rng.bounded(i)]);
    std::vector<std::array<double, 2>> pa(shuffled.begin(),
                                          shuffled.begin() + static_cast<long>(a.size()));
    std::vector<std::array<double, 2>> pb(shuffled.begin() + static_cast<long>(a.size()),
                                          shuffled.end());
    CounterRng sub_rng(seed, 0x5B5B0000ULL + static_cast<std::uint64_t>(p));
    auto sa = subsample(pa, subsample_cap, sub_rng);
    auto sb = subsample(pb, subsample_cap, sub_rng);
    null_stats[static_cast<std::size_t>(p)] = energy_statistic(sa, sb);
    if (null_stats[static_cast<std::size_t>(p)] >= t.observed) ++n_ge;
  }
  std::sort(null_stats.begin(), null_stats.end());
  // Nearest-rank upper quantile.
  std::size_t rank = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(n_perm) - 1.0,
                       std::ceil(quantile * n_perm) - 1.0));
  t.null_quantile = null_stats[rank];
  t.p_value = static_cast<double>(n_ge + 1) / static_cast<double>(n_perm + 1);
  return t;
}

std::array<double, 3> ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  double slope = (n * sxy - sx * sy) / denom;
  double intercept = (sy - slope * sx) / n;
  double ss_tot = syy - sy * sy / n;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (intercept + slope * x[i]);
    ss_res += r * r;
  }
  double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return {slope, intercept, r2};
}

TailFit fit_tail_exponent(const std::vector<double>& k_values,
                          const std::vector<Estimate>& estimates) {
  TailFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < k_values.size(); ++i) {
    if (estimates[i].value > 0.0) {
      lx.push_back(std::log(k_values[i]));
      ly.push_back(std::log(estimates[i].value));
      fit.k_values.push_back(k_values[i]);
      fit.estimates.push_back(estimates[i]);
    } else {
      ++fit.n_dropped;
    }
  }
  if (lx.size() < 3)
    throw InsufficientData("fit_tail_exponent: fewer than 3 positive estimates");
  auto [slope, intercept, r2] = ols_fit(lx, ly);
  fit.slope = slope;
  fit.intercept = intercept;
  fit.r_squared = r2;
  return fit;
}

}  // namespace pwl
