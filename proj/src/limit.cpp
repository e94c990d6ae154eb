#include "pwl/limit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "pwl/effective.hpp"
#include "pwl/stats.hpp"

namespace pwl {

namespace {

double gaussian_quantile(double u) {
  return 1.4142135623730950488 * boost::math::erf_inv(2.0 * u - 1.0);
}

constexpr double kSqrt3Over2 = 0.86602540378443864676;

}  // namespace

BrownianPath sample_brownian(double horizon, double grid_step, std::uint64_t seed) {
  BrownianPath w;
  w.grid_step = grid_step;
  w.seed = seed;
  const auto n = static_cast<std::size_t>(std::ceil(horizon / grid_step));
  w.values.resize(n + 1);
  w.values[0] = 0.0;
  CounterRng rng(seed);
  const double scale = std::sqrt(grid_step);
  double v = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    v += scale * rng.gaussian();
    w.values[i] = v;
  }
  return w;
}

Occupation occupation_integrals(const BrownianPath& w, double horizon) {
  if (horizon > w.horizon() * (1.0 + 1e-12))
    throw HorizonExceeded("occupation_integrals: horizon beyond the sampled path");
  // Left endpoints of whole grid cells inside [0, horizon).
  const auto n_cells = static_cast<std::size_t>(
      std::min<double>(std::round(horizon / w.grid_step),
                       static_cast<double>(w.values.size() - 1)));
  long long below = 0, at_zero = 0;
  for (std::size_t i = 0; i < n_cells; ++i) {
    if (w.values[i] < 0.0)
      ++below;
    else if (w.values[i] == 0.0)
      ++at_zero;
  }
  Occupation occ;
  occ.below = static_cast<double>(below) * w.grid_step;
  occ.at_zero = static_cast<double>(at_zero) * w.grid_step;
  occ.above = horizon - occ.below - occ.at_zero;  // exact conservation
  return occ;
}

LimitFunctional z_functional(const BrownianPath& w, const std::array<double, 3>& sigma,
                             double u, double alpha) {
  const double horizon = alpha * u;
  if (horizon > w.horizon() * (1.0 + 1e-12))
    throw HorizonExceeded("z_functional: alpha*u = " + std::to_string(horizon) +
                          " beyond the sampled horizon " + std::to_string(w.horizon()));
  const Occupation occ = occupation_integrals(w, horizon);
  LimitFunctional z;
  z.value = {sigma[0] * occ.below, sigma[1] * occ.at_zero, sigma[2] * occ.above};
  z.u = u;
  z.alpha = alpha;
  z.sigma = sigma;
  return z;
}

PlanePoint project_to_plane(const std::array<double, 3>& value) {
  // e1 -> (sqrt(3)/2, 1/2), e2 -> (sqrt(3)/2, -1/2), e3 -> out of plane.
  return {kSqrt3Over2 * (value[0] + value[1]), 0.5 * (value[0] - value[1])};
}

std::array<PlanePoint, 3> default_step_vectors(LatticeKind kind) {
  if (kind == LatticeKind::kTriangular) {
    return {PlanePoint{kSqrt3Over2, 0.5}, PlanePoint{kSqrt3Over2, -0.5},
            PlanePoint{0.0, 0.0}};
  }
  return {PlanePoint{1.0, 0.0}, PlanePoint{0.0, 0.0}, PlanePoint{0.0, 1.0}};
}

PlanePoint gamma_m(const CoupledWalk& coupled, long long m,
                   const std::array<PlanePoint, 3>& step_vectors) {
  PlanePoint g{0.0, 0.0};
  for (long long i = 1; i <= m; ++i) {
    const long long s = coupled.S_hat[static_cast<std::size_t>(i)];
    const PlanePoint& v =
        s < 0 ? step_vectors[0] : (s == 0 ? step_vectors[1] : step_vectors[2]);
    g.x += v.x;
    g.y += v.y;
  }
  return g;
}

TimeChange time_change(const PrudentWalk& walk) {
  TimeChange tc;
  long long m = 0;
  for (const GrowthEvent& e : walk.growth_events())
    tc.pairs.emplace_back(++m, e.t);
  return tc;
}

AlphaEstimate estimate_alpha(LatticeKind kind, long long n_steps, long long n_runs,
                             std::uint64_t seed) {
  AlphaEstimate est;
  est.slopes.reserve(static_cast<std::size_t>(n_runs));
  for (long long i = 0; i < n_runs; ++i) {
    const PrudentWalk walk =
        simulate(kind, n_steps, seed + static_cast<std::uint64_t>(i),
                 /*track_visited=*/false);
    const TimeChange tc = time_change(walk);
    std::vector<double> xs, ys;
    xs.reserve(tc.pairs.size());
    ys.reserve(tc.pairs.size());
    for (const auto& [m, t] : tc.pairs) {
      xs.push_back(static_cast<double>(m));
      ys.push_back(static_cast<double>(t));
    }
    if (xs.size() < 2) continue;  // degenerate run (e.g. trapped immediately)
    est.slopes.push_back(ols_fit(xs, ys)[0]);
  }
  if (est.slopes.empty())
    throw InsufficientData("estimate_alpha: no run produced two growth events");

  const auto n = static_cast<double>(est.slopes.size());
  double mean = 0.0;
  for (double s : est.slopes) mean += s;
  mean /= n;
  est.alpha = mean;

  // Bootstrap over runs: percentile CI and standard error of the mean slope.
  constexpr int kBoot = 400;
  std::vector<double> boot(kBoot);
  CounterRng rng(seed, 0xB007B007ULL);
  for (int b = 0; b < kBoot; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < est.slopes.size(); ++i)
      s += est.slopes[rng.bounded(est.slopes.size())];
    boot[static_cast<std::size_t>(b)] = s / n;
  }
  std::sort(boot.begin(), boot.end());
  double bm = 0.0, bv = 0.0;
  for (double x : boot) bm += x;
  bm /= kBoot;
  for (double x : boot) bv += (x - bm) * (x - bm);
  est.stderr_ = std::sqrt(bv / (kBoot - 1));
  est.ci_lo = boot[static_cast<std::size_t>(std::floor(0.025 * (kBoot - 1)))];
  est.ci_hi = boot[static_cast<std::size_t>(std::ceil(0.975 * (kBoot - 1)))];
  return est;
}

double arcsine_cdf(double x) {
  if (x < 0.0 || x > 1.0)
    throw DomainError("arcsine_cdf: argument " + std::to_string(x) +
                      " outside [0, 1]");
  return 0.63661977236758134308 * std::asin(std::sqrt(x));  // (2/pi) asin
}

double lemma3_statistic(long long n, std::uint64_t seed) {
  const CoupledWalk cw = build_coupled_walk(simulate_effective(n, seed));
  long long sup = 0;
  for (std::size_t k = 0; k < cw.S.values.size(); ++k)
    sup = std::max(sup, std::abs(cw.S.values[k] - cw.S_hat[k]));
  return static_cast<double>(sup);
}

double lemma4_statistic(long long n, double delta, std::uint64_t seed) {
  const CoupledWalk cw = build_coupled_walk(simulate_effective(n, seed));
  const double theta = std::cbrt(static_cast<double>(n)) + delta;
  long long diff = 0, sup = 0;
  for (long long i = 1; i <= n; ++i) {
    if (cw.S_hat[static_cast<std::size_t>(i)] >= 0) ++diff;
    if (static_cast<double>(cw.S.values[static_cast<std::size_t>(i)]) >= theta) --diff;
    sup = std::max(sup, std::abs(diff));
  }
  return static_cast<double>(sup) / static_cast<double>(n);
}

double lemma4_statistic_lower(long long n, double delta, std::uint64_t seed) {
  const CoupledWalk cw = build_coupled_walk(simulate_effective(n, seed));
  const double theta = -std::cbrt(static_cast<double>(n)) + delta;
  long long diff = 0, sup = 0;
  for (long long i = 1; i <= n; ++i) {
    if (cw.S_hat[static_cast<std::size_t>(i)] < 0) ++diff;
    if (static_cast<double>(cw.S.values[static_cast<std::size_t>(i)]) < theta) --diff;
    sup = std::max(sup, std::abs(diff));
  }
  return static_cast<double>(sup) / static_cast<double>(n);
}

double lemma5_statistic(long long n, std::uint64_t seed, double sigma) {
  // One uniform per step drives both marginals (comonotone pairing).
  EffectiveTrajectory traj;
  traj.seed = seed;
  traj.values.reserve(static_cast<std::size_t>(n) + 1);
  traj.increments.reserve(static_cast<std::size_t>(n));
  traj.values.push_back(0);
  std::vector<double> b(static_cast<std::size_t>(n) + 1, 0.0);
  CounterRng rng(seed);
  long long s = 0;
  double bk = 0.0;
  for (long long i = 1; i <= n; ++i) {
    const double u = rng.uniform_open();
    const int xi = IncrementLaw::quantile(u);
    s += xi;
    traj.increments.push_back(xi);
    traj.values.push_back(s);
    bk += gaussian_quantile(u);
    b[static_cast<std::size_t>(i)] = bk;
  }
  const CoupledWalk cw = build_coupled_walk(std::move(traj));
  double sup = 0.0;
  for (std::size_t k = 0; k < cw.S_hat.size(); ++k)
    sup = std::max(sup, std::abs(static_cast<double>(cw.S_hat[k]) - sigma * b[k]));
  return sup;
}

double s_hat_occupation_fraction(long long n, std::uint64_t seed) {
  const CoupledWalk cw = build_coupled_walk(simulate_effective(n, seed));
  long long nonneg = 0;
  for (long long i = 1; i <= n; ++i)
    if (cw.S_hat[static_cast<std::size_t>(i)] >= 0) ++nonneg;
  return static_cast<double>(nonneg) / static_cast<double>(n);
}

}  // namespace pwl
