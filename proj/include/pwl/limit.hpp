#pragma once
// Scaling-limit machinery: discretized Brownian paths and their occupation
// integrals, the limit functional Z (a sign-occupation integral expressed in
// a fixed 3-vector basis), its discrete partial-sum approximant Gamma_m, the
// time change t(m) from effective steps to walk time, the alpha (time-change
// slope) estimator, and the standalone diagnostics for the corrected-walk
// comparison statistics.

#include <array>
#include <cstdint>
#include <vector>

#include "pwl/coupling.hpp"
#include "pwl/errors.hpp"
#include "pwl/lattice.hpp"
#include "pwl/prudent.hpp"

namespace pwl {

struct BrownianPath {
  double grid_step = 1.0;
  std::vector<double> values;  // W(0) = 0, W(grid_step), ...
  std::uint64_t seed = 0;

  double horizon() const {
    return grid_step * static_cast<double>(values.size() - 1);
  }
};

// Euler construction: independent N(0, grid_step) increments.
BrownianPath sample_brownian(double horizon, double grid_step, std::uint64_t seed);

struct Occupation {
  double below = 0.0;
  double at_zero = 0.0;
  double above = 0.0;
};

// Left-endpoint Riemann sums of the three sign indicators over [0, horizon].
// below and at_zero are (cell count) * grid_step; above is the residual
// horizon - below - at_zero, so the three always sum to horizon exactly.
// at_zero counts exact floating-point zeros only.
Occupation occupation_integrals(const BrownianPath& w, double horizon);

// Z value in the fixed basis (e1, e2, e3): component i is sigma_i times the
// occupation measure of the corresponding sign class over [0, alpha*u].
struct LimitFunctional {
  std::array<double, 3> value{0.0, 0.0, 0.0};
  double u = 0.0;
  double alpha = 0.0;
  std::array<double, 3> sigma{0.0, 0.0, 0.0};
};

LimitFunctional z_functional(const BrownianPath& w, const std::array<double, 3>& sigma,
                             double u, double alpha);

// Projection of a basis 3-vector onto the lattice plane.  e1 and e2 embed to
// the two triangular basis directions; e3 is orthogonal to the plane, so its
// projection is the zero vector.
PlanePoint project_to_plane(const std::array<double, 3>& value);

// Default step vectors (v_neg, v_zero, v_pos) for Gamma_m: the plane
// projections of (e1, e2, e3) for the triangular lattice and the two axis
// unit vectors (negative class, positive class) for the square lattice.
std::array<PlanePoint, 3> default_step_vectors(LatticeKind kind);

// Gamma_m = sum_{i=1..m} of the step vector selected by sign(S_hat_i).
PlanePoint gamma_m(const CoupledWalk& coupled, long long m,
                   const std::array<PlanePoint, 3>& step_vectors);

struct TimeChange {
  std::vector<std::pair<long long, long long>> pairs;  // (m, t(m)), m = 1..
};

// t(m) = walk time of the m-th box-growth event (width and height growths
// interleaved in order of occurrence; a step growing both counts once).
TimeChange time_change(const PrudentWalk& walk);

struct AlphaEstimate {
  double alpha = 0.0;
  double stderr_ = 0.0;
  double ci_lo = 0.0;   // bootstrap 95% percentile interval
  double ci_hi = 0.0;
  std::vector<double> slopes;  // one least-squares slope per run
};

// Per-run least-squares slope (with intercept) of t(m) vs m, averaged over N
// runs; stderr and CI from a seeded bootstrap over the run slopes.
AlphaEstimate estimate_alpha(LatticeKind kind, long long n_steps, long long n_runs,
                             std::uint64_t seed);

// (2/pi) arcsin(sqrt(x)); the occupation-fraction law of Brownian motion.
double arcsine_cdf(double x);

// --- corrected-walk comparison statistics ---------------------------------

// sup_{0<=k<=n} |S_k - S_hat_k| over one effective trajectory of n steps.
double lemma3_statistic(long long n, std::uint64_t seed);

// sup_{1<=k<=n} (1/n) |sum_{i<=k} 1{S_hat_i >= 0} - sum_{i<=k} 1{S_i >= theta}|
// with theta = n^{1/3} + delta.
double lemma4_statistic(long long n, double delta, std::uint64_t seed);

// Companion statistic with the lower-threshold indicator pair:
// 1{S_hat_i < 0} vs 1{S_i < -n^{1/3} + delta}.
double lemma4_statistic_lower(long long n, double delta, std::uint64_t seed);

// sup_{0<=k<=n} |S_hat_k - sigma B_k| where the increment and the Gaussian
// are drawn comonotonically from one shared uniform per step (the "same seed
// stream" pairing; a diagnostic, not an embedding construction).
double lemma5_statistic(long long n, std::uint64_t seed, double sigma = 2.0);

// Occupation fraction of the nonnegative half-line by S_hat over n steps;
// compared against arcsine_cdf in the occupation experiments.
double s_hat_occupation_fraction(long long n, std::uint64_t seed);

}  // namespace pwl
