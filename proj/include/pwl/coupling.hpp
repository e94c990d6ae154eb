#pragma once
// Corner process and coupled corrected walk.
//
// The corner process gamma-hat follows the bounding-box corner nearest to the
// walker; between box growths the walker hugs one corner, so the trace is a
// faithful piecewise-constant shadow of the walk at box scale.  The coupled
// walk S-hat repairs an effective walk S so that its successive down/up
// record crossings are exactly -1/+1: at each crossing time tau_j the
// overshoot is cancelled by a compensator Delta_j, giving
// S-hat_n = S_n + sum_{j : tau_j <= n} Delta_j.

#include <cstdint>
#include <vector>

#include "pwl/effective.hpp"
#include "pwl/errors.hpp"
#include "pwl/lattice.hpp"
#include "pwl/prudent.hpp"

namespace pwl {

struct CornerTrace {
  std::vector<LatticePoint> corners_axial;  // exact integer corners, one per time
  std::vector<PlanePoint> corners;          // embedded corners, parallel
  const PrudentWalk* source = nullptr;
};

// gamma-hat_t = the bounding-box corner nearest to gamma_t in axial L1
// distance, ties broken toward larger a, then larger b.
CornerTrace corner_trace(const PrudentWalk& walk);

// Which coordinate is transverse for an excursion piece: vertical pieces
// (height-growing, [T_k, U_k]) displace in b; horizontal pieces in a.
enum class TransverseAxis { B, A };

struct TruncationCap {
  long long cap = 0;
};

// Maximal prefix of the excursion whose transverse displacement from its
// first site never exceeds cap (in absolute value).  An excursion whose span
// is <= cap is returned unchanged.
std::vector<LatticePoint> truncate_excursion(const std::vector<LatticePoint>& excursion,
                                             TruncationCap cap, TransverseAxis axis);

// One excursion piece of a decomposed walk, as an index range into sites().
struct ExcursionPiece {
  std::int32_t k = 0;            // window index
  std::int64_t begin = 0;        // first site index (T_k or U_k)
  std::int64_t end = 0;          // last site index, inclusive (U_k or T_{k+1})
  TransverseAxis axis = TransverseAxis::B;
  std::int64_t span = 0;         // max transverse displacement over the piece
};

// The vertical and horizontal pieces of every complete window, in time order
// (v_0, h_0, v_1, h_1, ...).
std::vector<ExcursionPiece> excursion_pieces(const PrudentWalk& walk);

struct OvershootLedger {
  std::vector<long long> taus;    // tau_0 = 0, tau_1, tau_2, ...
  std::vector<long long> deltas;  // Delta_1, Delta_2, ... (deltas[j-1] = Delta_j)
};

struct CoupledWalk {
  EffectiveTrajectory S;
  std::vector<long long> S_hat;
  OvershootLedger ledger;
};

// Scans S once for the alternating crossing times
//   tau_{2k+1} = min{n > tau_{2k}   : S_n < S_{tau_{2k}}},
//   tau_{2k+2} = min{n > tau_{2k+1} : S_n > S_{tau_{2k+1}}},
// with compensators Delta_{2k+1} = -1 - (S_{tau_{2k+1}} - S_{tau_{2k}}) and
// Delta_{2k+2} = 1 - (S_{tau_{2k+2}} - S_{tau_{2k+1}}).
CoupledWalk build_coupled_walk(EffectiveTrajectory S);

// max over s <= t of the embedded Euclidean distance between walker and
// corner, divided by t.
double sup_distance(const PrudentWalk& walk, const CornerTrace& trace, long long t);

struct TruncationReport {
  long long n_pieces = 0;
  long long n_altered = 0;
  double fraction_altered = 0.0;
};

// Applies truncation caps to every excursion piece of the walk and reports
// how many pieces were shortened.  caps[i] applies to piece i; a single cap
// is broadcast, and a short list is extended with its last entry.
TruncationReport coupling_equality_check(const PrudentWalk& walk,
                                         const std::vector<TruncationCap>& caps);

}  // namespace pwl
