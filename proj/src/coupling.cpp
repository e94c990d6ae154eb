#include "pwl/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace pwl {

CornerTrace corner_trace(const PrudentWalk& walk) {
  CornerTrace trace;
  trace.source = &walk;
  const auto& sites = walk.sites();
  trace.corners_axial.reserve(sites.size());
  trace.corners.reserve(sites.size());

  BoundingBox box;  // starts as the 1x1 box at the origin
  for (const LatticePoint& p : sites) {
    if (p.a < box.a_min) box.a_min = p.a;
    if (p.a > box.a_max) box.a_max = p.a;
    if (p.b < box.b_min) box.b_min = p.b;
    if (p.b > box.b_max) box.b_max = p.b;

    LatticePoint best{box.a_min, box.b_min};
    long long best_d = -1;
    for (std::int32_t ca : {box.a_min, box.a_max}) {
      for (std::int32_t cb : {box.b_min, box.b_max}) {
        const long long d = std::abs((long long)p.a - ca) + std::abs((long long)p.b - cb);
        const bool better =
            best_d < 0 || d < best_d ||
            (d == best_d && (ca > best.a || (ca == best.a && cb > best.b)));
        if (better) {
          best = {ca, cb};
          best_d = d;
        }
      }
    }
    trace.corners_axial.push_back(best);
    trace.corners.push_back(embed(walk.kind(), best));
  }
  return trace;
}

std::vector<LatticePoint> truncate_excursion(const std::vector<LatticePoint>& excursion,
                                             TruncationCap cap, TransverseAxis axis) {
  std::vector<LatticePoint> out;
  if (excursion.empty()) return out;
  const LatticePoint start = excursion.front();
  for (const LatticePoint& p : excursion) {
    const long long disp = axis == TransverseAxis::B ? (long long)p.b - start.b
                                                     : (long long)p.a - start.a;
    if (std::abs(disp) > cap.cap) break;
    out.push_back(p);
  }
  return out;
}

std::vector<ExcursionPiece> excursion_pieces(const PrudentWalk& walk) {
  std::vector<ExcursionPiece> pieces;
  for (const ExcursionRecord& r : decompose_excursions(walk)) {
    if (!r.complete) continue;
    ExcursionPiece v;
    v.k = r.k;
    v.begin = r.t_start;
    v.end = r.u;
    v.axis = TransverseAxis::B;
    v.span = r.vertical_span;
    pieces.push_back(v);
    ExcursionPiece h;
    h.k = r.k;
    h.begin = r.u;
    h.end = r.t_end;
    h.axis = TransverseAxis::A;
    h.span = r.horizontal_span;
    pieces.push_back(h);
  }
  return pieces;
}

CoupledWalk build_coupled_walk(EffectiveTrajectory S) {
  CoupledWalk cw;
  cw.ledger.taus.push_back(0);
  const std::vector<long long>& v = S.values;

  bool down_next = true;  // tau_1 is a down-crossing of the level at tau_0
  long long level = v.empty() ? 0 : v[0];
  for (long long n = 1; n < (long long)v.size(); ++n) {
    if (down_next ? v[(std::size_t)n] < level : v[(std::size_t)n] > level) {
      const long long delta = down_next ? -1 - (v[(std::size_t)n] - level)
                                        : 1 - (v[(std::size_t)n] - level);
      cw.ledger.taus.push_back(n);
      cw.ledger.deltas.push_back(delta);
      level = v[(std::size_t)n];
      down_next = !down_next;
    }
  }

  cw.S_hat.resize(v.size());
  std::size_t j = 1;  // next ledger entry to apply (taus[j] <-> deltas[j-1])
  long long correction = 0;
  for (std::size_t n = 0; n < v.size(); ++n) {
    while (j < cw.ledger.taus.size() && cw.ledger.taus[j] == (long long)n) {
      correction += cw.ledger.deltas[j - 1];
      ++j;
    }
    cw.S_hat[n] = v[n] + correction;
  }
  cw.S = std::move(S);
  return cw;
}

double sup_distance(const PrudentWalk& walk, const CornerTrace& trace, long long t) {
  if (t <= 0) return 0.0;  // both processes start at the origin
  const auto& sites = walk.sites();
  double sup2 = 0.0;
  for (long long s = 0; s <= t; ++s) {
    const PlanePoint g = embed(walk.kind(), sites[(std::size_t)s]);
    const PlanePoint c = trace.corners[(std::size_t)s];
    const double dx = g.x - c.x;
    const double dy = g.y - c.y;
    sup2 = std::max(sup2, dx * dx + dy * dy);
  }
  return std::sqrt(sup2) / (double)t;
}

TruncationReport coupling_equality_check(const PrudentWalk& walk,
                                         const std::vector<TruncationCap>& caps) {
  TruncationReport rep;
  if (caps.empty()) return rep;
  const auto pieces = excursion_pieces(walk);
  const auto& sites = walk.sites();
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const ExcursionPiece& piece = pieces[i];
    const TruncationCap cap = caps[std::min(i, caps.size() - 1)];
    std::vector<LatticePoint> ex(sites.begin() + piece.begin,
                                 sites.begin() + piece.end + 1);
    const auto truncated = truncate_excursion(ex, cap, piece.axis);
    ++rep.n_pieces;
    if (truncated.size() != ex.size()) ++rep.n_altered;
  }
  rep.fraction_altered =
      rep.n_pieces > 0 ? (double)rep.n_altered / (double)rep.n_pieces : 0.0;
  return rep;
}

}  // namespace pwl
