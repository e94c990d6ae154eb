#pragma once
// Kinetic prudent walk simulator.
//
// Rule: from the current site, a step direction is legal when no previously
// visited site lies on the open half-line {current + j*delta : j >= 1}; the
// walker picks uniformly among legal directions. Visited sites never leave
// the bounding box, so the half-line test reduces to "is there a visited
// parameter strictly beyond mine on my lattice line", which the per-axis
// line tables answer in O(1) (min/max occupied parameter per line).
//
// The walk also maintains its axial bounding box, a log of box growth
// events, and (optionally) the exact visited set for oracle checks.

#include <array>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "pwl/lattice.hpp"
#include "pwl/rng.hpp"

namespace pwl {

struct BoundingBox {
  std::int32_t a_min = 0, a_max = 0, b_min = 0, b_max = 0;

  std::int32_t width() const { return a_max - a_min + 1; }
  std::int32_t height() const { return b_max - b_min + 1; }
  bool contains(LatticePoint p) const {
    return p.a >= a_min && p.a <= a_max && p.b >= b_min && p.b <= b_max;
  }
  friend bool operator==(const BoundingBox& x, const BoundingBox& y) {
    return x.a_min == y.a_min && x.a_max == y.a_max && x.b_min == y.b_min &&
           x.b_max == y.b_max;
  }
};

// One box growth step: da/db = +1 (max side grew), -1 (min side), 0 (none).
// A triangular step along (1,-1) or (-1,1) can grow both in one step.
struct GrowthEvent {
  std::int64_t t = 0;
  std::int8_t da = 0;
  std::int8_t db = 0;

  bool grew_w() const { return da != 0; }
  bool grew_h() const { return db != 0; }
};

namespace detail {

// Min/max occupied parameter per lattice line. Line keys on every axis form
// a contiguous integer interval that extends by at most one per step, so the
// store is two flat arrays around a base key instead of a hash map.
class LineTable {
 public:
  void reset(std::int32_t key0, std::int32_t param0) {
    fwd_.clear();
    bwd_.clear();
    base_ = key0;
    fwd_.push_back({param0, param0});
  }

  void update(std::int32_t key, std::int32_t param) {
    if (key >= base_) {
      const std::size_t i = (std::size_t)(key - base_);
      if (i == fwd_.size()) {
        fwd_.push_back({param, param});
        return;
      }
      Range& r = fwd_[i];
      if (param < r.lo) r.lo = param;
      if (param > r.hi) r.hi = param;
    } else {
      const std::size_t i = (std::size_t)(base_ - 1 - key);
      if (i == bwd_.size()) {
        bwd_.push_back({param, param});
        return;
      }
      Range& r = bwd_[i];
      if (param < r.lo) r.lo = param;
      if (param > r.hi) r.hi = param;
    }
  }

  // Any visited parameter strictly greater / smaller on this line?
  bool beyond(std::int32_t key, std::int32_t param) const {
    return at(key).hi > param;
  }
  bool before(std::int32_t key, std::int32_t param) const {
    return at(key).lo < param;
  }

 private:
  struct Range {
    std::int32_t lo, hi;
  };
  const Range& at(std::int32_t key) const {
    return key >= base_ ? fwd_[(std::size_t)(key - base_)]
                        : bwd_[(std::size_t)(base_ - 1 - key)];
  }

  std::vector<Range> fwd_, bwd_;
  std::int32_t base_ = 0;
};

struct PointKeyHash {
  std::size_t operator()(std::uint64_t k) const {
    return (std::size_t)CounterRng::mix(k);
  }
};

inline std::uint64_t point_key(LatticePoint p) {
  return ((std::uint64_t)(std::uint32_t)p.a << 32) | (std::uint32_t)p.b;
}

}  // namespace detail

class PrudentWalk {
 public:
  // track_visited keeps the exact visited set (needed by oracle tests and
  // dump tooling; the stepping logic itself only needs the line tables).
  PrudentWalk(LatticeKind kind, std::uint64_t seed, bool track_visited = true);

  // One kinetic step. Returns false (and flags trapped) if no direction is
  // legal; the walk is unchanged in that case.
  bool advance();

  // Replay support: take the given direction if it is legal (returns false
  // and leaves the walk unchanged otherwise). Does not consume randomness.
  bool force_step(int dir_index);

  // Indices into directions(kind()) that are legal right now.
  int legal_directions(std::array<int, 6>& out) const;

  LatticeKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  bool trapped() const { return trapped_; }
  std::int64_t time() const { return (std::int64_t)sites_.size() - 1; }

  const std::vector<LatticePoint>& sites() const { return sites_; }
  LatticePoint position() const { return sites_.back(); }
  const BoundingBox& box() const { return box_; }
  const std::vector<GrowthEvent>& growth_events() const { return growth_; }

  bool tracks_visited() const { return track_visited_; }
  bool visited(LatticePoint p) const {
    return visited_.count(detail::point_key(p)) != 0;
  }
  std::size_t visited_count() const { return visited_.size(); }

 private:
  void apply_step(int pick);

  LatticeKind kind_;
  std::uint64_t seed_;
  CounterRng rng_;
  bool track_visited_;
  bool trapped_ = false;
  int n_dirs_;

  std::vector<LatticePoint> sites_;
  BoundingBox box_;
  std::vector<GrowthEvent> growth_;
  // axis 0: lines of constant b, parameter a   (steps +-(1,0))
  // axis 1: lines of constant a, parameter b   (steps +-(0,1))
  // axis 2: lines of constant a+b, parameter a (steps +-(1,-1); triangular)
  detail::LineTable lines_[3];
  std::unordered_set<std::uint64_t, detail::PointKeyHash> visited_;
};

// Runs a walk for `steps` steps (fewer if it traps).
PrudentWalk simulate(LatticeKind kind, std::int64_t steps, std::uint64_t seed,
                     bool track_visited = true);

// Runs until `n_complete` excursions are complete (see ExcursionRecord), the
// step cap is hit, or the walk traps.
PrudentWalk simulate_until_excursion(LatticeKind kind, int n_complete,
                                     std::int64_t t_cap, std::uint64_t seed,
                                     bool track_visited = false);

// Runs until U_k has been assigned for excursion `k` (i.e. k+1 height
// assignments have happened), the step cap is hit, or the walk traps.
// Cheaper than waiting for the excursion to complete when only the
// [T_k, U_k] segment matters.
PrudentWalk simulate_until_u(LatticeKind kind, int k, std::int64_t t_cap,
                             std::uint64_t seed, bool track_visited = false);

// --- excursion decomposition -------------------------------------------
//
// T_0 = 0; U_k is one step before the first height growth after T_k, and
// T_{k+1} one step before the first width growth after U_k. On the
// triangular lattice a single step can grow both dimensions; growth events
// are scanned in time order and each W/H component is consumed by at most
// one stopping-time assignment, which reduces to the plain definitions on
// the square lattice and keeps the decomposition finite in general
// (T_k <= U_k <= T_{k+1} with ties possible).

struct ExcursionRecord {
  std::int32_t k = 0;
  std::int64_t t_start = 0;   // T_k
  std::int64_t u = -1;        // U_k (-1 if never assigned)
  std::int64_t t_end = -1;    // T_{k+1} (-1 if never assigned)
  std::int32_t x = 0;         // X_k = W_{T_{k+1}} - W_{T_k}   (complete only)
  std::int32_t y = 0;         // Y_k = H_{T_{k+1}} - H_{T_k}   (complete only)
  std::int32_t vertical_span = 0;    // max |b_t - b_{T_k}| over [T_k, U_k]
  std::int32_t horizontal_span = 0;  // max |a_t - a_{U_k}| over [U_k, T_{k+1}]
  bool complete = false;
};

std::vector<ExcursionRecord> decompose_excursions(const PrudentWalk& walk);

// Incremental form of the same state machine; used to stop a simulation
// after a target number of complete excursions without storing records.
class ExcursionCounter {
 public:
  void consume(const GrowthEvent& e) {
    bool w_free = e.grew_w(), h_free = e.grew_h();
    for (;;) {
      if (awaiting_u_ && h_free) {
        ++u_assigned_;
        awaiting_u_ = false;
        h_free = false;
      } else if (!awaiting_u_ && w_free) {
        ++complete_;
        awaiting_u_ = true;
        w_free = false;
      } else {
        break;
      }
    }
  }
  int complete() const { return complete_; }
  // Number of U_k assignments so far; U_k exists once this exceeds k.
  int u_assigned() const { return u_assigned_; }

 private:
  bool awaiting_u_ = true;
  int complete_ = 0;
  int u_assigned_ = 0;
};

// Width/height after every step, reconstructed from the growth log.
// width_at(t) = 1 + #width growths in (0, t].
struct BoxDimsTimeline {
  explicit BoxDimsTimeline(const PrudentWalk& walk);
  std::int32_t width_at(std::int64_t t) const;
  std::int32_t height_at(std::int64_t t) const;

 private:
  std::vector<std::int64_t> w_times_, h_times_;  // growth times, ascending
};

// Crossing event A_k: the walker sits at one end of a vertical box edge at
// T_k and at the opposite end of the (width-grown, same height) box's edge
// at U_k, on the same side (east or west). Degenerate edges (height 1)
// cannot be crossed. Incomplete excursion k: false. k out of range: throws.
std::vector<std::uint8_t> crossing_events(
    const PrudentWalk& walk, const std::vector<ExcursionRecord>& records);
bool crossing_event(const PrudentWalk& walk, int k);

// Closed first-quadrant event for the embedded endpoint (x >= 0 and y >= 0).
bool quadrant_event(const PrudentWalk& walk);

}  // namespace pwl
