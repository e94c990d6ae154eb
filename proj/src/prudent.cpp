#include "pwl/prudent.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <string>

#include "pwl/errors.hpp"

namespace pwl {

PrudentWalk::PrudentWalk(LatticeKind kind, std::uint64_t seed,
                         bool track_visited)
    : kind_(kind),
      seed_(seed),
      rng_(seed),
      track_visited_(track_visited),
      n_dirs_(direction_count(kind)) {
  sites_.push_back({0, 0});
  lines_[0].reset(0, 0);
  lines_[1].reset(0, 0);
  if (n_dirs_ == 6) lines_[2].reset(0, 0);
  if (track_visited_) visited_.insert(detail::point_key({0, 0}));
}

int PrudentWalk::legal_directions(std::array<int, 6>& out) const {
  const LatticePoint p = sites_.back();
  int n = 0;
  if (!lines_[0].beyond(p.b, p.a)) out[n++] = 0;  // +(1,0)
  if (!lines_[0].before(p.b, p.a)) out[n++] = 1;  // -(1,0)
  if (!lines_[1].beyond(p.a, p.b)) out[n++] = 2;  // +(0,1)
  if (!lines_[1].before(p.a, p.b)) out[n++] = 3;  // -(0,1)
  if (n_dirs_ == 6) {
    const std::int32_t k = p.a + p.b;
    if (!lines_[2].beyond(k, p.a)) out[n++] = 4;  // +(1,-1)
    if (!lines_[2].before(k, p.a)) out[n++] = 5;  // -(1,1) reversed: (-1,1)
  }
  return n;
}

bool PrudentWalk::advance() {
  if (trapped_) return false;
  std::array<int, 6> legal;
  const int n = legal_directions(legal);
  if (n == 0) {
    trapped_ = true;
    return false;
  }
  apply_step(legal[(std::size_t)rng_.bounded((std::uint64_t)n)]);
  return true;
}

bool PrudentWalk::force_step(int dir_index) {
  if (trapped_ || dir_index < 0 || dir_index >= n_dirs_) return false;
  std::array<int, 6> legal;
  const int n = legal_directions(legal);
  for (int i = 0; i < n; ++i) {
    if (legal[(std::size_t)i] == dir_index) {
      apply_step(dir_index);
      return true;
    }
  }
  return false;
}

void PrudentWalk::apply_step(int pick) {
  const LatticePoint d = directions(kind_)[(std::size_t)pick].delta;
  const LatticePoint p = sites_.back();
  const LatticePoint q{p.a + d.a, p.b + d.b};
  sites_.push_back(q);

  std::int8_t da = 0, db = 0;
  if (q.a > box_.a_max) {
    box_.a_max = q.a;
    da = 1;
  } else if (q.a < box_.a_min) {
    box_.a_min = q.a;
    da = -1;
  }
  if (q.b > box_.b_max) {
    box_.b_max = q.b;
    db = 1;
  } else if (q.b < box_.b_min) {
    box_.b_min = q.b;
    db = -1;
  }
  if (da != 0 || db != 0) growth_.push_back({time(), da, db});

  lines_[0].update(q.b, q.a);
  lines_[1].update(q.a, q.b);
  if (n_dirs_ == 6) lines_[2].update(q.a + q.b, q.a);
  if (track_visited_) visited_.insert(detail::point_key(q));
}

PrudentWalk simulate(LatticeKind kind, std::int64_t steps, std::uint64_t seed,
                     bool track_visited) {
  PrudentWalk w(kind, seed, track_visited);
  for (std::int64_t i = 0; i < steps; ++i) {
    if (!w.advance()) break;
  }
  return w;
}

PrudentWalk simulate_until_excursion(LatticeKind kind, int n_complete,
                                     std::int64_t t_cap, std::uint64_t seed,
                                     bool track_visited) {
  PrudentWalk w(kind, seed, track_visited);
  ExcursionCounter counter;
  std::size_t consumed = 0;
  while (w.time() < t_cap && counter.complete() < n_complete) {
    if (!w.advance()) break;
    const auto& ev = w.growth_events();
    while (consumed < ev.size()) counter.consume(ev[consumed++]);
  }
  return w;
}

PrudentWalk simulate_until_u(LatticeKind kind, int k, std::int64_t t_cap,
                             std::uint64_t seed, bool track_visited) {
  PrudentWalk w(kind, seed, track_visited);
  ExcursionCounter counter;
  std::size_t consumed = 0;
  while (w.time() < t_cap && counter.u_assigned() <= k) {
    if (!w.advance()) break;
    const auto& ev = w.growth_events();
    while (consumed < ev.size()) counter.consume(ev[consumed++]);
  }
  return w;
}

std::vector<ExcursionRecord> decompose_excursions(const PrudentWalk& walk) {
  std::vector<ExcursionRecord> recs;
  recs.push_back(ExcursionRecord{});  // k = 0, t_start = 0
  std::vector<std::int32_t> w_at_start{1}, h_at_start{1};
  bool awaiting_u = true;
  std::int32_t w_count = 1, h_count = 1;

  for (const GrowthEvent& e : walk.growth_events()) {
    bool w_free = e.grew_w(), h_free = e.grew_h();
    for (;;) {
      if (awaiting_u && h_free) {
        recs.back().u = e.t - 1;
        awaiting_u = false;
        h_free = false;
      } else if (!awaiting_u && w_free) {
        ExcursionRecord& r = recs.back();
        r.t_end = e.t - 1;
        r.x = w_count - w_at_start[(std::size_t)r.k];
        r.y = h_count - h_at_start[(std::size_t)r.k];
        r.complete = true;
        ExcursionRecord next;
        next.k = r.k + 1;
        next.t_start = e.t - 1;
        recs.push_back(next);
        w_at_start.push_back(w_count);
        h_at_start.push_back(h_count);
        awaiting_u = true;
        w_free = false;
      } else {
        break;
      }
    }
    if (e.grew_w()) ++w_count;
    if (e.grew_h()) ++h_count;
  }

  const auto& sites = walk.sites();
  for (ExcursionRecord& r : recs) {
    if (!r.complete) continue;
    const std::int32_t b0 = sites[(std::size_t)r.t_start].b;
    std::int32_t v = 0;
    for (std::int64_t t = r.t_start; t <= r.u; ++t) {
      const std::int32_t d = std::abs(sites[(std::size_t)t].b - b0);
      if (d > v) v = d;
    }
    r.vertical_span = v;
    const std::int32_t a0 = sites[(std::size_t)r.u].a;
    std::int32_t h = 0;
    for (std::int64_t t = r.u; t <= r.t_end; ++t) {
      const std::int32_t d = std::abs(sites[(std::size_t)t].a - a0);
      if (d > h) h = d;
    }
    r.horizontal_span = h;
  }
  return recs;
}

BoxDimsTimeline::BoxDimsTimeline(const PrudentWalk& walk) {
  for (const GrowthEvent& e : walk.growth_events()) {
    if (e.grew_w()) w_times_.push_back(e.t);
    if (e.grew_h()) h_times_.push_back(e.t);
  }
}

std::int32_t BoxDimsTimeline::width_at(std::int64_t t) const {
  return 1 + (std::int32_t)(std::upper_bound(w_times_.begin(), w_times_.end(),
                                             t) -
                            w_times_.begin());
}

std::int32_t BoxDimsTimeline::height_at(std::int64_t t) const {
  return 1 + (std::int32_t)(std::upper_bound(h_times_.begin(), h_times_.end(),
                                             t) -
                            h_times_.begin());
}

namespace {

// Replays growth events to expose the bounding box at queried times
// (queries must be nondecreasing).
class BoxCursor {
 public:
  explicit BoxCursor(const std::vector<GrowthEvent>& ev) : ev_(&ev) {}
  const BoundingBox& at(std::int64_t t) {
    while (i_ < ev_->size() && (*ev_)[i_].t <= t) {
      const GrowthEvent& e = (*ev_)[i_];
      if (e.da > 0) ++box_.a_max;
      if (e.da < 0) --box_.a_min;
      if (e.db > 0) ++box_.b_max;
      if (e.db < 0) --box_.b_min;
      ++i_;
    }
    return box_;
  }

 private:
  const std::vector<GrowthEvent>* ev_;
  std::size_t i_ = 0;
  BoundingBox box_;
};

}  // namespace

std::vector<std::uint8_t> crossing_events(
    const PrudentWalk& walk, const std::vector<ExcursionRecord>& records) {
  std::vector<std::uint8_t> out(records.size(), 0);
  BoxCursor cur(walk.growth_events());
  const auto& sites = walk.sites();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ExcursionRecord& r = records[i];
    if (r.u < 0) continue;  // the event is determined once U_k is assigned
    const BoundingBox box1 = cur.at(r.t_start);
    const LatticePoint p1 = sites[(std::size_t)r.t_start];
    const BoundingBox box2 = cur.at(r.u);
    const LatticePoint p2 = sites[(std::size_t)r.u];
    // Height cannot change on (T_k, U_k], so box1/box2 share the b-range.
    if (box1.b_min == box1.b_max) continue;
    const bool east = p1.a == box1.a_max && p2.a == box2.a_max;
    const bool west = p1.a == box1.a_min && p2.a == box2.a_min;
    if (!east && !west) continue;
    const bool up = p1.b == box1.b_min && p2.b == box1.b_max;
    const bool down = p1.b == box1.b_max && p2.b == box1.b_min;
    out[i] = (up || down) ? 1 : 0;
  }
  return out;
}

bool crossing_event(const PrudentWalk& walk, int k) {
  const auto records = decompose_excursions(walk);
  if (k < 0 || (std::size_t)k >= records.size() || records[(std::size_t)k].u < 0)
    throw IncompleteExcursion("crossing_event: U_" + std::to_string(k) +
                              " not reached by this path");
  return crossing_events(walk, records)[(std::size_t)k] != 0;
}

bool quadrant_event(const PrudentWalk& walk) {
  const PlanePoint p = embed(walk.kind(), walk.position());
  return p.x >= 0.0 && p.y >= 0.0;
}

}  // namespace pwl
