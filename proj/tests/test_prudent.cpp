#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdint>
#include <vector>

#include "pwl/lattice.hpp"
#include "pwl/prudent.hpp"
#include "pwl/rng.hpp"

using namespace pwl;

namespace {

// Oracle legality: scan every visited site for membership on the open
// half-line from p along d (O(sites) per query; reference only).
bool on_ray(LatticePoint p, LatticePoint d, LatticePoint s) {
  const std::int64_t dx = s.a - p.a, dy = s.b - p.b;
  std::int64_t j;
  if (d.a != 0) {
    if (dx % d.a != 0) return false;
    j = dx / d.a;
  } else {
    if (dx != 0) return false;
    j = dy / d.b;
  }
  if (j < 1) return false;
  return dx == j * d.a && dy == j * d.b;
}

std::vector<int> naive_legal(const std::vector<LatticePoint>& sites,
                             LatticeKind kind) {
  const LatticePoint p = sites.back();
  std::vector<int> out;
  const auto& dirs = directions(kind);
  for (int i = 0; i < direction_count(kind); ++i) {
    bool blocked = false;
    for (const LatticePoint& s : sites) {
      if (on_ray(p, dirs[(std::size_t)i].delta, s)) {
        blocked = true;
        break;
      }
    }
    if (!blocked) out.push_back(i);
  }
  return out;
}

BoundingBox naive_box(const std::vector<LatticePoint>& sites) {
  BoundingBox b;
  for (const LatticePoint& s : sites) {
    if (s.a < b.a_min) b.a_min = s.a;
    if (s.a > b.a_max) b.a_max = s.a;
    if (s.b < b.b_min) b.b_min = s.b;
    if (s.b > b.b_max) b.b_max = s.b;
  }
  return b;
}

// E, N, E, S, E, S, E on the square lattice; direction indices.
constexpr int kFixtureSteps[] = {0, 2, 0, 3, 0, 3, 0};

PrudentWalk make_fixture_walk() {
  PrudentWalk w(LatticeKind::kSquare, 0);
  for (int d : kFixtureSteps) REQUIRE(w.force_step(d));
  return w;
}

}  // namespace

TEST_CASE("line-index legality matches the ray-scan oracle") {
  for (LatticeKind kind : {LatticeKind::kSquare, LatticeKind::kTriangular}) {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
      PrudentWalk w(kind, seed);
      for (int t = 0; t < 200; ++t) {
        std::array<int, 6> fast{};
        const int n = w.legal_directions(fast);
        const std::vector<int> slow = naive_legal(w.sites(), kind);
        REQUIRE((std::size_t)n == slow.size());
        for (int i = 0; i < n; ++i) REQUIRE(fast[(std::size_t)i] == slow[(std::size_t)i]);
        if (!w.advance()) break;
      }
    }
  }
}

TEST_CASE("walks are self-avoiding and box matches sites") {
  for (LatticeKind kind : {LatticeKind::kSquare, LatticeKind::kTriangular}) {
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
      const PrudentWalk w = simulate(kind, 2000, seed);
      CHECK(w.visited_count() == w.sites().size());
      CHECK(w.box() == naive_box(w.sites()));
      for (const LatticePoint& s : w.sites()) CHECK(w.visited(s));
    }
  }
}

TEST_CASE("square walks never trap") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const PrudentWalk w = simulate(LatticeKind::kSquare, 3000, seed);
    CHECK_FALSE(w.trapped());
    CHECK(w.time() == 3000);
  }
}

TEST_CASE("first step is uniform over all directions") {
  for (LatticeKind kind : {LatticeKind::kSquare, LatticeKind::kTriangular}) {
    const int nd = direction_count(kind);
    const int n = 6000 * nd;
    std::vector<int> counts((std::size_t)nd, 0);
    for (int i = 0; i < n; ++i) {
      PrudentWalk w(kind, (std::uint64_t)(7000 + i));
      REQUIRE(w.advance());
      const LatticePoint q = w.position();
      for (int k = 0; k < nd; ++k) {
        if (directions(kind)[(std::size_t)k].delta == q) ++counts[(std::size_t)k];
      }
    }
    for (int k = 0; k < nd; ++k) {
      CHECK(std::abs(counts[(std::size_t)k] - 6000) < 450);  // ~6 sigma
    }
  }
}

TEST_CASE("same seed reproduces the path, different seeds differ") {
  const PrudentWalk w1 = simulate(LatticeKind::kTriangular, 500, 99);
  const PrudentWalk w2 = simulate(LatticeKind::kTriangular, 500, 99);
  REQUIRE(w1.sites().size() == w2.sites().size());
  for (std::size_t i = 0; i < w1.sites().size(); ++i) {
    REQUIRE(w1.sites()[i] == w2.sites()[i]);
  }
  const PrudentWalk w3 = simulate(LatticeKind::kTriangular, 500, 100);
  bool differs = w3.sites().size() != w1.sites().size();
  for (std::size_t i = 0; !differs && i < w1.sites().size(); ++i) {
    differs = !(w1.sites()[i] == w3.sites()[i]);
  }
  CHECK(differs);
}

TEST_CASE("growth log reconstructs box dimensions") {
  for (LatticeKind kind : {LatticeKind::kSquare, LatticeKind::kTriangular}) {
    const PrudentWalk w = simulate(kind, 4000, 31);
    const BoxDimsTimeline dims(w);
    CHECK(dims.width_at(w.time()) == w.box().width());
    CHECK(dims.height_at(w.time()) == w.box().height());
    CHECK(dims.width_at(0) == 1);
    CHECK(dims.height_at(0) == 1);
    // spot-check a prefix against a replayed box
    BoundingBox box;
    std::size_t g = 0;
    const auto& ev = w.growth_events();
    for (std::int64_t t = 1; t <= 400; ++t) {
      while (g < ev.size() && ev[g].t <= t) {
        if (ev[g].da > 0) ++box.a_max;
        if (ev[g].da < 0) --box.a_min;
        if (ev[g].db > 0) ++box.b_max;
        if (ev[g].db < 0) --box.b_min;
        ++g;
      }
      CHECK(dims.width_at(t) == box.width());
      CHECK(dims.height_at(t) == box.height());
    }
  }
}

TEST_CASE("fixture path: stopping times, increments, spans") {
  const PrudentWalk w = make_fixture_walk();
  REQUIRE(w.position() == LatticePoint{4, -1});
  const auto recs = decompose_excursions(w);
  REQUIRE(recs.size() == 3);

  CHECK(recs[0].t_start == 0);
  CHECK(recs[0].u == 1);
  CHECK(recs[0].t_end == 2);
  CHECK(recs[0].x == 1);
  CHECK(recs[0].y == 1);
  CHECK(recs[0].complete);
  CHECK(recs[0].vertical_span == 0);
  CHECK(recs[0].horizontal_span == 0);

  CHECK(recs[1].t_start == 2);
  CHECK(recs[1].u == 5);
  CHECK(recs[1].t_end == 6);
  CHECK(recs[1].x == 2);
  CHECK(recs[1].y == 1);
  CHECK(recs[1].complete);
  CHECK(recs[1].vertical_span == 1);
  CHECK(recs[1].horizontal_span == 0);

  CHECK(recs[2].t_start == 6);
  CHECK_FALSE(recs[2].complete);
  CHECK(recs[2].u == -1);
}

TEST_CASE("fixture path: crossing events") {
  const PrudentWalk w = make_fixture_walk();
  const auto recs = decompose_excursions(w);
  const auto cross = crossing_events(w, recs);
  REQUIRE(cross.size() == 3);
  CHECK(cross[0] == 0);  // degenerate box at T_0
  CHECK(cross[1] == 1);  // east side, top (1,1) -> bottom (3,0)
  CHECK(cross[2] == 0);  // incomplete
  CHECK_FALSE(crossing_event(w, 0));
  CHECK(crossing_event(w, 1));
}

TEST_CASE("illegal forced steps are rejected") {
  PrudentWalk w(LatticeKind::kSquare, 0);
  REQUIRE(w.force_step(0));       // E to (1,0)
  CHECK_FALSE(w.force_step(1));   // W is a reversal onto (0,0)
  CHECK(w.position() == LatticePoint{1, 0});
  CHECK(w.time() == 1);
  REQUIRE(w.force_step(2));       // N is fine
}

TEST_CASE("excursion counter agrees with the full decomposition") {
  for (LatticeKind kind : {LatticeKind::kSquare, LatticeKind::kTriangular}) {
    for (std::uint64_t seed = 200; seed < 230; ++seed) {
      const PrudentWalk w = simulate(kind, 3000, seed);
      ExcursionCounter c;
      for (const GrowthEvent& e : w.growth_events()) c.consume(e);
      const auto recs = decompose_excursions(w);
      int complete = 0;
      for (const auto& r : recs) complete += r.complete ? 1 : 0;
      CHECK(c.complete() == complete);
      // structural invariants; the width growth closing excursion k lands in
      // window k+1, so X_0 >= 1 is not automatic, but X_k >= 1 is for k >= 1
      // (the growth defining T_k is inside). On the square lattice W and H
      // never grow on the same step, so Y_k >= 1 for k >= 1 as well.
      for (const auto& r : recs) {
        if (!r.complete) continue;
        CHECK(r.t_start <= r.u);
        CHECK(r.u <= r.t_end);
        CHECK(r.x >= 0);
        CHECK(r.y >= 0);
        if (r.k >= 1) CHECK(r.x >= 1);
        if (r.k >= 1 && kind == LatticeKind::kSquare) CHECK(r.y >= 1);
      }
    }
  }
}

TEST_CASE("simulate_until_excursion stops at the target count") {
  const PrudentWalk w =
      simulate_until_excursion(LatticeKind::kSquare, 5, 1000000, 77);
  const auto recs = decompose_excursions(w);
  int complete = 0;
  for (const auto& r : recs) complete += r.complete ? 1 : 0;
  CHECK(complete == 5);
  const PrudentWalk capped =
      simulate_until_excursion(LatticeKind::kTriangular, 1000000, 500, 78);
  CHECK(capped.time() <= 500);
}

TEST_CASE("quadrant event matches the embedded endpoint") {
  PrudentWalk w(LatticeKind::kSquare, 0);
  REQUIRE(w.force_step(0));
  CHECK(quadrant_event(w));   // (1,0)
  REQUIRE(w.force_step(3));
  CHECK_FALSE(quadrant_event(w));  // (1,-1)

  PrudentWalk t(LatticeKind::kTriangular, 0);
  REQUIRE(t.force_step(4));   // (1,-1): embeds to (0, 1)
  CHECK(quadrant_event(t));
  REQUIRE(t.force_step(4));   // (2,-2): embeds to (0, 2)
  CHECK(quadrant_event(t));
  REQUIRE(t.force_step(1));   // (1,-2): embeds to (-sqrt3/2, 1.5)
  CHECK_FALSE(quadrant_event(t));
}

TEST_CASE("width gains over complete excursions telescope to the final width") {
  for (LatticeKind kind : {LatticeKind::kSquare, LatticeKind::kTriangular}) {
    for (std::uint64_t seed = 300; seed < 320; ++seed) {
      const PrudentWalk w = simulate(kind, 4000, seed);
      const auto recs = decompose_excursions(w);
      const BoxDimsTimeline dims(w);
      long long x_sum = 0;
      std::int64_t last_end = -1;
      for (const auto& r : recs) {
        if (!r.complete) continue;
        x_sum += r.x;
        last_end = r.t_end;
      }
      if (last_end < 0) continue;  // no complete excursion at this length
      // W starts at 1, so the summed gains equal the width at the last
      // closing time minus one.
      CHECK(x_sum == dims.width_at(last_end) - 1);
    }
  }
}
