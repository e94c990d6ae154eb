#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "pwl/lattice.hpp"

using namespace pwl;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("direction tables") {
  CHECK(direction_count(LatticeKind::kSquare) == 4);
  CHECK(direction_count(LatticeKind::kTriangular) == 6);

  const auto& sq = directions(LatticeKind::kSquare);
  CHECK(sq[0].delta == LatticePoint{1, 0});
  CHECK(sq[1].delta == LatticePoint{-1, 0});
  CHECK(sq[2].delta == LatticePoint{0, 1});
  CHECK(sq[3].delta == LatticePoint{0, -1});

  const auto& tr = directions(LatticeKind::kTriangular);
  for (int i = 0; i < 4; ++i) CHECK(tr[i].delta == sq[i].delta);
  CHECK(tr[4].delta == LatticePoint{1, -1});
  CHECK(tr[5].delta == LatticePoint{-1, 1});

  // index XOR 1 is the reversed direction, on both lattices
  for (int i = 0; i < 6; ++i) {
    const LatticePoint d = tr[i].delta, e = tr[i ^ 1].delta;
    CHECK(d.a + e.a == 0);
    CHECK(d.b + e.b == 0);
  }
}

TEST_CASE("square embedding is the identity") {
  const PlanePoint p = embed(LatticeKind::kSquare, {3, -7});
  CHECK(p.x == 3.0);
  CHECK(p.y == -7.0);
}

TEST_CASE("triangular steps are unit vectors at 30 + 60k degrees") {
  const auto& tr = directions(LatticeKind::kTriangular);
  std::set<int> angles;
  for (const StepDirection& d : tr) {
    const PlanePoint p = embed(LatticeKind::kTriangular, d.delta);
    CHECK(norm2(p) == doctest::Approx(1.0).epsilon(1e-12));
    double deg = std::atan2(p.y, p.x) * 180.0 / kPi;
    if (deg < 0) deg += 360.0;
    const int rounded = (int)std::lround(deg);
    CHECK(std::abs(deg - rounded) < 1e-9);
    CHECK((rounded - 30) % 60 == 0);
    angles.insert(rounded);
  }
  CHECK(angles == std::set<int>{30, 90, 150, 210, 270, 330});
}

TEST_CASE("triangular embedding values") {
  const double s = std::sqrt(3.0) / 2.0;
  PlanePoint p = embed(LatticeKind::kTriangular, {1, 0});
  CHECK(p.x == doctest::Approx(s).epsilon(1e-15));
  CHECK(p.y == doctest::Approx(0.5).epsilon(1e-15));
  p = embed(LatticeKind::kTriangular, {0, 1});
  CHECK(p.x == doctest::Approx(s).epsilon(1e-15));
  CHECK(p.y == doctest::Approx(-0.5).epsilon(1e-15));
  p = embed(LatticeKind::kTriangular, {2, -3});
  CHECK(p.x == doctest::Approx(-s).epsilon(1e-12));
  CHECK(p.y == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("embedding is linear and injective on a block") {
  for (LatticeKind kind : {LatticeKind::kSquare, LatticeKind::kTriangular}) {
    std::set<std::pair<long long, long long>> seen;
    for (int a = -12; a <= 12; ++a) {
      for (int b = -12; b <= 12; ++b) {
        const PlanePoint p = embed(kind, {a, b});
        const PlanePoint pa = embed(kind, {a, 0});
        const PlanePoint pb = embed(kind, {0, b});
        CHECK(p.x == doctest::Approx(pa.x + pb.x).epsilon(1e-12));
        CHECK(p.y == doctest::Approx(pa.y + pb.y).epsilon(1e-12));
        seen.insert({(long long)std::llround(p.x * 1e9),
                     (long long)std::llround(p.y * 1e9)});
      }
    }
    CHECK(seen.size() == 25u * 25u);
  }
}

TEST_CASE("ray_sites walks the open half-line") {
  const auto sites = ray_sites({2, -1}, {1, -1}, 3);
  REQUIRE(sites.size() == 3);
  CHECK(sites[0] == LatticePoint{3, -2});
  CHECK(sites[1] == LatticePoint{4, -3});
  CHECK(sites[2] == LatticePoint{5, -4});
  CHECK(ray_sites({0, 0}, {0, 1}, 0).empty());
}
