#pragma once
// Lattice geometry shared by the walk simulators: square and triangular
// lattices in integer axial coordinates (a, b), with an embedding into the
// Euclidean plane.
//
// Square: basis (1,0), (0,1); embedding is the identity; 4 unit steps.
// Triangular: basis e1, e2 with embed(1,0) = (sqrt(3)/2, 1/2) and
// embed(0,1) = (sqrt(3)/2, -1/2); the 6 unit steps are +-e1, +-e2, +-(e1-e2),
// whose embedded directions are 60 degrees apart.

#include <cstdint>
#include <vector>

namespace pwl {

enum class LatticeKind { kSquare, kTriangular };

struct LatticePoint {
  std::int32_t a = 0;
  std::int32_t b = 0;

  friend bool operator==(LatticePoint p, LatticePoint q) {
    return p.a == q.a && p.b == q.b;
  }
  friend bool operator!=(LatticePoint p, LatticePoint q) { return !(p == q); }
  friend LatticePoint operator+(LatticePoint p, LatticePoint q) {
    return {p.a + q.a, p.b + q.b};
  }
};

struct PlanePoint {
  double x = 0.0;
  double y = 0.0;
};

struct StepDirection {
  std::int32_t index = 0;  // position in directions(kind)
  LatticePoint delta;      // axial displacement, |a| + |b| in {1, 2}
};

// Unit step directions, closed under negation: the partner of index i is
// i ^ 1. Square: (1,0),(-1,0),(0,1),(0,-1). Triangular adds (1,-1),(-1,1).
const std::vector<StepDirection>& directions(LatticeKind kind);

int direction_count(LatticeKind kind);

// Axial -> plane. Square is the identity; triangular maps (a, b) to
// ((a+b)*sqrt(3)/2, (a-b)/2). Linear, injective, and an isometry on steps.
PlanePoint embed(LatticeKind kind, LatticePoint p);

// First n sites strictly beyond `from` along step delta d:
// from + d, from + 2d, ..., from + n*d.
std::vector<LatticePoint> ray_sites(LatticePoint from, LatticePoint d, int n);

inline double norm2(PlanePoint p) {
  return p.x * p.x + p.y * p.y;
}

}  // namespace pwl
