#include "pwl/lattice.hpp"

#include <cmath>

namespace pwl {

namespace {
const double kHalfSqrt3 = std::sqrt(3.0) / 2.0;

const std::vector<StepDirection> kSquareDirs = {
    {0, {1, 0}},
    {1, {-1, 0}},
    {2, {0, 1}},
    {3, {0, -1}},
};

const std::vector<StepDirection> kTriangularDirs = {
    {0, {1, 0}},
    {1, {-1, 0}},
    {2, {0, 1}},
    {3, {0, -1}},
    {4, {1, -1}},
    {5, {-1, 1}},
};
}  // namespace

const std::vector<StepDirection>& directions(LatticeKind kind) {
  return kind == LatticeKind::kSquare ? kSquareDirs : kTriangularDirs;
}

int direction_count(LatticeKind kind) {
  return kind == LatticeKind::kSquare ? 4 : 6;
}

PlanePoint embed(LatticeKind kind, LatticePoint p) {
  if (kind == LatticeKind::kSquare) {
    return {(double)p.a, (double)p.b};
  }
  return {(double)(p.a + p.b) * kHalfSqrt3, (double)(p.a - p.b) * 0.5};
}

std::vector<LatticePoint> ray_sites(LatticePoint from, LatticePoint d, int n) {
  std::vector<LatticePoint> out;
  out.reserve(n > 0 ? (std::size_t)n : 0);
  LatticePoint p = from;
  for (int i = 0; i < n; ++i) {
    p = p + d;
    out.push_back(p);
  }
  return out;
}

}  // namespace pwl
