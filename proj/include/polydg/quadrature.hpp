#pragma once

#include <vector>

#include "polydg/mesh.hpp"

namespace polydg {

struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int exactness = 0;

  Index size() const noexcept { return weights.size(); }
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule1D& gauss_legendre(int npoints);

/// Rule on the reference triangle (0,0),(1,0),(0,1) in barycentric form: each
/// point is (l1, l2), l0 = 1 - l1 - l2; weights sum to one (fractions of area).
/// Symmetric tabulated rules up to degree 5, collapsed tensor Gauss above.
struct TriangleRule {
  std::vector<Vec2> barycentric;
  std::vector<double> weights;
  int exactness = 0;
};
const TriangleRule& triangle_rule(int exactness);

/// Highest exactness served by a tabulated symmetric rule.
inline constexpr int max_tabulated_triangle_exactness = 5;

/// Maps a triangle rule of the requested exactness onto every fan triangle.
QuadratureRule volume_quadrature(const PolyMesh& mesh, Index element, int exactness);

/// Gauss-Legendre on the segment with ceil((exactness + 1) / 2) points.
QuadratureRule face_quadrature(const PolyMesh& mesh, Index face, int exactness);
QuadratureRule segment_quadrature(const Vec2& a, const Vec2& b, int exactness);

}  // namespace polydg
