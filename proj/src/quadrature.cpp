#include "polydg/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace polydg {

namespace {

GaussRule1D compute_gauss_legendre(int n) {
  GaussRule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

TriangleRule tabulated_or_collapsed(int exactness) {
  TriangleRule rule;
  if (exactness <= 1) {
    rule.barycentric = {Vec2(1.0 / 3.0, 1.0 / 3.0)};
    rule.weights = {1.0};
    rule.exactness = 1;
  } else if (exactness == 2) {
    rule.barycentric = {Vec2(1.0 / 6.0, 1.0 / 6.0), Vec2(2.0 / 3.0, 1.0 / 6.0), Vec2(1.0 / 6.0, 2.0 / 3.0)};
    rule.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    rule.exactness = 2;
  } else if (exactness <= max_tabulated_triangle_exactness) {
    // Radon's seven-point rule.
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0, b1 = (9.0 + 2.0 * s15) / 21.0;
    const double a2 = (6.0 + s15) / 21.0, b2 = (9.0 - 2.0 * s15) / 21.0;
    const double w1 = (155.0 - s15) / 1200.0, w2 = (155.0 + s15) / 1200.0;
    rule.barycentric = {Vec2(1.0 / 3.0, 1.0 / 3.0), Vec2(a1, a1), Vec2(b1, a1), Vec2(a1, b1),
                        Vec2(a2, a2), Vec2(b2, a2), Vec2(a2, b2)};
    rule.weights = {9.0 / 40.0, w1, w1, w1, w2, w2, w2};
    rule.exactness = 5;
  } else {
    // Collapsed (Duffy) tensor Gauss: x = s (1 - t), y = t, Jacobian (1 - t).
    const int n = (exactness + 3) / 2;
    const GaussRule1D& g = gauss_legendre(n);
    for (int j = 0; j < n; ++j) {
      const double t = 0.5 * (g.nodes[j] + 1.0);
      for (int i = 0; i < n; ++i) {
        const double s = 0.5 * (g.nodes[i] + 1.0);
        rule.barycentric.emplace_back(s * (1.0 - t), t);
        // 1/4 from the interval maps, times 2 to normalize by the area 1/2.
        rule.weights.push_back(0.5 * g.weights[i] * g.weights[j] * (1.0 - t));
      }
    }
    rule.exactness = 2 * n - 2;
  }
  return rule;
}

}  // namespace

const GaussRule1D& gauss_legendre(int npoints) {
  static std::mutex mutex;
  static std::map<int, GaussRule1D> cache;
  if (npoints < 1) throw ModelError("Gauss-Legendre rule needs at least one point");
  std::lock_guard lock(mutex);
  auto it = cache.find(npoints);
  if (it == cache.end()) it = cache.emplace(npoints, compute_gauss_legendre(npoints)).first;
  return it->second;
}

const TriangleRule& triangle_rule(int exactness) {
  static std::mutex mutex;
  static std::map<int, TriangleRule> cache;
  const int key = std::max(exactness, 1);
  std::lock_guard lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, tabulated_or_collapsed(key)).first;
  return it->second;
}

QuadratureRule volume_quadrature(const PolyMesh& mesh, Index element, int exactness) {
  const TriangleRule& ref = triangle_rule(exactness);
  QuadratureRule rule;
  rule.exactness = ref.exactness;
  const auto fan = mesh.sub_triangulation(element);
  rule.points.reserve(fan.size() * ref.weights.size());
  rule.weights.reserve(fan.size() * ref.weights.size());
  for (const FanTriangle& tri : fan) {
    const Vec2 e1 = tri.vertices[1] - tri.vertices[0];
    const Vec2 e2 = tri.vertices[2] - tri.vertices[0];
    for (Index q = 0; q < ref.weights.size(); ++q) {
      rule.points.push_back(tri.vertices[0] + ref.barycentric[q].x() * e1 + ref.barycentric[q].y() * e2);
      rule.weights.push_back(ref.weights[q] * tri.area);
    }
  }
  return rule;
}

QuadratureRule segment_quadrature(const Vec2& a, const Vec2& b, int exactness) {
  const int n = std::max(1, (exactness + 2) / 2);
  const GaussRule1D& g = gauss_legendre(n);
  const double half = 0.5 * (b - a).norm();
  QuadratureRule rule;
  rule.exactness = 2 * n - 1;
  rule.points.reserve(n);
  rule.weights.reserve(n);
  for (int i = 0; i < n; ++i) {
    rule.points.push_back(0.5 * (a + b) + 0.5 * g.nodes[i] * (b - a));
    rule.weights.push_back(half * g.weights[i]);
  }
  return rule;
}

QuadratureRule face_quadrature(const PolyMesh& mesh, Index face, int exactness) {
  const Face& f = mesh.face(face);
  return segment_quadrature(mesh.vertices()[f.vertices[0]], mesh.vertices()[f.vertices[1]], exactness);
}

}  // namespace polydg
