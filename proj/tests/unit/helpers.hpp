#pragma once

#include <memory>
#include <random>

#include <Eigen/Cholesky>

#include "polydg/quadrature.hpp"
#include "polydg/space.hpp"

namespace polydg::testing {

/// Local L2 projection of a scalar function onto element e, written at `first`.
template <class F>
void project_into(const DgSpace& space, Index e, Index first, F&& f, Vector& out) {
  const QuadratureRule rule = volume_quadrature(space.mesh(), e, 2 * space.degree(e) + 4);
  const DenseMatrix phi = space.basis(e).eval(rule.points);
  Vector rhs = Vector::Zero(phi.rows());
  for (Index q = 0; q < rule.size(); ++q) rhs += rule.weights[q] * f(rule.points[q]) * phi.col(q);
  out.segment(first, phi.rows()) = element_gram(space, e).llt().solve(rhs);
}

/// Coefficient vector of (u, w, phi) given as callables; empty callables give zero.
template <class U, class W, class P>
Vector project_fields(const DgSpace& space, U&& u, W&& w, P&& phi) {
  Vector x = Vector::Zero(space.size());
  for (Index e = 0; e < space.mesh().num_elements(); ++e) {
    if (space.mesh().region(e) == Region::acoustic) {
      project_into(space, e, space.phi_index(e), phi, x);
      continue;
    }
    for (int c = 0; c < 2; ++c) {
      project_into(space, e, space.u_index(e, c), [&](const Vec2& p) { return u(p)[c]; }, x);
      project_into(space, e, space.w_index(e, c), [&](const Vec2& p) { return w(p)[c]; }, x);
    }
  }
  return x;
}

inline Vector random_vector(Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

inline std::shared_ptr<const PolyMesh> share(PolyMesh mesh) { return std::make_shared<const PolyMesh>(std::move(mesh)); }

}  // namespace polydg::testing
