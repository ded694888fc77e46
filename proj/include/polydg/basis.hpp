#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "polydg/mesh.hpp"

namespace polydg {

/// Products of Legendre polynomials mapped to an element's bounding box,
/// graded by total degree: mode k is L_i(xi) L_j(eta) with (i, j) enumerated
/// as (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
class ModalBasis {
 public:
  static constexpr int max_degree = 30;

  ModalBasis(const Rectangle& box, int degree);

  int degree() const noexcept { return degree_; }
  Index size() const noexcept { return exponents_.size(); }
  const Rectangle& box() const noexcept { return box_; }
  const std::vector<std::array<int, 2>>& exponents() const noexcept { return exponents_; }

  /// values(k, q) = phi_k(points[q]).
  DenseMatrix eval(const std::vector<Vec2>& points) const;
  /// dx(k, q), dy(k, q): partial derivatives at points[q].
  void eval_grad(const std::vector<Vec2>& points, DenseMatrix& dx, DenseMatrix& dy) const;

  void eval_point(const Vec2& x, double* values) const;
  void eval_point_grad(const Vec2& x, double* values, double* dx, double* dy) const;

  /// Debug builds count evaluations outside the bounding box; always 0 in release.
  static std::size_t outside_evaluations();

 private:
  Rectangle box_;
  int degree_;
  Vec2 center_;
  Vec2 scale_;  // d(xi)/dx, d(eta)/dy
  std::vector<std::array<int, 2>> exponents_;
};

inline constexpr Index basis_dimension(int degree) {
  return static_cast<Index>((degree + 1) * (degree + 2) / 2);
}

/// Legendre values L_0..L_n and derivatives at t.
void legendre(int n, double t, double* values, double* derivatives);

}  // namespace polydg
