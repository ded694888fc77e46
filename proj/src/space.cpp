#include "polydg/space.hpp"

#include <algorithm>

#include <Eigen/Eigenvalues>

#include "polydg/kernels.hpp"
#include "polydg/quadrature.hpp"

namespace polydg {

DgSpace::DgSpace(std::shared_ptr<const PolyMesh> mesh, std::vector<int> degrees)
    : mesh_(std::move(mesh)), degrees_(std::move(degrees)) {
  if (!mesh_) throw ModelError("null mesh");
  if (degrees_.size() != mesh_->num_elements())
    throw ModelError("degree list does not match the number of elements");
  bases_.reserve(degrees_.size());
  dofs_.block_start.resize(degrees_.size());
  for (Index e = 0; e < degrees_.size(); ++e) {
    if (degrees_[e] < 1) throw ModelError("polynomial degree must be at least 1");
    bases_.emplace_back(mesh_->bounding_box(e), degrees_[e]);
    const Index n = bases_.back().size();
    if (mesh_->region(e) == Region::poroelastic) {
      dofs_.block_start[e] = dofs_.u_size;
      dofs_.u_size += 2 * n;
    } else {
      dofs_.block_start[e] = dofs_.phi_size;
      dofs_.phi_size += n;
    }
  }
}

int DgSpace::max_degree() const {
  return degrees_.empty() ? 0 : *std::max_element(degrees_.begin(), degrees_.end());
}

double DgSpace::eval_scalar(Index e, const Vector& coeffs, Index first, const Vec2& x) const {
  std::array<double, basis_dimension(ModalBasis::max_degree)> values;
  const ModalBasis& b = bases_[e];
  b.eval_point(x, values.data());
  double s = 0.0;
  for (Index k = 0; k < b.size(); ++k) s += coeffs[first + k] * values[k];
  return s;
}

Vec2 DgSpace::eval_gradient(Index e, const Vector& coeffs, Index first, const Vec2& x) const {
  std::array<double, basis_dimension(ModalBasis::max_degree)> dx, dy;
  const ModalBasis& b = bases_[e];
  b.eval_point_grad(x, nullptr, dx.data(), dy.data());
  Vec2 g = Vec2::Zero();
  for (Index k = 0; k < b.size(); ++k) g += coeffs[first + k] * Vec2(dx[k], dy[k]);
  return g;
}

DgSpace build_space(std::shared_ptr<const PolyMesh> mesh, int degree_p, int degree_a) {
  if (degree_p < 1 || degree_a < 1) throw ModelError("polynomial degree must be at least 1");
  if (!mesh) throw ModelError("null mesh");
  std::vector<int> degrees(mesh->num_elements());
  for (Index e = 0; e < degrees.size(); ++e)
    degrees[e] = mesh->region(e) == Region::poroelastic ? degree_p : degree_a;
  return DgSpace(std::move(mesh), std::move(degrees));
}

DgSpace build_space(std::shared_ptr<const PolyMesh> mesh, std::vector<int> degrees) {
  return DgSpace(std::move(mesh), std::move(degrees));
}

DenseMatrix element_gram(const DgSpace& space, Index e) {
  const QuadratureRule rule = volume_quadrature(space.mesh(), e, 2 * space.degree(e) + 2);
  const DenseMatrix phi = space.basis(e).eval(rule.points);
  const Index n = phi.rows();
  DenseMatrix gram = DenseMatrix::Zero(n, n);
  kernels::weighted_gram(phi.data(), n, phi.data(), n, rule.weights.data(), rule.size(), gram.data());
  return gram;
}

double gram_condition_number(const DgSpace& space, Index e) {
  const Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(element_gram(space, e), Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  return ev.maxCoeff() / ev.minCoeff();
}

}  // namespace polydg
