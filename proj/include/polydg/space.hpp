#pragma once

#include <memory>
#include <vector>

#include "polydg/basis.hpp"
#include "polydg/mesh.hpp"

namespace polydg {

/// Global numbering of X = [U, W, Phi]. U and W share one layout over the
/// poroelastic elements (component-major within an element: x-modes, then
/// y-modes); Phi numbers the acoustic elements.
struct DofMap {
  Index u_size = 0;
  Index phi_size = 0;
  /// Start of element e inside its block (U for poroelastic, Phi for acoustic).
  std::vector<Index> block_start;

  Index u_offset() const noexcept { return 0; }
  Index w_offset() const noexcept { return u_size; }
  Index phi_offset() const noexcept { return 2 * u_size; }
  Index total() const noexcept { return 2 * u_size + phi_size; }
};

class DgSpace {
 public:
  DgSpace(std::shared_ptr<const PolyMesh> mesh, std::vector<int> degrees);

  const PolyMesh& mesh() const noexcept { return *mesh_; }
  const std::shared_ptr<const PolyMesh>& mesh_ptr() const noexcept { return mesh_; }
  const DofMap& dofs() const noexcept { return dofs_; }
  Index size() const noexcept { return dofs_.total(); }

  int degree(Index e) const { return degrees_[e]; }
  const std::vector<int>& degrees() const noexcept { return degrees_; }
  const ModalBasis& basis(Index e) const { return bases_[e]; }
  Index num_modes(Index e) const { return bases_[e].size(); }
  int max_degree() const;

  /// First global index of component c (0, 1) of u or w on poroelastic element e.
  Index u_index(Index e, int c) const { return dofs_.u_offset() + dofs_.block_start[e] + c * num_modes(e); }
  Index w_index(Index e, int c) const { return dofs_.w_offset() + dofs_.block_start[e] + c * num_modes(e); }
  /// First global index of phi on acoustic element e.
  Index phi_index(Index e) const { return dofs_.phi_offset() + dofs_.block_start[e]; }

  /// Evaluates sum_k coeffs[first + k] phi_k(x) on element e.
  double eval_scalar(Index e, const Vector& coeffs, Index first, const Vec2& x) const;
  Vec2 eval_gradient(Index e, const Vector& coeffs, Index first, const Vec2& x) const;

 private:
  std::shared_ptr<const PolyMesh> mesh_;
  std::vector<int> degrees_;
  std::vector<ModalBasis> bases_;
  DofMap dofs_;
};

/// Uniform degrees per region. Throws ModelError if a degree is below 1.
DgSpace build_space(std::shared_ptr<const PolyMesh> mesh, int degree_p, int degree_a);
DgSpace build_space(std::shared_ptr<const PolyMesh> mesh, std::vector<int> degrees);

/// Element mass Gram matrix of the modal basis and its 2-norm condition number.
DenseMatrix element_gram(const DgSpace& space, Index e);
double gram_condition_number(const DgSpace& space, Index e);

}  // namespace polydg
