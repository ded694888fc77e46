#pragma once

#include <filesystem>
#include <vector>

#include "polydg/physics.hpp"
#include "polydg/quadrature.hpp"
#include "polydg/space.hpp"

namespace polydg {

// Jump and average operators. n is the owner normal n+; the neighbour normal is -n+.
inline Vec2 scalar_jump(double plus, double minus, const Vec2& n) { return (plus - minus) * n; }
inline double scalar_average(double plus, double minus) { return 0.5 * (plus + minus); }
inline Mat2 vector_jump(const Vec2& plus, const Vec2& minus, const Vec2& n) { return (plus - minus) * n.transpose(); }
inline double normal_jump(const Vec2& plus, const Vec2& minus, const Vec2& n) { return (plus - minus).dot(n); }
inline Vec2 vector_average(const Vec2& plus, const Vec2& minus) { return 0.5 * (plus + minus); }
// Boundary faces: [[psi]] = psi n, {{psi}} = psi.
inline Vec2 scalar_jump(double trace, const Vec2& n) { return trace * n; }
inline Mat2 vector_jump(const Vec2& trace, const Vec2& n) { return trace * n.transpose(); }
inline double normal_jump(const Vec2& trace, const Vec2& n) { return trace.dot(n); }

/// Basis traces of the elements adjacent to one face at its quadrature points.
struct FaceTables {
  struct Side {
    Index element = invalid_index;
    DenseMatrix values, dx, dy;  // (modes x points)
  };
  Index face = invalid_index;
  QuadratureRule rule;
  Vec2 normal = Vec2::Zero();
  Side plus, minus;  // minus.element == invalid_index on boundary faces

  bool is_boundary() const { return minus.element == invalid_index; }
};

FaceTables jump_average_tables(const DgSpace& space, Index face, int exactness);

struct PenaltyConstants {
  double c1 = 10.0;
  double c2 = 10.0;
  double c3 = 10.0;
  /// Multiply the one-sided (boundary and interface) values by c_i as well.
  /// Without it the one-sided values are coef p^2 / h, which leaves the SIPG
  /// forms indefinite for any c_i.
  bool scale_one_sided = true;
};

/// Per-face stabilization values, zero where a coefficient does not apply.
struct PenaltyField {
  PenaltyConstants constants;
  std::vector<double> alpha;  // poroelastic interior and boundary faces
  std::vector<double> gamma;  // poroelastic interior, boundary and interface faces
  std::vector<double> chi;    // acoustic interior and boundary faces
};

/// Largest eigenvalue of the isotropic 2D elasticity tensor acting on symmetric
/// tensors with the Frobenius inner product: 2 mu + 2 lambda.
double elasticity_tensor_norm(double lambda, double mu);

PenaltyField penalty_values(const DgSpace& space, const MaterialField& materials, const PenaltyConstants& constants);

struct AssemblyOptions {
  /// Volume terms only; used to inspect element contributions.
  bool skip_faces = false;
  /// Added to the default exactness 2p + 2.
  int quadrature_boost = 0;
};

// Operators are N x N with N = space.size(), using the global layout of DofMap.

/// rho M, rho_f M and rho_w M on the (U, W) blocks and rho_a c^-2 M^a on Phi.
SparseMatrix assemble_mass(const DgSpace& space, const MaterialField& materials, const AssemblyOptions& options = {});
/// A^e on the U block.
SparseMatrix assemble_elastic(const DgSpace& space, const MaterialField& materials, const PenaltyField& penalties,
                              const AssemblyOptions& options = {});
/// A^p on the W block (acting on w alone). With tau = 0 the interface faces
/// enter as boundary-type faces.
SparseMatrix assemble_poro_div(const DgSpace& space, const MaterialField& materials, const PenaltyField& penalties,
                               double tau, const AssemblyOptions& options = {});
/// A^p evaluated at (beta u + w, beta v + z) on the (U, W) blocks.
SparseMatrix assemble_poro_stiffness(const DgSpace& space, const MaterialField& materials,
                                     const PenaltyField& penalties, double tau, const AssemblyOptions& options = {});
SparseMatrix assemble_acoustic(const DgSpace& space, const MaterialField& materials, const PenaltyField& penalties,
                               const AssemblyOptions& options = {});
/// (eta/k w, z) + zeta(tau) <w.n, z.n> on the W block.
SparseMatrix assemble_damping(const DgSpace& space, const MaterialField& materials, double tau,
                              const AssemblyOptions& options = {});

struct CouplingMatrices {
  SparseMatrix cp;  // rows U and W, columns Phi: <rho_a phi, v.n_p>
  SparseMatrix ca;  // -(cp)^T
};
/// With tau = 0 the W rows of C^p (and W columns of C^a) are dropped.
CouplingMatrices assemble_coupling(const DgSpace& space, const MaterialField& materials, double tau,
                                   const AssemblyOptions& options = {});

struct BlockSystem {
  SparseMatrix mass;       // A
  SparseMatrix damping;    // B (viscous, interface and coupling parts)
  SparseMatrix stiffness;  // C
  SparseMatrix elastic, poro, acoustic, viscous;
  CouplingMatrices coupling;
  PenaltyField penalties;
  double tau = 1.0;
  Index size() const { return static_cast<Index>(mass.rows()); }
};

BlockSystem assemble_block_system(const DgSpace& space, const MaterialField& materials,
                                  const PenaltyConstants& constants = {}, const AssemblyOptions& options = {});

/// Matrices of the squared dG norms: ||v||_dG,e on U, |beta v + z|_dG,p on
/// (U, W) and ||psi||_dG,a on Phi.
struct NormMatrices {
  SparseMatrix elastic, poro, acoustic;
};
NormMatrices assemble_norm_matrices(const DgSpace& space, const MaterialField& materials,
                                    const PenaltyField& penalties, double tau);

/// F(t) = [F^p, G^p, F^a] including weakly imposed Dirichlet data. Separable
/// terms are integrated once and rescaled by their time factor.
class LoadAssembler {
 public:
  LoadAssembler(const DgSpace& space, const MaterialField& materials, const PenaltyField& penalties,
                SourceTerms sources, BoundaryData boundary = {}, int quadrature_boost = 0);

  Vector operator()(double t) const;
  void evaluate(double t, Vector& out) const;
  Index size() const { return size_; }

 private:
  Vector general(double t) const;

  const DgSpace* space_;
  const MaterialField* materials_;
  SourceTerms sources_;
  Index size_;
  int boost_;
  PenaltyField penalties_;
  std::vector<TimeFunction> times_;
  std::vector<Vector> shapes_;
  std::vector<bool> is_source_;
};

/// Global indices of every element's unknowns, the blocks of the mass matrix.
std::vector<std::vector<Index>> element_dof_groups(const DgSpace& space);

/// Writes `row col value` lines (0-based) of the stored entries.
void write_triplets(const std::filesystem::path& path, const SparseMatrix& matrix);

}  // namespace polydg
