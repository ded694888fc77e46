#include "polydg/forms.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include <Eigen/Eigenvalues>

#include "polydg/kernels.hpp"
#include "polydg/parallel.hpp"

namespace polydg {

namespace {

using Triplet = Eigen::Triplet<double, int>;

struct LocalBlock {
  Index row0, col0;
  DenseMatrix values;
};

using LocalBlocks = std::vector<LocalBlock>;

SparseMatrix compress(Index n, const std::vector<LocalBlocks>& items) {
  std::vector<Triplet> triplets;
  for (const LocalBlocks& blocks : items)
    for (const LocalBlock& b : blocks)
      for (Index j = 0; j < static_cast<Index>(b.values.cols()); ++j)
        for (Index i = 0; i < static_cast<Index>(b.values.rows()); ++i)
          if (const double v = b.values(i, j); v != 0.0)
            triplets.emplace_back(static_cast<int>(b.row0 + i), static_cast<int>(b.col0 + j), v);
  SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.prune([](Eigen::Index, Eigen::Index, double v) { return v != 0.0; });
  m.makeCompressed();
  return m;
}

/// sum_q w[q] a(:, q) b(:, q)^T; extra columns of a and b reuse w cyclically.
DenseMatrix gram(const DenseMatrix& a, const DenseMatrix& b, const std::vector<double>& w) {
  DenseMatrix g = DenseMatrix::Zero(a.rows(), b.rows());
  const Index nq = w.size();
  const Index reps = static_cast<Index>(a.cols()) / nq;
  for (Index r = 0; r < reps; ++r)
    kernels::weighted_gram(a.data() + r * nq * a.rows(), a.rows(), b.data() + r * nq * b.rows(), b.rows(), w.data(),
                           nq, g.data());
  return g;
}

struct ElementTables {
  QuadratureRule rule;
  DenseMatrix phi, dx, dy;
};

ElementTables element_tables(const DgSpace& space, Index e, int exactness) {
  ElementTables t;
  t.rule = volume_quadrature(space.mesh(), e, exactness);
  t.phi = space.basis(e).eval(t.rule.points);
  space.basis(e).eval_grad(t.rule.points, t.dx, t.dy);
  return t;
}

int assembly_exactness(const DgSpace& space, Index e, int boost) { return 2 * space.degree(e) + 2 + boost; }

int face_exactness(const DgSpace& space, const Face& f, int boost) {
  int p = space.degree(f.owner);
  if (!f.is_boundary()) p = std::max(p, space.degree(f.neighbor));
  return 2 * p + 2 + boost;
}

// Tables over the extended index (component r, point q), column r * nq + q.

// V[(c,k), (r,q)] = delta_cr phi_k(q)
DenseMatrix vector_values(const DenseMatrix& phi) {
  const Index n = phi.rows(), nq = phi.cols();
  DenseMatrix v = DenseMatrix::Zero(2 * n, 2 * nq);
  v.block(0, 0, n, nq) = phi;
  v.block(n, nq, n, nq) = phi;
  return v;
}

// Isometric Voigt strains (e11, e22, sqrt2 e12) of phi_k e_c.
DenseMatrix voigt_strain(const DenseMatrix& dx, const DenseMatrix& dy) {
  const Index n = dx.rows(), nq = dx.cols();
  const double s = 1.0 / std::sqrt(2.0);
  DenseMatrix e = DenseMatrix::Zero(2 * n, 3 * nq);
  e.block(0, 0, n, nq) = dx;
  e.block(n, nq, n, nq) = dy;
  e.block(0, 2 * nq, n, nq) = s * dy;
  e.block(n, 2 * nq, n, nq) = s * dx;
  return e;
}

DenseMatrix voigt_stress(const DenseMatrix& strain, double lambda, double mu) {
  const Index nq = strain.cols() / 3;
  DenseMatrix s(strain.rows(), strain.cols());
  const auto e11 = strain.middleCols(0, nq), e22 = strain.middleCols(nq, nq), e12 = strain.middleCols(2 * nq, nq);
  s.middleCols(0, nq) = (2 * mu + lambda) * e11 + lambda * e22;
  s.middleCols(nq, nq) = lambda * e11 + (2 * mu + lambda) * e22;
  s.middleCols(2 * nq, nq) = 2 * mu * e12;
  return s;
}

// Traction component r of sigma(phi_k e_c) n:
// mu (delta_rc grad phi . n + d_r phi n_c) + lambda d_c phi n_r.
DenseMatrix traction(const DenseMatrix& dx, const DenseMatrix& dy, const Vec2& n, double lambda, double mu) {
  const Index nb = dx.rows(), nq = dx.cols();
  DenseMatrix t(2 * nb, 2 * nq);
  const DenseMatrix dn = dx * n.x() + dy * n.y();
  const DenseMatrix* d[2] = {&dx, &dy};
  for (int c = 0; c < 2; ++c)
    for (int r = 0; r < 2; ++r)
      t.block(c * nb, r * nq, nb, nq) =
          mu * ((r == c ? 1.0 : 0.0) * dn + n[c] * *d[r]) + lambda * n[r] * *d[c];
  return t;
}

// Div[(c,k), q] = d_c phi_k; Normal[(c,k), q] = phi_k n_c.
DenseMatrix divergence(const DenseMatrix& dx, const DenseMatrix& dy) {
  DenseMatrix d(2 * dx.rows(), dx.cols());
  d << dx, dy;
  return d;
}

DenseMatrix normal_values(const DenseMatrix& phi, const Vec2& n) {
  DenseMatrix v(2 * phi.rows(), phi.cols());
  v << n.x() * phi, n.y() * phi;
  return v;
}

std::vector<double> repeat(const std::vector<double>& w, int times) {
  std::vector<double> r;
  r.reserve(w.size() * times);
  for (int i = 0; i < times; ++i) r.insert(r.end(), w.begin(), w.end());
  return r;
}

/// SIPG face block for a pair of sides (a test, b trial):
/// -omega j_a <V_a, F_b> - omega j_b <F_a, V_b> + pen j_a j_b <V_a, V_b>.
DenseMatrix sipg_block(const DenseMatrix& va, const DenseMatrix& fa, double ja, const DenseMatrix& vb,
                       const DenseMatrix& fb, double jb, double omega, double penalty, const std::vector<double>& w) {
  DenseMatrix g = -omega * ja * gram(va, fb, w);
  g.noalias() -= omega * jb * gram(fa, vb, w);
  g.noalias() += penalty * ja * jb * gram(va, vb, w);
  return g;
}

/// Penalty-only face block, used by the dG norms.
DenseMatrix jump_block(const DenseMatrix& va, double ja, const DenseMatrix& vb, double jb, double penalty,
                       const std::vector<double>& w) {
  return penalty * ja * jb * gram(va, vb, w);
}

bool is_poro_face(FaceClass k) { return k == FaceClass::p_interior || k == FaceClass::p_boundary; }
bool is_acoustic_face(FaceClass k) { return k == FaceClass::a_interior || k == FaceClass::a_boundary; }

Index u_start(const DgSpace& s, Index e) { return s.u_index(e, 0); }
Index w_start(const DgSpace& s, Index e) { return s.w_index(e, 0); }

struct SideRef {
  const FaceTables::Side* side;
  double jump_sign;
};

std::vector<SideRef> sides(const FaceTables& t) {
  std::vector<SideRef> s{{&t.plus, 1.0}};
  if (!t.is_boundary()) s.push_back({&t.minus, -1.0});
  return s;
}

enum class PoroMode { w_only, embedded, norm_w_only, norm_embedded };

/// Local A^p contributions in s = beta u + w coordinates, then placed either
/// on the W block or embedded on (U, W) with the element beta.
void place_poro(const DgSpace& space, const MaterialField& mats, Index ea, Index eb, const DenseMatrix& local,
                bool embedded, LocalBlocks& out) {
  out.push_back({w_start(space, ea), w_start(space, eb), local});
  if (!embedded) return;
  const double ba = mats.poro[ea].raw.beta, bb = mats.poro[eb].raw.beta;
  out.push_back({u_start(space, ea), u_start(space, eb), ba * bb * local});
  out.push_back({u_start(space, ea), w_start(space, eb), ba * local});
  out.push_back({w_start(space, ea), u_start(space, eb), bb * local});
}

SparseMatrix poro_operator(const DgSpace& space, const MaterialField& mats, const PenaltyField& pen, double tau,
                           const AssemblyOptions& opt, bool embedded, bool norm) {
  const PolyMesh& mesh = space.mesh();
  const Index ne = mesh.num_elements(), nf = mesh.num_faces();
  std::vector<LocalBlocks> items(ne + nf);
  parallel_for(ne, [&](Index e) {
    if (mesh.region(e) != Region::poroelastic) return;
    const ElementTables t = element_tables(space, e, assembly_exactness(space, e, opt.quadrature_boost));
    const DenseMatrix div = divergence(t.dx, t.dy);
    place_poro(space, mats, e, e, mats.poro[e].raw.m * gram(div, div, t.rule.weights), embedded, items[e]);
  });
  if (!opt.skip_faces) {
    parallel_for(nf, [&](Index f) {
      const Face& face = mesh.face(f);
      const bool interface = face.kind == FaceClass::interface;
      if (!is_poro_face(face.kind) && !(interface && tau == 0.0)) return;
      FaceTables ft = jump_average_tables(space, f, face_exactness(space, face, opt.quadrature_boost));
      if (interface) ft.minus.element = invalid_index;
      const auto& w = ft.rule.weights;
      const double omega = ft.is_boundary() ? 1.0 : 0.5;
      const auto ss = sides(ft);
      std::vector<DenseMatrix> nv, flux;
      for (const SideRef& s : ss) {
        nv.push_back(normal_values(s.side->values, ft.normal));
        flux.push_back(mats.poro[s.side->element].raw.m * divergence(s.side->dx, s.side->dy));
      }
      if (interface) {
        // Sealed pores: Nitsche terms for w.n = 0 with the traction m div(beta u + w).
        const Index e = ft.plus.element;
        const double beta = mats.poro[e].raw.beta;
        if (norm) {
          const DenseMatrix j = jump_block(nv[0], 1.0, nv[0], 1.0, pen.gamma[f], w);
          items[ne + f].push_back({w_start(space, e), w_start(space, e), j});
          return;
        }
        const DenseMatrix nd = gram(nv[0], flux[0], w);  // <T(trial), z.n>
        DenseMatrix ww = -nd - nd.transpose();
        ww.noalias() += pen.gamma[f] * gram(nv[0], nv[0], w);
        items[ne + f].push_back({w_start(space, e), w_start(space, e), ww});
        if (embedded) {
          items[ne + f].push_back({u_start(space, e), w_start(space, e), DenseMatrix(-beta * nd.transpose())});
          items[ne + f].push_back({w_start(space, e), u_start(space, e), DenseMatrix(-beta * nd)});
        }
        return;
      }
      for (Index a = 0; a < ss.size(); ++a)
        for (Index b = 0; b < ss.size(); ++b) {
          const DenseMatrix local =
              norm ? jump_block(nv[a], ss[a].jump_sign, nv[b], ss[b].jump_sign, pen.gamma[f], w)
                   : sipg_block(nv[a], flux[a], ss[a].jump_sign, nv[b], flux[b], ss[b].jump_sign, omega,
                                pen.gamma[f], w);
          place_poro(space, mats, ss[a].side->element, ss[b].side->element, local, embedded, items[ne + f]);
        }
    });
  }
  return compress(space.size(), items);
}

SparseMatrix elastic_operator(const DgSpace& space, const MaterialField& mats, const PenaltyField& pen,
                              const AssemblyOptions& opt, bool norm) {
  const PolyMesh& mesh = space.mesh();
  const Index ne = mesh.num_elements(), nf = mesh.num_faces();
  std::vector<LocalBlocks> items(ne + nf);
  parallel_for(ne, [&](Index e) {
    if (mesh.region(e) != Region::poroelastic) return;
    const auto& p = mats.poro[e].raw;
    if (!(p.mu > 0.0)) throw ModelError("non-positive shear modulus");
    const ElementTables t = element_tables(space, e, assembly_exactness(space, e, opt.quadrature_boost));
    const DenseMatrix strain = voigt_strain(t.dx, t.dy);
    const DenseMatrix stress = voigt_stress(strain, p.lambda, p.mu);
    items[e].push_back({u_start(space, e), u_start(space, e), gram(strain, stress, t.rule.weights)});
  });
  if (!opt.skip_faces) {
    parallel_for(nf, [&](Index f) {
      const Face& face = mesh.face(f);
      if (!is_poro_face(face.kind)) return;
      const FaceTables ft = jump_average_tables(space, f, face_exactness(space, face, opt.quadrature_boost));
      const auto w2 = repeat(ft.rule.weights, 2);
      const double omega = ft.is_boundary() ? 1.0 : 0.5;
      const auto ss = sides(ft);
      std::vector<DenseMatrix> vals, flux;
      for (const SideRef& s : ss) {
        const auto& p = mats.poro[s.side->element].raw;
        vals.push_back(vector_values(s.side->values));
        flux.push_back(traction(s.side->dx, s.side->dy, ft.normal, p.lambda, p.mu));
      }
      for (Index a = 0; a < ss.size(); ++a)
        for (Index b = 0; b < ss.size(); ++b) {
          DenseMatrix local = norm ? jump_block(vals[a], ss[a].jump_sign, vals[b], ss[b].jump_sign, pen.alpha[f], w2)
                                   : sipg_block(vals[a], flux[a], ss[a].jump_sign, vals[b], flux[b], ss[b].jump_sign,
                                                omega, pen.alpha[f], w2);
          items[ne + f].push_back(
              {u_start(space, ss[a].side->element), u_start(space, ss[b].side->element), std::move(local)});
        }
    });
  }
  return compress(space.size(), items);
}

SparseMatrix acoustic_operator(const DgSpace& space, const MaterialField& mats, const PenaltyField& pen,
                               const AssemblyOptions& opt, bool norm) {
  const PolyMesh& mesh = space.mesh();
  const Index ne = mesh.num_elements(), nf = mesh.num_faces();
  std::vector<LocalBlocks> items(ne + nf);
  parallel_for(ne, [&](Index e) {
    if (mesh.region(e) != Region::acoustic) return;
    const ElementTables t = element_tables(space, e, assembly_exactness(space, e, opt.quadrature_boost));
    DenseMatrix k = gram(t.dx, t.dx, t.rule.weights);
    k.noalias() += gram(t.dy, t.dy, t.rule.weights);
    items[e].push_back({space.phi_index(e), space.phi_index(e), mats.acoustic[e].rho_a * k});
  });
  if (!opt.skip_faces) {
    parallel_for(nf, [&](Index f) {
      const Face& face = mesh.face(f);
      if (!is_acoustic_face(face.kind)) return;
      const FaceTables ft = jump_average_tables(space, f, face_exactness(space, face, opt.quadrature_boost));
      const auto& w = ft.rule.weights;
      const double omega = ft.is_boundary() ? 1.0 : 0.5;
      const auto ss = sides(ft);
      std::vector<DenseMatrix> flux;
      for (const SideRef& s : ss)
        flux.push_back(mats.acoustic[s.side->element].rho_a *
                       (s.side->dx * ft.normal.x() + s.side->dy * ft.normal.y()));
      for (Index a = 0; a < ss.size(); ++a)
        for (Index b = 0; b < ss.size(); ++b) {
          const DenseMatrix& va = ss[a].side->values;
          const DenseMatrix& vb = ss[b].side->values;
          DenseMatrix local = norm ? jump_block(va, ss[a].jump_sign, vb, ss[b].jump_sign, pen.chi[f], w)
                                   : sipg_block(va, flux[a], ss[a].jump_sign, vb, flux[b], ss[b].jump_sign, omega,
                                                pen.chi[f], w);
          items[ne + f].push_back(
              {space.phi_index(ss[a].side->element), space.phi_index(ss[b].side->element), std::move(local)});
        }
    });
  }
  return compress(space.size(), items);
}

}  // namespace

FaceTables jump_average_tables(const DgSpace& space, Index face, int exactness) {
  const Face& f = space.mesh().face(face);
  FaceTables t;
  t.face = face;
  t.rule = face_quadrature(space.mesh(), face, exactness);
  t.normal = f.normal;
  auto fill = [&](FaceTables::Side& side, Index e) {
    side.element = e;
    side.values = space.basis(e).eval(t.rule.points);
    space.basis(e).eval_grad(t.rule.points, side.dx, side.dy);
  };
  fill(t.plus, f.owner);
  if (!f.is_boundary()) fill(t.minus, f.neighbor);
  return t;
}

double elasticity_tensor_norm(double lambda, double mu) {
  Eigen::Matrix3d d;
  d << 2 * mu + lambda, lambda, 0, lambda, 2 * mu + lambda, 0, 0, 0, 2 * mu;
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(d, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
}

PenaltyField penalty_values(const DgSpace& space, const MaterialField& mats, const PenaltyConstants& constants) {
  if (!(constants.c1 > 0.0 && constants.c2 > 0.0 && constants.c3 > 0.0))
    throw ModelError("penalty constants must be positive");
  const PolyMesh& mesh = space.mesh();
  PenaltyField pen;
  pen.constants = constants;
  pen.alpha.assign(mesh.num_faces(), 0.0);
  pen.gamma.assign(mesh.num_faces(), 0.0);
  pen.chi.assign(mesh.num_faces(), 0.0);
  auto scaled = [&](Index e, double coef) {
    const double p = space.degree(e);
    return coef * p * p / mesh.diameter(e);
  };
  auto c_bar = [&](Index e) { return elasticity_tensor_norm(mats.poro[e].raw.lambda, mats.poro[e].raw.mu); };
  const double b1 = constants.scale_one_sided ? constants.c1 : 1.0;
  const double b2 = constants.scale_one_sided ? constants.c2 : 1.0;
  const double b3 = constants.scale_one_sided ? constants.c3 : 1.0;
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    const Index a = face.owner, b = face.neighbor;
    switch (face.kind) {
      case FaceClass::p_interior:
        pen.alpha[f] = constants.c1 * std::max(scaled(a, c_bar(a)), scaled(b, c_bar(b)));
        pen.gamma[f] = constants.c2 * std::max(scaled(a, mats.poro[a].raw.m), scaled(b, mats.poro[b].raw.m));
        break;
      case FaceClass::p_boundary:
        pen.alpha[f] = b1 * scaled(a, c_bar(a));
        pen.gamma[f] = b2 * scaled(a, mats.poro[a].raw.m);
        break;
      case FaceClass::interface:
        pen.gamma[f] = b2 * scaled(a, mats.poro[a].raw.m);
        break;
      case FaceClass::a_interior:
        pen.chi[f] = constants.c3 * std::max(scaled(a, mats.acoustic[a].rho_a), scaled(b, mats.acoustic[b].rho_a));
        break;
      case FaceClass::a_boundary:
        pen.chi[f] = b3 * scaled(a, mats.acoustic[a].rho_a);
        break;
    }
  }
  return pen;
}

SparseMatrix assemble_mass(const DgSpace& space, const MaterialField& mats, const AssemblyOptions& opt) {
  const PolyMesh& mesh = space.mesh();
  std::vector<LocalBlocks> items(mesh.num_elements());
  parallel_for(mesh.num_elements(), [&](Index e) {
    const ElementTables t = element_tables(space, e, assembly_exactness(space, e, opt.quadrature_boost));
    const DenseMatrix m = gram(t.phi, t.phi, t.rule.weights);
    if (mesh.region(e) == Region::acoustic) {
      const auto& a = mats.acoustic[e];
      items[e].push_back({space.phi_index(e), space.phi_index(e), a.rho_a / (a.c * a.c) * m});
      return;
    }
    const PoroMaterial& p = mats.poro[e];
    for (int c = 0; c < 2; ++c) {
      const Index u = space.u_index(e, c), w = space.w_index(e, c);
      items[e].push_back({u, u, p.rho * m});
      items[e].push_back({u, w, p.raw.rho_f * m});
      items[e].push_back({w, u, p.raw.rho_f * m});
      items[e].push_back({w, w, p.rho_w * m});
    }
  });
  return compress(space.size(), items);
}

SparseMatrix assemble_elastic(const DgSpace& space, const MaterialField& mats, const PenaltyField& pen,
                              const AssemblyOptions& opt) {
  return elastic_operator(space, mats, pen, opt, false);
}

SparseMatrix assemble_poro_div(const DgSpace& space, const MaterialField& mats, const PenaltyField& pen, double tau,
                               const AssemblyOptions& opt) {
  zeta(tau);
  return poro_operator(space, mats, pen, tau, opt, false, false);
}

SparseMatrix assemble_poro_stiffness(const DgSpace& space, const MaterialField& mats, const PenaltyField& pen,
                                     double tau, const AssemblyOptions& opt) {
  zeta(tau);
  return poro_operator(space, mats, pen, tau, opt, true, false);
}

SparseMatrix assemble_acoustic(const DgSpace& space, const MaterialField& mats, const PenaltyField& pen,
                               const AssemblyOptions& opt) {
  return acoustic_operator(space, mats, pen, opt, false);
}

SparseMatrix assemble_damping(const DgSpace& space, const MaterialField& mats, double tau,
                              const AssemblyOptions& opt) {
  const double z = zeta(tau);
  const PolyMesh& mesh = space.mesh();
  const Index ne = mesh.num_elements(), nf = mesh.num_faces();
  std::vector<LocalBlocks> items(ne + nf);
  parallel_for(ne, [&](Index e) {
    if (mesh.region(e) != Region::poroelastic) return;
    const PoroParams& p = mats.poro[e].raw;
    if (!(p.permeability > 0.0)) throw ModelError("permeability must be positive");
    if (p.eta == 0.0) return;
    const ElementTables t = element_tables(space, e, assembly_exactness(space, e, opt.quadrature_boost));
    const DenseMatrix m = (p.eta / p.permeability) * gram(t.phi, t.phi, t.rule.weights);
    for (int c = 0; c < 2; ++c) items[e].push_back({space.w_index(e, c), space.w_index(e, c), m});
  });
  if (z != 0.0 && !opt.skip_faces) {
    parallel_for(nf, [&](Index f) {
      const Face& face = mesh.face(f);
      if (face.kind != FaceClass::interface) return;
      FaceTables ft = jump_average_tables(space, f, face_exactness(space, face, opt.quadrature_boost));
      const DenseMatrix nv = normal_values(ft.plus.values, ft.normal);
      items[ne + f].push_back({w_start(space, face.owner), w_start(space, face.owner), z * gram(nv, nv, ft.rule.weights)});
    });
  }
  return compress(space.size(), items);
}

CouplingMatrices assemble_coupling(const DgSpace& space, const MaterialField& mats, double tau,
                                   const AssemblyOptions& opt) {
  zeta(tau);
  const PolyMesh& mesh = space.mesh();
  std::vector<LocalBlocks> items(mesh.num_faces());
  parallel_for(mesh.num_faces(), [&](Index f) {
    const Face& face = mesh.face(f);
    if (face.kind != FaceClass::interface) return;
    const FaceTables ft = jump_average_tables(space, f, face_exactness(space, face, opt.quadrature_boost));
    const DenseMatrix nv = normal_values(ft.plus.values, ft.normal);
    const DenseMatrix local = mats.acoustic[face.neighbor].rho_a * gram(nv, ft.minus.values, ft.rule.weights);
    items[f].push_back({u_start(space, face.owner), space.phi_index(face.neighbor), local});
    if (tau != 0.0) items[f].push_back({w_start(space, face.owner), space.phi_index(face.neighbor), local});
  });
  CouplingMatrices c;
  c.cp = compress(space.size(), items);
  c.ca = SparseMatrix(-SparseMatrix(c.cp.transpose()));
  c.ca.makeCompressed();
  return c;
}

BlockSystem assemble_block_system(const DgSpace& space, const MaterialField& mats, const PenaltyConstants& constants,
                                  const AssemblyOptions& opt) {
  if (mats.poro.size() != space.mesh().num_elements() || mats.acoustic.size() != space.mesh().num_elements())
    throw ModelError("material field does not match the mesh");
  BlockSystem sys;
  sys.tau = mats.tau;
  sys.penalties = penalty_values(space, mats, constants);
  sys.mass = assemble_mass(space, mats, opt);
  sys.elastic = assemble_elastic(space, mats, sys.penalties, opt);
  sys.poro = assemble_poro_stiffness(space, mats, sys.penalties, mats.tau, opt);
  sys.acoustic = assemble_acoustic(space, mats, sys.penalties, opt);
  sys.viscous = assemble_damping(space, mats, mats.tau, opt);
  sys.coupling = assemble_coupling(space, mats, mats.tau, opt);
  sys.stiffness = sys.elastic + sys.poro + sys.acoustic;
  sys.damping = sys.viscous + sys.coupling.cp + sys.coupling.ca;
  sys.stiffness.makeCompressed();
  sys.damping.makeCompressed();
  return sys;
}

NormMatrices assemble_norm_matrices(const DgSpace& space, const MaterialField& mats, const PenaltyField& pen,
                                    double tau) {
  NormMatrices n;
  n.elastic = elastic_operator(space, mats, pen, {}, true);
  n.poro = poro_operator(space, mats, pen, tau, {}, true, true);
  n.acoustic = acoustic_operator(space, mats, pen, {}, true);
  return n;
}

std::vector<std::vector<Index>> element_dof_groups(const DgSpace& space) {
  std::vector<std::vector<Index>> groups(space.mesh().num_elements());
  for (Index e = 0; e < groups.size(); ++e) {
    const Index n = space.num_modes(e);
    auto& g = groups[e];
    if (space.mesh().region(e) == Region::acoustic) {
      for (Index k = 0; k < n; ++k) g.push_back(space.phi_index(e) + k);
    } else {
      for (Index k = 0; k < 2 * n; ++k) g.push_back(u_start(space, e) + k);
      for (Index k = 0; k < 2 * n; ++k) g.push_back(w_start(space, e) + k);
    }
  }
  return groups;
}

void write_triplets(const std::filesystem::path& path, const SparseMatrix& matrix) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(17);
  for (int r = 0; r < matrix.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(matrix, r); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace polydg
