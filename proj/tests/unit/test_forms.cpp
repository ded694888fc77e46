#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "helpers.hpp"
#include "polydg/forms.hpp"

using namespace polydg;
using polydg::testing::project_fields;
using polydg::testing::random_vector;
using polydg::testing::share;

namespace {

Region left_poro(const Vec2& x) { return x.x() < 0.0 ? Region::poroelastic : Region::acoustic; }
Region all_acoustic(const Vec2&) { return Region::acoustic; }
Region all_poro(const Vec2&) { return Region::poroelastic; }

const auto zero_vec = [](const Vec2&) { return Vec2(0.0, 0.0); };
const auto zero_scalar = [](const Vec2&) { return 0.0; };

double max_abs(const SparseMatrix& m) {
  double r = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) r = std::max(r, std::abs(it.value()));
  return r;
}

double asymmetry(const SparseMatrix& m) {
  const SparseMatrix d = m - SparseMatrix(m.transpose());
  return max_abs(d);
}

struct Setup {
  std::shared_ptr<const PolyMesh> mesh;
  DgSpace space;
  MaterialField mats;
  PenaltyField pen;
};

Setup make(PolyMesh mesh, int p, const PoroParams& poro = {}, const AcousticParams& ac = {}, double tau = 1.0) {
  auto shared = share(std::move(mesh));
  DgSpace space = build_space(shared, p, p);
  MaterialField mats = MaterialField::uniform(*shared, poro, ac, tau);
  PenaltyField pen = penalty_values(space, mats, {});
  return {shared, std::move(space), std::move(mats), std::move(pen)};
}

}  // namespace

TEST_CASE("jump and average operators") {
  const Vec2 n(1, 0);
  CHECK(scalar_jump(2.0, 1.0, n).isApprox(Vec2(1, 0)));
  CHECK(scalar_average(2.0, 1.0) == 1.5);
  CHECK(vector_jump(Vec2(1, 1), Vec2(1, 1), n).norm() == 0.0);
  CHECK(normal_jump(Vec2(1, 1), Vec2(1, 1), n) == 0.0);
  CHECK(scalar_jump(3.0, Vec2(0, -1)).isApprox(Vec2(0, -3)));
  CHECK(vector_jump(Vec2(1, 2), Vec2(0, 1)).isApprox((Mat2() << 0, 1, 0, 2).finished()));
}

TEST_CASE("face tables carry both traces") {
  Setup s = make(build_cartesian_mesh({-1, 1, 0, 1}, 2, 1, left_poro), 2);
  for (Index f = 0; f < s.mesh->num_faces(); ++f) {
    const FaceTables t = jump_average_tables(s.space, f, 6);
    CHECK(t.plus.values.rows() == 6);
    CHECK(t.plus.values.cols() == 4);
    CHECK(t.is_boundary() == s.mesh->face(f).is_boundary());
  }
}

TEST_CASE("elastic form") {
  SUBCASE("volume term of eps(u) = I") {
    Setup s = make(build_cartesian_mesh({0, 1, 0, 1}, 1, 1, all_poro), 1);
    const SparseMatrix ae = assemble_elastic(s.space, s.mats, s.pen, {true, 0});
    const Vector x = project_fields(s.space, [](const Vec2& p) { return p; }, zero_vec, zero_scalar);
    CHECK(x.dot(ae * x) == doctest::Approx(8.0).epsilon(1e-13));
  }
  SUBCASE("rigid translation and symmetry") {
    Setup s = make(build_cartesian_mesh({0, 1, 0, 1}, 4, 4, all_poro), 2);
    const SparseMatrix ae = assemble_elastic(s.space, s.mats, s.pen);
    CHECK(asymmetry(ae) <= 1e-12 * max_abs(ae));
    const Vector x = project_fields(s.space, [](const Vec2&) { return Vec2(1.0, -2.0); }, zero_vec, zero_scalar);
    const Vector r = ae * x;
    for (Index e = 0; e < s.mesh->num_elements(); ++e) {
      bool interior = true;
      for (Index f : s.mesh->element_faces(e)) interior &= !s.mesh->face(f).is_boundary();
      if (!interior) continue;
      for (Index k = 0; k < 2 * s.space.num_modes(e); ++k)
        CHECK(std::abs(r[s.space.u_index(e, 0) + k]) <= 1e-11);
    }
  }
  SUBCASE("non-positive mu is rejected") {
    Setup s = make(build_cartesian_mesh({0, 1, 0, 1}, 1, 1, all_poro), 1);
    s.mats.poro[0].raw.mu = 0.0;
    CHECK_THROWS_AS(assemble_elastic(s.space, s.mats, s.pen), ModelError);
  }
}

TEST_CASE("poro div form") {
  SUBCASE("volume term of w = (x, 0)") {
    Setup s = make(build_cartesian_mesh({0, 1, 0, 1}, 1, 1, all_poro), 1);
    const SparseMatrix ap = assemble_poro_div(s.space, s.mats, s.pen, 1.0, {true, 0});
    const Vector x = project_fields(s.space, zero_vec, [](const Vec2& p) { return Vec2(p.x(), 0.0); }, zero_scalar);
    CHECK(x.dot(ap * x) == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("face set depends on tau only at tau = 0") {
    Setup s = make(build_cartesian_mesh({-1, 1, 0, 1}, 4, 2, left_poro), 2);
    const SparseMatrix a1 = assemble_poro_div(s.space, s.mats, s.pen, 1.0);
    const SparseMatrix a05 = assemble_poro_div(s.space, s.mats, s.pen, 0.5);
    const SparseMatrix a0 = assemble_poro_div(s.space, s.mats, s.pen, 0.0);
    CHECK(max_abs(a1 - a05) == 0.0);
    CHECK(a0.nonZeros() >= a1.nonZeros());
    const SparseMatrix diff = a0 - a1;
    CHECK(max_abs(diff) > 0.0);
    // Differences live only on elements touching the interface.
    for (int r = 0; r < diff.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(diff, r); it; ++it) {
        if (it.value() == 0.0) continue;
        bool touches = false;
        for (Index e = 0; e < s.mesh->num_elements(); ++e) {
          if (s.mesh->region(e) != Region::poroelastic) continue;
          const Index w0 = s.space.w_index(e, 0);
          if (Index(it.row()) >= w0 && Index(it.row()) < w0 + 2 * s.space.num_modes(e))
            for (Index f : s.mesh->element_faces(e)) touches |= s.mesh->face(f).kind == FaceClass::interface;
        }
        CHECK(touches);
      }
    CHECK(asymmetry(a0) <= 1e-12 * max_abs(a0));
  }
  SUBCASE("null pressure identity") {
    Setup s = make(build_cartesian_mesh({-1, 1, 0, 1}, 4, 2, left_poro), 3);
    const SparseMatrix ap = assemble_poro_stiffness(s.space, s.mats, s.pen, 1.0);
    Vector x = random_vector(s.space.size(), 5);
    const auto& d = s.space.dofs();
    x.segment(d.w_offset(), d.u_size) = -x.segment(d.u_offset(), d.u_size);
    CHECK(std::abs(x.dot(ap * x)) <= 1e-12 * max_abs(ap) * x.squaredNorm());
  }
}

TEST_CASE("acoustic form") {
  SUBCASE("constant and affine fields") {
    // Acoustic island: no acoustic boundary faces, so constants are in the kernel.
    PolyMesh mesh = build_cartesian_mesh({0, 3, 0, 3}, 3, 3, [](const Vec2& x) {
      return (x - Vec2(1.5, 1.5)).norm() < 0.7 ? Region::acoustic : Region::poroelastic;
    });
    Setup s = make(mesh, 2);
    REQUIRE(s.mesh->count(Region::acoustic) == 1);
    const SparseMatrix aa = assemble_acoustic(s.space, s.mats, s.pen);
    const Vector one = project_fields(s.space, zero_vec, zero_vec, [](const Vec2&) { return 1.0; });
    CHECK((aa * one).lpNorm<Eigen::Infinity>() <= 1e-12);
    Setup big = make(build_cartesian_mesh({0, 1, 0, 1}, 4, 4, all_acoustic), 2);
    const SparseMatrix ab = assemble_acoustic(big.space, big.mats, big.pen);
    const Vector x = project_fields(big.space, zero_vec, zero_vec, [](const Vec2& p) { return 3.0 * p.y() - p.x(); });
    const Vector r = ab * x;
    for (Index e = 0; e < big.mesh->num_elements(); ++e) {
      bool interior = true;
      for (Index f : big.mesh->element_faces(e)) interior &= !big.mesh->face(f).is_boundary();
      if (interior)
        for (Index k = 0; k < big.space.num_modes(e); ++k) CHECK(std::abs(r[big.space.phi_index(e) + k]) <= 1e-12);
    }
    CHECK(asymmetry(ab) <= 1e-12 * max_abs(ab));
  }
  SUBCASE("volume term of phi = x") {
    Setup s = make(build_cartesian_mesh({0, 1, 0, 1}, 1, 1, all_acoustic), 1);
    const SparseMatrix aa = assemble_acoustic(s.space, s.mats, s.pen, {true, 0});
    const Vector x = project_fields(s.space, zero_vec, zero_vec, [](const Vec2& p) { return p.x(); });
    CHECK(x.dot(aa * x) == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("Laplace patch test reproduces a quadratic") {
    Setup s = make(build_cartesian_mesh({0, 1, 0, 1}, 4, 4, all_acoustic), 2);
    const SparseMatrix aa = assemble_acoustic(s.space, s.mats, s.pen);
    SourceTerms src;
    src.separable.push_back({[](double) { return 1.0; }, {}, {}, [](const Vec2&) { return -4.0; }});
    BoundaryData bc;
    bc.terms.push_back({[](double) { return 1.0; }, {}, {}, [](const Vec2& p) { return p.squaredNorm(); }});
    const LoadAssembler load(s.space, s.mats, s.pen, src, bc);
    const Vector rhs = load(0.0);
    Eigen::SparseMatrix<double> a = aa;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a);
    const Vector x = lu.solve(rhs);
    const Vector exact = project_fields(s.space, zero_vec, zero_vec, [](const Vec2& p) { return p.squaredNorm(); });
    CHECK((x - exact).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("damping form") {
  SUBCASE("zero for eta = 0 and tau = 1") {
    Setup s = make(build_cartesian_mesh({-1, 1, 0, 1}, 4, 2, left_poro), 2);
    CHECK(assemble_damping(s.space, s.mats, 1.0).nonZeros() == 0);
    CHECK(assemble_damping(s.space, s.mats, 0.0).nonZeros() == 0);
    const SparseMatrix b = assemble_damping(s.space, s.mats, 0.5);
    CHECK(b.nonZeros() > 0);
    CHECK(asymmetry(b) <= 1e-12 * max_abs(b));
  }
  SUBCASE("eta / k = 2 on a unit poroelastic square") {
    PoroParams p;
    p.eta = 2.0;
    p.permeability = 1.0;
    Setup s = make(build_cartesian_mesh({0, 1, 0, 1}, 2, 2, all_poro), 1, p);
    const SparseMatrix b = assemble_damping(s.space, s.mats, 1.0);
    const Vector x = project_fields(s.space, zero_vec, [](const Vec2&) { return Vec2(1.0, 0.0); }, zero_scalar);
    CHECK(x.dot(b * x) == doctest::Approx(2.0).epsilon(1e-13));
    s.mats.poro[0].raw.permeability = 0.0;
    CHECK_THROWS_AS(assemble_damping(s.space, s.mats, 1.0), ModelError);
  }
}

TEST_CASE("coupling") {
  SUBCASE("no interface") {
    Setup s = make(build_cartesian_mesh({0, 1, 0, 1}, 2, 2, all_acoustic), 1);
    const CouplingMatrices c = assemble_coupling(s.space, s.mats, 1.0);
    CHECK(c.cp.nonZeros() == 0);
    CHECK(c.ca.nonZeros() == 0);
  }
  SUBCASE("pairing of phi = 1 and v.n = 1") {
    Setup s = make(build_cartesian_mesh({-1, 1, 0, 1}, 4, 2, left_poro), 2);
    const CouplingMatrices c = assemble_coupling(s.space, s.mats, 1.0);
    const Vector x = project_fields(s.space, [](const Vec2&) { return Vec2(1.0, 0.0); }, zero_vec,
                                    [](const Vec2&) { return 1.0; });
    Vector v = x, phi = x;
    v.tail(s.space.dofs().phi_size).setZero();
    phi.head(2 * s.space.dofs().u_size).setZero();
    CHECK(v.dot(c.cp * phi) == doctest::Approx(1.0).epsilon(1e-13));  // interface length
    CHECK(max_abs(c.ca + SparseMatrix(c.cp.transpose())) == 0.0);
    const SparseMatrix skew = c.cp + c.ca;
    for (unsigned seed = 1; seed < 6; ++seed) {
      const Vector r = random_vector(s.space.size(), seed);
      CHECK(std::abs(r.dot(skew * r)) <= 1e-12 * r.squaredNorm() * max_abs(c.cp));
    }
    // W rows vanish for sealed pores.
    const CouplingMatrices sealed = assemble_coupling(s.space, s.mats, 0.0);
    CHECK(sealed.cp.nonZeros() * 2 == c.cp.nonZeros());
  }
}

TEST_CASE("penalty values") {
  // Interior acoustic face between cells of diameter 0.5, p = 2.
  const double side = 0.5 / std::sqrt(2.0);
  Setup s = make(build_cartesian_mesh({0, 2 * side, 0, side}, 2, 1, all_acoustic), 2);
  for (Index f = 0; f < s.mesh->num_faces(); ++f) {
    const Face& face = s.mesh->face(f);
    if (face.kind == FaceClass::a_interior) CHECK(s.pen.chi[f] == doctest::Approx(80.0).epsilon(1e-13));
    if (face.kind == FaceClass::a_boundary) CHECK(s.pen.chi[f] == doctest::Approx(80.0).epsilon(1e-13));
  }
  // Boundary poroelastic face, m = 1, p = 3, h = 0.25.
  const double side2 = 0.25 / std::sqrt(2.0);
  Setup q = make(build_cartesian_mesh({0, side2, 0, side2}, 1, 1, all_poro), 3);
  PenaltyConstants literal;
  literal.scale_one_sided = false;
  const PenaltyField lit = penalty_values(q.space, q.mats, literal);
  for (Index f = 0; f < q.mesh->num_faces(); ++f) {
    CHECK(lit.gamma[f] == doctest::Approx(36.0).epsilon(1e-13));
    CHECK(q.pen.gamma[f] == doctest::Approx(360.0).epsilon(1e-13));
  }

  // Largest eigenvalue of C on symmetric tensors by power iteration on the
  // 4 x 4 action A -> 2 mu sym(A) + lambda tr(A) I.
  auto oracle = [](double lambda, double mu) {
    Eigen::Matrix4d op = Eigen::Matrix4d::Zero();
    for (int j = 0; j < 4; ++j) {
      Mat2 a = Mat2::Zero();
      a(j % 2, j / 2) = 1.0;
      const Mat2 c = mu * (a + a.transpose()) + lambda * a.trace() * Mat2::Identity();
      op.col(j) = Eigen::Map<const Eigen::Vector4d>(c.data());
    }
    Eigen::Vector4d v(1.0, 0.3, 0.3, 0.7);
    double ev = 0.0;
    for (int it = 0; it < 500; ++it) {
      const Eigen::Vector4d next = op * v;
      ev = next.norm() / v.norm();
      v = next.normalized();
    }
    return ev;
  };
  CHECK(elasticity_tensor_norm(1.0, 1.0) == doctest::Approx(oracle(1.0, 1.0)).epsilon(1e-12));
  CHECK(elasticity_tensor_norm(1.2e8, 1.86e9) == doctest::Approx(oracle(1.2e8, 1.86e9)).epsilon(1e-12));
  CHECK(elasticity_tensor_norm(5.0, 0.1) == doctest::Approx(oracle(5.0, 0.1)).epsilon(1e-12));
  CHECK_THROWS_AS(penalty_values(s.space, s.mats, {0.0, 10.0, 10.0}), ModelError);
}

TEST_CASE("block system structure") {
  PoroParams p = testcase2_poro();
  p.eta = 0.0015;
  Setup s = make(build_cartesian_mesh({0, 400, 0, 400}, 6, 6, testcase_geometry(2).region), 2, p,
                 testcase2_acoustic(), 0.5);
  const BlockSystem sys = assemble_block_system(s.space, s.mats);
  CHECK(sys.size() == s.space.size());
  for (const SparseMatrix* m : {&sys.mass, &sys.stiffness, &sys.elastic, &sys.poro, &sys.acoustic, &sys.viscous})
    CHECK(asymmetry(*m) <= 1e-12 * max_abs(*m));
  CHECK(max_abs(sys.coupling.ca + SparseMatrix(sys.coupling.cp.transpose())) == 0.0);
  // Random principal 50 x 50 submatrix of the mass matrix is SPD.
  std::mt19937 rng(3);
  std::vector<Index> idx(sys.size());
  std::iota(idx.begin(), idx.end(), Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  DenseMatrix sub(50, 50);
  const DenseMatrix dense = DenseMatrix(sys.mass);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) sub(i, j) = dense(idx[i], idx[j]);
  CHECK(Eigen::SelfAdjointEigenSolver<DenseMatrix>(sub).eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("loads") {
  SUBCASE("zero sources") {
    Setup s = make(build_cartesian_mesh({-1, 1, 0, 1}, 4, 2, left_poro), 2);
    const LoadAssembler load(s.space, s.mats, s.pen, {});
    CHECK(load(0.3).norm() == 0.0);
  }
  SUBCASE("unit acoustic source") {
    Setup s = make(build_cartesian_mesh({0, 1, 0, 1}, 1, 1, all_acoustic), 2);
    SourceTerms src;
    src.f_a = [](const Vec2&, double) { return 1.0; };
    const LoadAssembler load(s.space, s.mats, s.pen, src);
    const Vector f = load(0.0);
    CHECK(f[0] == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("test case 1 loads converge under quadrature refinement") {
    Setup s = make(build_cartesian_mesh({-1, 1, 0, 1}, 4, 2, left_poro), 3);
    const ManufacturedSolution ms = testcase1_solution(s.mats.poro[0], s.mats.acoustic[0]);
    const Vector f4 = LoadAssembler(s.space, s.mats, s.pen, ms.sources, ms.boundary, 4)(0.0);
    const Vector f8 = LoadAssembler(s.space, s.mats, s.pen, ms.sources, ms.boundary, 8)(0.0);
    const Vector f12 = LoadAssembler(s.space, s.mats, s.pen, ms.sources, ms.boundary, 12)(0.0);
    CHECK((f8 - f12).norm() <= 1e-12 * f12.norm());
    CHECK((f4 - f12).norm() <= 1e-6 * f12.norm());
    // Separable and general callables agree.
    SourceTerms general;
    general.f_p = [&](const Vec2& x, double t) {
      Vec2 v = Vec2::Zero();
      for (const auto& term : ms.sources.separable)
        if (term.f_p) v += term.time(t) * term.f_p(x);
      return v;
    };
    const Vector fg = LoadAssembler(s.space, s.mats, s.pen, general, {}, 4)(0.1);
    SourceTerms only_fp;
    for (const auto& term : ms.sources.separable)
      if (term.f_p) only_fp.separable.push_back({term.time, term.f_p, {}, {}});
    const Vector fs = LoadAssembler(s.space, s.mats, s.pen, only_fp, {}, 4)(0.1);
    CHECK((fg - fs).norm() <= 1e-13 * fs.norm());
  }
  SUBCASE("time-limited source switches off") {
    Setup s = make(build_cartesian_mesh({0, 400, 0, 400}, 8, 8, testcase_geometry(2).region), 1,
                   testcase2_poro(), testcase2_acoustic());
    const LoadAssembler load(s.space, s.mats, s.pen, ricker_sources(testcase_geometry(2)));
    CHECK(load(1.0 / 80.0).norm() > 0.0);
    CHECK(load(0.06).norm() == 0.0);
  }
}

TEST_CASE("triplet dump") {
  Setup s = make(build_cartesian_mesh({0, 1, 0, 1}, 1, 1, all_acoustic), 1);
  const SparseMatrix m = assemble_mass(s.space, s.mats);
  const auto path = std::filesystem::temp_directory_path() / "polydg_triplets.txt";
  write_triplets(path, m);
  std::ifstream in(path);
  int r, c;
  double v;
  Index count = 0;
  while (in >> r >> c >> v) {
    CHECK(v == m.coeff(r, c));
    ++count;
  }
  CHECK(count == Index(m.nonZeros()));
  std::filesystem::remove(path);
}
