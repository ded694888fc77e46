#include "probes.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "polydg/physics.hpp"
#include "polydg/quadrature.hpp"
#include "polydg/space.hpp"

namespace polydg::probes {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Vector random_on(Index n, const std::vector<Index>& rows, std::mt19937& rng) {
  std::normal_distribution<double> d;
  Vector v = Vector::Zero(n);
  for (Index r : rows) v[r] = d(rng);
  return v;
}

double max_abs(const SparseMatrix& a) {
  double m = 0.0;
  for (Index k = 0; k < static_cast<Index>(a.outerSize()); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

std::shared_ptr<const PolyMesh> tc1_mesh(Index nx, Index ny) {
  const CaseSetup setup = testcase_geometry(1);
  return std::make_shared<const PolyMesh>(build_cartesian_mesh(setup.domain, nx, ny, setup.region));
}

}  // namespace

double polygon_moment(const std::vector<Vec2>& v, int p, int q) {
  double sum = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    double inner = 0.0;
    for (int k = 0; k <= p; ++k)
      for (int l = 0; l <= q; ++l)
        inner += binomial(k + l, l) * binomial(p + q - k - l, q - l) * std::pow(a.x(), k) *
                 std::pow(b.x(), p - k) * std::pow(a.y(), l) * std::pow(b.y(), q - l);
    sum += (a.x() * b.y() - b.x() * a.y()) * inner;
  }
  return sum / ((p + q + 2) * (p + q + 1) * binomial(p + q, p));
}

double max_moment_error(const PolyMesh& mesh, int max_degree) {
  double worst = 0.0;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    std::vector<Vec2> loop;
    double mx = 0.0, my = 0.0;
    for (Index v : mesh.element(e)) {
      loop.push_back(mesh.vertices()[v]);
      mx = std::max(mx, std::abs(loop.back().x()));
      my = std::max(my, std::abs(loop.back().y()));
    }
    const QuadratureRule rule = volume_quadrature(mesh, e, max_degree);
    for (int p = 0; p <= max_degree; ++p)
      for (int q = 0; p + q <= max_degree; ++q) {
        double got = 0.0;
        for (Index k = 0; k < rule.size(); ++k)
          got += rule.weights[k] * std::pow(rule.points[k].x(), p) * std::pow(rule.points[k].y(), q);
        const double scale = mesh.area(e) * std::pow(mx, p) * std::pow(my, q);
        worst = std::max(worst, std::abs(got - polygon_moment(loop, p, q)) / scale);
      }
  }
  return worst;
}

double max_asymmetry(const SparseMatrix& a) {
  const SparseMatrix at = a.transpose();
  const SparseMatrix d = a - at;
  const double m = max_abs(a);
  return m == 0.0 ? 0.0 : max_abs(d) / m;
}

RayleighRange rayleigh_probe(const SparseMatrix& a, const SparseMatrix& n, const SparseMatrix& mass,
                             const std::vector<Index>& rows, int samples, unsigned seed) {
  std::mt19937 rng(seed);
  RayleighRange r{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (int s = 0; s < samples; ++s) {
    const Vector v = random_on(a.rows(), rows, rng);
    const double q = v.dot(a * v);
    r.min_mass = std::min(r.min_mass, q / v.dot(mass * v));
    r.min_norm = std::min(r.min_norm, q / v.dot(n * v));
  }
  return r;
}

std::vector<Index> u_rows(const DgSpace& space) {
  std::vector<Index> r(space.dofs().u_size);
  for (Index i = 0; i < r.size(); ++i) r[i] = space.dofs().u_offset() + i;
  return r;
}

std::vector<Index> uw_rows(const DgSpace& space) {
  std::vector<Index> r(2 * space.dofs().u_size);
  for (Index i = 0; i < r.size(); ++i) r[i] = i;
  return r;
}

std::vector<Index> phi_rows(const DgSpace& space) {
  std::vector<Index> r(space.dofs().phi_size);
  for (Index i = 0; i < r.size(); ++i) r[i] = space.dofs().phi_offset() + i;
  return r;
}

TraceInverse trace_inverse_constants(const DgSpace& space, const MaterialField& mats, const PenaltyField& pen,
                                     int samples, unsigned seed) {
  const PolyMesh& mesh = space.mesh();
  const AssemblyOptions volume_only{true, 0};
  const SparseMatrix ve = assemble_elastic(space, mats, pen, volume_only);
  const SparseMatrix vp = assemble_poro_div(space, mats, pen, mats.tau, volume_only);
  const SparseMatrix va = assemble_acoustic(space, mats, pen, volume_only);

  std::vector<FaceTables> tables(mesh.num_faces());
  for (Index f = 0; f < mesh.num_faces(); ++f) tables[f] = jump_average_tables(space, f, 2 * space.max_degree() + 2);

  // Stress, m div and rho_a grad of one side at the face points.
  auto side_gradients = [&](const FaceTables::Side& s, const Vector& v, Index first_x, Index first_y) {
    const Index nm = space.num_modes(s.element);
    std::array<Vector, 4> g;  // d(vx)/dx, d(vx)/dy, d(vy)/dx, d(vy)/dy
    g[0] = s.dx.transpose() * v.segment(first_x, nm);
    g[1] = s.dy.transpose() * v.segment(first_x, nm);
    g[2] = s.dx.transpose() * v.segment(first_y, nm);
    g[3] = s.dy.transpose() * v.segment(first_y, nm);
    return g;
  };

  std::mt19937 rng(seed);
  TraceInverse k;
  const auto all_u = u_rows(space), all_phi = phi_rows(space);
  std::vector<Index> all_w;
  for (Index r : all_u) all_w.push_back(r + space.dofs().u_size);
  for (int s = 0; s < samples; ++s) {
    const Vector u = random_on(space.size(), all_u, rng);
    const Vector w = random_on(space.size(), all_w, rng);
    const Vector phi = random_on(space.size(), all_phi, rng);
    double fa = 0.0, fg = 0.0, fc = 0.0;
    for (Index f = 0; f < mesh.num_faces(); ++f) {
      const Face& face = mesh.face(f);
      const FaceTables& t = tables[f];
      const double weight = t.is_boundary() ? 1.0 : 0.5;
      const Index npts = t.rule.size();
      if (face.kind == FaceClass::p_interior || face.kind == FaceClass::p_boundary) {
        Vector sxx = Vector::Zero(npts), syy = sxx, sxy = sxx, dv = sxx;
        for (const FaceTables::Side* side : {&t.plus, &t.minus}) {
          if (side->element == invalid_index) continue;
          const Index e = side->element;
          const PoroParams& p = mats.poro[e].raw;
          const auto gu = side_gradients(*side, u, space.u_index(e, 0), space.u_index(e, 1));
          const auto gw = side_gradients(*side, w, space.w_index(e, 0), space.w_index(e, 1));
          const Vector div = gu[0] + gu[3];
          sxx += weight * (p.lambda * div + 2.0 * p.mu * gu[0]);
          syy += weight * (p.lambda * div + 2.0 * p.mu * gu[3]);
          sxy += weight * (p.mu * (gu[1] + gu[2]));
          dv += weight * p.m * (gw[0] + gw[3]);
        }
        for (Index q = 0; q < npts; ++q) {
          const double wq = t.rule.weights[q];
          fa += wq / pen.alpha[f] * (sxx[q] * sxx[q] + syy[q] * syy[q] + 2.0 * sxy[q] * sxy[q]);
          fg += wq / pen.gamma[f] * dv[q] * dv[q];
        }
      } else if (face.kind == FaceClass::a_interior || face.kind == FaceClass::a_boundary) {
        Vector gx = Vector::Zero(npts), gy = gx;
        for (const FaceTables::Side* side : {&t.plus, &t.minus}) {
          if (side->element == invalid_index) continue;
          const Index e = side->element, nm = space.num_modes(e);
          const double rho = mats.acoustic[e].rho_a;
          gx += weight * rho * (side->dx.transpose() * phi.segment(space.phi_index(e), nm));
          gy += weight * rho * (side->dy.transpose() * phi.segment(space.phi_index(e), nm));
        }
        for (Index q = 0; q < npts; ++q) fc += t.rule.weights[q] / pen.chi[f] * (gx[q] * gx[q] + gy[q] * gy[q]);
      }
    }
    k.alpha = std::max(k.alpha, pen.constants.c1 * fa / u.dot(ve * u));
    k.gamma = std::max(k.gamma, pen.constants.c2 * fg / w.dot(vp * w));
    if (!all_phi.empty()) k.chi = std::max(k.chi, pen.constants.c3 * fc / phi.dot(va * phi));
  }
  return k;
}

std::vector<Outcome> structural_suite() {
  std::vector<Outcome> out;
  const CaseSetup setup = testcase_geometry(1);
  auto mesh = tc1_mesh(8, 4);
  const DgSpace space = build_space(mesh, 3, 3);
  const MaterialField mats = MaterialField::uniform(*mesh, setup.poro, setup.acoustic, 1.0);
  const BlockSystem sys = assemble_block_system(space, mats);

  {
    Eigen::SimplicialLLT<SparseMatrix> llt(sys.mass);
    const auto r = rayleigh_probe(sys.mass, sys.mass, sys.mass, uw_rows(space), 20, 1);
    double min_diag = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < sys.size(); ++i) min_diag = std::min(min_diag, sys.mass.coeff(i, i));
    const bool ok = llt.info() == Eigen::Success && min_diag > 0.0 && max_asymmetry(sys.mass) <= 1e-12 && r.min_mass > 0;
    out.push_back({"mass SPD", ok, "Cholesky " + std::string(llt.info() == Eigen::Success ? "ok" : "failed") +
                                       ", min diag " + fmt(min_diag)});
  }
  {
    const SparseMatrix sum = sys.coupling.ca + SparseMatrix(sys.coupling.cp.transpose());
    const double m = max_abs(sum);
    out.push_back({"C^a = -(C^p)^T", m == 0.0 && sys.coupling.cp.nonZeros() > 0,
                   "max |C^a + (C^p)^T| = " + fmt(m) + ", nnz C^p = " + std::to_string(sys.coupling.cp.nonZeros())});
  }
  {
    double worst = 0.0;
    for (const SparseMatrix* a : {&sys.elastic, &sys.poro, &sys.acoustic, &sys.stiffness, &sys.viscous, &sys.mass})
      worst = std::max(worst, max_asymmetry(*a));
    out.push_back({"stiffness symmetry", worst <= 1e-12, "max relative asymmetry " + fmt(worst)});
  }
  {
    const NormMatrices norms = assemble_norm_matrices(space, mats, sys.penalties, mats.tau);
    const auto e = rayleigh_probe(sys.elastic, norms.elastic, sys.mass, u_rows(space), 200, 2);
    const auto p = rayleigh_probe(sys.poro, norms.poro, sys.mass, uw_rows(space), 200, 3);
    const auto a = rayleigh_probe(sys.acoustic, norms.acoustic, sys.mass, phi_rows(space), 200, 4);
    const bool ok = e.min_mass > 0.0 && p.min_mass >= 0.0 && a.min_mass > 0.0 && e.min_norm > 0.0;
    out.push_back({"coercivity (penalties 10)", ok,
                   "theta_e " + fmt(e.min_norm) + ", theta_p " + fmt(p.min_norm) + ", theta_a " + fmt(a.min_norm)});
  }
  {
    // Bounded means no growth under refinement; the values drift down as the
    // share of one-sided boundary faces shrinks.
    TraceInverse first, worst;
    std::string levels;
    for (Index l = 0; l < 3; ++l) {
      auto m = tc1_mesh(4 << l, 2 << l);
      const DgSpace s = build_space(m, 2, 2);
      const MaterialField mf = MaterialField::uniform(*m, setup.poro, setup.acoustic, 1.0);
      const TraceInverse k = trace_inverse_constants(s, mf, penalty_values(s, mf, {}), 20, 5 + l);
      if (l == 0) first = k;
      worst = {std::max(worst.alpha, k.alpha / first.alpha), std::max(worst.gamma, k.gamma / first.gamma),
               std::max(worst.chi, k.chi / first.chi)};
      levels += (l ? "; " : "") + fmt(k.alpha) + "/" + fmt(k.gamma) + "/" + fmt(k.chi);
    }
    const bool ok = worst.alpha <= 1.5 && worst.gamma <= 1.5 && worst.chi <= 1.5 &&
                    std::isfinite(first.alpha + first.gamma + first.chi) && first.alpha > 0.0;
    out.push_back({"trace-inverse bounds h-independent", ok,
                   "K alpha/gamma/chi per level: " + levels + " (no level above 1.5 x the coarsest)"});
  }
  {
    std::mt19937 rng(6);
    std::normal_distribution<double> d;
    Vector x = Vector::Zero(sys.size());
    for (Index i = 0; i < space.dofs().u_size; ++i) {
      x[i] = d(rng);
      x[space.dofs().u_size + i] = -x[i];
    }
    const double energy = std::abs(x.dot(sys.poro * x));
    const double scale = max_abs(sys.poro) * x.squaredNorm();
    out.push_back({"null pressure (beta = 1, w = -u)", energy <= 1e-12 * scale,
                   "|x^T A^p x| = " + fmt(energy) + ", scale " + fmt(scale)});
  }
  {
    const PolyMesh pentagon = PolyMesh::from_polygons(
        {Vec2(0, 0), Vec2(1, 0), Vec2(1.2, 0.8), Vec2(0.5, 1.3), Vec2(-0.2, 0.7)}, {{0, 1, 2, 3, 4}},
        {Region::acoustic});
    double worst = max_moment_error(pentagon, 12);
    worst = std::max(worst, max_moment_error(*mesh, 8));
#ifdef POLYDG_DATA_DIR
    worst = std::max(worst, max_moment_error(load_mesh(std::string(POLYDG_DATA_DIR) + "/meshes/tc1_voronoi_100.txt"), 8));
#endif
    out.push_back({"quadrature moments", worst <= 1e-12, "max relative error " + fmt(worst)});
  }
  {
    double lo = 1e300, hi = 0.0;
    for (Index l = 0; l < 4; ++l) {
      const double c = regularity_constant(*tc1_mesh(8 << l, 4 << l));
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    out.push_back({"regularity constant under refinement", hi - lo <= 1e-12 * hi,
                   "range [" + fmt(lo) + ", " + fmt(hi) + "]"});
  }
  return out;
}

}  // namespace polydg::probes
