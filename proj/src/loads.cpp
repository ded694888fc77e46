#include "polydg/forms.hpp"

namespace polydg {

namespace {

struct Fields {
  VectorField f_p, g_p;
  ScalarField f_a;
  VectorField u_b, w_b;
  ScalarField phi_b;
};

bool any(const Fields& f) { return f.f_p || f.g_p || f.f_a || f.u_b || f.w_b || f.phi_b; }

void add_segment(Vector& out, Index first, const DenseMatrix& phi, const std::vector<double>& values) {
  for (Index q = 0; q < values.size(); ++q)
    if (values[q] != 0.0) out.segment(first, phi.rows()) += values[q] * phi.col(q);
}

/// Integrates the volume sources and the Nitsche boundary data against the test functions.
Vector integrate(const DgSpace& space, const MaterialField& mats, const PenaltyField& pen, const Fields& f,
                 int boost) {
  const PolyMesh& mesh = space.mesh();
  Vector out = Vector::Zero(space.size());
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const bool poro = mesh.region(e) == Region::poroelastic;
    if (poro ? !(f.f_p || f.g_p) : !f.f_a) continue;
    const QuadratureRule rule = volume_quadrature(mesh, e, 2 * space.degree(e) + 2 + boost);
    const DenseMatrix phi = space.basis(e).eval(rule.points);
    const Index nq = rule.size();
    if (!poro) {
      std::vector<double> v(nq);
      for (Index q = 0; q < nq; ++q) v[q] = rule.weights[q] * mats.acoustic[e].rho_a * f.f_a(rule.points[q]);
      add_segment(out, space.phi_index(e), phi, v);
      continue;
    }
    for (const auto& [field, is_u] : {std::pair{&f.f_p, true}, std::pair{&f.g_p, false}}) {
      if (!*field) continue;
      std::vector<double> vx(nq), vy(nq);
      for (Index q = 0; q < nq; ++q) {
        const Vec2 val = (*field)(rule.points[q]);
        vx[q] = rule.weights[q] * val.x();
        vy[q] = rule.weights[q] * val.y();
      }
      add_segment(out, is_u ? space.u_index(e, 0) : space.w_index(e, 0), phi, vx);
      add_segment(out, is_u ? space.u_index(e, 1) : space.w_index(e, 1), phi, vy);
    }
  }
  if (!(f.u_b || f.w_b || f.phi_b)) return out;
  for (Index fi = 0; fi < mesh.num_faces(); ++fi) {
    const Face& face = mesh.face(fi);
    if (!face.is_boundary()) continue;
    const Index e = face.owner;
    const QuadratureRule rule = face_quadrature(mesh, fi, 2 * space.degree(e) + 2 + boost);
    const Index nq = rule.size();
    DenseMatrix phi = space.basis(e).eval(rule.points), dx, dy;
    space.basis(e).eval_grad(rule.points, dx, dy);
    const Vec2 n = face.normal;
    if (face.kind == FaceClass::a_boundary) {
      if (!f.phi_b) continue;
      const double rho_a = mats.acoustic[e].rho_a;
      const DenseMatrix flux = rho_a * (dx * n.x() + dy * n.y());
      for (Index q = 0; q < nq; ++q) {
        const double g = rule.weights[q] * f.phi_b(rule.points[q]);
        if (g == 0.0) continue;
        out.segment(space.phi_index(e), phi.rows()) += g * (pen.chi[fi] * phi.col(q) - flux.col(q));
      }
      continue;
    }
    const PoroParams& p = mats.poro[e].raw;
    const Index nb = phi.rows();
    for (Index q = 0; q < nq; ++q) {
      const Vec2 gu = f.u_b ? f.u_b(rule.points[q]) : Vec2::Zero();
      const Vec2 gw = f.w_b ? f.w_b(rule.points[q]) : Vec2::Zero();
      const double wq = rule.weights[q];
      // Elastic: -<g, sigma(v) n> + alpha <g, v>.
      if (gu != Vec2::Zero()) {
        for (Index k = 0; k < nb; ++k) {
          const Vec2 grad(dx(k, q), dy(k, q));
          const double dn = grad.dot(n);
          for (int c = 0; c < 2; ++c) {
            // sigma(phi e_c) n = mu (e_c dn + grad n_c) + lambda grad_c n
            const Vec2 ec = c == 0 ? Vec2(1, 0) : Vec2(0, 1);
            const Vec2 t = p.mu * (ec * dn + grad * n[c]) + p.lambda * grad[c] * n;
            out[space.u_index(e, c) + k] += wq * (pen.alpha[fi] * gu[c] * phi(k, q) - gu.dot(t));
          }
        }
      }
      // Poro: l(s) = -<g_n, m div s> + gamma <g_n, s.n>, s = beta v + z.
      const double gn = (p.beta * gu + gw).dot(n);
      if (gn != 0.0) {
        for (Index k = 0; k < nb; ++k)
          for (int c = 0; c < 2; ++c) {
            const double grad_c = c == 0 ? dx(k, q) : dy(k, q);
            const double l = wq * gn * (pen.gamma[fi] * phi(k, q) * n[c] - p.m * grad_c);
            out[space.u_index(e, c) + k] += p.beta * l;
            out[space.w_index(e, c) + k] += l;
          }
      }
    }
  }
  return out;
}

}  // namespace

LoadAssembler::LoadAssembler(const DgSpace& space, const MaterialField& materials, const PenaltyField& penalties,
                             SourceTerms sources, BoundaryData boundary, int quadrature_boost)
    : space_(&space), materials_(&materials), sources_(std::move(sources)), size_(space.size()),
      boost_(quadrature_boost) {
  for (const SeparableSource& s : sources_.separable) {
    Fields f;
    f.f_p = s.f_p;
    f.g_p = s.g_p;
    f.f_a = s.f_a;
    if (!any(f)) continue;
    if (!s.time) throw ModelError("separable source without a time profile");
    times_.push_back(s.time);
    shapes_.push_back(integrate(space, materials, penalties, f, boost_));
    is_source_.push_back(true);
  }
  for (const DirichletTerm& d : boundary.terms) {
    Fields f;
    f.u_b = d.u;
    f.w_b = d.w;
    f.phi_b = d.phi;
    if (!any(f)) continue;
    if (!d.time) throw ModelError("boundary term without a time profile");
    times_.push_back(d.time);
    shapes_.push_back(integrate(space, materials, penalties, f, boost_));
    is_source_.push_back(false);
  }
  if (sources_.f_p || sources_.g_p || sources_.f_a) penalties_ = penalties;
}

Vector LoadAssembler::general(double t) const {
  Fields f;
  if (sources_.f_p) f.f_p = [&](const Vec2& x) { return sources_.f_p(x, t); };
  if (sources_.g_p) f.g_p = [&](const Vec2& x) { return sources_.g_p(x, t); };
  if (sources_.f_a) f.f_a = [&](const Vec2& x) { return sources_.f_a(x, t); };
  return integrate(*space_, *materials_, penalties_, f, boost_);
}

void LoadAssembler::evaluate(double t, Vector& out) const {
  out.setZero(size_);
  for (Index i = 0; i < shapes_.size(); ++i) {
    if (t >= sources_.cutoff && is_source_[i]) continue;
    const double s = times_[i](t);
    if (s != 0.0) out += s * shapes_[i];
  }
  if ((sources_.f_p || sources_.g_p || sources_.f_a) && t < sources_.cutoff) out += general(t);
}

Vector LoadAssembler::operator()(double t) const {
  Vector out;
  evaluate(t, out);
  return out;
}

}  // namespace polydg
