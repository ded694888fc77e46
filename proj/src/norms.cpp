#include <cmath>

#include "polydg/harness.hpp"
#include "polydg/kernels.hpp"
#include "polydg/parallel.hpp"

namespace polydg {

namespace {

struct Tables {
  DenseMatrix v, dx, dy;
};

Tables element_tables(const DgSpace& space, Index e, const std::vector<Vec2>& points) {
  Tables t;
  t.v = space.basis(e).eval(points);
  space.basis(e).eval_grad(points, t.dx, t.dy);
  return t;
}

// Discrete values of one element at point column q.
struct Local {
  Vec2 u = Vec2::Zero(), w = Vec2::Zero(), u_t = Vec2::Zero(), w_t = Vec2::Zero();
  Mat2 grad_u = Mat2::Zero(), grad_w = Mat2::Zero();
  double phi = 0.0, phi_t = 0.0;
  Vec2 grad_phi = Vec2::Zero();
};

Local evaluate(const DgSpace& space, Index e, const DenseMatrix& v, const DenseMatrix* dx, const DenseMatrix* dy,
               Index q, const SimState& s) {
  Local l;
  const Index n = space.num_modes(e);
  auto dotc = [&](const DenseMatrix& m, const Vector& x, Index first) {
    return m.col(q).dot(x.segment(first, n));
  };
  if (space.mesh().region(e) == Region::acoustic) {
    const Index i = space.phi_index(e);
    l.phi = dotc(v, s.X, i);
    l.phi_t = dotc(v, s.Z, i);
    if (dx) l.grad_phi = Vec2(dotc(*dx, s.X, i), dotc(*dy, s.X, i));
    return l;
  }
  for (int c = 0; c < 2; ++c) {
    const Index iu = space.u_index(e, c), iw = space.w_index(e, c);
    l.u[c] = dotc(v, s.X, iu);
    l.w[c] = dotc(v, s.X, iw);
    l.u_t[c] = dotc(v, s.Z, iu);
    l.w_t[c] = dotc(v, s.Z, iw);
    if (dx) {
      l.grad_u.row(c) = Vec2(dotc(*dx, s.X, iu), dotc(*dy, s.X, iu)).transpose();
      l.grad_w.row(c) = Vec2(dotc(*dx, s.X, iw), dotc(*dy, s.X, iw)).transpose();
    }
  }
  return l;
}

double elastic_density(const Mat2& grad, double lambda, double mu) {
  const Mat2 eps = 0.5 * (grad + grad.transpose());
  return 2.0 * mu * eps.squaredNorm() + lambda * eps.trace() * eps.trace();
}

void add(ErrorReport& a, const ErrorReport& b) {
  a.mass += b.mass;
  a.damping += b.damping;
  a.elastic += b.elastic;
  a.poro += b.poro;
  a.acoustic += b.acoustic;
  a.l2_u += b.l2_u;
  a.l2_w += b.l2_w;
  a.l2_phi += b.l2_phi;
  a.l2_pressure += b.l2_pressure;
}

ErrorReport element_errors(const DgSpace& space, const MaterialField& mats, const SimState& s,
                           const ManufacturedSolution* ex, Index e, int boost) {
  ErrorReport r;
  const PolyMesh& mesh = space.mesh();
  const QuadratureRule rule = volume_quadrature(mesh, e, 2 * space.degree(e) + boost);
  const Tables t = element_tables(space, e, rule.points);
  const double time = s.t;
  for (Index q = 0; q < rule.size(); ++q) {
    const Vec2& x = rule.points[q];
    const double wq = rule.weights[q];
    const Local l = evaluate(space, e, t.v, &t.dx, &t.dy, q, s);
    if (mesh.region(e) == Region::acoustic) {
      const AcousticParams& a = mats.acoustic[e];
      const double ephi = (ex ? ex->phi(x, time) : 0.0) - l.phi;
      const double ephi_t = (ex ? ex->phi_t(x, time) : 0.0) - l.phi_t;
      const Vec2 egrad = (ex ? ex->grad_phi(x, time) : Vec2::Zero().eval()) - l.grad_phi;
      r.mass += wq * a.rho_a / (a.c * a.c) * ephi_t * ephi_t;
      r.acoustic += wq * a.rho_a * egrad.squaredNorm();
      r.l2_phi += wq * ephi * ephi;
      r.l2_pressure += wq * a.rho_a * a.rho_a * ephi_t * ephi_t;
      continue;
    }
    const PoroMaterial& m = mats.poro[e];
    const double beta = m.raw.beta;
    const Vec2 eu = (ex ? ex->u(x, time) : Vec2::Zero().eval()) - l.u;
    const Vec2 ew = (ex ? ex->w(x, time) : Vec2::Zero().eval()) - l.w;
    const Vec2 eu_t = (ex ? ex->u_t(x, time) : Vec2::Zero().eval()) - l.u_t;
    const Vec2 ew_t = (ex ? ex->w_t(x, time) : Vec2::Zero().eval()) - l.w_t;
    const Mat2 gu = (ex ? ex->grad_u(x, time) : Mat2::Zero().eval()) - l.grad_u;
    const Mat2 gw = (ex ? ex->grad_w(x, time) : Mat2::Zero().eval()) - l.grad_w;
    r.mass += wq * (m.rho * eu_t.squaredNorm() + 2.0 * m.raw.rho_f * eu_t.dot(ew_t) + m.rho_w * ew_t.squaredNorm());
    r.damping += wq * m.eta_over_k() * ew.squaredNorm();
    r.elastic += wq * elastic_density(gu, m.raw.lambda, m.raw.mu);
    const double div = beta * gu.trace() + gw.trace();
    r.poro += wq * m.raw.m * div * div;
    r.l2_u += wq * eu.squaredNorm();
    r.l2_w += wq * ew.squaredNorm();
    const double p_h = -m.raw.m * (beta * l.grad_u.trace() + l.grad_w.trace());
    const double ep = (ex ? ex->pressure(x, time) : 0.0) - p_h;
    r.l2_pressure += wq * ep * ep;
  }
  return r;
}

ErrorReport face_errors(const DgSpace& space, const MaterialField& mats, const PenaltyField& pen, const SimState& s,
                        const ManufacturedSolution* ex, Index f, int boost) {
  ErrorReport r;
  const PolyMesh& mesh = space.mesh();
  const Face& face = mesh.face(f);
  const bool interface = face.kind == FaceClass::interface;
  const double tau = mats.tau;
  const double zeta = mats.zeta();
  const bool poro = face.kind == FaceClass::p_interior || face.kind == FaceClass::p_boundary;
  const bool acoustic = face.kind == FaceClass::a_interior || face.kind == FaceClass::a_boundary;
  if (interface && tau > 0.0 && zeta == 0.0) return r;
  int p = space.degree(face.owner);
  if (!face.is_boundary()) p = std::max(p, space.degree(face.neighbor));
  const FaceTables t = jump_average_tables(space, f, 2 * p + boost);
  const Vec2& n = t.normal;
  const double time = s.t;
  for (Index q = 0; q < t.rule.size(); ++q) {
    const Vec2& x = t.rule.points[q];
    const double wq = t.rule.weights[q];
    const Local a = evaluate(space, t.plus.element, t.plus.values, nullptr, nullptr, q, s);
    if (acoustic) {
      double jump;
      if (face.is_boundary())
        jump = (ex ? ex->phi(x, time) : 0.0) - a.phi;
      else
        jump = evaluate(space, t.minus.element, t.minus.values, nullptr, nullptr, q, s).phi - a.phi;
      r.acoustic += wq * pen.chi[f] * jump * jump;
      continue;
    }
    const PoroMaterial& m = mats.poro[face.owner];
    const double beta = m.raw.beta;
    if (interface) {
      const double ewn = ((ex ? ex->w(x, time) : Vec2::Zero().eval()) - a.w).dot(n);
      r.damping += wq * zeta * ewn * ewn;
      if (tau == 0.0) r.poro += wq * pen.gamma[f] * ewn * ewn;
      continue;
    }
    if (!poro) continue;
    Vec2 ju, jw;
    if (face.is_boundary()) {
      ju = (ex ? ex->u(x, time) : Vec2::Zero().eval()) - a.u;
      jw = (ex ? ex->w(x, time) : Vec2::Zero().eval()) - a.w;
    } else {
      const Local b = evaluate(space, t.minus.element, t.minus.values, nullptr, nullptr, q, s);
      ju = b.u - a.u;
      jw = b.w - a.w;
    }
    r.elastic += wq * pen.alpha[f] * ju.squaredNorm();
    const double jn = (beta * ju + jw).dot(n);
    r.poro += wq * pen.gamma[f] * jn * jn;
  }
  return r;
}

}  // namespace

const char* to_string(NormKind kind) {
  switch (kind) {
    case NormKind::energy_E: return "energy";
    case NormKind::dG_e: return "dG_e";
    case NormKind::dG_p_semi: return "dG_p";
    case NormKind::dG_a: return "dG_a";
    case NormKind::L2_field: return "L2";
    case NormKind::L2_pressure: return "L2_pressure";
  }
  return "?";
}

double ErrorReport::energy() const { return std::sqrt(mass + damping + elastic + poro + acoustic); }
double ErrorReport::l2_field() const { return std::sqrt(l2_u + l2_w + l2_phi); }
double ErrorReport::pressure() const { return std::sqrt(l2_pressure); }

double ErrorReport::value(NormKind kind) const {
  switch (kind) {
    case NormKind::energy_E: return energy();
    case NormKind::dG_e: return std::sqrt(elastic);
    case NormKind::dG_p_semi: return std::sqrt(poro);
    case NormKind::dG_a: return std::sqrt(acoustic);
    case NormKind::L2_field: return l2_field();
    case NormKind::L2_pressure: return pressure();
  }
  return 0.0;
}

ErrorReport compute_errors(const DgSpace& space, const MaterialField& materials, const PenaltyField& penalties,
                           const SimState& state, const ManufacturedSolution* exact, int quadrature_boost) {
  const PolyMesh& mesh = space.mesh();
  std::vector<ErrorReport> per_element(mesh.num_elements()), per_face(mesh.num_faces());
  parallel_for(mesh.num_elements(), [&](Index e) {
    per_element[e] = element_errors(space, materials, state, exact, e, quadrature_boost);
  });
  parallel_for(mesh.num_faces(), [&](Index f) {
    per_face[f] = face_errors(space, materials, penalties, state, exact, f, quadrature_boost);
  });
  ErrorReport total;
  for (const auto& r : per_element) add(total, r);
  for (const auto& r : per_face) add(total, r);
  return total;
}

double compute_error(const DgSpace& space, const MaterialField& materials, const PenaltyField& penalties,
                     const SimState& state, const ManufacturedSolution& exact, const NormSpec& norm) {
  return compute_errors(space, materials, penalties, state, &exact, norm.quadrature_boost).value(norm.which);
}

double energy_norm_matrix(const BlockSystem& system, const NormMatrices& norms, const SimState& state) {
  Vector work(state.X.size());
  auto form = [&](const SparseMatrix& m, const Vector& x) {
    kernels::spmv(m, x, work);
    return x.dot(work);
  };
  return form(system.mass, state.Z) + form(system.viscous, state.X) + form(norms.elastic, state.X) +
         form(norms.poro, state.X) + form(norms.acoustic, state.X);
}

}  // namespace polydg
