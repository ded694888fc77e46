#include "polydg/physics.hpp"

#include <cmath>
#include <numbers>

#include "polydg/space.hpp"

namespace polydg {

namespace {

constexpr double pi = std::numbers::pi;

void require(bool ok, const std::string& what) {
  if (!ok) throw ModelError(what);
}

}  // namespace

PoroMaterial derived_coefficients(const PoroParams& raw) {
  require(raw.rho_s > 0.0 && raw.rho_f > 0.0, "densities must be positive");
  require(raw.porosity >= porosity_floor && raw.porosity <= 1.0 - porosity_floor, "porosity must lie in (0, 1)");
  require(raw.tortuosity >= 1.0, "tortuosity must be at least 1");
  require(raw.eta >= 0.0, "viscosity must be non-negative");
  require(raw.permeability > 0.0, "permeability must be positive");
  require(raw.lambda >= 0.0, "lambda must be non-negative");
  require(raw.mu > 0.0, "mu must be positive");
  require(raw.beta > raw.porosity && raw.beta <= 1.0, "beta must lie in (porosity, 1]");
  require(raw.m > 0.0, "Biot modulus m must be positive");

  PoroMaterial mat;
  mat.raw = raw;
  mat.rho = raw.porosity * raw.rho_f + (1.0 - raw.porosity) * raw.rho_s;
  mat.rho_w = raw.tortuosity / raw.porosity * raw.rho_f;
  mat.lambda_f = raw.lambda + raw.beta * raw.beta * raw.m;
  require(mat.rho * mat.rho_w - raw.rho_f * raw.rho_f > 0.0, "rho rho_w - rho_f^2 must be positive");
  if (raw.eta > 0.0)
    mat.f_c = raw.eta * raw.porosity / (2.0 * pi * raw.tortuosity * raw.permeability * raw.rho_f);
  return mat;
}

void validate(const AcousticParams& params) {
  require(params.c > 0.0, "sound speed must be positive");
  require(params.rho_a > 0.0, "acoustic density must be positive");
}

double zeta(double tau) {
  require(tau >= 0.0 && tau <= 1.0, "tau must lie in [0, 1]");
  return tau == 0.0 ? 0.0 : (1.0 - tau) / tau;
}

MaterialField MaterialField::uniform(const PolyMesh& mesh, const PoroParams& poro, const AcousticParams& acoustic,
                                     double tau) {
  polydg::zeta(tau);
  validate(acoustic);
  MaterialField field;
  field.poro.assign(mesh.num_elements(), derived_coefficients(poro));
  field.acoustic.assign(mesh.num_elements(), acoustic);
  field.tau = tau;
  return field;
}

double ricker_like_source(double t, double f0) {
  if (!(f0 > 0.0)) throw ModelError("source frequency must be positive");
  if (!(t > 0.0 && t < 1.0 / f0)) return 0.0;
  static constexpr double alpha[4] = {1.0, -21.0 / 32.0, 63.0 / 768.0, -1.0 / 512.0};
  const double w0 = 2.0 * pi * f0;
  double h = 0.0;
  for (int k = 0; k < 4; ++k) h += alpha[k] * std::sin(double(1 << k) * w0 * t);
  return h;
}

double source_support(const Vec2& x, const std::vector<Vec2>& centers, double radius, double value) {
  for (const Vec2& c : centers)
    if ((x - c).squaredNorm() <= radius * radius) return value;
  return 0.0;
}

ManufacturedSolution testcase1_solution(const PoroMaterial& poro, const AcousticParams& acoustic) {
  const double omega = std::sqrt(2.0) * pi;
  const double mu = poro.raw.mu, lambda = poro.raw.lambda, beta = poro.raw.beta, m = poro.raw.m;
  const double rho = poro.rho, rho_f = poro.raw.rho_f, rho_w = poro.rho_w, ek = poro.eta_over_k();
  const double c2 = acoustic.c * acoustic.c;

  // g(x) = x^2 cos(pi x / 2) sin(pi x) and derivatives.
  auto g = [](double x) { return x * x * std::cos(pi * x / 2) * std::sin(pi * x); };
  auto g1 = [](double x) {
    const double b = std::cos(pi * x / 2), b1 = -pi / 2 * std::sin(pi * x / 2);
    const double c = std::sin(pi * x), c1 = pi * std::cos(pi * x);
    return 2 * x * b * c + x * x * b1 * c + x * x * b * c1;
  };
  auto g2 = [](double x) {
    const double b = std::cos(pi * x / 2), b1 = -pi / 2 * std::sin(pi * x / 2), b2 = -pi * pi / 4 * b;
    const double c = std::sin(pi * x), c1 = pi * std::cos(pi * x), c2 = -pi * pi * c;
    return 2 * b * c + x * x * (b2 * c + b * c2) + 2 * (2 * x * b1 * c + 2 * x * b * c1 + x * x * b1 * c1);
  };
  // q(x) = x^2 sin(pi x).
  auto q = [](double x) { return x * x * std::sin(pi * x); };
  auto q1 = [](double x) { return 2 * x * std::sin(pi * x) + pi * x * x * std::cos(pi * x); };
  auto q2 = [](double x) {
    return 2 * std::sin(pi * x) + 4 * pi * x * std::cos(pi * x) - pi * pi * x * x * std::sin(pi * x);
  };
  auto ct = [omega](double t) { return std::cos(omega * t); };
  auto st = [omega](double t) { return std::sin(omega * t); };

  ManufacturedSolution s;
  const Vec2 ones(1.0, 1.0);
  s.u = [=](const Vec2& x, double t) -> Vec2 { return g(x.x()) * ct(t) * ones; };
  s.u_t = [=](const Vec2& x, double t) -> Vec2 { return -omega * g(x.x()) * st(t) * ones; };
  s.u_tt = [=](const Vec2& x, double t) -> Vec2 { return -omega * omega * g(x.x()) * ct(t) * ones; };
  s.w = [=](const Vec2& x, double t) -> Vec2 { return -g(x.x()) * ct(t) * ones; };
  s.w_t = [=](const Vec2& x, double t) -> Vec2 { return omega * g(x.x()) * st(t) * ones; };
  s.w_tt = [=](const Vec2& x, double t) -> Vec2 { return omega * omega * g(x.x()) * ct(t) * ones; };
  s.grad_u = [=](const Vec2& x, double t) {
    Mat2 gu;
    gu << g1(x.x()), 0.0, g1(x.x()), 0.0;
    return Mat2(gu * ct(t));
  };
  s.grad_w = [=](const Vec2& x, double t) {
    Mat2 gw;
    gw << g1(x.x()), 0.0, g1(x.x()), 0.0;
    return Mat2(-gw * ct(t));
  };
  s.phi = [=](const Vec2& x, double t) { return q(x.x()) * std::sin(pi * x.y()) * st(t); };
  s.phi_t = [=](const Vec2& x, double t) { return omega * q(x.x()) * std::sin(pi * x.y()) * ct(t); };
  s.phi_tt = [=](const Vec2& x, double t) { return -omega * omega * q(x.x()) * std::sin(pi * x.y()) * st(t); };
  s.grad_phi = [=](const Vec2& x, double t) -> Vec2 {
    return Vec2(q1(x.x()) * std::sin(pi * x.y()), pi * q(x.x()) * std::cos(pi * x.y())) * st(t);
  };
  // beta div u + div w = (beta - 1) g'(x) cos(omega t)
  s.pressure = [=](const Vec2& x, double t) { return -m * (beta - 1.0) * g1(x.x()) * ct(t); };

  // f_p = rho u_tt + rho_f w_tt - div(C:eps(u)) - beta m grad(beta div u + div w)
  // g_p = rho_f u_tt + rho_w w_tt + (eta/k) w_t - m grad(beta div u + div w)
  SeparableSource cos_part;
  cos_part.time = ct;
  cos_part.f_p = [=](const Vec2& x) -> Vec2 {
    const double gx = g(x.x()), gxx = g2(x.x());
    const Vec2 inertia = -omega * omega * (rho - rho_f) * gx * ones;
    const Vec2 div_sigma((2 * mu + lambda) * gxx, mu * gxx);
    const Vec2 grad_dil((beta - 1.0) * gxx, 0.0);
    return inertia - div_sigma - beta * m * grad_dil;
  };
  cos_part.g_p = [=](const Vec2& x) -> Vec2 {
    const double gx = g(x.x()), gxx = g2(x.x());
    return -omega * omega * (rho_f - rho_w) * gx * ones - m * Vec2((beta - 1.0) * gxx, 0.0);
  };
  SeparableSource sin_part;
  sin_part.time = st;
  if (ek != 0.0) sin_part.g_p = [=](const Vec2& x) -> Vec2 { return ek * omega * g(x.x()) * ones; };
  // f_a = c^-2 phi_tt - laplace(phi)
  sin_part.f_a = [=](const Vec2& x) {
    const double sy = std::sin(pi * x.y());
    return -omega * omega / c2 * q(x.x()) * sy - (q2(x.x()) * sy - pi * pi * q(x.x()) * sy);
  };
  s.sources.separable = {cos_part, sin_part};

  DirichletTerm cos_bc;
  cos_bc.time = ct;
  cos_bc.u = [=](const Vec2& x) -> Vec2 { return g(x.x()) * ones; };
  cos_bc.w = [=](const Vec2& x) -> Vec2 { return -g(x.x()) * ones; };
  DirichletTerm sin_bc;
  sin_bc.time = st;
  sin_bc.phi = [=](const Vec2& x) { return q(x.x()) * std::sin(pi * x.y()); };
  s.boundary.terms = {cos_bc, sin_bc};
  return s;
}

PoroParams testcase1_poro() { return PoroParams{}; }
AcousticParams testcase1_acoustic() { return AcousticParams{}; }

PoroParams testcase2_poro() {
  PoroParams p;
  p.rho_f = 1000.0;
  p.rho_s = 2690.0;
  p.mu = 1.86e9;
  p.porosity = 0.38;
  p.tortuosity = 1.8;
  p.permeability = 2.79e-11;
  p.lambda = 1.2e8;
  p.m = 5.34e9;
  p.beta = 0.95;
  p.eta = 0.0;
  return p;
}

AcousticParams testcase2_acoustic() { return AcousticParams{1500.0, 1000.0}; }

CaseSetup testcase_geometry(int id) {
  CaseSetup s;
  s.id = id;
  switch (id) {
    case 1:
      s.domain = {-1.0, 1.0, 0.0, 1.0};
      s.region = [](const Vec2& x) { return x.x() < 0.0 ? Region::poroelastic : Region::acoustic; };
      s.poro = testcase1_poro();
      s.acoustic = testcase1_acoustic();
      s.tau = 1.0;
      s.dt = 1e-4;
      s.final_time = 0.25;
      s.degree = 3;
      s.description = "manufactured solution on (-1,1)x(0,1), interface x = 0";
      break;
    case 2: {
      s.domain = {0.0, 400.0, 0.0, 400.0};
      const double slope = std::tan(pi / 3.0);
      s.region = [slope](const Vec2& x) {
        return x.y() - 200.0 < slope * (x.x() - 200.0) ? Region::acoustic : Region::poroelastic;
      };
      s.poro = testcase2_poro();
      s.acoustic = testcase2_acoustic();
      s.tau = 1.0;
      s.dt = 1e-3;
      s.final_time = 0.15;
      s.degree = 4;
      s.snapshots = {0.04, 0.08, 0.12};
      s.source_centers = {Vec2(250, 100), Vec2(250, 150), Vec2(250, 200), Vec2(250, 250)};
      s.source_radius = 10.0;
      s.source_value = 1.0;
      s.description = "oblique 60 degree interface through (200,200), four source balls";
      break;
    }
    case 3:
      s.domain = {-1500.0, 1500.0, -1500.0, 1500.0};
      s.region = [](const Vec2& x) {
        return x.y() > 40.0 * std::sin(pi * x.x() / 100.0) ? Region::acoustic : Region::poroelastic;
      };
      s.poro = testcase2_poro();
      s.acoustic = testcase2_acoustic();
      s.tau = 1.0;
      s.dt = 1e-3;
      s.final_time = 0.6;
      s.degree = 4;
      s.snapshots = {0.2, 0.4, 0.6};
      s.source_centers = {Vec2(0, 150)};
      s.source_radius = 50.0;
      s.source_value = 1.0 / s.acoustic.rho_a;
      s.description = "sinusoidal interface y = 40 sin(pi x / 100), source ball at (0,150)";
      break;
    default:
      throw ConfigError("unknown test case " + std::to_string(id));
  }
  return s;
}

SourceTerms ricker_sources(const CaseSetup& setup) {
  SourceTerms src;
  if (setup.source_centers.empty()) return src;
  SeparableSource term;
  const double f0 = setup.f0;
  term.time = [f0](double t) { return ricker_like_source(t, f0); };
  term.f_a = [centers = setup.source_centers, r = setup.source_radius, v = setup.source_value](const Vec2& x) {
    return source_support(x, centers, r, v);
  };
  src.separable.push_back(term);
  src.cutoff = 1.0 / f0;
  return src;
}

PressureField::PressureField(const DgSpace& space, const MaterialField& materials, Vector x, Vector z)
    : space_(&space), materials_(&materials), x_(std::move(x)), z_(std::move(z)) {
  if (static_cast<Index>(x_.size()) != space.size() || static_cast<Index>(z_.size()) != space.size())
    throw ModelError("state size does not match the space");
}

double PressureField::operator()(Index e, const Vec2& point) const {
  const DgSpace& s = *space_;
  if (s.mesh().region(e) == Region::acoustic)
    return materials_->acoustic[e].rho_a * s.eval_scalar(e, z_, s.phi_index(e), point);
  const PoroMaterial& mat = materials_->poro[e];
  double div_u = 0.0, div_w = 0.0;
  for (int c = 0; c < 2; ++c) {
    div_u += s.eval_gradient(e, x_, s.u_index(e, c), point)[c];
    div_w += s.eval_gradient(e, x_, s.w_index(e, c), point)[c];
  }
  return -mat.raw.m * (mat.raw.beta * div_u + div_w);
}

PressureField recover_pressure(const Vector& x, const Vector& z, const DgSpace& space,
                               const MaterialField& materials) {
  return PressureField(space, materials, x, z);
}

}  // namespace polydg
