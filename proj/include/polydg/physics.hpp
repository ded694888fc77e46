#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "polydg/mesh.hpp"

namespace polydg {

struct PoroParams {
  double rho_s = 1.0;
  double rho_f = 1.0;
  double porosity = 0.5;
  double tortuosity = 1.0;
  double eta = 0.0;           // dynamic viscosity
  double permeability = 1.0;  // k
  double lambda = 1.0;
  double mu = 1.0;
  double beta = 1.0;
  double m = 1.0;
};

struct AcousticParams {
  double c = 1.0;
  double rho_a = 1.0;
};

/// Validated poroelastic coefficients with the derived densities.
struct PoroMaterial {
  PoroParams raw;
  double rho = 0.0;       // phi rho_f + (1 - phi) rho_s
  double rho_w = 0.0;     // a rho_f / phi
  double lambda_f = 0.0;  // lambda + beta^2 m
  double f_c = 0.0;       // Biot characteristic frequency, 0 when eta = 0

  double eta_over_k() const { return raw.eta / raw.permeability; }
};

/// Porosity is kept inside [porosity_floor, 1 - porosity_floor].
inline constexpr double porosity_floor = 1e-6;

/// Throws ModelError when an input leaves its admissible range.
PoroMaterial derived_coefficients(const PoroParams& raw);
void validate(const AcousticParams& params);

/// (1 - tau) / tau on (0, 1], 0 at tau = 0.
double zeta(double tau);

/// Element-wise constant coefficients; poroelastic entries are meaningful on
/// poroelastic elements only, acoustic entries on acoustic ones.
struct MaterialField {
  std::vector<PoroMaterial> poro;
  std::vector<AcousticParams> acoustic;
  double tau = 1.0;

  double zeta() const { return polydg::zeta(tau); }
  static MaterialField uniform(const PolyMesh& mesh, const PoroParams& poro, const AcousticParams& acoustic,
                               double tau);
};

using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;
using TimeFunction = std::function<double(double)>;
using ScalarFieldT = std::function<double(const Vec2&, double)>;
using VectorFieldT = std::function<Vec2(const Vec2&, double)>;

/// One term time(t) * (f_p(x), g_p(x), f_a(x)); empty fields are zero.
struct SeparableSource {
  TimeFunction time;
  VectorField f_p;
  VectorField g_p;
  ScalarField f_a;
};

/// Right-hand sides of the momentum equations and of the acoustic equation
/// (before multiplication by rho_a). Sum of separable terms plus optional
/// general space-time callables.
struct SourceTerms {
  std::vector<SeparableSource> separable;
  VectorFieldT f_p;
  VectorFieldT g_p;
  ScalarFieldT f_a;
  /// All terms vanish identically for t >= cutoff.
  double cutoff = std::numeric_limits<double>::infinity();

  bool empty() const { return separable.empty() && !f_p && !g_p && !f_a; }
};

/// Exterior Dirichlet data time(t) * (u(x), w(x), phi(x)); empty fields are zero.
struct DirichletTerm {
  TimeFunction time;
  VectorField u;
  VectorField w;
  ScalarField phi;
};

struct BoundaryData {
  std::vector<DirichletTerm> terms;
  bool homogeneous() const { return terms.empty(); }
};

/// Time profile h(t) = sum_k alpha_k sin(2^(k-1) 2 pi f0 t) on (0, 1/f0), 0 otherwise.
double ricker_like_source(double t, double f0);

/// Returns `value` inside the union of the balls B(center_i, radius), 0 outside.
double source_support(const Vec2& x, const std::vector<Vec2>& centers, double radius, double value = 1.0);

/// Closed-form fields with first and second time derivatives.
struct ManufacturedSolution {
  VectorFieldT u, u_t, u_tt, w, w_t, w_tt;
  ScalarFieldT phi, phi_t, phi_tt;
  std::function<Mat2(const Vec2&, double)> grad_u, grad_w;  // (i, j) = d u_i / d x_j
  VectorFieldT grad_phi;
  ScalarFieldT pressure;  // -m (beta div u + div w) on the poroelastic side
  SourceTerms sources;
  BoundaryData boundary;
};

/// Manufactured solution with u = g(x)(1,1) cos(sqrt2 pi t), w = -u and
/// phi = x^2 sin(pi x) sin(pi y) sin(sqrt2 pi t), g(x) = x^2 cos(pi x / 2) sin(pi x).
/// Sources follow from the strong form with the given coefficients.
ManufacturedSolution testcase1_solution(const PoroMaterial& poro, const AcousticParams& acoustic);

/// Material values of the two benchmark media.
PoroParams testcase1_poro();
AcousticParams testcase1_acoustic();
PoroParams testcase2_poro();
AcousticParams testcase2_acoustic();

struct CaseSetup {
  int id = 1;
  Rectangle domain;
  RegionFn region;
  PoroParams poro;
  AcousticParams acoustic;
  double tau = 1.0;
  double dt = 1e-4;
  double final_time = 0.25;
  int degree = 3;
  std::vector<double> snapshots;
  // Time-limited acoustic source (cases 2 and 3).
  double f0 = 20.0;
  std::vector<Vec2> source_centers;
  double source_radius = 0.0;
  double source_value = 1.0;
  std::string description;
};

/// Geometry, media and run parameters of benchmark case 1, 2 or 3.
/// Throws ConfigError for other ids.
CaseSetup testcase_geometry(int id);

/// Ball-supported Ricker-like acoustic source of a case setup.
SourceTerms ricker_sources(const CaseSetup& setup);

class DgSpace;

/// Discrete pressure: -m (beta div u_h + div w_h) on poroelastic elements and
/// rho_a dphi_h/dt on acoustic ones. Keeps copies of the coefficient vectors.
class PressureField {
 public:
  PressureField(const DgSpace& space, const MaterialField& materials, Vector x, Vector z);
  double operator()(Index element, const Vec2& point) const;

 private:
  const DgSpace* space_;
  const MaterialField* materials_;
  Vector x_, z_;
};

PressureField recover_pressure(const Vector& x, const Vector& z, const DgSpace& space,
                               const MaterialField& materials);

}  // namespace polydg
