#pragma once

#include <string>
#include <vector>

#include "polydg/forms.hpp"

namespace polydg::probes {

struct Outcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Exact moment of x^p y^q over a simple polygon from its vertex loop (Green's theorem).
double polygon_moment(const std::vector<Vec2>& loop, int p, int q);

/// Largest quadrature error over all elements and monomials x^p y^q with
/// p + q <= max_degree, relative to area * max|x|^p * max|y|^q.
double max_moment_error(const PolyMesh& mesh, int max_degree);

double max_asymmetry(const SparseMatrix& a);  // max |a - a^T| / max |a|

/// min over random v supported on `rows` of v^T a v / v^T mass v and of v^T a v / v^T n v.
struct RayleighRange {
  double min_mass = 0.0;
  double min_norm = 0.0;  // the coercivity constant estimate theta
};
RayleighRange rayleigh_probe(const SparseMatrix& a, const SparseMatrix& n, const SparseMatrix& mass,
                             const std::vector<Index>& rows, int samples, unsigned seed);

/// c_i times the largest sampled quotient of each trace-inverse bound:
/// ||alpha^-1/2 {sigma(v)}||^2_F / ||C^1/2 eps(v)||^2, the same with gamma and
/// m div w, and with chi and rho_a grad psi.
struct TraceInverse {
  double alpha = 0.0, gamma = 0.0, chi = 0.0;
};
TraceInverse trace_inverse_constants(const DgSpace& space, const MaterialField& materials,
                                     const PenaltyField& penalties, int samples, unsigned seed);

std::vector<Index> u_rows(const DgSpace& space);
std::vector<Index> uw_rows(const DgSpace& space);
std::vector<Index> phi_rows(const DgSpace& space);

/// The structural property suite on Test case 1 meshes, one outcome per property.
std::vector<Outcome> structural_suite();

}  // namespace polydg::probes
