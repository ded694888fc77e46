#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "polydg/physics.hpp"
#include "polydg/solver.hpp"
#include "polydg/types.hpp"

namespace polydg {

class DgSpace;
struct BlockSystem;

/// X and Z = dX/dt at time t.
struct SimState {
  double t = 0.0;
  Vector X;
  Vector Z;
};

/// A X'' + B X' + C X = F(t). Non-owning.
struct SecondOrderSystem {
  const SparseMatrix* mass = nullptr;
  const SparseMatrix* damping = nullptr;
  const SparseMatrix* stiffness = nullptr;
  /// Element blocks of the mass matrix; empty means "use a direct solve".
  std::vector<std::vector<Index>> mass_groups;

  Index size() const { return mass ? static_cast<Index>(mass->rows()) : 0; }
};

SecondOrderSystem view(const BlockSystem& system, const DgSpace& space);

/// Writes F(t) into `out` (already sized).
using Forcing = std::function<void(double t, Vector& out)>;

Forcing no_forcing();

struct NewmarkParams {
  double beta = 0.25;
  double gamma = 0.5;
  double dt = 1e-3;

  void validate() const;
};

/// Newmark-beta in acceleration form:
///   (A + gamma dt B + beta dt^2 C) a^{k+1} = F^{k+1} - B Z* - C X*,
/// with predictors X* = X^k + dt Z^k + (1/2 - beta) dt^2 a^k and
/// Z* = Z^k + (1 - gamma) dt a^k. The matrix is factorized once.
class NewmarkIntegrator {
 public:
  NewmarkIntegrator(SecondOrderSystem system, NewmarkParams params, SolverOptions solver = {});

  /// Computes a^0 from A a^0 = F(t0) - B Z0 - C X0.
  void initialize(const SimState& state, const Forcing& forcing);
  void step(SimState& state, const Forcing& forcing);
  const Vector& acceleration() const { return a_; }
  const NewmarkParams& params() const { return params_; }
  const char* solver_name() const { return solver_->name(); }

 private:
  SecondOrderSystem system_;
  NewmarkParams params_;
  std::unique_ptr<LinearSolver> solver_;
  std::unique_ptr<LinearSolver> mass_solver_;
  Vector a_, f_, work_, rhs_;
  bool initialized_ = false;
};

enum class LeapfrogVariant {
  paper,     // (A + dt^2/2 B) X^{k+1} = dt^2 F^k + (2A - dt^2 C) X^k + (dt/2 B - A) X^{k-1}
  centered,  // (A + dt/2 B) X^{k+1} = dt^2 F^k + (2A - dt^2 C) X^k + (dt/2 B - A) X^{k-1}
};

LeapfrogVariant parse_leapfrog_variant(const std::string& name);
const char* to_string(LeapfrogVariant variant);

/// Explicit leap-frog, started by
///   A X^1 = (A - dt^2/2 C) X^0 + (dt A - dt^2/2 B) Z^0 + dt^2/2 F^0.
/// The scheme does not need velocities; the state's Z is a second-order
/// backward difference kept for energy monitoring.
class LeapfrogIntegrator {
 public:
  LeapfrogIntegrator(SecondOrderSystem system, double dt, LeapfrogVariant variant, SolverOptions solver = {});

  void initialize(const SimState& state, const Forcing& forcing);
  void step(SimState& state, const Forcing& forcing);
  const Vector& previous() const { return previous_; }
  const char* solver_name() const { return solver_->name(); }

 private:
  SecondOrderSystem system_;
  double dt_;
  LeapfrogVariant variant_;
  std::unique_ptr<LinearSolver> mass_solver_;
  std::unique_ptr<LinearSolver> solver_;
  Vector previous_, f_, rhs_, work_;
  double blowup_limit_ = 0.0;
  bool started_ = false;
};

/// E = 1/2 Z^T A Z + 1/2 X^T C X, with the parts reported separately.
struct EnergyParts {
  double mass = 0.0;       // 1/2 Z^T A Z
  double stiffness = 0.0;  // 1/2 X^T C X
  double damping = 0.0;    // 1/2 W^T B W, the viscous/interface part on the displacement
  double total() const { return mass + stiffness; }
};

/// Element-wise L2 projection of (u, w, phi); empty callables project to zero.
Vector project_fields(const DgSpace& space, const VectorField& u, const VectorField& w, const ScalarField& phi,
                      int quadrature_boost = 4);

/// (X^0, Z^0) from displacement-like fields and their rates at t = 0.
SimState project_initial_conditions(const DgSpace& space, const VectorField& u0, const VectorField& w0,
                                    const ScalarField& phi0, const VectorField& u1, const VectorField& w1,
                                    const ScalarField& phi1);

EnergyParts discrete_energy(const SecondOrderSystem& system, const SimState& state,
                            const SparseMatrix* dissipative = nullptr);

}  // namespace polydg
