#include "polydg/timeint.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "polydg/forms.hpp"
#include "polydg/kernels.hpp"
#include "polydg/parallel.hpp"
#include "polydg/quadrature.hpp"

namespace polydg {

namespace {

std::unique_ptr<LinearSolver> mass_solver_for(const SecondOrderSystem& system, double tolerance) {
  std::unique_ptr<LinearSolver> s = system.mass_groups.empty() ? make_direct_solver(tolerance)
                                                               : make_block_diagonal_solver(system.mass_groups, tolerance);
  s->factorize(*system.mass);
  return s;
}

void check_system(const SecondOrderSystem& system) {
  if (!system.mass || !system.damping || !system.stiffness) throw SolverError("time integrator: incomplete system");
  const Index n = system.size();
  if (Index(system.damping->rows()) != n || Index(system.stiffness->rows()) != n)
    throw SolverError("time integrator: block sizes differ");
}

void check_state(const SecondOrderSystem& system, const SimState& state) {
  if (Index(state.X.size()) != system.size() || Index(state.Z.size()) != system.size())
    throw SolverError("time integrator: state size does not match the system");
}

}  // namespace

SecondOrderSystem view(const BlockSystem& system, const DgSpace& space) {
  return {&system.mass, &system.damping, &system.stiffness, element_dof_groups(space)};
}

Forcing no_forcing() {
  return [](double, Vector& out) { out.setZero(); };
}

void NewmarkParams::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("Newmark gamma must lie in [0, 1]");
  if (!(beta >= 0.0 && 2.0 * beta <= 1.0)) throw ConfigError("Newmark beta must satisfy 0 <= 2 beta <= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive");
}

NewmarkIntegrator::NewmarkIntegrator(SecondOrderSystem system, NewmarkParams params, SolverOptions solver)
    : system_(std::move(system)), params_(params) {
  params_.validate();
  check_system(system_);
  const double dt = params_.dt;
  const SparseMatrix k = *system_.mass + (params_.gamma * dt) * *system_.damping +
                         (params_.beta * dt * dt) * *system_.stiffness;
  solver_ = make_solver(solver, system_.mass_groups);
  solver_->factorize(k);
  mass_solver_ = mass_solver_for(system_, solver.tolerance);
  const Index n = system_.size();
  a_ = Vector::Zero(n);
  f_ = Vector::Zero(n);
  work_ = Vector::Zero(n);
  rhs_ = Vector::Zero(n);
}

void NewmarkIntegrator::initialize(const SimState& state, const Forcing& forcing) {
  check_state(system_, state);
  forcing(state.t, f_);
  rhs_ = f_;
  kernels::spmv(*system_.damping, state.Z, work_);
  rhs_ -= work_;
  kernels::spmv(*system_.stiffness, state.X, work_);
  rhs_ -= work_;
  a_ = mass_solver_->solve(rhs_);
  initialized_ = true;
}

void NewmarkIntegrator::step(SimState& state, const Forcing& forcing) {
  if (!initialized_) initialize(state, forcing);
  check_state(system_, state);
  const double dt = params_.dt;
  // Predictors, in place.
  state.X += dt * state.Z + ((0.5 - params_.beta) * dt * dt) * a_;
  state.Z += ((1.0 - params_.gamma) * dt) * a_;
  state.t += dt;
  forcing(state.t, f_);
  rhs_ = f_;
  kernels::spmv(*system_.damping, state.Z, work_);
  rhs_ -= work_;
  kernels::spmv(*system_.stiffness, state.X, work_);
  rhs_ -= work_;
  a_ = solver_->solve(rhs_);
  state.X += (params_.beta * dt * dt) * a_;
  state.Z += (params_.gamma * dt) * a_;
}

LeapfrogVariant parse_leapfrog_variant(const std::string& name) {
  if (name == "paper") return LeapfrogVariant::paper;
  if (name == "centered") return LeapfrogVariant::centered;
  throw ConfigError("unknown leapfrog variant '" + name + "' (expected paper|centered)");
}

const char* to_string(LeapfrogVariant variant) { return variant == LeapfrogVariant::paper ? "paper" : "centered"; }

LeapfrogIntegrator::LeapfrogIntegrator(SecondOrderSystem system, double dt, LeapfrogVariant variant,
                                       SolverOptions solver)
    : system_(std::move(system)), dt_(dt), variant_(variant) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive");
  check_system(system_);
  mass_solver_ = mass_solver_for(system_, solver.tolerance);
  const double c = variant_ == LeapfrogVariant::paper ? 0.5 * dt * dt : 0.5 * dt;
  if (system_.damping->nonZeros() == 0) {
    solver_ = mass_solver_for(system_, solver.tolerance);
  } else {
    solver_ = make_solver(solver, system_.mass_groups);
    solver_->factorize(*system_.mass + c * *system_.damping);
  }
  const Index n = system_.size();
  f_ = Vector::Zero(n);
  rhs_ = Vector::Zero(n);
  work_ = Vector::Zero(n);
}

void LeapfrogIntegrator::initialize(const SimState& state, const Forcing& forcing) {
  check_state(system_, state);
  blowup_limit_ = 1e12 * std::max(1.0, state.X.lpNorm<Eigen::Infinity>());
  previous_ = state.X;
  started_ = false;
  (void)forcing;
}

void LeapfrogIntegrator::step(SimState& state, const Forcing& forcing) {
  if (previous_.size() == 0) initialize(state, forcing);
  check_state(system_, state);
  const double dt = dt_;
  forcing(state.t, f_);
  Vector next;
  const bool first = !started_;
  if (first) {
    // A X^1 = (A - dt^2/2 C) X^0 + (dt A - dt^2/2 B) Z^0 + dt^2/2 F^0
    kernels::spmv(*system_.mass, state.X, rhs_);
    kernels::spmv(*system_.stiffness, state.X, work_);
    rhs_ -= (0.5 * dt * dt) * work_;
    kernels::spmv(*system_.mass, state.Z, work_);
    rhs_ += dt * work_;
    kernels::spmv(*system_.damping, state.Z, work_);
    rhs_ -= (0.5 * dt * dt) * work_;
    rhs_ += (0.5 * dt * dt) * f_;
    next = mass_solver_->solve(rhs_);
    started_ = true;
  } else {
    // dt^2 F^k + (2A - dt^2 C) X^k + (dt/2 B - A) X^{k-1}
    rhs_ = (dt * dt) * f_;
    kernels::spmv(*system_.mass, state.X, work_);
    rhs_ += 2.0 * work_;
    kernels::spmv(*system_.stiffness, state.X, work_);
    rhs_ -= (dt * dt) * work_;
    kernels::spmv(*system_.damping, previous_, work_);
    rhs_ += (0.5 * dt) * work_;
    kernels::spmv(*system_.mass, previous_, work_);
    rhs_ -= work_;
    next = solver_->solve(rhs_);
  }
  if (!(next.lpNorm<Eigen::Infinity>() <= blowup_limit_))
    throw SolverError("leap-frog blow-up at t = " + std::to_string(state.t + dt) + " (time step above the stability limit?)");
  if (first)
    state.Z = (2.0 / dt) * (next - state.X) - state.Z;
  else
    state.Z = (3.0 * next - 4.0 * state.X + previous_) / (2.0 * dt);
  previous_ = std::move(state.X);
  state.X = std::move(next);
  state.t += dt;
}

Vector project_fields(const DgSpace& space, const VectorField& u, const VectorField& w, const ScalarField& phi,
                      int quadrature_boost) {
  Vector x = Vector::Zero(space.size());
  const PolyMesh& mesh = space.mesh();
  parallel_for(mesh.num_elements(), [&](Index e) {
    const QuadratureRule rule = volume_quadrature(mesh, e, 2 * space.degree(e) + quadrature_boost);
    const DenseMatrix values = space.basis(e).eval(rule.points);
    const Eigen::LLT<DenseMatrix> gram(element_gram(space, e));
    auto project = [&](auto&& f, Index first) {
      Vector rhs = Vector::Zero(values.rows());
      for (Index q = 0; q < rule.size(); ++q) rhs += (rule.weights[q] * f(rule.points[q])) * values.col(q);
      x.segment(first, values.rows()) = gram.solve(rhs);
    };
    if (mesh.region(e) == Region::acoustic) {
      if (phi) project(phi, space.phi_index(e));
      return;
    }
    for (int c = 0; c < 2; ++c) {
      if (u) project([&](const Vec2& p) { return u(p)[c]; }, space.u_index(e, c));
      if (w) project([&](const Vec2& p) { return w(p)[c]; }, space.w_index(e, c));
    }
  });
  return x;
}

SimState project_initial_conditions(const DgSpace& space, const VectorField& u0, const VectorField& w0,
                                    const ScalarField& phi0, const VectorField& u1, const VectorField& w1,
                                    const ScalarField& phi1) {
  SimState s;
  s.X = project_fields(space, u0, w0, phi0);
  s.Z = project_fields(space, u1, w1, phi1);
  return s;
}

EnergyParts discrete_energy(const SecondOrderSystem& system, const SimState& state, const SparseMatrix* dissipative) {
  EnergyParts e;
  Vector work(state.X.size());
  kernels::spmv(*system.mass, state.Z, work);
  e.mass = 0.5 * state.Z.dot(work);
  kernels::spmv(*system.stiffness, state.X, work);
  e.stiffness = 0.5 * state.X.dot(work);
  if (dissipative) {
    kernels::spmv(*dissipative, state.X, work);
    e.damping = 0.5 * state.X.dot(work);
  }
  return e;
}

}  // namespace polydg
