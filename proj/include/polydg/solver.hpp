#pragma once

#include <memory>
#include <string>
#include <vector>

#include "polydg/types.hpp"

namespace polydg {

enum class SolverKind { direct, iterative };

SolverKind parse_solver_kind(const std::string& name);
const char* to_string(SolverKind kind);

struct SolverOptions {
  SolverKind kind = SolverKind::direct;
  /// Accepted relative residual ||M x - b|| / ||b||.
  double tolerance = 1e-10;
  int max_iterations = 2000;
};

/// Factorize once, solve many times. Every solve checks its residual and
/// throws SolverError above the tolerance.
class LinearSolver {
 public:
  virtual ~LinearSolver() = default;
  virtual void factorize(const SparseMatrix& matrix) = 0;
  virtual Vector solve(const Vector& rhs) const = 0;
  virtual const char* name() const = 0;
};

/// Sparse LU (UMFPACK when built with it, Eigen's SparseLU otherwise), with
/// one step of iterative refinement when the first residual misses the tolerance.
std::unique_ptr<LinearSolver> make_direct_solver(double tolerance = 1e-10);

/// BiCGSTAB preconditioned by dense inverses of the diagonal blocks on `groups`.
std::unique_ptr<LinearSolver> make_iterative_solver(std::vector<std::vector<Index>> groups,
                                                    double tolerance = 1e-10, int max_iterations = 2000);

/// Exact solver for matrices whose coupling is confined to `groups`
/// (the DG mass matrix). Throws SolverError if an entry crosses groups.
std::unique_ptr<LinearSolver> make_block_diagonal_solver(std::vector<std::vector<Index>> groups,
                                                         double tolerance = 1e-10);

std::unique_ptr<LinearSolver> make_solver(const SolverOptions& options, std::vector<std::vector<Index>> groups);

bool direct_backend_is_umfpack();

}  // namespace polydg
