#include "polydg/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/LU>
#include <Eigen/SparseLU>
#include <cmath>

#ifdef POLYDG_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include "polydg/kernels.hpp"
#include "polydg/parallel.hpp"

namespace polydg {

namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

double relative_residual(const SparseMatrix& m, const Vector& x, const Vector& b) {
  Vector r(b.size());
  kernels::spmv(m, x, r);
  r -= b;
  const double nb = b.norm();
  return nb == 0.0 ? r.norm() : r.norm() / nb;
}

void check_finite(const Vector& x, const char* who) {
  if (!x.allFinite()) throw SolverError(std::string(who) + ": non-finite solution");
}

class DirectSolver final : public LinearSolver {
 public:
  explicit DirectSolver(double tolerance) : tolerance_(tolerance) {}

  void factorize(const SparseMatrix& matrix) override {
    if (matrix.rows() != matrix.cols()) throw SolverError("direct solver: matrix is not square");
    matrix_ = matrix;
    matrix_.makeCompressed();
    col_ = matrix_;
    lu_.compute(col_);
    if (lu_.info() != Eigen::Success) {
#ifdef POLYDG_HAVE_UMFPACK
      const std::string detail = " (umfpack status " + std::to_string(lu_.umfpackFactorizeReturncode()) + ")";
#else
      const std::string detail = " (" + lu_.lastErrorMessage() + ")";
#endif
      throw SolverError("direct solver: factorization failed" + detail);
    }
  }

  Vector solve(const Vector& rhs) const override {
    if (rhs.size() != matrix_.rows()) throw SolverError("direct solver: size mismatch");
    if (rhs.size() == 0) return rhs;
    Vector x = lu_.solve(rhs);
    check_finite(x, "direct solver");
    double res = relative_residual(matrix_, x, rhs);
    if (res > tolerance_) {
      Vector r(rhs.size());
      kernels::spmv(matrix_, x, r);
      x += lu_.solve(Vector(rhs - r));
      res = relative_residual(matrix_, x, rhs);
    }
    if (!(res <= tolerance_))
      throw SolverError("direct solver: residual " + std::to_string(res) + " above tolerance");
    return x;
  }

  const char* name() const override { return direct_backend_is_umfpack() ? "umfpack" : "sparselu"; }

 private:
  double tolerance_;
  SparseMatrix matrix_;
  ColMatrix col_;  // UMFPACK keeps a reference to the factorized matrix
#ifdef POLYDG_HAVE_UMFPACK
  mutable Eigen::UmfPackLU<ColMatrix> lu_;
#else
  mutable Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> lu_;
#endif
};

struct BlockInverse {
  std::vector<std::vector<Index>> groups;
  std::vector<Eigen::PartialPivLU<DenseMatrix>> blocks;

  void compute(const SparseMatrix& m) {
    blocks.resize(groups.size());
    std::vector<Index> owner(m.rows(), invalid_index), local(m.rows(), 0);
    for (Index g = 0; g < groups.size(); ++g)
      for (Index i = 0; i < groups[g].size(); ++i) {
        owner[groups[g][i]] = g;
        local[groups[g][i]] = i;
      }
    for (Index r = 0; r < Index(m.rows()); ++r)
      if (owner[r] == invalid_index) throw SolverError("block solver: row outside every group");
    std::vector<DenseMatrix> dense(groups.size());
    for (Index g = 0; g < groups.size(); ++g) dense[g] = DenseMatrix::Zero(groups[g].size(), groups[g].size());
    for (int r = 0; r < m.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(m, r); it; ++it)
        if (owner[it.col()] == owner[r]) dense[owner[r]](local[r], local[it.col()]) = it.value();
    parallel_for(groups.size(), [&](Index g) {
      blocks[g].compute(dense[g]);
      if (blocks[g].rcond() < 1e-15) throw SolverError("block solver: singular diagonal block");
    });
  }

  Vector apply(const Vector& b) const {
    Vector x(b.size());
    parallel_for(groups.size(), [&](Index g) {
      const auto& idx = groups[g];
      Vector local(idx.size());
      for (Index i = 0; i < idx.size(); ++i) local[i] = b[idx[i]];
      local = blocks[g].solve(local);
      for (Index i = 0; i < idx.size(); ++i) x[idx[i]] = local[i];
    });
    return x;
  }
};

class BlockDiagonalSolver final : public LinearSolver {
 public:
  BlockDiagonalSolver(std::vector<std::vector<Index>> groups, double tolerance) : tolerance_(tolerance) {
    inverse_.groups = std::move(groups);
  }

  void factorize(const SparseMatrix& matrix) override {
    std::vector<Index> owner(matrix.rows(), invalid_index);
    for (Index g = 0; g < inverse_.groups.size(); ++g)
      for (Index i : inverse_.groups[g]) owner[i] = g;
    for (int r = 0; r < matrix.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(matrix, r); it; ++it)
        if (owner[it.col()] != owner[r]) throw SolverError("block solver: matrix couples different groups");
    matrix_ = matrix;
    matrix_.makeCompressed();
    inverse_.compute(matrix);
  }

  Vector solve(const Vector& rhs) const override {
    Vector x = inverse_.apply(rhs);
    check_finite(x, "block solver");
    const double res = relative_residual(matrix_, x, rhs);
    if (!(res <= tolerance_)) throw SolverError("block solver: residual " + std::to_string(res) + " above tolerance");
    return x;
  }

  const char* name() const override { return "block-diagonal"; }

 private:
  double tolerance_;
  SparseMatrix matrix_;
  BlockInverse inverse_;
};

class IterativeSolver final : public LinearSolver {
 public:
  IterativeSolver(std::vector<std::vector<Index>> groups, double tolerance, int max_iterations)
      : tolerance_(tolerance), max_iterations_(max_iterations) {
    inverse_.groups = std::move(groups);
  }

  void factorize(const SparseMatrix& matrix) override {
    matrix_ = matrix;
    matrix_.makeCompressed();
    inverse_.compute(matrix);
  }

  // Right-preconditioned BiCGSTAB on M P^-1 y = b, x = P^-1 y.
  Vector solve(const Vector& b) const override {
    const Index n = b.size();
    Vector x = Vector::Zero(n);
    const double nb = b.norm();
    if (nb == 0.0) return x;
    Vector r = b, r0 = b, p = Vector::Zero(n), v = Vector::Zero(n), s(n), t(n), ph, sh;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    for (int it = 0; it < max_iterations_; ++it) {
      const double rho_new = kernels::dot(r0.data(), r.data(), n);
      if (rho_new == 0.0) break;
      const double beta = (rho_new / rho) * (alpha / omega);
      p = r + beta * (p - omega * v);
      ph = inverse_.apply(p);
      kernels::spmv(matrix_, ph, v);
      alpha = rho_new / kernels::dot(r0.data(), v.data(), n);
      s = r - alpha * v;
      if (s.norm() <= tolerance_ * nb) {
        x += alpha * ph;
        r = s;
        break;
      }
      sh = inverse_.apply(s);
      kernels::spmv(matrix_, sh, t);
      const double tt = kernels::dot(t.data(), t.data(), n);
      omega = tt == 0.0 ? 0.0 : kernels::dot(t.data(), s.data(), n) / tt;
      x += alpha * ph + omega * sh;
      r = s - omega * t;
      rho = rho_new;
      if (r.norm() <= tolerance_ * nb || omega == 0.0) break;
    }
    check_finite(x, "iterative solver");
    const double res = relative_residual(matrix_, x, b);
    if (!(res <= tolerance_))
      throw SolverError("iterative solver: residual " + std::to_string(res) + " above tolerance");
    return x;
  }

  const char* name() const override { return "bicgstab-block-jacobi"; }

 private:
  double tolerance_;
  int max_iterations_;
  SparseMatrix matrix_;
  BlockInverse inverse_;
};

}  // namespace

SolverKind parse_solver_kind(const std::string& name) {
  if (name == "direct") return SolverKind::direct;
  if (name == "iterative") return SolverKind::iterative;
  throw ConfigError("unknown solver '" + name + "' (expected direct|iterative)");
}

const char* to_string(SolverKind kind) { return kind == SolverKind::direct ? "direct" : "iterative"; }

bool direct_backend_is_umfpack() {
#ifdef POLYDG_HAVE_UMFPACK
  return true;
#else
  return false;
#endif
}

std::unique_ptr<LinearSolver> make_direct_solver(double tolerance) { return std::make_unique<DirectSolver>(tolerance); }

std::unique_ptr<LinearSolver> make_iterative_solver(std::vector<std::vector<Index>> groups, double tolerance,
                                                    int max_iterations) {
  return std::make_unique<IterativeSolver>(std::move(groups), tolerance, max_iterations);
}

std::unique_ptr<LinearSolver> make_block_diagonal_solver(std::vector<std::vector<Index>> groups, double tolerance) {
  return std::make_unique<BlockDiagonalSolver>(std::move(groups), tolerance);
}

std::unique_ptr<LinearSolver> make_solver(const SolverOptions& options, std::vector<std::vector<Index>> groups) {
  if (options.kind == SolverKind::direct) return make_direct_solver(options.tolerance);
  return make_iterative_solver(std::move(groups), options.tolerance, options.max_iterations);
}

}  // namespace polydg
