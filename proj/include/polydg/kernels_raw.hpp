#pragma once

#include <cstddef>

// Pointer-only kernel interface. Kept free of Eigen so the AVX2 translation
// unit does not instantiate Eigen templates under different target flags.
namespace polydg::kernels {

using Size = std::size_t;

enum class Isa { scalar, avx2 };

const char* to_string(Isa isa);

/// Best ISA supported by the CPU, unless POLYDG_KERNELS=scalar is set.
Isa detected_isa();
Isa active_isa();
/// Forces a kernel set; requesting avx2 on a CPU without it throws.
void set_active_isa(Isa isa);
bool avx2_available();

// g (na x nb, column-major) += sum_q w[q] a(:, q) b(:, q)^T with a (na x nq)
// and b (nb x nq) column-major.
void weighted_gram(const double* a, Size na, const double* b, Size nb, const double* w, Size nq,
                   double* g);
// y = A x for a CSR matrix.
void csr_spmv(Size rows, const int* outer, const int* inner, const double* values, const double* x,
              double* y);
double dot(const double* x, const double* y, Size n);
// y += alpha x
void axpy(double alpha, const double* x, double* y, Size n);

namespace scalar {
void weighted_gram(const double* a, Size na, const double* b, Size nb, const double* w, Size nq,
                   double* g);
void csr_spmv(Size rows, const int* outer, const int* inner, const double* values, const double* x,
              double* y);
double dot(const double* x, const double* y, Size n);
void axpy(double alpha, const double* x, double* y, Size n);
}  // namespace scalar

namespace avx2 {
void weighted_gram(const double* a, Size na, const double* b, Size nb, const double* w, Size nq,
                   double* g);
void csr_spmv(Size rows, const int* outer, const int* inner, const double* values, const double* x,
              double* y);
double dot(const double* x, const double* y, Size n);
void axpy(double alpha, const double* x, double* y, Size n);
}  // namespace avx2

}  // namespace polydg::kernels
