#include "polydg/kernels_raw.hpp"

namespace polydg::kernels::scalar {

void weighted_gram(const double* a, Size na, const double* b, Size nb, const double* w, Size nq,
                   double* g) {
  for (Size q = 0; q < nq; ++q) {
    const double* aq = a + q * na;
    const double* bq = b + q * nb;
    for (Size j = 0; j < nb; ++j) {
      const double s = w[q] * bq[j];
      double* gj = g + j * na;
      for (Size i = 0; i < na; ++i) gj[i] += s * aq[i];
    }
  }
}

void csr_spmv(Size rows, const int* outer, const int* inner, const double* values, const double* x,
              double* y) {
  for (Size r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int k = outer[r]; k < outer[r + 1]; ++k) s += values[k] * x[inner[k]];
    y[r] = s;
  }
}

double dot(const double* x, const double* y, Size n) {
  double s = 0.0;
  for (Size i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, Size n) {
  for (Size i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace polydg::kernels::scalar
