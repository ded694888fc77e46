#include <immintrin.h>

#include "polydg/kernels_raw.hpp"

namespace polydg::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void weighted_gram(const double* a, Size na, const double* b, Size nb, const double* w, Size nq,
                   double* g) {
  for (Size q = 0; q < nq; ++q) {
    const double* aq = a + q * na;
    const double* bq = b + q * nb;
    for (Size j = 0; j < nb; ++j) {
      const double s = w[q] * bq[j];
      const __m256d vs = _mm256_set1_pd(s);
      double* gj = g + j * na;
      Size i = 0;
      for (; i + 4 <= na; i += 4)
        _mm256_storeu_pd(gj + i, _mm256_fmadd_pd(vs, _mm256_loadu_pd(aq + i), _mm256_loadu_pd(gj + i)));
      for (; i < na; ++i) gj[i] += s * aq[i];
    }
  }
}

void csr_spmv(Size rows, const int* outer, const int* inner, const double* values, const double* x,
              double* y) {
  for (Size r = 0; r < rows; ++r) {
    int k = outer[r];
    const int end = outer[r + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(inner + k));
      const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(values + k), xv, acc);
    }
    double s = hsum(acc);
    for (; k < end; ++k) s += values[k] * x[inner[k]];
    y[r] = s;
  }
}

double dot(const double* x, const double* y, Size n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  Size i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, Size n) {
  const __m256d va = _mm256_set1_pd(alpha);
  Size i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace polydg::kernels::avx2
