#include "polydg/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace polydg::kernels {

namespace {

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detected_isa()};
  return isa;
}

}  // namespace

const char* to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detected_isa() {
  if (const char* env = std::getenv("POLYDG_KERNELS"); env && std::string_view(env) == "scalar")
    return Isa::scalar;
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_available()) throw Error("AVX2 kernels requested on a CPU without AVX2/FMA");
  active().store(isa, std::memory_order_relaxed);
}

void weighted_gram(const double* a, Index na, const double* b, Index nb, const double* w, Index nq,
                   double* g) {
  if (active_isa() == Isa::avx2)
    avx2::weighted_gram(a, na, b, nb, w, nq, g);
  else
    scalar::weighted_gram(a, na, b, nb, w, nq, g);
}

void csr_spmv(Index rows, const int* outer, const int* inner, const double* values, const double* x,
              double* y) {
  if (active_isa() == Isa::avx2)
    avx2::csr_spmv(rows, outer, inner, values, x, y);
  else
    scalar::csr_spmv(rows, outer, inner, values, x, y);
}

double dot(const double* x, const double* y, Index n) {
  return active_isa() == Isa::avx2 ? avx2::dot(x, y, n) : scalar::dot(x, y, n);
}

void axpy(double alpha, const double* x, double* y, Index n) {
  if (active_isa() == Isa::avx2)
    avx2::axpy(alpha, x, y, n);
  else
    scalar::axpy(alpha, x, y, n);
}

void spmv(const SparseMatrix& a, const Vector& x, Vector& y) {
  if (static_cast<Index>(x.size()) != static_cast<Index>(a.cols())) throw Error("spmv dimension mismatch");
  if (!a.isCompressed()) {
    y = a * x;
    return;
  }
  y.resize(a.rows());
  csr_spmv(a.rows(), a.outerIndexPtr(), a.innerIndexPtr(), a.valuePtr(), x.data(), y.data());
}

}  // namespace polydg::kernels
