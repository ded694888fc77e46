#pragma once

#include "polydg/kernels_raw.hpp"
#include "polydg/types.hpp"

namespace polydg::kernels {

/// y = A x through the active kernel set.
void spmv(const SparseMatrix& a, const Vector& x, Vector& y);

}  // namespace polydg::kernels
