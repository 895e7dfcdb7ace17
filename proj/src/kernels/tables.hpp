#pragma once

#include "memetic/kernels.hpp"

namespace memetic::kernels::detail {

extern const KernelTable kScalarTable;
#ifdef MEMETIC_HAVE_AVX2
extern const KernelTable kAvx2Table;
#endif

inline void mirror_upper(double* m, std::size_t n) noexcept {
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) m[i * n + j] = m[j * n + i];
  }
}

}  // namespace memetic::kernels::detail
