// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "tables.hpp"

namespace memetic::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void axpby(double* out, const double* x, double a, const double* y, double b,
           std::size_t len) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t k = 0;
  for (; k + 4 <= len; k += 4) {
    const __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k),
                                      _mm256_mul_pd(vb, _mm256_loadu_pd(y + k)));
    _mm256_storeu_pd(out + k, r);
  }
  for (; k < len; ++k) out[k] = a * x[k] + b * y[k];
}

void sym_scale_rank1(double* out, const double* h, double a, const double* g,
                     double b, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  for (std::size_t i = 0; i < n; ++i) {
    const double bgi = b * g[i];
    const __m256d vbg = _mm256_set1_pd(bgi);
    const double* hrow = h + i * n;
    double* orow = out + i * n;
    std::size_t j = i;
    for (; j + 4 <= n; j += 4) {
      const __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(hrow + j),
                                        _mm256_mul_pd(vbg, _mm256_loadu_pd(g + j)));
      _mm256_storeu_pd(orow + j, r);
    }
    for (; j < n; ++j) orow[j] = a * hrow[j] + bgi * g[j];
  }
  mirror_upper(out, n);
}

void sym_product(double* out, const double* ha, double a, const double* hb,
                 double b, const double* ga, const double* gb, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  for (std::size_t i = 0; i < n; ++i) {
    const __m256d vgai = _mm256_set1_pd(ga[i]);
    const __m256d vgbi = _mm256_set1_pd(gb[i]);
    const std::size_t row = i * n;
    std::size_t j = i;
    for (; j + 4 <= n; j += 4) {
      const __m256d outer =
          _mm256_fmadd_pd(vgai, _mm256_loadu_pd(gb + j),
                          _mm256_mul_pd(vgbi, _mm256_loadu_pd(ga + j)));
      const __m256d lin = _mm256_fmadd_pd(va, _mm256_loadu_pd(ha + row + j),
                                          _mm256_mul_pd(vb, _mm256_loadu_pd(hb + row + j)));
      _mm256_storeu_pd(out + row + j, _mm256_add_pd(lin, outer));
    }
    for (; j < n; ++j) {
      const std::size_t k = row + j;
      out[k] = a * ha[k] + b * hb[k] + (ga[i] * gb[j] + gb[i] * ga[j]);
    }
  }
  mirror_upper(out, n);
}

double sum(const double* x, std::size_t len) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= len; k += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + k));
  double s = hsum(acc);
  for (; k < len; ++k) s += x[k];
  return s;
}

double sum_sq_dev(const double* x, double center, std::size_t len) {
  const __m256d vc = _mm256_set1_pd(center);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= len; k += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + k), vc);
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; k < len; ++k) {
    const double d = x[k] - center;
    s += d * d;
  }
  return s;
}

}  // namespace

const KernelTable kAvx2Table{Isa::Avx2, axpby, sym_scale_rank1, sym_product,
                             sum, sum_sq_dev};

}  // namespace memetic::kernels::detail
