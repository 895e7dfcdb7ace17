#include "tables.hpp"

namespace memetic::kernels::detail {
namespace {

void axpby(double* out, const double* x, double a, const double* y, double b,
           std::size_t len) {
  for (std::size_t k = 0; k < len; ++k) out[k] = a * x[k] + b * y[k];
}

void sym_scale_rank1(double* out, const double* h, double a, const double* g,
                     double b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double bgi = b * g[i];
    for (std::size_t j = i; j < n; ++j) {
      out[i * n + j] = a * h[i * n + j] + bgi * g[j];
    }
  }
  mirror_upper(out, n);
}

void sym_product(double* out, const double* ha, double a, const double* hb,
                 double b, const double* ga, const double* gb, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double gai = ga[i];
    const double gbi = gb[i];
    for (std::size_t j = i; j < n; ++j) {
      const std::size_t k = i * n + j;
      out[k] = a * ha[k] + b * hb[k] + (gai * gb[j] + gbi * ga[j]);
    }
  }
  mirror_upper(out, n);
}

double sum(const double* x, std::size_t len) {
  double s = 0.0;
  for (std::size_t k = 0; k < len; ++k) s += x[k];
  return s;
}

double sum_sq_dev(const double* x, double center, std::size_t len) {
  double s = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    const double d = x[k] - center;
    s += d * d;
  }
  return s;
}

}  // namespace

const KernelTable kScalarTable{Isa::Scalar, axpby, sym_scale_rank1,
                               sym_product, sum, sum_sq_dev};

}  // namespace memetic::kernels::detail
