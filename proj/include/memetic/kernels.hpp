#pragma once

// Dense arithmetic kernels behind the autodiff Hessian propagation and the
// population statistics. Every kernel has a portable scalar reference; an
// AVX2/FMA variant is compiled separately and picked at runtime when the CPU
// supports it. Both variants are checked against each other in the tests.

#include <cstddef>
#include <string_view>

namespace memetic::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// Function table for one instruction-set variant. All matrices are n x n,
/// row-major, and symmetric on input; symmetric outputs are produced by
/// computing the upper triangle and mirroring it.
struct KernelTable {
  Isa isa;

  /// out[k] = a * x[k] + b * y[k]
  void (*axpby)(double* out, const double* x, double a, const double* y,
                double b, std::size_t len);

  /// out = a * h + b * g g^T
  void (*sym_scale_rank1)(double* out, const double* h, double a,
                          const double* g, double b, std::size_t n);

  /// out = a * ha + b * hb + ga gb^T + gb ga^T
  void (*sym_product)(double* out, const double* ha, double a,
                      const double* hb, double b, const double* ga,
                      const double* gb, std::size_t n);

  /// Sum of x[0..len).
  double (*sum)(const double* x, std::size_t len);

  /// Sum of (x[k] - center)^2.
  double (*sum_sq_dev)(const double* x, double center, std::size_t len);
};

const KernelTable& scalar_table() noexcept;

/// The AVX2 table, or nullptr when it was not compiled in or the running CPU
/// lacks AVX2/FMA.
const KernelTable* avx2_table() noexcept;

/// Table used by the library. Chosen once from CPU features; the environment
/// variable MEMETIC_ISA=scalar forces the reference kernels.
const KernelTable& active() noexcept;

/// Overrides the active table (tests and benchmarking). Returns false if the
/// requested variant is unavailable on this machine.
bool select(Isa isa) noexcept;

/// Restores the automatic CPU-based choice.
void reset_selection() noexcept;

}  // namespace memetic::kernels
