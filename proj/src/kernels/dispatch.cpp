#include <atomic>
#include <cstdlib>
#include <string_view>

#include "tables.hpp"

namespace memetic::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(MEMETIC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* detect() noexcept {
  if (const char* env = std::getenv("MEMETIC_ISA");
      env != nullptr && std::string_view(env) == "scalar") {
    return &detail::kScalarTable;
  }
  if (const KernelTable* t = avx2_table()) return t;
  return &detail::kScalarTable;
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable& scalar_table() noexcept { return detail::kScalarTable; }

const KernelTable* avx2_table() noexcept {
#ifdef MEMETIC_HAVE_AVX2
  static const bool supported = cpu_has_avx2();
  return supported ? &detail::kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    t = detect();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

bool select(Isa isa) noexcept {
  const KernelTable* t = isa == Isa::Scalar ? &detail::kScalarTable : avx2_table();
  if (t == nullptr) return false;
  g_active.store(t, std::memory_order_release);
  return true;
}

void reset_selection() noexcept { g_active.store(detect(), std::memory_order_release); }

}  // namespace memetic::kernels
