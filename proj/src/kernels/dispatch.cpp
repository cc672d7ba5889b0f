#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "jnel/kernels.hpp"

namespace jnel::kernels {

#ifndef JNEL_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(JNEL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const KernelTable* detect() {
  if (const char* env = std::getenv("JNEL_KERNELS")) {
    if (std::string(env) == "scalar") return &scalar_table();
  }
  if (cpu_has_avx2() && avx2_table() != nullptr) return avx2_table();
  return &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{detect()};
  return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void select(Backend backend) {
  if (backend == Backend::kScalar) {
    slot().store(&scalar_table(), std::memory_order_release);
    return;
  }
  if (!cpu_has_avx2() || avx2_table() == nullptr) {
    throw std::invalid_argument("AVX2 kernels are not available on this machine");
  }
  slot().store(avx2_table(), std::memory_order_release);
}

std::string_view backend_name(Backend backend) {
  return backend == Backend::kAvx2 ? "avx2" : "scalar";
}

}  // namespace jnel::kernels
