#pragma once
// Dense float64 inner loops used by the autodiff core and the optimizer.
//
// Every kernel has a scalar reference implementation and an AVX2/FMA variant.
// The variant is picked once at startup from CPUID; JNEL_KERNELS=scalar in
// the environment forces the reference path. All reductions use a fixed
// accumulation order so results are reproducible run to run on one machine.

#include <cstddef>
#include <string_view>

namespace jnel::kernels {

enum class Backend { kScalar, kAvx2 };

struct KernelTable {
  Backend backend;
  const char* name;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y[r] += sum_c W[r*ld + c] * x[c], r < rows, c < cols
  void (*gemv)(const double* w, std::size_t rows, std::size_t cols,
               std::size_t ld, const double* x, double* y);
  // gx[c] += sum_r W[r*ld + c] * g[r]
  void (*gemv_t)(const double* w, std::size_t rows, std::size_t cols,
                 std::size_t ld, const double* g, double* gx);
  // gw[r*ld + c] += g[r] * x[c]
  void (*ger)(const double* g, const double* x, std::size_t rows,
              std::size_t cols, std::size_t ld, double* gw);
  // One bias-corrected Adam step; grad is zeroed afterwards.
  // step_size = lr / (1 - beta1^t), v_scale = 1 / (1 - beta2^t).
  void (*adam)(double* param, double* grad, double* m, double* v,
               std::size_t n, double beta1, double beta2, double step_size,
               double v_scale, double eps);
  // sum_i x[i]^2
  double (*sum_squares)(const double* x, std::size_t n);
  // x *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the binary was built without AVX2 support.
const KernelTable* avx2_table();

bool cpu_has_avx2();

// Currently active table.
const KernelTable& active();

// Overrides the active table. Throws std::invalid_argument if the requested
// backend is unavailable on this machine or build.
void select(Backend backend);

std::string_view backend_name(Backend backend);

}  // namespace jnel::kernels
