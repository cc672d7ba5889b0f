#include <cmath>

#include "jnel/kernels.hpp"

namespace jnel::kernels {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* w, std::size_t rows, std::size_t cols, std::size_t ld,
          const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += dot(w + r * ld, x, cols);
}

void gemv_t(const double* w, std::size_t rows, std::size_t cols,
            std::size_t ld, const double* g, double* gx) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] != 0.0) axpy(g[r], w + r * ld, gx, cols);
  }
}

void ger(const double* g, const double* x, std::size_t rows, std::size_t cols,
         std::size_t ld, double* gw) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] != 0.0) axpy(g[r], x, gw + r * ld, cols);
  }
}

void adam(double* param, double* grad, double* m, double* v, std::size_t n,
          double beta1, double beta2, double step_size, double v_scale,
          double eps) {
  const double one_m_b1 = 1.0 - beta1;
  const double one_m_b2 = 1.0 - beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    m[i] = beta1 * m[i] + one_m_b1 * g;
    v[i] = beta2 * v[i] + one_m_b2 * (g * g);
    param[i] -= step_size * m[i] / (std::sqrt(v[i] * v_scale) + eps);
    grad[i] = 0.0;
  }
}

double sum_squares(const double* x, std::size_t n) { return dot(x, x, n); }

void scale(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Backend::kScalar, "scalar", dot,  axpy,
                                 gemv,             gemv_t,   ger,  adam,
                                 sum_squares,      scale};
  return table;
}

}  // namespace jnel::kernels
