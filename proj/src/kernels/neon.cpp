#include <arm_neon.h>

#include "jci/kernels.hpp"

namespace jci::kernels::neon {

double sum(std::span<const double> a) {
  const double* p = a.data();
  const std::size_t n = a.size();
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vld1q_f64(p + i));
    acc1 = vaddq_f64(acc1, vld1q_f64(p + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += p[i];
  return s;
}

double centered_dot(std::span<const double> a, double ma, std::span<const double> b, double mb) {
  const double* pa = a.data();
  const double* pb = b.data();
  const std::size_t n = a.size();
  const float64x2_t va = vdupq_n_f64(ma);
  const float64x2_t vb = vdupq_n_f64(mb);
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vsubq_f64(vld1q_f64(pa + i), va), vsubq_f64(vld1q_f64(pb + i), vb));
    acc1 = vfmaq_f64(acc1, vsubq_f64(vld1q_f64(pa + i + 2), va),
                     vsubq_f64(vld1q_f64(pb + i + 2), vb));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += (pa[i] - ma) * (pb[i] - mb);
  return s;
}

}  // namespace jci::kernels::neon
