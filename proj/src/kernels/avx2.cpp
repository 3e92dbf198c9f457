// Compiled with -mavx2 -mfma; only called after a runtime CPU check.
#include <immintrin.h>

#include "jci/kernels.hpp"

namespace jci::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double sum(std::span<const double> a) {
  const double* p = a.data();
  const std::size_t n = a.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(p + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(p + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(p + i));
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += p[i];
  return s;
}

double centered_dot(std::span<const double> a, double ma, std::span<const double> b, double mb) {
  const double* pa = a.data();
  const double* pb = b.data();
  const std::size_t n = a.size();
  const __m256d va = _mm256_set1_pd(ma);
  const __m256d vb = _mm256_set1_pd(mb);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d x0 = _mm256_sub_pd(_mm256_loadu_pd(pa + i), va);
    const __m256d y0 = _mm256_sub_pd(_mm256_loadu_pd(pb + i), vb);
    const __m256d x1 = _mm256_sub_pd(_mm256_loadu_pd(pa + i + 4), va);
    const __m256d y1 = _mm256_sub_pd(_mm256_loadu_pd(pb + i + 4), vb);
    acc0 = _mm256_fmadd_pd(x0, y0, acc0);
    acc1 = _mm256_fmadd_pd(x1, y1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_sub_pd(_mm256_loadu_pd(pa + i), va);
    const __m256d y = _mm256_sub_pd(_mm256_loadu_pd(pb + i), vb);
    acc0 = _mm256_fmadd_pd(x, y, acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += (pa[i] - ma) * (pb[i] - mb);
  return s;
}

}  // namespace jci::kernels::avx2
