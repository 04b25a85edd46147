#include <immintrin.h>

#include "siapprox/kernels.hpp"

namespace sia::kernels::avx2 {

namespace {
inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}
}  // namespace

void hermitian_accumulate(int r, int n, const double* xre, const double* xim, const double* w, double* gre,
                          double* gim) {
  const int n4 = n & ~3;
  for (int j = 0; j < r; ++j) {
    const double* aj = xre + static_cast<long>(j) * n;
    const double* bj = xim + static_cast<long>(j) * n;
    for (int k = j; k < r; ++k) {
      const double* ak = xre + static_cast<long>(k) * n;
      const double* bk = xim + static_cast<long>(k) * n;
      __m256d accr = _mm256_setzero_pd(), acci = _mm256_setzero_pd();
      for (int t = 0; t < n4; t += 4) {
        __m256d vw = _mm256_loadu_pd(w + t);
        __m256d a1 = _mm256_loadu_pd(aj + t), b1 = _mm256_loadu_pd(bj + t);
        __m256d a2 = _mm256_loadu_pd(ak + t), b2 = _mm256_loadu_pd(bk + t);
        __m256d re = _mm256_fmadd_pd(b1, b2, _mm256_mul_pd(a1, a2));
        __m256d im = _mm256_fmsub_pd(b1, a2, _mm256_mul_pd(a1, b2));
        accr = _mm256_fmadd_pd(vw, re, accr);
        acci = _mm256_fmadd_pd(vw, im, acci);
      }
      double sr = hsum(accr), si = hsum(acci);
      for (int t = n4; t < n; ++t) {
        sr += w[t] * (aj[t] * ak[t] + bj[t] * bk[t]);
        si += w[t] * (bj[t] * ak[t] - aj[t] * bk[t]);
      }
      gre[j * r + k] += sr;
      gim[j * r + k] += si;
      if (k != j) {
        gre[k * r + j] += sr;
        gim[k * r + j] -= si;
      }
    }
  }
}

double weighted_sum(int n, const double* w, const double* f) {
  const int n4 = n & ~3;
  __m256d acc = _mm256_setzero_pd();
  for (int t = 0; t < n4; t += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + t), _mm256_loadu_pd(f + t), acc);
  double s = hsum(acc);
  for (int t = n4; t < n; ++t) s += w[t] * f[t];
  return s;
}

double weighted_abs2(int n, const double* re, const double* im, const double* w) {
  const int n4 = n & ~3;
  __m256d acc = _mm256_setzero_pd();
  for (int t = 0; t < n4; t += 4) {
    __m256d a = _mm256_loadu_pd(re + t), b = _mm256_loadu_pd(im + t);
    __m256d m = _mm256_fmadd_pd(b, b, _mm256_mul_pd(a, a));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + t), m, acc);
  }
  double s = hsum(acc);
  for (int t = n4; t < n; ++t) s += w[t] * (re[t] * re[t] + im[t] * im[t]);
  return s;
}

}  // namespace sia::kernels::avx2
