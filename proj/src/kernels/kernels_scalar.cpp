#include "siapprox/kernels.hpp"

namespace sia::kernels::scalar {

void hermitian_accumulate(int r, int n, const double* xre, const double* xim, const double* w, double* gre,
                          double* gim) {
  for (int j = 0; j < r; ++j) {
    const double* aj = xre + static_cast<long>(j) * n;
    const double* bj = xim + static_cast<long>(j) * n;
    for (int k = j; k < r; ++k) {
      const double* ak = xre + static_cast<long>(k) * n;
      const double* bk = xim + static_cast<long>(k) * n;
      double sr = 0.0, si = 0.0;
      for (int t = 0; t < n; ++t) {
        // (aj + i bj)(ak - i bk)
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
  double s = 0.0;
  for (int t = 0; t < n; ++t) s += w[t] * f[t];
  return s;
}

double weighted_abs2(int n, const double* re, const double* im, const double* w) {
  double s = 0.0;
  for (int t = 0; t < n; ++t) s += w[t] * (re[t] * re[t] + im[t] * im[t]);
  return s;
}

}  // namespace sia::kernels::scalar
