#pragma once

#include <optional>
#include <string>

namespace sia::kernels {

enum class Isa { Scalar, Avx2 };

// Kernel family selected for this process: AVX2+FMA when the CPU reports both and
// SIAPPROX_SIMD is not set to "scalar", the portable reference otherwise.
Isa active_isa();
std::string isa_name(Isa isa);
bool isa_available(Isa isa);
// Test hook; std::nullopt restores automatic selection.
void force_isa(std::optional<Isa> isa);

// Weighted Hermitian outer-product accumulation over n samples of an r-vector:
//   G(j,k) += sum_b w[b] * x_j[b] * conj(x_k[b])
// x is stored as separate real/imaginary planes with x_j[b] at [j*n + b].
// G is a dense r*r array (row-major); both triangles are written.
void hermitian_accumulate(int r, int n, const double* xre, const double* xim, const double* w, double* gre,
                          double* gim);

// sum_b w[b] * f[b]
double weighted_sum(int n, const double* w, const double* f);

// sum_b w[b] * (re[b]^2 + im[b]^2)
double weighted_abs2(int n, const double* re, const double* im, const double* w);

namespace scalar {
void hermitian_accumulate(int r, int n, const double* xre, const double* xim, const double* w, double* gre,
                          double* gim);
double weighted_sum(int n, const double* w, const double* f);
double weighted_abs2(int n, const double* re, const double* im, const double* w);
}  // namespace scalar

namespace avx2 {
void hermitian_accumulate(int r, int n, const double* xre, const double* xim, const double* w, double* gre,
                          double* gim);
double weighted_sum(int n, const double* w, const double* f);
double weighted_abs2(int n, const double* re, const double* im, const double* w);
}  // namespace avx2

}  // namespace sia::kernels
