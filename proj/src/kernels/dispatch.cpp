#include <atomic>
#include <cstdlib>
#include <cstring>

#include "siapprox/kernels.hpp"

namespace sia::kernels {

namespace {

// -1 = automatic, otherwise the forced Isa value.
std::atomic<int> g_forced{-1};

bool cpu_has_avx2() {
#if defined(SIA_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  const char* env = std::getenv("SIAPPROX_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

}  // namespace

bool isa_available(Isa isa) { return isa == Isa::Scalar || cpu_has_avx2(); }

Isa active_isa() {
  int f = g_forced.load(std::memory_order_relaxed);
  if (f >= 0) return static_cast<Isa>(f);
  static const Isa detected = detect();
  return detected;
}

std::string isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2+fma" : "scalar"; }

void force_isa(std::optional<Isa> isa) {
  g_forced.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

#if defined(SIA_HAVE_AVX2_KERNELS)
#define SIA_DISPATCH(fn, ...) \
  (active_isa() == Isa::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define SIA_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void hermitian_accumulate(int r, int n, const double* xre, const double* xim, const double* w, double* gre,
                          double* gim) {
  SIA_DISPATCH(hermitian_accumulate, r, n, xre, xim, w, gre, gim);
}

double weighted_sum(int n, const double* w, const double* f) { return SIA_DISPATCH(weighted_sum, n, w, f); }

double weighted_abs2(int n, const double* re, const double* im, const double* w) {
  return SIA_DISPATCH(weighted_abs2, n, re, im, w);
}

#if !defined(SIA_HAVE_AVX2_KERNELS)
// Non-x86 builds: the AVX2 entry points fall back to the reference kernels so the
// equivalence tests still link.
namespace avx2 {
void hermitian_accumulate(int r, int n, const double* xre, const double* xim, const double* w, double* gre,
                          double* gim) {
  scalar::hermitian_accumulate(r, n, xre, xim, w, gre, gim);
}
double weighted_sum(int n, const double* w, const double* f) { return scalar::weighted_sum(n, w, f); }
double weighted_abs2(int n, const double* re, const double* im, const double* w) {
  return scalar::weighted_abs2(n, re, im, w);
}
}  // namespace avx2
#endif

}  // namespace sia::kernels
