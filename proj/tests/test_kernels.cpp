#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "siapprox/generators.hpp"
#include "siapprox/kernels.hpp"
#include "siapprox/lattice.hpp"

using namespace sia;
namespace K = sia::kernels;

namespace {

std::vector<double> randv(std::mt19937& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = U(rng);
  return v;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace

TEST_CASE("scalar reference kernels") {
  const std::vector<double> w{1, 2, 3}, f{0.5, -1, 2}, re{1, 0, 2}, im{0, 1, -1};
  CHECK(K::scalar::weighted_sum(3, w.data(), f.data()) == doctest::Approx(4.5));
  CHECK(K::scalar::weighted_abs2(3, re.data(), im.data(), w.data()) == doctest::Approx(1 + 2 + 15));
  // Two samples of a 2-vector: x_0 = (1, i), x_1 = (2, 1 - i).
  const std::vector<double> xre{1, 2, 0, 1}, xim{0, 0, 1, -1}, ww{1, 0.5};
  std::vector<double> gre(4, 0.0), gim(4, 0.0);
  K::scalar::hermitian_accumulate(2, 2, xre.data(), xim.data(), ww.data(), gre.data(), gim.data());
  // G(0,1) = 1 * 1 * conj(i) + 0.5 * 2 * conj(1 - i) = -i + 1 + i = 1.
  CHECK(gre[0] == doctest::Approx(3.0));
  CHECK(gre[1] == doctest::Approx(1.0));
  CHECK(gim[1] == doctest::Approx(0.0));
  CHECK(gre[2] == doctest::Approx(1.0));
  CHECK(gre[3] == doctest::Approx(2.0));
}

TEST_CASE("AVX2 kernels match the scalar reference") {
  if (!K::isa_available(K::Isa::Avx2)) {
    MESSAGE("AVX2 not available; skipped");
    return;
  }
  std::mt19937 rng(2024);
  // Lengths straddle the vector width and its remainders.
  for (int n : {0, 1, 3, 4, 5, 7, 8, 17, 64, 1001}) {
    const auto w = randv(rng, n, 0.0, 2.0), f = randv(rng, n), re = randv(rng, n), im = randv(rng, n);
    CHECK(rel(K::scalar::weighted_sum(n, w.data(), f.data()), K::avx2::weighted_sum(n, w.data(), f.data())) < 1e-12);
    CHECK(rel(K::scalar::weighted_abs2(n, re.data(), im.data(), w.data()),
              K::avx2::weighted_abs2(n, re.data(), im.data(), w.data())) < 1e-12);
    for (int r : {1, 2, 3}) {
      const auto xre = randv(rng, r * n), xim = randv(rng, r * n);
      std::vector<double> a_re(static_cast<std::size_t>(r * r), 0.25), a_im(static_cast<std::size_t>(r * r), -0.5);
      auto b_re = a_re, b_im = a_im;
      K::scalar::hermitian_accumulate(r, n, xre.data(), xim.data(), w.data(), a_re.data(), a_im.data());
      K::avx2::hermitian_accumulate(r, n, xre.data(), xim.data(), w.data(), b_re.data(), b_im.data());
      for (int i = 0; i < r * r; ++i) {
        CHECK(std::abs(a_re[i] - b_re[i]) <= 1e-12 * (1.0 + std::abs(a_re[i])));
        CHECK(std::abs(a_im[i] - b_im[i]) <= 1e-12 * (1.0 + std::abs(a_im[i])));
      }
    }
  }
}

TEST_CASE("dispatch can be forced and restored") {
  K::force_isa(K::Isa::Scalar);
  CHECK(K::active_isa() == K::Isa::Scalar);
  CHECK(K::isa_name(K::Isa::Scalar) == "scalar");
  K::force_isa(std::nullopt);
  if (K::isa_available(K::Isa::Avx2) && std::getenv("SIAPPROX_SIMD") == nullptr) CHECK(K::active_isa() == K::Isa::Avx2);
}

TEST_CASE("Gramians agree under both kernel families") {
  if (!K::isa_available(K::Isa::Avx2)) return;
  const GeneratorVector F = fredrickson();
  BracketConfig c;
  for (const std::vector<double>& p : {std::vector<double>{0.03, -0.01}, std::vector<double>{1.1, 2.4}}) {
    K::force_isa(K::Isa::Scalar);
    const GramianSample a = gramian(F, p, c);
    K::force_isa(K::Isa::Avx2);
    const GramianSample b = gramian(F, p, c);
    CHECK((a.G - b.G).norm() <= 1e-12 * a.G.norm());
    CHECK((a.G0 - b.G0).norm() <= 1e-12 * a.G0.norm());
  }
  K::force_isa(std::nullopt);
}
