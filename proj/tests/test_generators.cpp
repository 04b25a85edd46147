#include <random>

#include "doctest.h"
#include "siapprox/errors.hpp"
#include "siapprox/generators.hpp"

using namespace sia;

namespace {
const double kPi = 3.14159265358979323846;
std::vector<double> pt(double a, double b) { return {a, b}; }
}  // namespace

TEST_CASE("bspline values and zero orders") {
  auto b1 = bspline(1);
  CHECK(std::abs(b1.eval1(0.0) - 1.0) < 1e-14);
  CHECK(std::abs(b1.eval1(2 * kPi)) < 1e-14);
  CHECK(bspline(2).exact_zero_order(rat_point({1}), 8) == 2);
  for (int k = 1; k <= 4; ++k) CHECK(bspline(k).exact_zero_order(rat_point({3}), 10) == k);
  // Near-singular evaluation matches the closed form.
  for (double w : {1e-7, 3e-4, 2 * kPi + 1e-5, 0.5}) {
    cplx z = (1.0 - std::exp(cplx(0, -w))) / cplx(0, w);
    CHECK(std::abs(bspline(3).eval1(w) - z * z * z) < 1e-9);
  }
}

TEST_CASE("box splines") {
  auto m = boxspline({{1, 0}, {0, 1}, {1, 1}});
  CHECK(std::abs(m.eval(pt(0, 0)) - 1.0) < 1e-14);
  auto m221 = boxspline({{1, 0}, {1, 0}, {0, 1}, {0, 1}, {1, 1}});
  CHECK(std::abs(m221.eval(pt(2 * kPi, 0))) < 1e-12);
  CHECK(m221.exact_zero_order(rat_point({1, 0}), 8) == 3);
  CHECK_THROWS_AS(boxspline({{1, 0}}), DegenerateDirections);
}

TEST_CASE("fredrickson elements") {
  auto F = fredrickson();
  CHECK(std::abs(F[0].eval(pt(0, 0)) - 0.5) < 1e-12);
  const double phi = 1.618033988749895;
  for (double ang : {0.3, 1.1, 2.5, 4.0}) {
    double r = 1e-4;
    cplx v = F[0].eval(pt(r * std::cos(ang * phi), r * std::sin(ang * phi)));
    CHECK(std::abs(v - 0.5) < 1e-3);
  }
  auto m221 = boxspline({{1, 0}, {1, 0}, {0, 1}, {0, 1}, {1, 1}});
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-3 * kPi, 3 * kPi);
  for (int n = 0; n < 25; ++n) {
    auto w = pt(U(rng), U(rng));
    CHECK(std::abs(F[0].eval(w) + F[1].eval(w) - m221.eval(w)) < 1e-9);
    auto ws = pt(w[1], w[0]);
    CHECK(std::abs(F[1].eval(w) - F[0].eval(ws)) < 1e-13);
  }
  // Continuity across the singular line u = 0.
  for (double v : {0.7, -2.0, 5.0}) {
    cplx c = F[0].eval(pt(0, v));
    for (auto off : {pt(1e-10, 0), pt(-1e-10, 0), pt(1e-10, 1e-10), pt(-1e-10, -1e-10)})
      CHECK(std::abs(F[0].eval(pt(off[0], v + off[1])) - c) < 1e-8);
  }
}

TEST_CASE("symbols evaluate finitely on a grid and jets match finite differences") {
  std::vector<FourierSymbol> syms{bspline(2), boxspline({{1, 0}, {0, 1}, {1, 1}}), fredrickson()[0],
                                  bad_pair_default_g(4)};
  for (const auto& f : syms) {
    const int d = f.dim();
    const int n = 41;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < (d == 2 ? n : 1); ++b) {
        std::vector<double> w{-3 * kPi + 6 * kPi * a / (n - 1), -3 * kPi + 6 * kPi * b / (n - 1)};
        w.resize(static_cast<std::size_t>(d));
        CHECK(std::isfinite(std::abs(f.eval(w))));
      }
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> U(-4, 4);
    for (int t = 0; t < 5; ++t) {
      std::vector<double> p(static_cast<std::size_t>(d));
      for (auto& x : p) x = U(rng) + 0.123;
      auto j = f.jet_at(p, 2);
      for (int c = 0; c < d; ++c) {
        const double h = 1e-5;
        auto pp = p, pm = p;
        pp[c] += h;
        pm[c] -= h;
        cplx fd = (f.eval(pp) - f.eval(pm)) / (2 * h);
        MultiIndex e = MultiIndex::unit(d, c);
        CHECK(std::abs(fd - j.coeff(e)) <= 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("convolution") {
  auto c = convolve(bspline(1), bspline(1));
  for (int n = 0; n < 20; ++n) {
    double w = -10 + n * 1.01;
    CHECK(std::abs(c.eval1(w) - bspline(2).eval1(w)) < 1e-12);
    CHECK(std::abs(convolve(bspline(2), delta(1)).eval1(w) - bspline(2).eval1(w)) < 1e-14);
  }
  CHECK(convolve(bspline(2), bspline(3)).exact_zero_order(rat_point({1}), 10) == 5);
}

TEST_CASE("bad pair construction") {
  const int k = 4;
  auto g = bad_pair_default_g(k);
  auto Phi = bad_pair(g, k);
  auto v = bad_pair_v(k);
  // psi = v* Phi; the jet at (2 pi, 0) of v* Phi.
  for (auto q : {std::vector<int>{1, 0}, {0, 1}, {1, 1}}) {
    std::vector<double> p{2 * kPi * q[0], 2 * kPi * q[1]};
    const int K = 8;
    auto jp = Phi.jet_at(p, K);
    auto jv = v.adjoint().jet_at(p, K);
    Jet psi = jet_mul(jv[0], jp[0]) + jet_mul(jv[1], jp[1]);
    CHECK(psi.zero_order() >= k + 2);
  }
  // Taylor expansion of Phi at (2 pi, 0) through degree k - 1.
  auto jp = Phi.jet_at(pt(2 * kPi, 0), k - 1);
  for (int i = 0; i < jp[0].layout().size(); ++i) {
    const auto& a = jp[0].layout().idx[i];
    cplx w1 = a == MultiIndex{0, 2} ? -0.5 : 0.0;
    cplx w2 = a == MultiIndex{2, 0} ? 0.5 : 0.0;
    CHECK(std::abs(jp[0][i] - w1) < 1e-9);
    CHECK(std::abs(jp[1][i] - w2) < 1e-9);
  }
  // A tensor B-spline without the moment correction fails the origin condition.
  auto bad = bspline_coord(2, 0, k) * bspline_coord(2, 1, k);
  CHECK_THROWS_AS(bad_pair(bad, k), PreconditionFailed);
}
