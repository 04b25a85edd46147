#include <random>

#include "doctest.h"
#include "siapprox/errors.hpp"
#include "siapprox/jet.hpp"
#include "siapprox/kernels.hpp"
#include "siapprox/polynomial.hpp"
#include "siapprox/symbol.hpp"
#include "siapprox/trig_poly.hpp"

using namespace sia;

namespace {
const cplx I(0, 1);

Jet series_1d(int K, const std::vector<cplx>& c, double base = 0.0) {
  Jet j(1, K, {base});
  for (int n = 0; n <= K && n < static_cast<int>(c.size()); ++n) j[n] = c[n];
  return j;
}

Jet exp_jet(int K, double sign) {  // e^{sign*i*w} at 0
  std::vector<cplx> c;
  for (int n = 0; n <= K; ++n) c.push_back(std::pow(sign * I, n) / factorial(n));
  return series_1d(K, c);
}
}  // namespace

TEST_CASE("multi-index enumeration") {
  auto z = enumerate_upto(2, 2);
  REQUIRE(z.size() == 6);
  CHECK(z[1] == MultiIndex{0, 1});
  CHECK(z[2] == MultiIndex{1, 0});
  auto zd = enumerate_upto(2, 2, GradedOrder::Descending);
  CHECK(zd[1] == MultiIndex{1, 0});
  CHECK(count_upto(3, 4) == enumerate_upto(3, 4).size());
  for (std::size_t i = 0; i + 1 < z.size(); ++i) CHECK(z[i] < z[i + 1]);
  CHECK(MultiIndex({1, 0}).leq(MultiIndex{2, 1}));
  CHECK_FALSE(MultiIndex({1, 2}).leq(MultiIndex{2, 1}));
  CHECK(parse_multi_index("(2,1)") == MultiIndex{2, 1});
}

TEST_CASE("polynomial arithmetic examples") {
  auto one = Polynomial::constant(1, 1.0);
  auto x = Polynomial::monomial(MultiIndex{1});
  auto p = (one + x) * (one - x);
  CHECK(std::abs(p.coeff(MultiIndex{0}) - 1.0) < 1e-15);
  CHECK(std::abs(p.coeff(MultiIndex{2}) + 2.0) < 1e-15);
  auto q = Polynomial::monomial(MultiIndex{2}).diff(MultiIndex{1});
  CHECK(std::abs(q.coeff(MultiIndex{1}) - 1.0) < 1e-15);
  std::vector<double> pt{2, 3};
  CHECK(std::abs(Polynomial::monomial(MultiIndex{2, 1}).eval(pt) - 6.0) < 1e-14);
}

TEST_CASE("polynomial product evaluates pointwise") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int d = 1; d <= 3; ++d) {
    Polynomial p(d), q(d);
    for (const auto& a : enumerate_upto(d, 4)) {
      p.set(a, {U(rng), U(rng)});
      q.set(a, {U(rng), U(rng)});
    }
    auto pq = p * q;
    for (int t = 0; t < 20; ++t) {
      std::vector<double> x(static_cast<std::size_t>(d));
      for (auto& v : x) v = U(rng);
      cplx want = p.eval(x) * q.eval(x);
      CHECK(std::abs(pq.eval(x) - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST_CASE("jet products") {
  Jet iw = series_1d(4, {0.0, I});
  auto sq = jet_mul(iw, iw);
  CHECK(std::abs(sq[2] + 1.0) < 1e-15);
  CHECK(std::abs(sq[1]) < 1e-15);
  auto one = jet_mul(exp_jet(3, -1), exp_jet(3, 1));
  CHECK(std::abs(one[0] - 1.0) < 1e-15);
  for (int n = 1; n <= 3; ++n) CHECK(std::abs(one[n]) < 1e-15);
  // (1 - e^{-iw})^2 at 2 pi: same jet as at 0.
  Jet e = exp_jet(5, -1);
  Jet f = Jet::constant(1, 5, {0.0}, 1.0) - e;
  auto f2 = jet_mul(f, f);
  CHECK(f2.zero_order() == 2);
  CHECK(std::abs(f2[2] - I * I) < 1e-14);
}

TEST_CASE("jet division") {
  Jet num = Jet::constant(1, 4, {0.0}, 1.0) - exp_jet(4, -1);
  Jet den = series_1d(4, {0.0, I});
  auto q = jet_div(num, den);
  CHECK(q.degree() == 3);
  CHECK(std::abs(q[0] - 1.0) < 1e-14);
  CHECK(std::abs(q[1] + I / 2.0) < 1e-14);
  CHECK(std::abs(q[2] + 1.0 / 6.0) < 1e-14);
  CHECK(std::abs(q[3] - I / 24.0) < 1e-14);
  auto w = jet_div(series_1d(4, {0, 0, 1}), series_1d(4, {0, 1}));
  CHECK(std::abs(w[1] - 1.0) < 1e-15);
  CHECK(std::abs(w[0]) < 1e-15);
  CHECK_THROWS_AS(jet_div(series_1d(4, {1}), series_1d(4, {0, 1})), NonRemovableSingularity);
  CHECK_THROWS_AS(jet_div(series_1d(4, {0}), series_1d(4, {0})), DegreeExhausted);
}

TEST_CASE("random jet properties") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + trial % 3, K = 6;
    Jet a(d, K, std::vector<double>(d, 0.0)), b = a;
    int oa = trial % 3, ob = (trial / 3) % 3;
    for (int i = 0; i < a.layout().size(); ++i) {
      if (a.layout().deg[i] >= oa) a[i] = {U(rng), U(rng)};
      if (b.layout().deg[i] >= ob) b[i] = {U(rng), U(rng)};
    }
    auto ab = jet_mul(a, b);
    CHECK(ab.zero_order() == oa + ob);
    auto back = jet_div(ab, b);
    for (int i = 0; i < back.layout().size(); ++i)
      CHECK(std::abs(back[i] - a.coeff(back.layout().idx[i])) <= 1e-10 * std::max(1.0, std::abs(a[i])));
  }
}

TEST_CASE("trig polynomial evaluation and jets") {
  auto v = TrigPoly::monomial({1}, 1.0);
  std::vector<double> z{0.0};
  auto jv = v.jet_at(z, 3);
  CHECK(std::abs(jv[0] - 1.0) < 1e-15);
  CHECK(std::abs(jv[1] + I) < 1e-15);
  auto u = TrigPoly::constant(1, 2.0) - v;
  auto ju = u.jet_at(z, 3);
  CHECK(std::abs(ju[0] - 1.0) < 1e-15);
  CHECK(std::abs(ju[1] - I) < 1e-15);
  auto Id = TrigPolyMatrix::identity(2, 1);
  auto jI = Id.jet_at(std::vector<double>{0.7}, 3);
  CHECK(std::abs(jI[0][0] - 1.0) < 1e-15);
  CHECK(std::abs(jI[1][0]) < 1e-15);
  CHECK(std::abs(jI[0][1]) < 1e-15);
}

TEST_CASE("trig polynomial periodicity, adjoint, dilation") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  TrigPoly t(2);
  for (int a = -2; a <= 2; ++a)
    for (int b = -1; b <= 2; ++b) t.set({a, b}, {U(rng), U(rng)});
  for (int n = 0; n < 20; ++n) {
    std::vector<double> w{3 * U(rng), 3 * U(rng)};
    std::vector<double> w2{w[0] + 2 * M_PI * std::round(5 * U(rng)), w[1] + 2 * M_PI * std::round(5 * U(rng))};
    cplx v = t.eval(w);
    CHECK(std::abs(t.eval(w2) - v) <= 1e-12 * (1 + std::abs(v)));
    CHECK(std::abs(t.adjoint().eval(w) - std::conj(v)) < 1e-13);
    std::vector<double> wd{2 * w[0], 2 * w[1]};
    CHECK(std::abs(t.dilated(2).eval(w) - t.eval(wd)) < 1e-13);
  }
  // Jet vs finite differences.
  std::vector<double> p{0.3, -0.4};
  auto j = t.jet_at(p, 2);
  const double h = 1e-4;
  std::vector<double> pp{p[0] + h, p[1]}, pm{p[0] - h, p[1]};
  cplx fd = (t.eval(pp) - t.eval(pm)) / (2 * h);
  CHECK(std::abs(fd - j.coeff(MultiIndex{1, 0})) < 1e-6);
}

TEST_CASE("exact jets of trig polynomials at lattice points") {
  auto t = TrigPoly::constant_exact(1, GaussQ(1)) - TrigPoly::monomial({1}, 1.0).with_exact_from_doubles();
  REQUIRE(t.has_exact());
  auto e = t.exact_jet_at(rat_point({1}), 4);
  CHECK(e.zero_order() == 1);
}
