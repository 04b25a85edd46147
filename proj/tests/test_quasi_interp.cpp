#include <cmath>

#include "doctest.h"
#include "siapprox/errors.hpp"
#include "siapprox/generators.hpp"
#include "siapprox/quasi_interp.hpp"

using namespace sia;

namespace {

MultiIndex mi(int a) { return MultiIndex{a}; }

// int (-t)^g / g! B_k(t) dt by Simpson's rule on each knot interval (exact there).
double bspline_moment(int k, int g) {
  double sum = 0.0;
  for (int cell = 0; cell < k; ++cell) {
    const int n = 64;
    const double h = 1.0 / n;
    for (int i = 0; i < n; ++i) {
      const double a = cell + i * h, m = a + h / 2, b = a + h;
      auto f = [&](double t) {
        // Stay inside the half-open cell so the right endpoint uses the cell's piece.
        const double tt = std::min(t, cell + 1 - 1e-15);
        return std::pow(-t, g) / std::tgamma(g + 1.0) * bspline_space(k, tt);
      };
      sum += h / 6 * (f(a) + 4 * f(m) + f(b));
    }
  }
  return sum;
}

Mask scalar_mask(const TrigPoly& p) {
  TrigPolyMatrix M(1, 1, p.dim());
  M(0, 0) = p;
  return Mask(M);
}

}  // namespace

TEST_CASE("moments of B-splines and delta") {
  const MomentTable b1 = moments(bspline(1), 3);
  CHECK(std::abs(b1[mi(0)] - 1.0) < 1e-14);
  CHECK(std::abs(b1[mi(1)] + 0.5) < 1e-14);
  CHECK(std::abs(moments(bspline(2), 2)[mi(1)] + 1.0) < 1e-14);

  const MomentTable dl = moments(delta(2), 3);
  CHECK(std::abs(dl[MultiIndex{0, 0}] - 1.0) < 1e-14);
  for (const auto& [g, m] : dl.m)
    if (g.order() > 0) CHECK(std::abs(m) < 1e-14);

  for (int k = 1; k <= 4; ++k) {
    const MomentTable t = moments(bspline(k), 4);
    for (int g = 0; g <= 4; ++g) CHECK(std::abs(t[mi(g)] - bspline_moment(k, g)) < 1e-10);
  }
}

TEST_CASE("convolution with polynomials") {
  const Polynomial x = Polynomial::monomial(mi(1));
  const Polynomial one = Polynomial::constant(1, 1.0);
  const Polynomial got = convolve_poly(moments(bspline(2), 2), x);
  CHECK((got - (x - one)).max_abs() < 1e-14);
  CHECK((convolve_poly(moments(bspline(1), 1), one) - one).max_abs() < 1e-14);

  const Polynomial q = Polynomial::monomial(MultiIndex{2, 1}, 3.0) + Polynomial::monomial(MultiIndex{0, 2}, -1.0);
  CHECK((convolve_poly(moments(delta(2), 3), q) - q).max_abs() < 1e-14);

  // Differentiation commutes with the contraction, and degrees are kept.
  const MomentTable box = moments(boxspline({{1, 0}, {1, 0}, {0, 1}, {0, 1}, {1, 1}}), 3);
  for (const MultiIndex& g : {MultiIndex{1, 0}, MultiIndex{0, 1}, MultiIndex{1, 1}})
    CHECK((convolve_poly(box, q).partial(g) - convolve_poly(box, q.partial(g))).max_abs() < 1e-12);
  CHECK(convolve_poly(box, q).degree() == q.degree());
  CHECK_THROWS_AS(convolve_poly(moments(delta(2), 2), q), InputError);
  CHECK_THROWS_AS(convolve_poly(moments(bspline(1), 3), q), DimensionMismatch);
}

TEST_CASE("PSI schemes") {
  const QIScheme b2 = qi_psi(bspline(2), 2);
  CHECK((b2.g.at(mi(0)) - Polynomial::constant(1, 1.0)).max_abs() < 1e-14);
  CHECK((b2.g.at(mi(1)) - Polynomial::monomial(mi(1)) - Polynomial::constant(1, 1.0)).max_abs() < 1e-14);
  CHECK(b2.reproduces());
  CHECK(b2.warnings.empty());

  const QIScheme b1 = qi_psi(bspline(1), 1);
  CHECK(b1.g.size() == 1);
  CHECK((b1.g.at(mi(0)) - Polynomial::constant(1, 1.0)).max_abs() < 1e-14);

  for (int k = 1; k <= 4; ++k) {
    const QIScheme s = qi_psi(bspline(k), k);
    CHECK(s.reproduces());
    CHECK(semidiscrete_residual(k, s, {0.13, 1.7, 2.5, -3.21, 6.04}) < 1e-10);
  }

  const QIScheme dl = qi_psi(delta(2), 3);
  for (const auto& [a, ga] : dl.g) CHECK((ga - Polynomial::monomial(a)).max_abs() < 1e-14);
  CHECK_FALSE(dl.warnings.empty());  // delta has no Strang-Fix order

  const QIScheme scaled = qi_psi(bspline(2).scaled(2.0), 2);
  CHECK(std::abs(scaled.normalization - 2.0) < 1e-14);
  CHECK(scaled.reproduces());
  CHECK_THROWS_AS(qi_psi(bspline(2) - bspline(2).dilated(2.0), 2), DegenerateSymbol);
}

TEST_CASE("FSI schemes") {
  const std::map<LatticeIndex, cplx> delta0{{{0}, 1.0}};
  const QIScheme viaf = qi_fsi(GeneratorVector({bspline(2)}), {delta0}, 2);
  const QIScheme viap = qi_psi(bspline(2), 2);
  for (const auto& [a, ga] : viap.g) CHECK((viaf.g.at(a) - ga).max_abs() < 1e-14);

  const GeneratorVector F = fredrickson();
  const std::map<LatticeIndex, cplx> d0{{{0, 0}, 1.0}};
  const QIScheme f = qi_fsi(F, {d0, d0}, 3);
  CHECK(f.g.size() == 6);
  CHECK(f.reproduces());
  // phi1 + phi2 is M_{2,2,1}.
  const QIScheme box = qi_psi(boxspline({{1, 0}, {1, 0}, {0, 1}, {0, 1}, {1, 1}}), 3);
  for (const auto& [g, c] : box.c) CHECK(std::abs(f.c.at(g) - c) < 1e-10);

  const std::map<LatticeIndex, cplx> m0{{{0, 0}, -1.0}};
  CHECK_THROWS_AS(qi_fsi(F, {d0, m0}, 2), DegenerateSymbol);
}

TEST_CASE("universal quasi-interpolation from a mask") {
  const SolutionBasis b2 = solve_R(scalar_mask(bspline_mask(2)));
  TrigPoly v(1);
  v.set({0}, 2.0);
  v.set({-1}, -1.0);
  const UniversalQIReport rep = universal_quasi_interp(b2, TrigPolyMatrix::column({v}), 0, 2);
  CHECK(rep.surjective);
  REQUIRE(rep.scheme);
  CHECK(rep.scheme->g.size() == 2);
  CHECK(rep.scheme->reproduces());

  TrigPoly z(1);
  z.set({0}, 1.0);
  z.set({1}, -1.0);
  const UniversalQIReport flat = universal_quasi_interp(b2, TrigPolyMatrix::column({z}), 0, 2);
  CHECK_FALSE(flat.surjective);
  CHECK_FALSE(flat.scheme);

  TrigPolyMatrix D(2, 2, 1);
  D(0, 0) = bspline_mask(1);
  D(1, 1) = bspline_mask(2);
  D(0, 1) = TrigPoly(1);
  D(1, 0) = TrigPoly(1);
  const SolutionBasis sd = solve_R(Mask(D));
  // At k = 1 every v(0) is admissible; the solver's choice must pair with both solutions.
  const ZkSolution z1 = max_Zk_solve(sd.mask, 1, &sd);
  REQUIRE(z1.v);
  for (int j = 0; j < sd.size(); ++j) {
    const UniversalQIReport r = universal_quasi_interp(sd, *z1.v, j, 1);
    CHECK(r.surjective);
    REQUIRE(r.scheme);
    CHECK(r.scheme->reproduces());
  }
  // Order 2 forces v(0) onto the B2 coordinate, so the B1 solution loses surjectivity.
  const ZkSolution z2 = max_Zk_solve(sd.mask, 3, &sd);
  CHECK(z2.k_star == 2);
  int onto = 0;
  for (int j = 0; j < sd.size(); ++j) onto += universal_quasi_interp(sd, *z2.v, j, 2).surjective;
  CHECK(onto == 1);
}
