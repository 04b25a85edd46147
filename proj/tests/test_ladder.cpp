#include <cmath>

#include "doctest.h"
#include "siapprox/errors.hpp"
#include "siapprox/generators.hpp"
#include "siapprox/ladder.hpp"
#include "siapprox/refinement.hpp"

using namespace sia;

namespace {

FourierSymbol m221() { return boxspline({{1, 0}, {1, 0}, {0, 1}, {0, 1}, {1, 1}}); }

double snapped(const OrderEstimate& e) { return e.snapped_order ? *e.snapped_order : -1.0; }

}  // namespace

TEST_CASE("bracket closed forms") {
  BracketConfig c;
  for (double w : {0.3, 1.0, 2.0, -2.9}) {
    const std::vector<double> p{w};
    // Integer shifts of B1 are orthonormal.
    CHECK(std::abs(bracket(bspline(1), bspline(1), p, c).value - 1.0) < 1e-6);
    const double b1 = std::norm(bspline(1).eval1(w));
    CHECK(std::abs(bracket(bspline(1), bspline(1), p, c, true).value - (1.0 - b1)) < 1e-6);
    // Hat function: 2/3 + cos(w)/3, up to the default tail tolerance.
    CHECK(std::abs(bracket(bspline(2), bspline(2), p, c).value - (2.0 + std::cos(w)) / 3.0) < 1e-7);
  }
}

TEST_CASE("brackets are stable under a larger truncation radius") {
  BracketConfig a, b;
  b.lattice_radius = 4 * a.lattice_radius;
  for (double w : {0.05, 0.7}) {
    const std::vector<double> p{w, -0.4 * w};
    const auto ga = gramian(fredrickson(), p, a);
    const auto gb = gramian(fredrickson(), p, b);
    CHECK((ga.G0 - gb.G0).norm() <= 1e-5 * gb.G0.norm());
    const cplx x = bracket(bspline(3), bspline(3), std::vector<double>{w}, a).value;
    const cplx y = bracket(bspline(3), bspline(3), std::vector<double>{w}, b).value;
    CHECK(std::abs(x - y) <= 1e-7 * std::abs(y));
  }
}

TEST_CASE("divergent brackets are flagged") {
  BracketConfig c;
  c.s = 0.5;
  const auto g = gramian(GeneratorVector({bspline(1)}), std::vector<double>{0.3}, c);
  CHECK(g.divergent);
}

TEST_CASE("decay fit recovers power laws") {
  DecayConfig c;
  const auto r = default_radii(c);
  std::vector<double> prof;
  for (double x : r) prof.push_back(2.5 * std::pow(x, 3.0));
  const DecayFit f = fit_profile(r, prof, c);
  CHECK(f.slope == doctest::Approx(3.0).epsilon(1e-10));
  REQUIRE(f.snapped);
  CHECK(*f.snapped == 3.0);
  std::vector<double> zero(r.size(), 0.0);
  CHECK(fit_profile(r, zero, c).infinite);
}

TEST_CASE("Strang-Fix orders") {
  for (int k = 1; k <= 4; ++k) {
    const SFReport r = sf_order(bspline(k), 8);
    CHECK(r.order == k);
    CHECK(r.all_exact);
  }
  CHECK(sf_order(m221(), 8).order == 3);
  CHECK(sf_order(delta(1), 4).order == 0);
}

TEST_CASE("PSI orders of B-splines, box and convolution") {
  LadderConfig c;
  for (int k = 1; k <= 4; ++k) {
    const OrderEstimate e = psi_order(bspline(k), 0.0, c);
    CHECK(snapped(e) == k);
    CHECK(e.fit.residual <= 0.1);
  }
  CHECK(snapped(psi_order(m221(), 0.0, c)) == 3);
  CHECK(psi_order(convolve(bspline(2), bspline(3)), 0.0, c).order == doctest::Approx(5.0).epsilon(0.04));
  const OrderEstimate d = psi_order(delta(1), 0.0, c);
  CHECK(std::abs(d.order) < 0.1);
}

TEST_CASE("Sobolev grid is consistent") {
  const ConsistencyReport r = psi_order_consistency(bspline(2), {-1.0, 0.0, 0.5}, LadderConfig{});
  CHECK(r.monotone);
  for (const auto& row : r.rows) CHECK(std::abs(row.order - 2.0) <= 0.15);
}

TEST_CASE("a single generator gives the same pencil and PSI orders") {
  LadderConfig c;
  for (int k = 1; k <= 3; ++k) {
    const double a = psi_order(bspline(k), 0.0, c).order;
    const double b = fsi_order(GeneratorVector({bspline(k)}), 0.0, c).order;
    CHECK(std::abs(a - b) < 1e-6);
  }
}

TEST_CASE("pencil forms agree on a rank-one update") {
  Eigen::MatrixXcd A(2, 2);
  A << 2.0, cplx(0.3, 0.1), cplx(0.3, -0.1), 1.0;
  Eigen::MatrixXcd X(2, 1);
  X << cplx(0.5, 0.2), -0.7;
  const double w = 1.3;
  const Eigen::MatrixXcd G = A + w * X * X.adjoint();
  CHECK(pencil_min_lowrank(A, X, w) == doctest::Approx(pencil_min_reduced(A, G)).epsilon(1e-10));
}

TEST_CASE("Fredrickson pair") {
  LadderConfig c;
  const GeneratorVector F = fredrickson();
  CHECK(snapped(fsi_order(F, 0.0, c)) == 3);
  const EigBound eb = eig_upper_bound(F, {{0, 1}, {1, 0}}, 0.0, c);
  CHECK(std::abs(eb.rho_min.slope - 6.0) <= 0.3);
  CHECK(std::abs(eb.rho_max.slope - 4.0) <= 0.3);
  REQUIRE(eb.bound);
  CHECK(*eb.bound == 3.0);
  const SuperfunctionReport sf = superfunction_sample(F, 0.0, 0.05, 4, c);
  CHECK(sf.certified);
  CHECK(eig_upper_bound(F, {}, 0.0, c).empty_set);
}

TEST_CASE("bad pair superfunction") {
  LadderConfig c;
  const GeneratorVector BP = bad_pair(bad_pair_default_g(4), 4);
  const TrigPolyMatrix v = bad_pair_v(4);
  CHECK(snapped(fsi_order(BP, 0.0, c)) == 4);
  const SuperfunctionReport sf = superfunction_sample(BP, 0.0, 0.05, 3, c, &v);
  REQUIRE(sf.candidate_degenerate);
  CHECK(*sf.candidate_degenerate);
}

TEST_CASE("refinable lower bound for B3") {
  const RefinableBound rb = refinable_lower_bound(bspline(3), 2.0, 6, LadderConfig{});
  CHECK(std::abs(rb.k - 3.0) <= 0.2);
  for (std::size_t m = 1; m < rb.lambda.size(); ++m) CHECK(rb.lambda[m] < rb.lambda[m - 1]);
}

TEST_CASE("dual extension satisfies the refinement identity") {
  TrigPolyMatrix P(1, 1, 1);
  P(0, 0) = bspline_mask(2);
  std::vector<std::pair<std::vector<double>, Eigen::VectorXcd>> v0;
  for (double w : {2.0, -2.5, 3.0}) v0.push_back({{w}, Eigen::VectorXcd::Constant(1, cplx(0.4, -1.0))});
  CHECK(dual_identity_residual(P, GeneratorVector({bspline(2)}), v0, 4, {{0}, {1}, {-2}}) < 1e-10);
  CHECK_THROWS_AS(dual_extend(P, {{{1.0}, Eigen::VectorXcd::Ones(2)}}, 2), DimensionMismatch);
}

TEST_CASE("ladder input checks") {
  CHECK_THROWS_AS(eig_upper_bound(fredrickson(), {{0, 1, 0}}, 0.0, LadderConfig{}), DimensionMismatch);
}
