#include <cmath>

#include "doctest.h"
#include "siapprox/errors.hpp"
#include "siapprox/generators.hpp"
#include "siapprox/refinement.hpp"

using namespace sia;

namespace {

const double kPi = 3.14159265358979323846;

Mask scalar_mask(const TrigPoly& p) {
  TrigPolyMatrix M(1, 1, p.dim());
  M(0, 0) = p;
  return Mask(M);
}

// a + b e^{-i sign w} as a 1 x 1 column.
TrigPolyMatrix two_term(cplx a, cplx b, int sign) {
  TrigPoly v(1);
  v.set({0}, a);
  v.set({sign}, b);
  return TrigPolyMatrix::column({v});
}

}  // namespace

TEST_CASE("bspline masks have dyadic rational coefficients") {
  const TrigPoly m = bspline_mask(3);
  REQUIRE(m.has_exact());
  CHECK(std::abs(m.coeffs().at({0}) - 0.125) < 1e-15);
  CHECK(std::abs(m.coeffs().at({1}) - 0.375) < 1e-15);
  CHECK(std::abs(m.eval(std::vector<double>{kPi})) < 1e-15);
}

TEST_CASE("B2 mask reproduces the hat function") {
  const Mask P = scalar_mask(bspline_mask(2));
  CHECK(dyadic_spectral_level(P) == 0);
  const SolutionBasis sol = solve_R(P);
  REQUIRE(sol.size() == 1);
  CHECK(extension_residual(sol.jets0[0], P) < 1e-12);

  // The solution is normalized to Phi(0) = 1 and must match B2 hat everywhere.
  const FourierSymbol b2 = bspline(2);
  const Jet ref = b2.jet_at(std::vector<double>{0.0}, 6);
  for (int i = 0; i <= 6; ++i) CHECK(std::abs(ref[i] - sol.jets0[0][0][i]) < 1e-12);
  for (double w : {0.3, 2.0, 7.0, 50.0, 1000.0})
    CHECK(std::abs(sol.generator(0)[0].eval1(w) - b2.eval1(w)) < 1e-12);
  CHECK(sol.generator(0)[0].decay() == doctest::Approx(2.0));
  CHECK(sol.generator(0)[0].jet_at(std::vector<double>{2 * kPi}, 6).zero_order() == 2);
}

TEST_CASE("zero-solution masks are rejected") {
  // P(0) = 3 has no dyadic eigenvalue.
  const Mask P = scalar_mask(bspline_mask(2).scaled(3.0));
  CHECK(dyadic_spectral_level(P) == -1);
  CHECK_THROWS_AS(solve_R(P), ZeroSolutionOnly);
}

TEST_CASE("max_Zk_solve on B-spline masks") {
  for (int k = 1; k <= 4; ++k) {
    const Mask P = scalar_mask(bspline_mask(k));
    const ZkSolution z = max_Zk_solve(P, k + 2);
    CHECK(z.k_star == k);
    REQUIRE(z.v);
    CHECK(condition_Zk(P, *z.v, k).pass);
    CHECK_FALSE(condition_Zk(P, *z.v, k + 1).pass);
    CHECK(sum_rules_check(P, *z.v, k, 1).pass);
    CHECK(sum_rules_check(P, *z.v, k, 2).pass);
  }
  CHECK(max_Zk_solve(Mask(TrigPolyMatrix::identity(2, 1)), 3).k_star == 0);
}

TEST_CASE("hand-derived B2 supervectors") {
  const Mask P = scalar_mask(bspline_mask(2));
  const TrigPolyMatrix one = TrigPolyMatrix::column({TrigPoly::constant_exact(1, GaussQ(1))});
  const ZkReport z1 = condition_Zk(P, one, 1);
  CHECK(z1.pass);
  CHECK(z1.exact);
  CHECK_FALSE(condition_Zk(P, one, 2).pass);

  // v*(2w)P(w) - v*(w) with v* the pointwise conjugate: v = 2 - e^{iw} gives
  // (2 - e^{-2iw})(1 + e^{-iw})^2/4 - (2 - e^{-iw}) = O(w^2) at 0, O((w-pi)^2) at pi.
  const TrigPolyMatrix good = two_term(2.0, -1.0, -1);
  CHECK(condition_Zk(P, good, 2).pass);
  CHECK(sum_rules_check(P, good, 2, 1).pass);
  CHECK(sum_rules_check(P, good, 2, 2).pass);

  // Its conjugate 2 - e^{-iw} leaves -2iw at the origin, so it fails under this convention.
  const TrigPolyMatrix flipped = two_term(2.0, -1.0, 1);
  const ZkReport zf = condition_Zk(P, flipped, 2);
  CHECK_FALSE(zf.pass);
  CHECK(zf.orders.front().second == 1);
  CHECK_FALSE(sum_rules_check(P, flipped, 2, 1).pass);
  CHECK_FALSE(sum_rules_check(P, flipped, 2, 2).pass);
}

TEST_CASE("vectors vanishing at the origin are degenerate") {
  const Mask P = scalar_mask(bspline_mask(2));
  const TrigPolyMatrix v = two_term(1.0, -1.0, 1);
  const ZkReport z = condition_Zk(P, v, 1);
  CHECK(z.degenerate_v);
  CHECK_FALSE(z.pass);
  CHECK_FALSE(sum_rules_check(P, v, 1, 1).pass);
  CHECK_FALSE(sum_rules_check(P, v, 1, 2).pass);
  CHECK_THROWS_AS(sum_rules_check(P, v, 1, 3), InputError);
}

TEST_CASE("sum-rule versions agree on random instances") {
  const auto inst = random_zk_instances(24, 7);
  int passes = 0;
  for (const auto& I : inst) {
    const bool a = condition_Zk(I.P, I.v, I.k).pass;
    CHECK(a == sum_rules_check(I.P, I.v, I.k, 1).pass);
    CHECK(a == sum_rules_check(I.P, I.v, I.k, 2).pass);
    if (I.kind == "beyond") CHECK_FALSE(a);
    passes += a;
  }
  CHECK(passes > 4);
  CHECK(passes < 24);
}

TEST_CASE("counterexample range memberships") {
  const Mask P = counterexample_mask();
  CHECK(dyadic_spectral_level(P) == 2);
  const SolutionBasis sol = solve_R(P);
  CHECK(sol.size() >= 1);
  CHECK(sol.gens.empty());

  Eigen::VectorXcd w01(3);
  w01 << 0, 0, 2;
  for (auto ord : {GradedOrder::Ascending, GradedOrder::Descending}) {
    const MembershipReport rep = range_membership(P, 2, {{MultiIndex{0, 1}, w01}}, ord);
    REQUIRE(rep.results.size() == 3);
    CHECK(rep.results[1].member);
    CHECK(rep.results[2].member);
    // w also lies in ran L0*: an explicit preimage with a single (0,2) block.
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(rep.L0.rows());
    for (std::size_t i = 0; i < rep.blocks.size(); ++i)
      if (rep.blocks[i] == MultiIndex{0, 2}) x.segment(3 * static_cast<int>(i), 3) << 0, 1, -2;
    Eigen::VectorXcd target = Eigen::VectorXcd::Zero(rep.L0.rows());
    for (std::size_t i = 0; i < rep.blocks.size(); ++i)
      if (rep.blocks[i] == MultiIndex{0, 1}) target.segment(3 * static_cast<int>(i), 3) = w01;
    CHECK((rep.L0.adjoint() * x - target).norm() < 1e-12);
    CHECK(rep.results[0].member);
  }
}

TEST_CASE("coherent order of refinable vectors") {
  LadderConfig cfg;
  const SolutionBasis b2 = solve_R(scalar_mask(bspline_mask(2)));
  const CoherentReport rep = coherent_order(b2, 0.0, cfg);
  CHECK(rep.estimate.order == doctest::Approx(2.0).epsilon(0.01));
  CHECK(rep.regular);
  CHECK_FALSE(rep.degenerate);

  TrigPolyMatrix D(2, 2, 1);
  D(0, 0) = bspline_mask(1);
  D(1, 1) = bspline_mask(2);
  D(0, 1) = TrigPoly(1);
  D(1, 0) = TrigPoly(1);
  const SolutionBasis sd = solve_R(Mask(D));
  CHECK(coherent_order(sd, 0.0, cfg).estimate.order == doctest::Approx(2.0).epsilon(0.01));

  // Doubling the mask moves the eigenvalue to 2; the solution vanishes at 0.
  const SolutionBasis s2 = solve_R(scalar_mask(bspline_mask(2).scaled(2.0)));
  CHECK(s2.N == 1);
  CHECK(coherent_order(s2, 0.0, cfg).degenerate);
}

TEST_CASE("supervector form has a zero of order 2k") {
  LadderConfig cfg;
  cfg.bracket.tolerance = 1e-4;
  const Mask P = scalar_mask(bspline_mask(2));
  const SolutionBasis sol = solve_R(P);
  const ZkSolution z = max_Zk_solve(P, 3, &sol);
  REQUIRE(z.k_star == 2);
  CHECK(z.phi0_pairing > 0.5);
  CHECK(supervector_form_fit(sol, *z.v, 0.0, cfg).slope >= 4.0 - 0.2);
}

TEST_CASE("mask flattening") {
  TrigPolyMatrix Q(2, 2, 1);
  Q(0, 0) = bspline_mask(1);
  Q(1, 1) = bspline_mask(2);
  Q(0, 1) = TrigPoly(1);
  Q(1, 0) = TrigPoly(1);
  Q(0, 1).set({1}, 0.3);
  Q(0, 1).set({0}, -0.3);
  const Mask P(Q);
  for (int k = 1; k <= 3; ++k) CHECK(flatten_residual_order(P, flatten_mask(P, k), 5) >= k);
  CHECK_THROWS_AS(flatten_mask(scalar_mask(bspline_mask(2).scaled(2.0)), 2), AssumptionViolated);
}
