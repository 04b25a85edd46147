#include <cmath>
#include <random>

#include "doctest.h"
#include "siapprox/empirical.hpp"
#include "siapprox/errors.hpp"
#include "siapprox/generators.hpp"

using namespace sia;

TEST_CASE("members of the space have zero distance") {
  const ProjectionError e = projection_error(TestFunction::from_symbol(bspline(2)), GeneratorVector({bspline(2)}), 1.0, 0.0);
  CHECK(e.err2 <= 1e-8);
}

TEST_CASE("band-limited and general routes agree") {
  const TestFunction f = TestFunction::bump(1);
  const TestFunction g = TestFunction::from_symbol(f.fhat);
  const GeneratorVector B2({bspline(2)});
  // The general route integrates over the whole cell, so it only resolves the bump
  // as well as the band-limited route when h = 1.
  const double a = projection_error(f, B2, 1.0, 0.0).err2;
  const double b = projection_error(g, B2, 1.0, 0.0).err2;
  CHECK(std::abs(a - b) <= 1e-8 * a);
}

TEST_CASE("projection is optimal") {
  const TestFunction f = TestFunction::bump(1);
  const GeneratorVector B2({bspline(2)});
  const double base = projection_error(f, B2, 1.0, 0.0).err2;
  std::mt19937 rng(11);
  std::normal_distribution<double> N(0.0, 0.3);
  for (int t = 0; t < 5; ++t) {
    TrigPoly p(1);
    for (int j = -2; j <= 2; ++j) p.set({j}, cplx(N(rng), N(rng)));
    const double e = perturbed_error(f, B2, 1.0, 0.0, TrigPolyMatrix::column({p})).err2;
    CHECK(e >= base * (1.0 - 1e-10));
    CHECK(e > base + 1e-8);
  }
}

TEST_CASE("B-spline ladders converge at their analytic order") {
  const TestFunction f = TestFunction::bump(1);
  for (int k = 1; k <= 3; ++k) {
    const ErrorCurve c = order_curve(f, GeneratorVector({bspline(k)}), 0.0);
    CHECK(c.slope == doctest::Approx(k).epsilon(0.15 / k));
    for (std::size_t i = 1; i < c.err2.size(); ++i) CHECK(c.err2[i] <= c.err2[i - 1]);
    CHECK(c.fitted.size() == 4);
  }
}

TEST_CASE("Sobolev weights shift the exponent") {
  const TestFunction f = TestFunction::bump(1);
  const ErrorCurve c = order_curve(f, GeneratorVector({bspline(2)}), 0.5);
  CHECK(c.slope == doctest::Approx(1.5).epsilon(0.1));
}

TEST_CASE("delta generator does not approximate") {
  const ErrorCurve c = order_curve(TestFunction::bump(1), GeneratorVector({delta(1)}), 0.0);
  CHECK(std::abs(c.slope) < 0.05);
  CHECK(c.err2.front() > 0.01);
}

TEST_CASE("input validation") {
  const GeneratorVector B1({bspline(1)});
  CHECK_THROWS_AS(projection_error(TestFunction::bump(1), B1, 2.0, 0.0), InputError);
  CHECK_THROWS_AS(projection_error(TestFunction::bump(2), B1, 1.0, 0.0), DimensionMismatch);
  CHECK_THROWS_AS(order_curve(TestFunction::bump(1), B1, 0.0, {}, {0.5}, 4), InputError);
  CHECK_THROWS_AS(TestFunction::bump(1, 1.5), InputError);
}
