#include <cmath>

#include "doctest.h"
#include "siapprox/errors.hpp"
#include "siapprox/generators.hpp"
#include "siapprox/io.hpp"

using namespace sia;
using io::json;

TEST_CASE("run configuration round trip") {
  io::RunConfig c;
  c.command = "empirical";
  c.generator = "bspline:3";
  c.s = 0.5;
  c.k_max = 6;
  c.index_set = {{0, 1}, {1, 0}};
  c.s_grid = {0.0, 0.25};
  c.csv = "out.csv";
  const json j = io::to_json(c);
  const io::RunConfig b = io::run_config_from_json(j);
  CHECK(io::to_json(b) == j);
  CHECK(b.index_set == c.index_set);
  // Every field is materialized.
  CHECK(j.contains("lattice_radius"));
  CHECK(j.contains("tolerance"));
  CHECK(io::to_json(io::run_config_from_json(json::object())) == io::to_json(io::RunConfig{}));
}

TEST_CASE("run configuration rejects unknown fields and bad types") {
  CHECK_THROWS_AS(io::run_config_from_json(json{{"bogus", 1}}), InputError);
  CHECK_THROWS_AS(io::run_config_from_json(json{{"s", "zero"}}), InputError);
  CHECK_THROWS_AS(io::run_config_from_json(json::array()), InputError);
}

TEST_CASE("generator aliases match their JSON forms") {
  const std::vector<double> w{0.37, -1.2};
  const auto a = io::parse_generator("boxspline:221");
  const auto b = io::parse_generator(R"({"kind":"boxspline","dirs":[[1,0],[1,0],[0,1],[0,1],[1,1]]})");
  CHECK(std::abs(a.Phi[0].eval(w) - b.Phi[0].eval(w)) < 1e-14);
  CHECK(io::parse_generator("fredrickson").Phi.size() == 2);
  CHECK(io::parse_generator("delta:2").Phi.dim() == 2);
  const auto bp = io::parse_generator("badpair:4");
  CHECK(io::parse_generator(R"({"kind":"bad_pair","k":4})").candidate.has_value());
  CHECK(bp.Phi.size() == 2);
  CHECK(bp.candidate.has_value());
  const auto b2 = io::parse_generator(R"({"kind":"bspline","k":2})");
  CHECK(std::abs(b2.Phi[0].eval1(0.8) - bspline(2).eval1(0.8)) < 1e-15);
  const auto conv = io::parse_generator(R"({"kind":"convolve","of":["bspline:2","bspline:3"]})");
  CHECK(std::abs(conv.Phi[0].eval1(0.8) - bspline(5).eval1(0.8)) < 1e-12);
}

TEST_CASE("malformed inputs raise InputError") {
  CHECK_THROWS_AS(io::parse_generator("{bad"), InputError);
  CHECK_THROWS_AS(io::parse_generator("bspline:x"), InputError);
  CHECK_THROWS_AS(io::parse_generator(R"({"kind":"nope"})"), InputError);
  CHECK_THROWS_AS(io::parse_generator(R"({"kind":"bspline"})"), InputError);
  CHECK_THROWS_AS(io::parse_mask("unknown"), InputError);
  CHECK_THROWS_AS(io::complex_from_json(json("1/0")), InputError);
}

TEST_CASE("trig polynomials serialize exactly") {
  TrigPoly p(1);
  p.set({0}, 2.0);
  p.set({-1}, cplx(-1.0, 0.5));
  const TrigPoly q = io::trig_from_json(io::trig_to_json(p), 1);
  for (double w : {0.0, 0.4, 2.0}) CHECK(std::abs(p.eval(std::vector<double>{w}) - q.eval(std::vector<double>{w})) < 1e-15);
  // Rational strings keep the mask exact.
  const json m = json::parse(R"({"d":1,"terms":[{"j":[0],"c":"1/4"},{"j":[1],"c":"1/2"},{"j":[2],"c":"1/4"}]})");
  const TrigPoly r = io::trig_from_json(m, 1);
  CHECK(r.has_exact());
  CHECK(std::abs(r.eval(std::vector<double>{0.0}) - 1.0) < 1e-15);
}

TEST_CASE("masks from JSON and aliases") {
  const Mask a = io::parse_mask("bspline:2");
  const Mask b = io::parse_mask(R"({"kind":"trig","matrix":{"rows":1,"cols":1,"d":1,"entries":[[{"d":1,"terms":[{"j":[0],"c":"1/4"},{"j":[1],"c":"1/2"},{"j":[2],"c":"1/4"}]}]]}})");
  for (double w : {0.3, 2.0}) CHECK(std::abs(a.eval(std::vector<double>{w})(0, 0) - b.eval(std::vector<double>{w})(0, 0)) < 1e-15);
  const Mask c = io::parse_mask("counterexample");
  CHECK(c.r() == 3);
  CHECK(!c.has_trig());
  CHECK(io::parse_mask("diag:1,2").r() == 2);
}

TEST_CASE("error curve CSV") {
  ErrorCurve c;
  c.h = {0.5, 0.25};
  c.err2 = {1e-2, 2.5e-3};
  c.fitted = {2.5e-3};
  c.n_fit = 1;
  const std::string csv = io::curve_csv(c);
  CHECK(csv.rfind("h,err2,fitted\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
