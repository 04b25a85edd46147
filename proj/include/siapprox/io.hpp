#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "siapprox/empirical.hpp"
#include "siapprox/ladder.hpp"
#include "siapprox/quasi_interp.hpp"
#include "siapprox/refinement.hpp"

namespace sia::io {

using json = nlohmann::json;

// A parsed generator description. `candidate` carries a natural supervector when the
// input names one (the bad pair), `label` echoes the input.
struct GeneratorInput {
  GeneratorVector Phi;
  std::optional<TrigPolyMatrix> candidate;
  std::string label;
};

// Accepts JSON objects or the aliases bspline:k, boxspline:221, fredrickson,
// badpair:k and delta:d. Throws InputError on anything else.
GeneratorInput parse_generator(const std::string& text);
GeneratorInput generator_from_json(const json& j);

// Accepts JSON objects or the aliases bspline:k, diag:k1,k2,... and counterexample.
Mask parse_mask(const std::string& text);
Mask mask_from_json(const json& j);

// Complex numbers are written as [re, im]; inputs may also be plain numbers or
// rational strings such as "3/8", which keep trig polynomials exact.
json complex_to_json(cplx z);
cplx complex_from_json(const json& j);

// {"d": d, "terms": [{"j": [...], "c": ...}, ...]}
json trig_to_json(const TrigPoly& t);
TrigPoly trig_from_json(const json& j, int d);
// {"rows": r, "cols": c, "d": d, "entries": [[trig, ...], ...]}
json trig_matrix_to_json(const TrigPolyMatrix& M);
TrigPolyMatrix trig_matrix_from_json(const json& j);
json matrix_to_json(const Eigen::MatrixXcd& M);
Eigen::MatrixXcd matrix_from_json(const json& j);

json polynomial_to_json(const Polynomial& p);

// ---- Run configuration -----------------------------------------------------

struct RunConfig {
  std::string command;
  std::string generator;  // JSON or alias
  std::string mask;       // JSON or alias
  double s = 0.0;
  int k_max = 4;
  int k = 2;
  int lattice_radius = 8;
  int radius_cap = 0;
  double tolerance = 1e-6;
  int n_directions = 0;
  int h_min_exp = 3;  // h = 2^-h_min_exp .. 2^-h_max_exp
  int h_max_exp = 8;
  std::vector<double> s_grid{-1.0, 0.0, 0.5};
  std::vector<std::vector<int>> index_set;  // analyze-fsi I; empty selects the unit vectors
  double sf_radius = 0.5;
  int sf_grid = 4;
  std::string v;  // optional trig vector JSON
  std::string a;  // optional coefficient sequences JSON for quasi-interp
  std::string out;
  std::string csv;

  LadderConfig ladder() const;
  EmpiricalConfig empirical() const;
};

json to_json(const RunConfig& c);
// Rejects unknown fields and type mismatches with InputError.
RunConfig run_config_from_json(const json& j);

// ---- Reports ---------------------------------------------------------------

json to_json(const DecayFit& f);
json to_json(const OrderEstimate& e);
json to_json(const SFReport& r);
json to_json(const EigBound& b);
json to_json(const SuperfunctionReport& r);
json to_json(const CoherentReport& r);
json to_json(const MembershipReport& r);
json to_json(const QIScheme& s);
json to_json(const ErrorCurve& c);

// h, err2, fitted (empty for points outside the fitted tail).
std::string curve_csv(const ErrorCurve& c);

}  // namespace sia::io
