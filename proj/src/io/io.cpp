#include "siapprox/io.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "siapprox/errors.hpp"
#include "siapprox/generators.hpp"

namespace sia::io {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

int to_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("expected an integer for " + what + ", got '" + s + "'");
  }
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

bool looks_like_json(const std::string& text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{' || c == '[';
  }
  return false;
}

template <class T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("field '") + key + "': " + e.what());
  }
}

// A rational string such as "3/8"; rejects malformed text and zero denominators.
mpq_class parse_rational(const std::string& text) {
  mpq_class q;
  if (q.set_str(text, 10) != 0 || q.get_den() == 0) throw InputError("bad rational '" + text + "'");
  q.canonicalize();
  return q;
}

std::string kind_of(const json& j) {
  if (!j.is_object()) throw InputError("expected a JSON object");
  return get<std::string>(j, "kind");
}

// Exact coefficient when given as a rational string or an integer.
std::optional<GaussQ> exact_from_json(const json& j) {
  auto rat = [](const json& x) -> std::optional<mpq_class> {
    if (x.is_number_integer()) return mpq_class(x.get<long>());
    if (x.is_string()) return parse_rational(x.get<std::string>());
    return std::nullopt;
  };
  if (j.is_array()) {
    if (j.size() != 2) throw InputError("complex numbers are [re, im]");
    auto re = rat(j[0]), im = rat(j[1]);
    if (re && im) return GaussQ(*re, *im);
    return std::nullopt;
  }
  if (auto r = rat(j)) return GaussQ(*r);
  return std::nullopt;
}

FourierSymbol single(const GeneratorInput& g, const std::string& what) {
  if (g.Phi.size() != 1) throw InputError(what + " needs a single generator");
  return g.Phi[0];
}

TrigPolyMatrix bspline_mask_matrix(int k, cplx scale) {
  if (k < 1) throw InputError("B-spline mask order must be positive");
  TrigPolyMatrix M(1, 1, 1);
  M(0, 0) = scale == cplx(1.0) ? bspline_mask(k) : bspline_mask(k).scaled(scale);
  return M;
}

json fit_directions(const std::vector<std::vector<double>>& d) { return d; }

}  // namespace

// ---- Scalars and matrices ----------------------------------------------------

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  auto num = [](const json& x) -> double {
    if (x.is_number()) return x.get<double>();
    if (x.is_string()) return parse_rational(x.get<std::string>()).get_d();
    throw InputError("expected a number");
  };
  if (j.is_array()) {
    if (j.size() != 2) throw InputError("complex numbers are [re, im]");
    return {num(j[0]), num(j[1])};
  }
  return num(j);
}

json trig_to_json(const TrigPoly& t) {
  json terms = json::array();
  for (const auto& [idx, c] : t.coeffs()) terms.push_back({{"j", idx}, {"c", complex_to_json(c)}});
  return {{"d", t.dim()}, {"terms", terms}};
}

TrigPoly trig_from_json(const json& j, int d) {
  const json& terms = j.is_array() ? j : j.at("terms");
  if (j.is_object() && j.contains("d") && j.at("d").get<int>() != d) throw DimensionMismatch("trig polynomial dimension");
  TrigPoly exact = TrigPoly(d).with_exact_from_doubles();
  TrigPoly flt(d);
  bool all_exact = true;
  for (const auto& t : terms) {
    const auto idx = get<std::vector<int>>(t, "j");
    if (static_cast<int>(idx.size()) != d) throw DimensionMismatch("trig term index has the wrong dimension");
    const LatticeIndex li(idx.begin(), idx.end());
    const json& c = t.at("c");
    if (auto q = exact_from_json(c); q && all_exact) {
      exact.set_exact(li, *q);
    } else {
      all_exact = false;
    }
    flt.set(li, flt.coeffs().count(li) ? flt.coeffs().at(li) + complex_from_json(c) : complex_from_json(c));
  }
  return all_exact ? exact : flt;
}

json trig_matrix_to_json(const TrigPolyMatrix& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int c = 0; c < M.cols(); ++c) row.push_back(trig_to_json(M(i, c))["terms"]);
    rows.push_back(row);
  }
  return {{"rows", M.rows()}, {"cols", M.cols()}, {"d", M.dim()}, {"entries", rows}};
}

TrigPolyMatrix trig_matrix_from_json(const json& j) {
  const int d = j.value("d", 1);
  const json& e = j.at("entries");
  const int rows = static_cast<int>(e.size());
  if (rows == 0) throw InputError("empty trig matrix");
  const int cols = static_cast<int>(e[0].size());
  TrigPolyMatrix M(rows, cols, d);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(e[i].size()) != cols) throw DimensionMismatch("ragged trig matrix");
    for (int c = 0; c < cols; ++c) M(i, c) = trig_from_json(e[i][c], d);
  }
  return M;
}

json matrix_to_json(const Eigen::MatrixXcd& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int c = 0; c < M.cols(); ++c) row.push_back(complex_to_json(M(i, c)));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXcd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InputError("matrix must be a non-empty array of rows");
  const int rows = static_cast<int>(j.size()), cols = static_cast<int>(j[0].size());
  Eigen::MatrixXcd M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols) throw DimensionMismatch("ragged matrix");
    for (int c = 0; c < cols; ++c) M(i, c) = complex_from_json(j[i][c]);
  }
  return M;
}

json polynomial_to_json(const Polynomial& p) {
  json coeffs = json::object();
  for (const auto& [a, c] : p.coeffs()) coeffs[a.str()] = complex_to_json(c);
  return {{"d", p.dim()}, {"coeffs", coeffs}, {"text", p.str()}};
}

// ---- Generators -------------------------------------------------------------

GeneratorInput generator_from_json(const json& j) {
  if (j.is_string()) return parse_generator(j.get<std::string>());
  const std::string kind = kind_of(j);
  GeneratorInput g;
  g.label = j.dump();
  if (kind == "bspline") {
    const int k = get<int>(j, "k");
    if (k < 1) throw InputError("B-spline order must be positive");
    const int d = j.value("d", 1);
    g.Phi = GeneratorVector({d == 1 ? bspline(k) : bspline_coord(d, j.value("coord", 0), k)});
  } else if (kind == "boxspline") {
    g.Phi = GeneratorVector({boxspline(get<std::vector<std::vector<int>>>(j, "dirs"))});
  } else if (kind == "fredrickson") {
    g.Phi = fredrickson();
  } else if (kind == "bad_pair" || kind == "badpair") {
    const int k = get<int>(j, "k");
    if (k < 1) throw InputError("bad-pair order must be positive");
    g.Phi = bad_pair(bad_pair_default_g(k), k);
    g.candidate = bad_pair_v(k);
  } else if (kind == "delta") {
    g.Phi = GeneratorVector({delta(j.value("d", 1))});
  } else if (kind == "convolve") {
    if (!j.contains("of")) throw InputError("convolve needs the field 'of'");
    const json& f = j.at("of");
    if (!f.is_array() || f.size() < 2) throw InputError("convolve needs at least two factors");
    FourierSymbol acc = single(generator_from_json(f[0]), "convolve");
    for (std::size_t i = 1; i < f.size(); ++i) acc = convolve(acc, single(generator_from_json(f[i]), "convolve"));
    g.Phi = GeneratorVector({acc});
  } else if (kind == "list") {
    std::vector<FourierSymbol> all;
    for (const auto& item : j.at("items"))
      for (const auto& e : generator_from_json(item).Phi.entries()) all.push_back(e);
    if (all.empty()) throw InputError("empty generator list");
    g.Phi = GeneratorVector(all);
  } else if (kind == "combine") {
    // psi^ = v* Phi^ for a trig vector v.
    const GeneratorInput base = generator_from_json(j.at("generators"));
    const TrigPolyMatrix v = j.contains("v") ? trig_matrix_from_json(j.at("v"))
                                             : (base.candidate ? *base.candidate : throw InputError("combine needs v"));
    if (v.rows() != base.Phi.size() || v.cols() != 1) throw DimensionMismatch("v must be n x 1");
    std::vector<FourierSymbol> terms;
    for (int i = 0; i < v.rows(); ++i)
      if (!v(i, 0).is_zero()) terms.push_back(FourierSymbol::trig(v(i, 0).adjoint()) * base.Phi[i]);
    if (terms.empty()) throw InputError("v is zero");
    g.Phi = GeneratorVector({terms.size() == 1 ? terms.front() : FourierSymbol::sum(terms)});
  } else {
    throw InputError("unknown generator kind '" + kind + "'");
  }
  return g;
}

GeneratorInput parse_generator(const std::string& text) {
  if (looks_like_json(text)) {
    GeneratorInput g = generator_from_json(parse_json(text));
    g.label = text;
    return g;
  }
  const auto parts = split(text, ':');
  if (parts.empty()) throw InputError("empty generator description");
  json j;
  const std::string& name = parts[0];
  if (name == "bspline" && parts.size() == 2) {
    j = {{"kind", "bspline"}, {"k", to_int(parts[1], "bspline:k")}};
  } else if (name == "boxspline" && parts.size() == 2 && parts[1] == "221") {
    j = {{"kind", "boxspline"}, {"dirs", {{1, 0}, {1, 0}, {0, 1}, {0, 1}, {1, 1}}}};
  } else if (name == "fredrickson" && parts.size() == 1) {
    j = {{"kind", "fredrickson"}};
  } else if (name == "badpair" && parts.size() == 2) {
    j = {{"kind", "bad_pair"}, {"k", to_int(parts[1], "badpair:k")}};
  } else if (name == "delta" && parts.size() <= 2) {
    j = {{"kind", "delta"}, {"d", parts.size() == 2 ? to_int(parts[1], "delta:d") : 1}};
  } else {
    throw InputError("unknown generator alias '" + text + "'");
  }
  GeneratorInput g = generator_from_json(j);
  g.label = text;
  return g;
}

// ---- Masks ------------------------------------------------------------------

Mask mask_from_json(const json& j) {
  if (j.is_string()) return parse_mask(j.get<std::string>());
  const std::string kind = kind_of(j);
  if (kind == "bspline") {
    const cplx scale = j.contains("scale") ? complex_from_json(j.at("scale")) : cplx(1.0);
    return Mask(bspline_mask_matrix(get<int>(j, "k"), scale));
  }
  if (kind == "diag") {
    const auto ks = get<std::vector<int>>(j, "k");
    if (ks.empty()) throw InputError("diag needs at least one order");
    const int r = static_cast<int>(ks.size());
    TrigPolyMatrix M(r, r, 1);
    for (int i = 0; i < r; ++i) {
      for (int c = 0; c < r; ++c) M(i, c) = TrigPoly(1);
      M(i, i) = bspline_mask_matrix(ks[static_cast<std::size_t>(i)], 1.0)(0, 0);
    }
    return Mask(M);
  }
  if (kind == "trig") return Mask(trig_matrix_from_json(j.at("matrix")));
  if (kind == "jets") {
    const int r = get<int>(j, "r"), d = get<int>(j, "d");
    std::map<MultiIndex, Eigen::MatrixXcd> jets;
    for (const auto& e : j.at("jets")) {
      const auto a = get<std::vector<int>>(e, "a");
      if (static_cast<int>(a.size()) != d) throw DimensionMismatch("jet index has the wrong dimension");
      const Eigen::MatrixXcd m = matrix_from_json(e.at("m"));
      if (m.rows() != r || m.cols() != r) throw DimensionMismatch("jet block must be r x r");
      MultiIndex mi(d);
      for (int t = 0; t < d; ++t) mi[t] = a[static_cast<std::size_t>(t)];
      jets[mi] = m;
    }
    return Mask::from_jets(r, d, std::move(jets));
  }
  if (kind == "counterexample") return counterexample_mask();
  throw InputError("unknown mask kind '" + kind + "'");
}

Mask parse_mask(const std::string& text) {
  if (looks_like_json(text)) return mask_from_json(parse_json(text));
  const auto parts = split(text, ':');
  if (parts.size() == 2 && parts[0] == "bspline") return mask_from_json({{"kind", "bspline"}, {"k", to_int(parts[1], "bspline:k")}});
  if (parts.size() == 2 && parts[0] == "diag") {
    std::vector<int> ks;
    for (const auto& s : split(parts[1], ',')) ks.push_back(to_int(s, "diag:k"));
    return mask_from_json({{"kind", "diag"}, {"k", ks}});
  }
  if (text == "counterexample") return counterexample_mask();
  throw InputError("unknown mask alias '" + text + "'");
}

// ---- Run configuration --------------------------------------------------------

LadderConfig RunConfig::ladder() const {
  LadderConfig c;
  c.bracket.lattice_radius = lattice_radius;
  c.bracket.radius_cap = radius_cap;
  c.bracket.tolerance = tolerance;
  c.bracket.s = s;
  c.decay.n_directions = n_directions;
  return c;
}

EmpiricalConfig RunConfig::empirical() const {
  EmpiricalConfig c;
  c.bracket = ladder().bracket;
  return c;
}

json to_json(const RunConfig& c) {
  return {{"command", c.command},       {"generator", c.generator},     {"mask", c.mask},
          {"s", c.s},                   {"k_max", c.k_max},             {"k", c.k},
          {"lattice_radius", c.lattice_radius}, {"radius_cap", c.radius_cap}, {"tolerance", c.tolerance},
          {"n_directions", c.n_directions}, {"h_min_exp", c.h_min_exp}, {"h_max_exp", c.h_max_exp},
          {"s_grid", c.s_grid},         {"index_set", c.index_set},     {"sf_radius", c.sf_radius},
          {"sf_grid", c.sf_grid},       {"v", c.v},                     {"a", c.a},
          {"out", c.out},               {"csv", c.csv}};
}

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw InputError("run configuration must be a JSON object");
  RunConfig c;
  const json known = to_json(c);
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw InputError("unknown configuration field '" + key + "'");
    const json& ref = known.at(key);
    const bool ok = (ref.is_string() && value.is_string()) || (ref.is_number_integer() && value.is_number_integer()) ||
                    (ref.is_number_float() && value.is_number()) || (ref.is_array() && value.is_array());
    if (!ok) throw InputError("configuration field '" + key + "' has the wrong type");
  }
  try {
    c.command = j.value("command", c.command);
    c.generator = j.value("generator", c.generator);
    c.mask = j.value("mask", c.mask);
    c.s = j.value("s", c.s);
    c.k_max = j.value("k_max", c.k_max);
    c.k = j.value("k", c.k);
    c.lattice_radius = j.value("lattice_radius", c.lattice_radius);
    c.radius_cap = j.value("radius_cap", c.radius_cap);
    c.tolerance = j.value("tolerance", c.tolerance);
    c.n_directions = j.value("n_directions", c.n_directions);
    c.h_min_exp = j.value("h_min_exp", c.h_min_exp);
    c.h_max_exp = j.value("h_max_exp", c.h_max_exp);
    c.s_grid = j.value("s_grid", c.s_grid);
    c.index_set = j.value("index_set", c.index_set);
    c.sf_radius = j.value("sf_radius", c.sf_radius);
    c.sf_grid = j.value("sf_grid", c.sf_grid);
    c.v = j.value("v", c.v);
    c.a = j.value("a", c.a);
    c.out = j.value("out", c.out);
    c.csv = j.value("csv", c.csv);
  } catch (const json::exception& e) {
    throw InputError(std::string("run configuration: ") + e.what());
  }
  return c;
}

// ---- Reports ------------------------------------------------------------------

namespace {

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

json to_json(const DecayFit& f) {
  json j = {{"slope", finite_or_null(f.slope)}, {"residual", finite_or_null(f.residual)},
            {"infinite", f.infinite},          {"radii", f.radii},
            {"directions", fit_directions(f.directions)}};
  json prof = json::array();
  for (double p : f.profile) prof.push_back(finite_or_null(p));
  j["profile"] = prof;
  j["snapped"] = f.snapped ? json(*f.snapped) : json(nullptr);
  return j;
}

json to_json(const OrderEstimate& e) {
  return {{"s", e.s},
          {"order", finite_or_null(e.order)},
          {"snapped_order", e.snapped_order ? json(*e.snapped_order) : json(nullptr)},
          {"degenerate_at_origin", e.degenerate_at_origin},
          {"tail_warning", e.tail_warning},
          {"divergent", e.divergent},
          {"warnings", e.warnings},
          {"fit", to_json(e.fit)}};
}

json to_json(const SFReport& r) {
  json pts = json::array();
  for (const auto& p : r.points) pts.push_back({{"n", p.n}, {"order", p.order}, {"exact", p.exact}});
  return {{"order", r.order}, {"max_k", r.max_k}, {"all_exact", r.all_exact}, {"points", pts}};
}

json to_json(const EigBound& b) {
  return {{"rho_min", to_json(b.rho_min)},
          {"rho_max", to_json(b.rho_max)},
          {"bound", b.bound ? json(*b.bound) : json(nullptr)},
          {"empty_set", b.empty_set}};
}

json to_json(const SuperfunctionReport& r) {
  json j = {{"points", r.points.size()}, {"min_abs", r.min_abs}, {"threshold", r.threshold},
            {"certified", r.certified}};
  if (r.candidate_value) j["candidate_value"] = *r.candidate_value;
  if (r.candidate_degenerate) j["candidate_degenerate"] = *r.candidate_degenerate;
  return j;
}

json to_json(const CoherentReport& r) {
  return {{"estimate", to_json(r.estimate)},
          {"full_form", to_json(r.full_form)},
          {"truncated_form", to_json(r.truncated_form)},
          {"regular", r.regular},
          {"degenerate", r.degenerate}};
}

json to_json(const MembershipReport& r) {
  json blocks = json::array();
  for (const auto& b : r.blocks) blocks.push_back(b.str());
  json res = json::array();
  for (const auto& m : r.results) res.push_back({{"operator", m.name}, {"residual", m.residual}, {"member", m.member}});
  return {{"order", r.order == GradedOrder::Ascending ? "ascending" : "descending"},
          {"blocks", blocks},
          {"results", res}};
}

json to_json(const QIScheme& s) {
  json g = json::object(), c = json::object();
  for (const auto& [a, p] : s.g) g[a.str()] = polynomial_to_json(p);
  for (const auto& [a, v] : s.c) c[a.str()] = complex_to_json(v);
  return {{"k", s.k},
          {"d", s.d},
          {"g", g},
          {"c", c},
          {"normalization", complex_to_json(s.normalization)},
          {"provenance", s.provenance},
          {"residual", s.residual},
          {"reproduces", s.reproduces()},
          {"warnings", s.warnings}};
}

json to_json(const ErrorCurve& c) {
  return {{"h", c.h},           {"err2", c.err2},         {"fitted", c.fitted},     {"slope", c.slope},
          {"intercept", c.intercept}, {"residual", c.residual}, {"n_fit", c.n_fit}, {"warnings", c.warnings}};
}

std::string curve_csv(const ErrorCurve& c) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << "h,err2,fitted\n";
  const std::size_t first = c.h.size() - c.fitted.size();
  for (std::size_t i = 0; i < c.h.size(); ++i) {
    os << c.h[i] << ',' << c.err2[i] << ',';
    if (i >= first) os << c.fitted[i - first];
    os << '\n';
  }
  return os.str();
}

}  // namespace sia::io
