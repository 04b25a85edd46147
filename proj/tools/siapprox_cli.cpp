#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "siapprox/errors.hpp"
#include "siapprox/io.hpp"

using namespace sia;
using io::json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

double best_order(const OrderEstimate& e) { return e.snapped_order ? *e.snapped_order : e.order; }

json run_psi(const io::RunConfig& c) {
  const io::GeneratorInput g = io::parse_generator(c.generator);
  if (g.Phi.size() != 1) throw InputError("analyze-psi needs a single generator; use analyze-fsi");
  const FourierSymbol& phi = g.Phi[0];
  const LadderConfig lc = c.ladder();
  json r;
  try {
    r["sf"] = io::to_json(sf_order(phi, std::max(c.k_max, 8)));
  } catch (const InconclusiveAtDegree& e) {
    r["sf"] = {{"inconclusive", true}, {"message", e.what()}};
  }
  const OrderEstimate est = psi_order(phi, c.s, lc);
  r["order"] = std::isfinite(best_order(est)) ? json(best_order(est)) : json(nullptr);
  r["estimate"] = io::to_json(est);
  const ConsistencyReport cons = psi_order_consistency(phi, c.s_grid, lc);
  json rows = json::array();
  for (const auto& row : cons.rows) rows.push_back({{"s", row.s}, {"order", std::isfinite(row.order) ? json(row.order) : json(nullptr)}});
  r["consistency"] = {{"rows", rows}, {"monotone", cons.monotone}};
  return r;
}

json run_fsi(const io::RunConfig& c) {
  const io::GeneratorInput g = io::parse_generator(c.generator);
  const LadderConfig lc = c.ladder();
  const int d = g.Phi.dim();
  std::vector<std::vector<int>> I = c.index_set;
  if (I.empty())
    for (int k = 0; k < d; ++k) {
      std::vector<int> e(static_cast<std::size_t>(d), 0);
      e[k] = 1;
      I.push_back(e);
    }
  std::optional<TrigPolyMatrix> cand = g.candidate;
  if (!c.v.empty()) cand = io::trig_matrix_from_json(json::parse(c.v));

  json r;
  const OrderEstimate est = fsi_order(g.Phi, c.s, lc);
  r["order"] = std::isfinite(best_order(est)) ? json(best_order(est)) : json(nullptr);
  r["estimate"] = io::to_json(est);
  const EigBound eb = eig_upper_bound(g.Phi, I, c.s, lc);
  r["eig_bound"] = io::to_json(eb);
  r["index_set"] = I;
  const SuperfunctionReport sf =
      superfunction_sample(g.Phi, c.s, c.sf_radius, c.sf_grid, lc, cand ? &*cand : nullptr);
  r["superfunction"] = io::to_json(sf);
  r["degenerate_superfunction"] = sf.candidate_degenerate.value_or(false);
  r["certified_exact"] = sf.certified && eb.bound && est.snapped_order &&
                         std::abs(*est.snapped_order - *eb.bound) <= 0.25;
  if (g.Phi.size() == 1) r["psi_order"] = io::to_json(psi_order(g.Phi[0], c.s, lc));
  return r;
}

json run_mask(const io::RunConfig& c) {
  const Mask P = io::parse_mask(c.mask);
  const LadderConfig lc = c.ladder();
  json r;
  r["r"] = P.r();
  r["d"] = P.d();
  json spec = json::array();
  for (int i = 0; i < P.spectrum().size(); ++i) spec.push_back(io::complex_to_json(P.spectrum()(i)));
  r["spectrum_P0"] = spec;
  r["N"] = dyadic_spectral_level(P);

  if (c.mask.find("counterexample") != std::string::npos) {
    Eigen::VectorXcd w(3);
    w << 0, 0, 2;
    json mem = json::array();
    for (auto ord : {GradedOrder::Ascending, GradedOrder::Descending})
      mem.push_back(io::to_json(range_membership(P, 2, {{MultiIndex{0, 1}, w}}, ord)));
    r["membership"] = mem;
  }

  if (!P.has_trig()) {
    // Only the jets at the origin are known, so the analysis stops at ker L.
    const int N = dyadic_spectral_level(P);
    r["dim_ker_L"] = N < 0 ? 0 : static_cast<int>(kernel_basis(assemble_L(P, N, GradedOrder::Ascending)).cols());
    r["jets_only"] = true;
    return r;
  }

  SolutionBasis sol;
  try {
    sol = solve_R(P);
  } catch (const ZeroSolutionOnly& e) {
    r["zero_solution_only"] = true;
    r["message"] = "zero solution only";
    return r;
  }
  r["zero_solution_only"] = false;
  r["dim_R"] = sol.size();
  r["phi0"] = io::matrix_to_json(sol.values_at_zero());
  const ZkSolution z = max_Zk_solve(P, c.k_max, &sol);
  r["k_star"] = z.k_star;
  if (z.v) r["v"] = io::trig_matrix_to_json(*z.v);
  r["phi0_pairing"] = z.phi0_pairing;
  if (P.has_trig()) {
    const CoherentReport co = coherent_order(sol, c.s, lc);
    r["coherent"] = io::to_json(co);
  }
  if (!c.v.empty()) {
    const TrigPolyMatrix v = io::trig_matrix_from_json(json::parse(c.v));
    const ZkReport zr = condition_Zk(P, v, c.k);
    r["check"] = {{"k", c.k},
                  {"Zk", zr.pass},
                  {"degenerate_v", zr.degenerate_v},
                  {"exact", zr.exact},
                  {"sum_rules_v1", sum_rules_check(P, v, c.k, 1).pass},
                  {"sum_rules_v2", sum_rules_check(P, v, c.k, 2).pass}};
  }
  return r;
}

json run_qi(const io::RunConfig& c) {
  const io::GeneratorInput g = io::parse_generator(c.generator);
  QIScheme s;
  if (g.Phi.size() == 1 && c.a.empty()) {
    s = qi_psi(g.Phi[0], c.k);
  } else {
    std::vector<std::map<LatticeIndex, cplx>> a;
    if (c.a.empty()) {
      a.assign(static_cast<std::size_t>(g.Phi.size()), {{LatticeIndex(static_cast<std::size_t>(g.Phi.dim()), 0), 1.0}});
    } else {
      // [[{"j": [..], "c": ..}, ...], ...], one list per generator.
      const json aj = json::parse(c.a);
      for (const auto& seq : aj) {
        std::map<LatticeIndex, cplx> m;
        for (const auto& t : seq) {
          const auto j = t.at("j").get<std::vector<int>>();
          m[LatticeIndex(j.begin(), j.end())] = io::complex_from_json(t.at("c"));
        }
        a.push_back(m);
      }
    }
    s = qi_fsi(g.Phi, a, c.k);
  }
  return {{"scheme", io::to_json(s)}};
}

json run_empirical(const io::RunConfig& c) {
  const io::GeneratorInput g = io::parse_generator(c.generator);
  if (c.h_min_exp < 0 || c.h_max_exp < c.h_min_exp + 1) throw InputError("grid must be a:b with 0 <= a < b");
  std::vector<double> h;
  for (int j = c.h_min_exp; j <= c.h_max_exp; ++j) h.push_back(std::ldexp(1.0, -j));
  const int n_fit = std::min<int>(4, static_cast<int>(h.size()));
  const ErrorCurve curve = order_curve(TestFunction::bump(g.Phi.dim()), g.Phi, c.s, c.empirical(), h, n_fit);
  if (!c.csv.empty()) write_file(c.csv, io::curve_csv(curve));
  return {{"slope", curve.slope}, {"curve", io::to_json(curve)}};
}

struct Flags {
  std::string config, generator, mask, grid, s_grid, index_set, v, a, out, csv;
  double s = 0, tol = 0, sf_radius = 0;
  int k_max = 0, k = 0, radius = 0, radius_cap = 0, directions = 0, sf_grid = 0;
};

void add_flags(CLI::App* sub, Flags& f, std::vector<std::pair<CLI::Option*, std::function<void(io::RunConfig&)>>>& opts) {
  auto add = [&](CLI::Option* o, std::function<void(io::RunConfig&)> apply) { opts.emplace_back(o, std::move(apply)); };
  sub->add_option("--config", f.config, "JSON run configuration file");
  add(sub->add_option("--generator", f.generator, "generator JSON or alias"), [&](auto& c) { c.generator = f.generator; });
  add(sub->add_option("--mask", f.mask, "mask JSON or alias"), [&](auto& c) { c.mask = f.mask; });
  add(sub->add_option("--s", f.s, "Sobolev index"), [&](auto& c) { c.s = f.s; });
  add(sub->add_option("--kmax", f.k_max, "largest order searched"), [&](auto& c) { c.k_max = f.k_max; });
  add(sub->add_option("--k", f.k, "scheme or condition order"), [&](auto& c) { c.k = f.k; });
  add(sub->add_option("--radius", f.radius, "initial lattice radius"), [&](auto& c) { c.lattice_radius = f.radius; });
  add(sub->add_option("--radius-cap", f.radius_cap, "largest lattice radius"), [&](auto& c) { c.radius_cap = f.radius_cap; });
  add(sub->add_option("--tol", f.tol, "tail tolerance"), [&](auto& c) { c.tolerance = f.tol; });
  add(sub->add_option("--directions", f.directions, "number of fit directions"),
      [&](auto& c) { c.n_directions = f.directions; });
  add(sub->add_option("--grid", f.grid, "h exponents a:b for h = 2^-a .. 2^-b"), [&](auto& c) {
    const auto colon = f.grid.find(':');
    if (colon == std::string::npos) throw InputError("grid must be a:b");
    try {
      c.h_min_exp = std::stoi(f.grid.substr(0, colon));
      c.h_max_exp = std::stoi(f.grid.substr(colon + 1));
    } catch (const std::exception&) {
      throw InputError("grid must be a:b");
    }
  });
  add(sub->add_option("--s-grid", f.s_grid, "comma separated s values for the consistency table"), [&](auto& c) {
    c.s_grid.clear();
    std::stringstream ss(f.s_grid);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        c.s_grid.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw InputError("bad s value '" + item + "'");
      }
    }
  });
  add(sub->add_option("--I", f.index_set, "index set as JSON list of integer vectors"),
      [&](auto& c) { c.index_set = json::parse(f.index_set).get<std::vector<std::vector<int>>>(); });
  add(sub->add_option("--sf-radius", f.sf_radius, "superfunction sampling radius"), [&](auto& c) { c.sf_radius = f.sf_radius; });
  add(sub->add_option("--sf-grid", f.sf_grid, "superfunction grid cells per dimension"), [&](auto& c) { c.sf_grid = f.sf_grid; });
  add(sub->add_option("--v", f.v, "trig vector JSON"), [&](auto& c) { c.v = f.v; });
  add(sub->add_option("--a", f.a, "coefficient sequences JSON"), [&](auto& c) { c.a = f.a; });
  add(sub->add_option("--out", f.out, "write the JSON report here"), [&](auto& c) { c.out = f.out; });
  add(sub->add_option("--csv", f.csv, "write the error curve here"), [&](auto& c) { c.csv = f.csv; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximation orders of shift-invariant spaces"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<std::vector<std::pair<CLI::Option*, std::function<void(io::RunConfig&)>>>> opts(5);
  const std::vector<std::pair<std::string, std::function<json(const io::RunConfig&)>>> commands = {
      {"analyze-psi", run_psi},       {"analyze-fsi", run_fsi}, {"analyze-mask", run_mask},
      {"quasi-interp", run_qi},       {"empirical", run_empirical}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, fn] : commands) {
    subs.push_back(app.add_subcommand(name));
    add_flags(subs.back(), flags, opts[subs.size() - 1]);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    io::RunConfig cfg;
    std::size_t which = 0;
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) which = i;
    if (!flags.config.empty()) {
      try {
        cfg = io::run_config_from_json(json::parse(read_file(flags.config)));
      } catch (const json::parse_error& e) {
        throw InputError(std::string("config: ") + e.what());
      }
    }
    cfg.command = commands[which].first;
    for (auto& [opt, apply] : opts[which])
      if (opt->count() > 0) apply(cfg);
    if (cfg.command == "analyze-mask" ? cfg.mask.empty() : cfg.generator.empty())
      throw InputError(cfg.command == "analyze-mask" ? "--mask is required" : "--generator is required");

    json report = commands[which].second(cfg);
    report["command"] = cfg.command;
    report["config"] = io::to_json(cfg);
    const std::string text = report.dump(2);
    if (cfg.out.empty())
      std::cout << text << "\n";
    else
      write_file(cfg.out, text + "\n");
    return 0;
  } catch (const InputError& e) {
    std::cerr << json({{"error", "input"}, {"message", e.what()}}).dump() << "\n";
    return kExitInput;
  } catch (const DimensionMismatch& e) {
    std::cerr << json({{"error", "input"}, {"message", e.what()}}).dump() << "\n";
    return kExitInput;
  } catch (const json::exception& e) {
    std::cerr << json({{"error", "input"}, {"message", e.what()}}).dump() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << json({{"error", "numerical"}, {"message", e.what()}}).dump() << "\n";
    return kExitNumeric;
  }
}
