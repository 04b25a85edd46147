// Acceptance run: one PASS/FAIL line per criterion, followed by a summary.
// Exits non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>

#include "siapprox/empirical.hpp"
#include "siapprox/errors.hpp"
#include "siapprox/generators.hpp"
#include "siapprox/ladder.hpp"
#include "siapprox/quasi_interp.hpp"
#include "siapprox/refinement.hpp"

using namespace sia;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

FourierSymbol m221() { return boxspline({{1, 0}, {1, 0}, {0, 1}, {0, 1}, {1, 1}}); }

double snapped_or(const OrderEstimate& e, double fallback = -1.0) {
  return e.snapped_order ? *e.snapped_order : fallback;
}

std::string fmt(double x, int prec = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, x);
  return buf;
}

std::string sci(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

Mask scalar_mask(const TrigPoly& p) {
  TrigPolyMatrix M(1, 1, p.dim());
  M(0, 0) = p;
  return Mask(M);
}

// a + b e^{-i j w} as a 1 x 1 column.
TrigPolyMatrix two_term(cplx a, cplx b, int j) {
  TrigPoly v(1);
  v.set({0}, a);
  v.set({j}, b);
  return TrigPolyMatrix::column({v});
}

// The M221 curve is shared by two criteria.
const ErrorCurve& m221_curve() {
  static const ErrorCurve c = order_curve(TestFunction::bump(2), GeneratorVector({m221()}), 0.0);
  return c;
}

Outcome bspline_family() {
  LadderConfig cfg;
  Outcome o{true, ""};
  std::ostringstream os;
  for (int k = 1; k <= 4; ++k) {
    const SFReport sf = sf_order(bspline(k), 8);
    const OrderEstimate e = psi_order(bspline(k), 0.0, cfg);
    const QIScheme q = qi_psi(bspline(k), k);
    const bool ok = sf.order == k && sf.all_exact && snapped_or(e) == k && e.fit.residual <= 0.1 && q.reproduces(1e-10);
    o.pass = o.pass && ok;
    os << (k > 1 ? "; " : "") << "B" << k << ": sf=" << sf.order << " psi=" << fmt(e.order)
       << " qi_res=" << sci(q.residual);
  }
  o.detail = os.str();
  return o;
}

Outcome box_spline() {
  const OrderEstimate e = psi_order(m221(), 0.0, LadderConfig{});
  const double slope = m221_curve().slope;
  return {snapped_or(e) == 3 && std::abs(slope - 3.0) <= 0.2,
          "analytic " + fmt(e.order) + ", empirical slope " + fmt(slope)};
}

Outcome fredrickson_pair() {
  LadderConfig cfg;
  const GeneratorVector F = fredrickson();
  const EigBound eb = eig_upper_bound(F, {{0, 1}, {1, 0}}, 0.0, cfg);
  const SuperfunctionReport sf = superfunction_sample(F, 0.0, 0.05, 4, cfg);
  const OrderEstimate e = fsi_order(F, 0.0, cfg);
  const bool ok = std::abs(eb.rho_min.slope - 6.0) <= 0.3 && std::abs(eb.rho_max.slope - 4.0) <= 0.3 && eb.bound &&
                  *eb.bound == 3.0 && sf.certified && snapped_or(e) == 3.0;
  return {ok, "rho_min " + fmt(eb.rho_min.slope) + ", rho_max " + fmt(eb.rho_max.slope) + ", bound " +
                  (eb.bound ? fmt(*eb.bound, 1) : std::string("none")) + ", certificate " +
                  (sf.certified ? "yes" : "no") + " (min " + fmt(sf.min_abs) + "), order " + fmt(e.order)};
}

Outcome convolution() {
  const OrderEstimate e = psi_order(convolve(bspline(2), bspline(3)), 0.0, LadderConfig{});
  return {std::abs(e.order - 5.0) <= 0.2, "order(B2*B3) = " + fmt(e.order)};
}

Outcome counterexample() {
  const Mask P = counterexample_mask();
  const int N = dyadic_spectral_level(P);
  Eigen::VectorXcd w(3);
  w << 0, 0, 2;
  bool ok = false;
  std::ostringstream os;
  os << "N=" << N;
  for (auto ord : {GradedOrder::Ascending, GradedOrder::Descending}) {
    const MembershipReport r = range_membership(P, 2, {{MultiIndex{0, 1}, w}}, ord);
    bool l0_out = false, lj_in = true;
    os << "; " << (ord == GradedOrder::Ascending ? "ascending" : "descending") << ":";
    for (const auto& m : r.results) {
      os << " " << m.name << (m.member ? " in" : " out") << " (" << sci(m.residual) << ")";
      if (m.name == "L0")
        l0_out = m.residual >= 0.1;
      else
        lj_in = lj_in && m.residual <= 1e-8;
    }
    ok = ok || (l0_out && lj_in);
  }
  return {ok && N == 2, os.str()};
}

Outcome sum_rule_equivalence() {
  const auto inst = random_zk_instances(50, 12345);
  int agree = 0, passes = 0;
  for (const auto& I : inst) {
    const bool a = condition_Zk(I.P, I.v, I.k).pass;
    const bool b = sum_rules_check(I.P, I.v, I.k, 1).pass;
    const bool c = sum_rules_check(I.P, I.v, I.k, 2).pass;
    agree += (a == b && b == c);
    passes += a;
  }
  return {agree == static_cast<int>(inst.size()),
          std::to_string(agree) + "/" + std::to_string(inst.size()) + " agree, " + std::to_string(passes) +
              " satisfy Z_k"};
}

Outcome mask_solver() {
  std::ostringstream os;
  bool ok = true;
  for (int k = 1; k <= 3; ++k) {
    const ZkSolution z = max_Zk_solve(scalar_mask(bspline_mask(k)), 6);
    os << (k > 1 ? " " : "") << "k*(B" << k << ")=" << z.k_star;
    ok = ok && z.k_star == k;
  }
  const Mask B2 = scalar_mask(bspline_mask(2));
  // 2 - e^{-iw}: the coefficient of e^{-iw} sits at j = 1.
  const ZkReport stated = condition_Zk(B2, two_term(2.0, -1.0, 1), 2);
  const ZkReport conj = condition_Zk(B2, two_term(2.0, -1.0, -1), 2);
  ok = ok && stated.pass;
  os << "; 2-e^{-iw}: Z_2 " << (stated.pass ? "pass" : "fail");
  for (const auto& [l, ord] : stated.orders) os << " (order " << ord << " at pi*" << l[0] << ")";
  os << "; diagnostic 2-e^{iw}: Z_2 " << (conj.pass ? "pass" : "fail");
  return {ok, os.str()};
}

Outcome zero_order_property() {
  const auto inst = random_zk_instances(50, 12345);
  int checked = 0, good = 0;
  double worst = 1e300;
  for (const auto& I : inst) {
    const ZkReport z = condition_Zk(I.P, I.v, I.k);
    if (!z.pass || z.degenerate_v) continue;
    const SolutionBasis S = solve_R(I.P);
    LadderConfig cfg;
    cfg.bracket.tolerance = 1e-4;
    if (I.P.d() == 2) cfg.decay.n_directions = 4;
    const DecayFit f = supervector_form_fit(S, I.v, 0.0, cfg);
    const double margin = f.infinite ? 1e300 : f.slope - (2.0 * I.k - 0.2);
    ++checked;
    good += margin >= 0.0;
    worst = std::min(worst, margin);
  }
  return {checked > 0 && good == checked,
          std::to_string(good) + "/" + std::to_string(checked) + " forms reach 2k-0.2, worst margin " + fmt(worst)};
}

Outcome bad_superfunction() {
  LadderConfig cfg;
  const GeneratorVector BP = bad_pair(bad_pair_default_g(4), 4);
  const TrigPolyMatrix v = bad_pair_v(4);
  const FourierSymbol psi = FourierSymbol::sum({FourierSymbol::trig(v(0, 0).adjoint()) * BP[0],
                                                FourierSymbol::trig(v(1, 0).adjoint()) * BP[1]});
  const SFReport sf = sf_order(psi, 8, 1);
  bool zeros = true;
  std::ostringstream os;
  for (const auto& p : sf.points) {
    const bool wanted = (p.n == std::vector<int>{1, 0}) || (p.n == std::vector<int>{0, 1}) ||
                        (p.n == std::vector<int>{1, 1});
    if (!wanted) continue;
    zeros = zeros && p.order >= 6;
    os << "order " << (p.order > 8 ? std::string(">8") : std::to_string(p.order)) << " at 2pi(" << p.n[0] << ","
       << p.n[1] << "); ";
  }
  const OrderEstimate e = psi_order(psi, 0.0, cfg);
  const SuperfunctionReport s = superfunction_sample(BP, 0.0, 0.05, 3, cfg, &v);
  const bool degenerate = s.candidate_degenerate.value_or(false);
  os << "psi order " << fmt(e.order) << ", degenerate " << (degenerate ? "yes" : "no");
  return {zeros && snapped_or(e) == 4 && degenerate, os.str()};
}

Outcome sobolev_consistency() {
  const ConsistencyReport r = psi_order_consistency(bspline(2), {-1.0, 0.0, 0.5}, LadderConfig{});
  bool ok = r.monotone;
  std::ostringstream os;
  for (const auto& row : r.rows) {
    ok = ok && std::abs(row.order - 2.0) <= 0.15;
    os << "s=" << row.s << ": " << fmt(row.order) << "; ";
  }
  os << "monotone " << (r.monotone ? "yes" : "no");
  return {ok, os.str()};
}

Outcome refinable_bound() {
  const RefinableBound rb = refinable_lower_bound(bspline(3), 2.0, 6, LadderConfig{});
  return {std::abs(rb.k - 3.0) <= 0.2, "k = " + fmt(rb.k)};
}

Outcome empirical_agreement() {
  LadderConfig cfg;
  bool ok = true;
  std::ostringstream os;
  const TestFunction f1 = TestFunction::bump(1);
  for (int k = 1; k <= 2; ++k) {
    const double slope = order_curve(f1, GeneratorVector({bspline(k)}), 0.0).slope;
    const double order = psi_order(bspline(k), 0.0, cfg).order;
    ok = ok && std::abs(slope - order) <= 0.25;
    os << "B" << k << ": " << fmt(slope) << " vs " << fmt(order) << "; ";
  }
  const double slope = m221_curve().slope;
  const double order = psi_order(m221(), 0.0, cfg).order;
  ok = ok && std::abs(slope - order) <= 0.25;
  os << "M221: " << fmt(slope) << " vs " << fmt(order);
  return {ok, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"B-spline family", bspline_family},
      {"box spline M221", box_spline},
      {"Fredrickson C1 cubics", fredrickson_pair},
      {"convolution additivity", convolution},
      {"counterexample range memberships", counterexample},
      {"sum-rule equivalence", sum_rule_equivalence},
      {"mask solver", mask_solver},
      {"supervector zero order", zero_order_property},
      {"bad superfunction", bad_superfunction},
      {"Sobolev consistency", sobolev_consistency},
      {"refinable lower bound", refinable_bound},
      {"empirical vs analytic", empirical_agreement},
  };
  int failed = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("[%s] %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), dt);
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%zu/%zu criteria passed in %.1f s\n", criteria.size() - failed, criteria.size(), total);
  return failed == 0 ? 0 : 1;
}
