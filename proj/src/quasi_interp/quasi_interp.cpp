#include "siapprox/quasi_interp.hpp"

#include <cmath>

#include "siapprox/errors.hpp"
#include "siapprox/ladder.hpp"

namespace sia {

namespace {

constexpr double kDegenerate = 1e-12;

cplx minus_i_pow(int n) {
  static const cplx table[4] = {1.0, cplx(0, -1), -1.0, cplx(0, 1)};
  return table[n % 4];
}

QIScheme scheme_from(const FourierSymbol& psi, int k, std::string provenance) {
  if (k < 1) throw InputError("scheme order k must be positive");
  const int d = psi.dim();
  const MomentTable mt = moments(psi, k);
  const cplx m0 = mt[MultiIndex(d)];
  if (std::abs(m0) < kDegenerate) throw DegenerateSymbol("psi^(0) vanishes; no scheme exists");

  QIScheme s;
  s.k = k;
  s.d = d;
  s.normalization = m0;
  s.provenance = std::move(provenance);
  s.warnings = mt.warnings;
  if (std::abs(m0 - 1.0) > 1e-14) s.warnings.push_back("psi^(0) != 1; moments were divided by psi^(0)");

  MomentTable norm = mt;
  for (auto& [g, v] : norm.m) v /= m0;
  s.c = norm.m;

  try {
    const SFReport sf = sf_order(psi, k);
    if (sf.order < k)
      s.warnings.push_back("Strang-Fix order " + std::to_string(sf.order) + " is below k; semi-discrete reproduction fails");
  } catch (const InconclusiveAtDegree&) {
    // Vanishing beyond k at every representative is more than enough.
  } catch (const Error& e) {
    s.warnings.push_back(std::string("Strang-Fix check skipped: ") + e.what());
  }

  // g_a = ()^a - sum_{b < a} c(a - b) g_b in graded order.
  const auto idx = enumerate_upto(d, k - 1);
  for (const auto& a : idx) {
    Polynomial ga = Polynomial::monomial(a);
    for (const auto& b : idx) {
      if (b == a || !b.leq(a)) continue;
      ga = ga - s.g.at(b) * norm[a - b];
    }
    s.g.emplace(a, ga.pruned(0.0));
  }
  for (const auto& [a, ga] : s.g)
    s.residual = std::max(s.residual, (convolve_poly(norm, ga) - Polynomial::monomial(a)).max_abs());
  return s;
}

}  // namespace

cplx MomentTable::operator[](const MultiIndex& g) const {
  const auto it = m.find(g);
  if (it == m.end()) throw InputError("moment " + g.str() + " is beyond the table order");
  return it->second;
}

MomentTable moments(const FourierSymbol& psi, int k) {
  MomentTable t;
  t.d = psi.dim();
  t.k = k;
  const std::vector<double> zero(static_cast<std::size_t>(t.d), 0.0);
  const Jet j = psi.jet_at(zero, k);
  // D^g psi^(0) = int (-it)^g / g! psi = i^{|g|} m_g.
  for (int i = 0; i < j.layout().size(); ++i) {
    const MultiIndex& g = j.layout().idx[i];
    t.m[g] = minus_i_pow(g.order()) * j[i];
  }
  if (std::abs(j[0]) < kDegenerate) t.warnings.push_back("psi^(0) vanishes");
  return t;
}

Polynomial convolve_poly(const MomentTable& m, const Polynomial& q) {
  if (q.dim() != m.d) throw DimensionMismatch("polynomial and moments differ in dimension");
  if (q.degree() > m.k) throw InputError("polynomial degree exceeds the moment order");
  Polynomial out(q.dim());
  for (const auto& [g, mg] : m.m) {
    if (mg == cplx(0.0)) continue;
    out = out + q.partial(g) * mg;
  }
  return out;
}

QIScheme qi_psi(const FourierSymbol& psi, int k) { return scheme_from(psi, k, "psi: " + psi.describe()); }

QIScheme qi_fsi(const GeneratorVector& Phi, const std::vector<std::map<LatticeIndex, cplx>>& a, int k) {
  if (static_cast<int>(a.size()) != Phi.size()) throw DimensionMismatch("one coefficient sequence per generator");
  const int d = Phi.dim();
  std::vector<FourierSymbol> terms;
  for (int i = 0; i < Phi.size(); ++i) {
    if (a[static_cast<std::size_t>(i)].empty()) continue;
    TrigPoly v(d);
    for (const auto& [j, c] : a[static_cast<std::size_t>(i)]) {
      if (static_cast<int>(j.size()) != d) throw DimensionMismatch("sequence index has the wrong dimension");
      v.set(j, c);
    }
    terms.push_back(FourierSymbol::trig(v) * Phi[i]);
  }
  if (terms.empty()) throw DegenerateSymbol("all coefficient sequences are empty");
  const FourierSymbol psi = terms.size() == 1 ? terms.front() : FourierSymbol::sum(terms);
  return scheme_from(psi, k, "fsi: " + std::to_string(Phi.size()) + " generators");
}

double bspline_space(int k, double x) {
  if (k < 1) throw InputError("B-spline order must be positive");
  if (x < 0.0 || x >= k) return 0.0;
  if (k == 1) return 1.0;
  // Cox-de Boor on integer knots.
  return (x * bspline_space(k - 1, x) + (k - x) * bspline_space(k - 1, x - 1.0)) / (k - 1);
}

double semidiscrete_residual(int bspline_k, const QIScheme& s, const std::vector<double>& points) {
  if (s.d != 1) throw DimensionMismatch("the space-side check is univariate");
  double worst = 0.0;
  for (const auto& [a, ga] : s.g)
    for (double x : points) {
      cplx sum = 0.0;
      for (int j = static_cast<int>(std::floor(x)) - bspline_k; j <= static_cast<int>(std::ceil(x)); ++j) {
        const double pt = j;
        sum += bspline_space(bspline_k, x - j) * ga.eval(std::span<const double>(&pt, 1));
      }
      worst = std::max(worst, std::abs(sum - normalized_monomial(a, std::span<const double>(&x, 1))));
    }
  return worst;
}

UniversalQIReport universal_quasi_interp(const SolutionBasis& sol, const TrigPolyMatrix& v, int j, int k) {
  const int r = sol.mask.r();
  if (j < 0 || j >= sol.size()) throw InputError("solution index out of range");
  if (v.rows() != r || v.cols() != 1) throw DimensionMismatch("v must be an r x 1 trig vector");
  UniversalQIReport rep;
  const std::vector<double> zero(static_cast<std::size_t>(sol.mask.d()), 0.0);
  rep.pairing = (v.eval(zero).adjoint() * sol.values_at_zero().col(j))(0, 0);
  rep.surjective = std::abs(rep.pairing) > kDegenerate;
  if (!rep.surjective) {
    rep.warnings.push_back("v*(0) Phi(0) = 0: the map lowers degrees and is not onto");
    return rep;
  }
  std::vector<FourierSymbol> terms;
  for (int c = 0; c < r; ++c)
    if (!v(c, 0).is_zero()) terms.push_back(FourierSymbol::trig(v(c, 0).adjoint()) * sol.generator(j)[c]);
  const FourierSymbol psi = terms.size() == 1 ? terms.front() : FourierSymbol::sum(terms);
  rep.scheme = scheme_from(psi, k, "refinable solution " + std::to_string(j));
  return rep;
}

}  // namespace sia
