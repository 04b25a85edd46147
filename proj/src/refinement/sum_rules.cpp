#include <cmath>
#include <numbers>

#include "siapprox/errors.hpp"
#include "siapprox/refinement.hpp"

namespace sia {

namespace {

constexpr double kRuleTol = 1e-9;

// E = {0,1}^d in binary counting order; the first element is l = 0.
std::vector<std::vector<int>> corners(int d) {
  std::vector<std::vector<int>> out;
  for (int m = 0; m < (1 << d); ++m) {
    std::vector<int> l(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) l[k] = (m >> k) & 1;
    out.push_back(l);
  }
  return out;
}

bool is_zero_corner(const std::vector<int>& l) {
  for (int x : l)
    if (x) return false;
  return true;
}

std::vector<double> pi_times(const std::vector<int>& l) {
  std::vector<double> p(l.size());
  for (std::size_t k = 0; k < l.size(); ++k) p[k] = std::numbers::pi * l[k];
  return p;
}

void check_vector(const Mask& P, const TrigPolyMatrix& v) {
  if (v.cols() != 1 || v.rows() != P.r()) throw DimensionMismatch("v must be an r x 1 trig vector");
  if (v.dim() != P.d()) throw DimensionMismatch("v and P live in different dimensions");
}

bool vanishes_at_zero(const TrigPolyMatrix& v) {
  const std::vector<double> zero(static_cast<std::size_t>(v.dim()), 0.0);
  return v.eval(zero).norm() <= 1e-12;
}

// D^a v(0) as column vectors for |a| <= K, in jet layout order.
std::vector<Eigen::VectorXcd> vector_jets(const TrigPolyMatrix& v, int K) {
  const std::vector<double> zero(static_cast<std::size_t>(v.dim()), 0.0);
  const auto jets = v.jet_at(zero, K);
  const int n = jets.front().layout().size();
  std::vector<Eigen::VectorXcd> out(static_cast<std::size_t>(n), Eigen::VectorXcd(v.rows()));
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < v.rows(); ++c) out[i](c) = jets[c][i];
  return out;
}

SumRuleResult version2(const Mask& P, const TrigPolyMatrix& v, int k) {
  const int d = P.d();
  const auto vj = vector_jets(v, k - 1);
  const auto layout = JetLayout::get(d, k - 1);
  SumRuleResult out;
  double scale = 1.0;
  for (const auto& l : corners(d)) {
    const auto Pj = P.jets_at(pi_times(l), k - 1);
    for (int a = 0; a < layout->size(); ++a) {
      const MultiIndex& alpha = layout->idx[a];
      Eigen::RowVectorXcd lhs = Eigen::RowVectorXcd::Zero(P.r());
      for (int b = 0; b <= a; ++b) {
        const MultiIndex& beta = layout->idx[b];
        if (!beta.leq(alpha)) continue;
        const Eigen::RowVectorXcd term =
            std::ldexp(1.0, (alpha - beta).order()) * vj[layout->index_of(alpha - beta)].adjoint() * Pj[b];
        scale = std::max(scale, term.norm());
        lhs += term;
      }
      if (is_zero_corner(l)) lhs -= vj[a].adjoint();
      out.residual = std::max(out.residual, lhs.norm());
    }
  }
  out.pass = out.residual <= kRuleTol * scale;
  return out;
}

// Coset form of the Fourier-coefficient identities. With A(w) = v*(2w)P(w) =
// sum_n A_n e^{-inw}, for every coset l + 2Z^d and every q = ()^g, |g| < k:
//   sum_{n in l + 2Z^d} A_n q(n) = 2^{-d} sum_n (v_{-n})^* q(n).
// A_n expands to sum_sigma sum_gamma (v_{sigma-gamma})^* P_{l+2 sigma} with n = l + 2 gamma.
SumRuleResult version1(const Mask& P, const TrigPolyMatrix& v, int k) {
  const int r = P.r(), d = P.d();
  const TrigPolyMatrix& M = P.trig();
  std::map<LatticeIndex, Eigen::RowVectorXcd> A, B;
  auto row = [&](std::map<LatticeIndex, Eigen::RowVectorXcd>& m, const LatticeIndex& n) -> Eigen::RowVectorXcd& {
    auto it = m.find(n);
    if (it == m.end()) it = m.emplace(n, Eigen::RowVectorXcd::Zero(r)).first;
    return it->second;
  };
  for (int i = 0; i < r; ++i)
    for (const auto& [g, vc] : v(i, 0).coeffs()) {
      LatticeIndex neg(g);
      for (int& x : neg) x = -x;
      row(B, neg)(i) += std::conj(vc);
      for (int c = 0; c < r; ++c)
        for (const auto& [j, pc] : M(i, c).coeffs()) {
          LatticeIndex n(j);
          for (int t = 0; t < d; ++t) n[t] -= 2 * g[t];
          row(A, n)(c) += std::conj(vc) * pc;
        }
    }
  auto q = [](const LatticeIndex& n, const MultiIndex& g) {
    double m = 1.0;
    for (std::size_t t = 0; t < n.size(); ++t)
      m *= std::pow(static_cast<double>(n[t]), g[static_cast<int>(t)]) / factorial(g[static_cast<int>(t)]);
    return m;
  };
  auto in_coset = [](const LatticeIndex& n, const std::vector<int>& l) {
    for (std::size_t t = 0; t < n.size(); ++t)
      if (((n[t] - l[t]) % 2 + 2) % 2 != 0) return false;
    return true;
  };
  SumRuleResult out;
  double scale = 1.0;
  const double inv = std::ldexp(1.0, -d);
  for (const auto& g : enumerate_upto(d, k - 1)) {
    Eigen::RowVectorXcd rhs = Eigen::RowVectorXcd::Zero(r);
    for (const auto& [n, b] : B) {
      rhs += inv * q(n, g) * b;
      scale = std::max(scale, inv * std::abs(q(n, g)) * b.norm());
    }
    for (const auto& l : corners(d)) {
      Eigen::RowVectorXcd lhs = Eigen::RowVectorXcd::Zero(r);
      for (const auto& [n, a] : A)
        if (in_coset(n, l)) {
          lhs += q(n, g) * a;
          scale = std::max(scale, std::abs(q(n, g)) * a.norm());
        }
      out.residual = std::max(out.residual, (lhs - rhs).norm());
    }
  }
  out.pass = out.residual <= kRuleTol * scale;
  return out;
}

}  // namespace

ZkReport condition_Zk(const Mask& P, const TrigPolyMatrix& v, int k) {
  check_vector(P, v);
  ZkReport rep;
  if (vanishes_at_zero(v)) {
    rep.degenerate_v = true;
    return rep;
  }
  const int d = P.d();
  const TrigPolyMatrix vs = v.adjoint();
  const TrigPolyMatrix W = vs.dilated(2) * P.trig();
  TrigPolyMatrix W0 = W;
  for (int c = 0; c < W.cols(); ++c) W0(0, c) = W(0, c) - vs(0, c);
  rep.exact = W.has_exact() && W0.has_exact();
  rep.pass = true;
  for (const auto& l : corners(d)) {
    const TrigPolyMatrix& F = is_zero_corner(l) ? W0 : W;
    int ord = k + 1;
    if (rep.exact) {
      RatPoint q;
      for (int x : l) q.emplace_back(x, 2);
      for (const auto& j : F.exact_jet_at(q, k)) ord = std::min(ord, j.zero_order());
    } else {
      for (const auto& j : F.jet_at(pi_times(l), k)) ord = std::min(ord, j.zero_order());
    }
    rep.orders.emplace_back(l, ord);
    rep.pass = rep.pass && ord >= k;
  }
  return rep;
}

SumRuleResult sum_rules_check(const Mask& P, const TrigPolyMatrix& v, int k, int version) {
  check_vector(P, v);
  if (version != 1 && version != 2) throw InputError("sum-rule version must be 1 or 2");
  if (k < 1) throw InputError("k must be positive");
  if (vanishes_at_zero(v)) return {false, 0.0};
  return version == 1 ? version1(P, v, k) : version2(P, v, k);
}

ZkSolution max_Zk_solve(const Mask& P, int k_max, const SolutionBasis* sol) {
  const int r = P.r(), d = P.d();
  ZkSolution out;
  const auto E = corners(d);
  Eigen::MatrixXcd F;
  if (sol) F = sol->values_at_zero();
  for (int k = 1; k <= k_max; ++k) {
    const auto layout = JetLayout::get(d, k - 1);
    const int n = layout->size();
    std::vector<std::vector<Eigen::MatrixXcd>> Pl;
    for (const auto& l : E) Pl.push_back(P.jets_at(pi_times(l), k - 1));
    // Conjugate transpose of the second-version rules, linear in u_a = D^a v(0):
    //   sum_{b <= a} 2^{|a-b|} (D^b P(pi l))^* u_{a-b} - delta_{l,0} u_a = 0.
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(static_cast<int>(E.size()) * n * r, n * r);
    for (std::size_t e = 0; e < E.size(); ++e)
      for (int a = 0; a < n; ++a) {
        const int row = (static_cast<int>(e) * n + a) * r;
        for (int b = 0; b <= a; ++b) {
          if (!layout->idx[b].leq(layout->idx[a])) continue;
          const int g = layout->index_of(layout->idx[a] - layout->idx[b]);
          S.block(row, g * r, r, r) += std::ldexp(1.0, layout->deg[g]) * Pl[e][b].adjoint();
        }
        if (e == 0) S.block(row, a * r, r, r) -= Eigen::MatrixXcd::Identity(r, r);
      }
    const Eigen::MatrixXcd Nsp = kernel_basis(S);
    if (Nsp.cols() == 0) break;
    const Eigen::MatrixXcd B0 = Nsp.topRows(r);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B0, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > 1e-8) ++rank;
    if (rank == 0) break;
    const Eigen::MatrixXcd Ur = svd.matrixU().leftCols(rank);
    Eigen::VectorXcd z = Eigen::VectorXcd::Unit(rank, 0);
    if (sol && F.cols() > 0 && F.norm() > 0.0) {
      // Among admissible v(0) of unit length, maximize sum_j |v(0)* Phi_j(0)|^2.
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Ur.adjoint() * F * F.adjoint() * Ur);
      z = es.eigenvectors().col(rank - 1);
      // On a tied maximum, project the sum of the solution values onto the top
      // eigenspace so that no single solution is left unpaired.
      const auto& ev = es.eigenvalues();
      int top = 0;
      while (top < rank && ev(rank - 1 - top) >= ev(rank - 1) * (1.0 - 1e-8)) ++top;
      if (top > 1) {
        const Eigen::MatrixXcd Q = es.eigenvectors().rightCols(top);
        const Eigen::VectorXcd y = Q * (Q.adjoint() * (Ur.adjoint() * F.rowwise().sum()));
        if (y.norm() > 1e-8) z = y.normalized();
      }
    }
    Eigen::VectorXcd y = svd.matrixV().leftCols(rank) * (sv.head(rank).cwiseInverse().asDiagonal() * z);
    const Eigen::VectorXcd x = Nsp * y;
    out.k_star = k;
    out.jets.clear();
    for (int a = 0; a < n; ++a) out.jets[layout->idx[a]] = x.segment(a * r, r);
    if (sol && F.cols() > 0) out.phi0_pairing = (x.head(r).adjoint() * F).cwiseAbs().maxCoeff();
  }
  if (out.k_star > 0) {
    std::vector<TrigPoly> comps;
    for (int c = 0; c < r; ++c) {
      std::map<MultiIndex, cplx> jc;
      for (const auto& [a, u] : out.jets) jc[a] = u(c);
      comps.push_back(realize_taylor(d, out.k_star - 1, jc));
    }
    out.v = TrigPolyMatrix::column(comps);
  }
  return out;
}

}  // namespace sia
