#include "siapprox/errors.hpp"
#include "siapprox/refinement.hpp"

namespace sia {

namespace {

std::vector<MultiIndex> positive_blocks(int d, int N, GradedOrder ord) {
  std::vector<MultiIndex> out;
  for (const auto& a : enumerate_upto(d, N, ord))
    if (a.order() >= 1) out.push_back(a);
  return out;
}

// Rows a with a >= lower use the triangular relation restricted to lower <= b < a;
// the remaining rows are the identity.
Eigen::MatrixXcd assemble_restricted(const Mask& P, int N, const MultiIndex& lower, GradedOrder ord) {
  const int r = P.r(), d = P.d();
  const auto blocks = positive_blocks(d, N, ord);
  const auto jets = P.jets_at_zero(N);
  const auto layout = JetLayout::get(d, N);
  const int nb = static_cast<int>(blocks.size());
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(r, r);
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(r * nb, r * nb);
  for (int a = 0; a < nb; ++a) {
    if (!lower.leq(blocks[a])) {
      L.block(r * a, r * a, r, r) = I;
      continue;
    }
    for (int b = 0; b < nb; ++b) {
      if (a == b) {
        L.block(r * a, r * a, r, r) = std::ldexp(1.0, blocks[a].order()) * I - P.P0();
      } else if (lower.leq(blocks[b]) && blocks[b].lt(blocks[a])) {
        L.block(r * a, r * b, r, r) = -jets[layout->index_of(blocks[a] - blocks[b])];
      }
    }
  }
  return L;
}

double range_residual(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& w) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(A);
  cod.setThreshold(1e-12);
  const Eigen::VectorXcd x = cod.solve(w);
  return (A * x - w).norm();
}

}  // namespace

Eigen::MatrixXcd assemble_L0(const Mask& P, int N, GradedOrder ord) {
  // Every positive block satisfies a >= 0, and b = 0 is not a block.
  return assemble_restricted(P, N, MultiIndex(P.d()), ord);
}

Eigen::MatrixXcd assemble_Lj(const Mask& P, int N, int j, GradedOrder ord) {
  return assemble_restricted(P, N, MultiIndex::unit(P.d(), j), ord);
}

MembershipReport range_membership(const Mask& P, int N, const std::map<MultiIndex, Eigen::VectorXcd>& w,
                                  GradedOrder ord) {
  MembershipReport rep;
  rep.order = ord;
  rep.blocks = positive_blocks(P.d(), N, ord);
  const int r = P.r();
  Eigen::VectorXcd wv = Eigen::VectorXcd::Zero(r * static_cast<int>(rep.blocks.size()));
  for (const auto& [a, v] : w) {
    bool found = false;
    for (std::size_t i = 0; i < rep.blocks.size(); ++i)
      if (rep.blocks[i] == a) {
        if (v.size() != r) throw DimensionMismatch("block " + a.str());
        wv.segment(static_cast<int>(i) * r, r) = v;
        found = true;
      }
    if (!found) throw InputError("block " + a.str() + " is outside 1 <= |a| <= N");
  }
  rep.L0 = assemble_L0(P, N, ord);
  const double r0 = range_residual(rep.L0.adjoint(), wv);
  rep.results.push_back({"L0", r0, r0 <= 1e-8});
  for (int j = 0; j < P.d(); ++j) {
    rep.Lj.push_back(assemble_Lj(P, N, j, ord));
    const double rj = range_residual(rep.Lj.back().adjoint(), wv);
    rep.results.push_back({"L" + MultiIndex::unit(P.d(), j).str(), rj, rj <= 1e-8});
  }
  return rep;
}

Mask counterexample_mask() {
  Eigen::MatrixXcd P0(3, 3), D01 = Eigen::MatrixXcd::Zero(3, 3);
  P0 << 1, 0, 0, 0, 2, 0, 0, -1, 4;
  D01(2, 2) = 1.0;
  std::map<MultiIndex, Eigen::MatrixXcd> jets;
  jets[MultiIndex{0, 0}] = P0;
  jets[MultiIndex{0, 1}] = D01;
  return Mask::from_jets(3, 2, std::move(jets));
}

}  // namespace sia
