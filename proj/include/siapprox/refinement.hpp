#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "siapprox/generators.hpp"
#include "siapprox/ladder.hpp"
#include "siapprox/multi_index.hpp"
#include "siapprox/symbol.hpp"
#include "siapprox/trig_poly.hpp"

namespace sia {

// Refinement mask P with Phi(2.) = P Phi. Either a full trigonometric matrix or,
// for purely local computations at the origin, a table of normalized derivatives
// D^a P(0) (entries missing from the table are zero).
class Mask {
 public:
  Mask() = default;
  explicit Mask(TrigPolyMatrix P);
  static Mask from_jets(int r, int d, std::map<MultiIndex, Eigen::MatrixXcd> jets);

  int r() const { return r_; }
  int d() const { return d_; }
  bool has_trig() const { return has_trig_; }
  const TrigPolyMatrix& trig() const;

  const Eigen::MatrixXcd& P0() const { return P0_; }
  const Eigen::VectorXcd& spectrum() const { return spec_; }
  Eigen::MatrixXcd eval(std::span<const double> w) const;
  // D^a P(p) for every a in the degree-K jet layout (graded-lex ascending).
  std::vector<Eigen::MatrixXcd> jets_at(std::span<const double> p, int K) const;
  std::vector<Eigen::MatrixXcd> jets_at_zero(int K) const;

 private:
  void init_spectrum();
  int r_ = 0, d_ = 0;
  bool has_trig_ = false;
  TrigPolyMatrix P_;
  std::map<MultiIndex, Eigen::MatrixXcd> jets_;
  Eigen::MatrixXcd P0_;
  Eigen::VectorXcd spec_;
};

// Largest n >= 0 with 2^n in the spectrum of P(0) (relative tolerance 1e-8), or -1.
int dyadic_spectral_level(const Mask& P);

// L on C^{r |Z_N|}: (w_a) -> (2^{|a|} w_a - sum_{b <= a} D^{a-b}P(0) w_b).
Eigen::MatrixXcd assemble_L(const Mask& P, int N, GradedOrder ord = GradedOrder::Ascending);

// Family (w_a)_{a in Z_N} stacked in graded order.
struct JetBlockVector {
  int r = 0, d = 0, N = 0;
  std::vector<MultiIndex> idx;
  Eigen::VectorXcd data;
  Eigen::VectorXcd block(const MultiIndex& a) const;
};

// Degree-K jets at 0 of the solution with initial family w (the unique extension
// through the triangular system).
std::vector<Jet> extend_solution(const JetBlockVector& w, const Mask& P, int K);

// Residual of 2^{|a|} w_a - sum_{b<=a} D^{a-b}P(0) w_b over |a| <= K for extended jets.
double extension_residual(const std::vector<Jet>& jets, const Mask& P);

struct SolutionBasis {
  Mask mask;
  int N = -1;
  std::vector<JetBlockVector> basis;   // orthonormal kernel basis of L
  std::vector<std::vector<Jet>> jets0; // degree-K jets at 0 of each solution
  int K = 0;
  std::vector<GeneratorVector> gens;   // empty for masks given by jets only

  int size() const { return static_cast<int>(basis.size()); }
  // The j-th solution as a vector of evaluable symbols (cascade through the mask).
  const GeneratorVector& generator(int j) const;
  // Phi_j(0) as the columns of an r x n matrix.
  Eigen::MatrixXcd values_at_zero() const;
};

// Kernel basis of L and its extensions. Throws ZeroSolutionOnly when ker L = 0.
SolutionBasis solve_R(const Mask& P, int K = 16);

// Orthonormal kernel basis: singular values below rel_tol * max(sigma_max, 1) count as zero.
Eigen::MatrixXcd kernel_basis(const Eigen::MatrixXcd& A, double rel_tol = 1e-10);

// ---- Counterexample range computations -------------------------------------

struct RangeMembership {
  std::string name;          // "L0", "L(1,0)", ...
  double residual = 0.0;     // min ||L* x - w||
  bool member = false;       // residual <= 1e-8
};

struct MembershipReport {
  GradedOrder order = GradedOrder::Ascending;
  std::vector<MultiIndex> blocks;           // 1 <= |a| <= N in stacking order
  std::vector<RangeMembership> results;     // L0 first, then L_{e_j}
  Eigen::MatrixXcd L0;
  std::vector<Eigen::MatrixXcd> Lj;
};

// Assembles L0 and L_{e_j} on the blocks 1 <= |a| <= N and tests w against the ranges
// of their adjoints.
MembershipReport range_membership(const Mask& P, int N, const std::map<MultiIndex, Eigen::VectorXcd>& w,
                                  GradedOrder ord);
Eigen::MatrixXcd assemble_L0(const Mask& P, int N, GradedOrder ord);
Eigen::MatrixXcd assemble_Lj(const Mask& P, int N, int j, GradedOrder ord);

// The jets-only 3x3 bivariate mask whose P(0) has spectrum {1, 2, 4}.
Mask counterexample_mask();

// ---- Condition Z_k and sum rules -------------------------------------------

struct ZkReport {
  bool pass = false;
  bool degenerate_v = false;
  bool exact = false;
  std::vector<std::pair<std::vector<int>, int>> orders;  // l in E and the zero order at pi*l
};

ZkReport condition_Zk(const Mask& P, const TrigPolyMatrix& v, int k);

struct SumRuleResult {
  bool pass = false;
  double residual = 0.0;
};
SumRuleResult sum_rules_check(const Mask& P, const TrigPolyMatrix& v, int k, int version);

struct ZkSolution {
  int k_star = 0;
  std::map<MultiIndex, Eigen::VectorXcd> jets;  // v^a = D^a v(0) for |a| < k_star
  std::optional<TrigPolyMatrix> v;              // realization
  double phi0_pairing = 0.0;                    // max_j |v(0)* Phi_j(0)| when a basis was given
};

ZkSolution max_Zk_solve(const Mask& P, int k_max, const SolutionBasis* sol = nullptr);

// ---- Combined Gramian and coherent order -----------------------------------

struct CombinedSample {
  std::vector<double> omega;
  Eigen::MatrixXcd G, G0;
  Eigen::MatrixXcd X;  // r x n matrix of solution values at omega
  double w0 = 0.0;
  bool tail_warning = false;
};

CombinedSample combined_gramian(const SolutionBasis& sol, std::span<const double> omega, const BracketConfig& cfg);

struct CoherentReport {
  OrderEstimate estimate;
  std::vector<std::vector<double>> points;     // minimizer sample points
  std::vector<Eigen::VectorXcd> minimizers;
  DecayFit full_form;      // v*G v / v*v along the minimizers, should scale like |.|^{2s}
  DecayFit truncated_form; // v*G0 v / v*v along the minimizers
  bool regular = false;
  bool degenerate = false;  // every solution vanishes at the origin
};

CoherentReport coherent_order(const SolutionBasis& sol, double s, const LadderConfig& cfg);

// Zero order at 0 of v*G0_{R(P),s} v for a trig vector v, fitted.
DecayFit supervector_form_fit(const SolutionBasis& sol, const TrigPolyMatrix& v, double s, const LadderConfig& cfg);

// ---- Mask flattening -------------------------------------------------------

// D^a T(0) for |a| < k with T(0) = I and P T = T(2.) + O(|.|^k). Requires P(0) = I.
std::map<MultiIndex, Eigen::MatrixXcd> flatten_mask(const Mask& P, int k);
// Zero order at 0 of P T - T(2.) for the jet family T (truncated at the family's degree).
int flatten_residual_order(const Mask& P, const std::map<MultiIndex, Eigen::MatrixXcd>& T, int K);

// ---- Randomized instances --------------------------------------------------

struct ZkInstance {
  Mask P;
  TrigPolyMatrix v;
  int k = 1;
  std::string kind;
};

// Masks built from B-spline factors, perturbed and conjugated by constant
// matrices; v is either solved for, perturbed, or pushed beyond k*.
std::vector<ZkInstance> random_zk_instances(int count, unsigned seed);

// Scalar B-spline mask ((1 + e^{-iw}) / 2)^k in coordinate-tensor form for d = 1.
TrigPoly bspline_mask(int k, int d = 1, int coord = 0);

}  // namespace sia
