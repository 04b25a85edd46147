#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "siapprox/decay_fit.hpp"
#include "siapprox/lattice.hpp"

namespace sia {

struct LadderConfig {
  BracketConfig bracket;
  DecayConfig decay;
};

// ---- Strang-Fix orders -----------------------------------------------------

struct SFPoint {
  std::vector<int> n;  // lattice point 2*pi*n
  int order = 0;       // max_k + 1 stands for "> max_k"
  bool exact = false;
};

struct SFReport {
  std::vector<SFPoint> points;
  int order = 0;  // min over points
  int max_k = 0;
  bool all_exact = true;
};

// Zero orders of phi at the representatives 2*pi*n, 0 < |n|_inf <= radius.
// Throws InconclusiveAtDegree when every representative vanishes beyond max_k.
SFReport sf_order(const FourierSymbol& phi, int max_k, int radius = 2);

// ---- PSI / FSI order estimates ---------------------------------------------

struct OrderEstimate {
  DecayFit fit;                        // fitted exponent of the ratio, i.e. 2k - 2s
  double s = 0.0;
  double order = 0.0;                  // (slope + 2s) / 2
  std::optional<double> snapped_order;
  bool degenerate_at_origin = false;
  bool tail_warning = false;
  bool divergent = false;
  std::vector<std::string> warnings;
};

// Ratio [phi,phi]^0_s / [phi,phi]_s sampled near the origin.
OrderEstimate psi_order(const FourierSymbol& phi, double s, const LadderConfig& cfg);

struct ConsistencyReport {
  std::vector<OrderEstimate> rows;  // one per s, in the order given
  bool monotone = true;             // order(t) >= order(s) - 0.1 whenever t <= s
};
ConsistencyReport psi_order_consistency(const FourierSymbol& phi, const std::vector<double>& s_list,
                                        const LadderConfig& cfg);

struct PencilValue {
  double stable = 0.0;   // 1 / (1 + w Phi* G0^+ Phi)
  double reduced = 0.0;  // smallest eigenvalue of the pencil restricted to ran G
};
// Smallest generalized eigenvalue of (G0, G) at one Gramian sample.
PencilValue pencil_min(const GramianSample& g);

// Minimizing direction of v*G0v / v*Gv at the sample, unit length.
Eigen::VectorXcd pencil_minimizer(const GramianSample& g);

// min over v of v*G0v / v*(G0 + w X X*)v for an r x n matrix X; the minimizer is
// written to argmin when given.
double pencil_min_lowrank(const Eigen::MatrixXcd& G0, const Eigen::MatrixXcd& X, double w,
                          Eigen::VectorXcd* argmin = nullptr);
// Smallest eigenvalue of the pencil (G0, G) restricted to the numerical range of G.
double pencil_min_reduced(const Eigen::MatrixXcd& G0, const Eigen::MatrixXcd& G);

OrderEstimate fsi_order(const GeneratorVector& Phi, double s, const LadderConfig& cfg);

// ---- Eigenvalue bounds -----------------------------------------------------

struct EigBound {
  DecayFit rho_min;
  DecayFit rho_max;
  std::optional<double> bound;  // rho_min exponent / 2; absent means "no bound"
  bool empty_set = false;
};
// Zero orders of the extreme eigenvalues of sum_{alpha in I} Phi(.+alpha)Phi*(.+alpha)|.+alpha|^{2s},
// with I given as integer vectors n for alpha = 2*pi*n.
EigBound eig_upper_bound(const GeneratorVector& Phi, const std::vector<std::vector<int>>& I, double s,
                         const LadderConfig& cfg);

// ---- Superfunctions --------------------------------------------------------

struct SuperfunctionReport {
  std::vector<std::vector<double>> points;
  std::vector<Eigen::VectorXcd> v0;   // pencil minimizers, unit length
  std::vector<double> abs_v0_phi;     // |v0* Phi| per point
  double min_abs = 0.0;
  double threshold = 0.1;
  bool certified = false;
  // Only filled when a candidate trig vector is supplied.
  std::optional<double> candidate_value;  // |v(0)* Phi(0)|
  std::optional<bool> candidate_degenerate;
};

// Samples the pencil minimizer on a grid of cell centres in [-radius, radius]^d.
SuperfunctionReport superfunction_sample(const GeneratorVector& Phi, double s, double radius, int grid,
                                         const LadderConfig& cfg, const TrigPolyMatrix* candidate = nullptr,
                                         double threshold = 0.1);

// ---- Refinable lower bound -------------------------------------------------

struct RefinableBound {
  std::vector<double> lambda;  // lambda_0 .. lambda_M
  DecayFit fit;                // profile lambda_m against 2^{-m}
  double k = 0.0;
  std::optional<double> snapped_k;
  bool infinite = false;
  bool divergent = false;
  double annulus_min = 0.0, annulus_max = 0.0;
};

// lambda_m = sup over an annulus grid of sum over 2^m(2 pi Z^d \ 0) of |f(.+alpha)|^2.
// Throws AnnulusDegenerate when |f| is not bounded below on the annulus.
RefinableBound refinable_lower_bound(const FourierSymbol& f, double rho, int M, const LadderConfig& cfg);

// ---- Dual vector extension -------------------------------------------------

struct DualSample {
  int level = 0;
  std::vector<double> omega;   // the point omega0 / 2^level
  std::vector<double> origin;  // omega0
  Eigen::VectorXcd v;          // v(omega)
};

// v*(w) := v*(2w) P(w), iterated inward from samples v0 given on an annulus.
std::vector<DualSample> dual_extend(const TrigPolyMatrix& P,
                                    const std::vector<std::pair<std::vector<double>, Eigen::VectorXcd>>& v0,
                                    int levels);

// Max over samples and lattice offsets of |v*(w/2^m)Phi(w/2^m + a) - v*(w)Phi(w + 2^m a)|,
// relative to the larger side; v is taken from dual_extend.
double dual_identity_residual(const TrigPolyMatrix& P, const GeneratorVector& Phi,
                              const std::vector<std::pair<std::vector<double>, Eigen::VectorXcd>>& v0, int levels,
                              const std::vector<std::vector<int>>& offsets);

}  // namespace sia
