#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "siapprox/polynomial.hpp"
#include "siapprox/refinement.hpp"
#include "siapprox/symbol.hpp"

namespace sia {

// m_g = int (-t)^g / g! psi(t) dt for |g| <= k, read off the jet of psi^ at 0.
struct MomentTable {
  int d = 1;
  int k = 0;
  std::map<MultiIndex, cplx> m;
  std::vector<std::string> warnings;

  cplx operator[](const MultiIndex& g) const;
};

MomentTable moments(const FourierSymbol& psi, int k);

// psi * q = sum_g m_g d^g q, exact on polynomials of degree <= table order.
Polynomial convolve_poly(const MomentTable& m, const Polynomial& q);

struct QIScheme {
  int k = 0;
  int d = 1;
  std::map<MultiIndex, Polynomial> g;  // g_a for |a| < k
  std::map<MultiIndex, cplx> c;        // c(g) = normalized moments
  cplx normalization = 1.0;            // psi^(0) before normalization
  std::string provenance;
  double residual = 0.0;               // max coefficient of psi * g_a - ()^a
  std::vector<std::string> warnings;

  bool reproduces(double tol = 1e-10) const { return residual <= tol; }
};

// Throws DegenerateSymbol when psi^(0) vanishes.
QIScheme qi_psi(const FourierSymbol& psi, int k);

// psi = sum_phi sum_j a_phi(j) phi(. - j); a[i] holds the sequence for Phi[i].
QIScheme qi_fsi(const GeneratorVector& Phi, const std::vector<std::map<LatticeIndex, cplx>>& a, int k);

// Cardinal B-spline of order k (support [0, k]) evaluated in space.
double bspline_space(int k, double x);

// max_x |sum_j B_k(x - j) g_a(j) - ()^a(x)| over the sample points, for every g_a.
double semidiscrete_residual(int bspline_k, const QIScheme& s, const std::vector<double>& points);

struct UniversalQIReport {
  cplx pairing = 0.0;     // v*(0) Phi_j(0)
  bool surjective = false;
  std::optional<QIScheme> scheme;
  std::vector<std::string> warnings;
};

// Quasi-interpolation with psi^ = v* Phi_j for the j-th solution of the mask.
UniversalQIReport universal_quasi_interp(const SolutionBasis& sol, const TrigPolyMatrix& v, int j, int k);

}  // namespace sia
