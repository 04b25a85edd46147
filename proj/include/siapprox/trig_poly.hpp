#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "siapprox/exact.hpp"
#include "siapprox/jet.hpp"

namespace sia {

using LatticeIndex = std::vector<int>;
// A point of 2*pi*Q^d, stored as the rational vector q.
using RatPoint = std::vector<mpq_class>;

// exp(-2*pi*i*x) for x in Z/4; NotExact otherwise.
GaussQ exact_unit_exp(const mpq_class& x);

// sum_j c_j exp(-i j.w), j in Z^d, finitely many nonzero c_j.
// Coefficients may additionally carry exact Gaussian-rational values, which
// enables exact jets at points of 2*pi*Q^d.
class TrigPoly {
 public:
  explicit TrigPoly(int d = 1) : d_(d) {}
  static TrigPoly constant(int d, cplx c);
  static TrigPoly constant_exact(int d, const GaussQ& c);
  static TrigPoly monomial(const LatticeIndex& j, cplx c);

  int dim() const { return d_; }
  const std::map<LatticeIndex, cplx>& coeffs() const { return c_; }
  bool has_exact() const { return exact_.has_value(); }
  const std::map<LatticeIndex, GaussQ>& exact_coeffs() const { return *exact_; }
  bool is_zero() const { return c_.empty(); }

  void set(const LatticeIndex& j, cplx c);           // drops exactness
  void set_exact(const LatticeIndex& j, const GaussQ& c);
  // Attaches exact values equal to the binary value of every double coefficient.
  TrigPoly with_exact_from_doubles() const;

  cplx eval(std::span<const double> w) const;
  Jet jet_at(std::span<const double> p, int K) const;
  ExactJet exact_jet_at(const RatPoint& q, int K) const;  // point 2*pi*q

  TrigPoly operator+(const TrigPoly& o) const;
  TrigPoly operator-(const TrigPoly& o) const;
  TrigPoly operator*(const TrigPoly& o) const;
  TrigPoly scaled(cplx s) const;
  TrigPoly scaled_exact(const GaussQ& s) const;
  // v* as a trig polynomial: w -> conj(v(w)) for real w.
  TrigPoly adjoint() const;
  // w -> v(m w) for an integer m (coefficient index scaling).
  TrigPoly dilated(int m) const;

  double max_abs() const;

 private:
  int d_;
  std::map<LatticeIndex, cplx> c_;
  std::optional<std::map<LatticeIndex, GaussQ>> exact_;
};

class TrigPolyMatrix {
 public:
  TrigPolyMatrix() = default;
  TrigPolyMatrix(int rows, int cols, int d);
  static TrigPolyMatrix identity(int r, int d);
  static TrigPolyMatrix column(const std::vector<TrigPoly>& entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int dim() const { return d_; }
  TrigPoly& operator()(int i, int j) { return e_[static_cast<std::size_t>(i * cols_ + j)]; }
  const TrigPoly& operator()(int i, int j) const { return e_[static_cast<std::size_t>(i * cols_ + j)]; }
  bool has_exact() const;

  Eigen::MatrixXcd eval(std::span<const double> w) const;
  // Row-major list of entry jets.
  std::vector<Jet> jet_at(std::span<const double> p, int K) const;
  std::vector<ExactJet> exact_jet_at(const RatPoint& q, int K) const;

  TrigPolyMatrix operator*(const TrigPolyMatrix& o) const;
  TrigPolyMatrix operator+(const TrigPolyMatrix& o) const;
  TrigPolyMatrix scaled(cplx s) const;
  TrigPolyMatrix adjoint() const;
  TrigPolyMatrix dilated(int m) const;

 private:
  int rows_ = 0, cols_ = 0, d_ = 1;
  std::vector<TrigPoly> e_;
};

}  // namespace sia
