#pragma once

#include <memory>
#include <span>
#include <vector>

#include "siapprox/exact.hpp"
#include "siapprox/multi_index.hpp"

namespace sia {

// Index bookkeeping for all gamma with |gamma| <= K in graded-lex ascending order.
// Layouts are interned per (d, K) and shared between jets.
struct JetLayout {
  int d = 0;
  int K = 0;
  std::vector<MultiIndex> idx;
  std::vector<int> deg;           // deg[i] = |idx[i]|
  std::vector<int> deg_start;     // first position of degree n; deg_start[K+1] = size
  std::vector<int> add;           // add[i*n+j] = position of idx[i]+idx[j], or -1 if beyond K

  int size() const { return static_cast<int>(idx.size()); }
  int index_of(const MultiIndex& a) const;  // -1 when |a| > K
  int sum_index(int i, int j) const { return add[static_cast<std::size_t>(i) * idx.size() + j]; }

  static std::shared_ptr<const JetLayout> get(int d, int K);
};

// Relative/absolute hybrid threshold used to call a float coefficient zero.
inline constexpr double kJetZeroTol = 1e-9;

// Truncated Taylor expansion f(base + h) = sum_gamma c_gamma h^gamma + O(|h|^{K+1}),
// where c_gamma = D^gamma f(base) with the 1/gamma! normalization folded in.
template <class T>
class TaylorJet {
 public:
  TaylorJet() = default;
  TaylorJet(int d, int K, std::vector<double> base);

  static TaylorJet constant(int d, int K, std::vector<double> base, const T& c);
  // Jet of the coordinate function w_j at base, given the coordinate value.
  static TaylorJet coordinate(int d, int K, std::vector<double> base, int j, const T& value);

  int dim() const { return layout_->d; }
  int degree() const { return layout_->K; }
  const JetLayout& layout() const { return *layout_; }
  const std::vector<double>& base() const { return base_; }
  const std::vector<T>& coeffs() const { return c_; }
  std::vector<T>& coeffs() { return c_; }
  const T& operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  T& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  T coeff(const MultiIndex& a) const;

  TaylorJet truncated(int K) const;
  // Same coefficients reinterpreted at a new base point (used when the base is
  // only known approximately, e.g. after projecting onto a singular hyperplane).
  TaylorJet rebased(std::vector<double> base) const;

  TaylorJet operator-() const;
  TaylorJet& operator+=(const TaylorJet& o);
  TaylorJet& operator-=(const TaylorJet& o);
  TaylorJet operator+(const TaylorJet& o) const { return TaylorJet(*this) += o; }
  TaylorJet operator-(const TaylorJet& o) const { return TaylorJet(*this) -= o; }
  TaylorJet operator*(const TaylorJet& o) const;  // degree min(K_a, K_b)
  TaylorJet scaled(const T& s) const;
  TaylorJet pow(int n) const;

  // min{|gamma| : c_gamma != 0}, or K+1 when everything vanishes.
  // Float jets use the hybrid tolerance; exact jets test exact zero.
  int zero_order() const;

 private:
  void check(const TaylorJet& o) const;
  std::shared_ptr<const JetLayout> layout_;
  std::vector<double> base_;
  std::vector<T> c_;
};

using Jet = TaylorJet<cplx>;
using ExactJet = TaylorJet<PiPoly>;

Jet jet_mul(const Jet& a, const Jet& b);

// Quotient jet after cancelling the common zero; result degree K - zero_order(den).
// Throws NonRemovableSingularity or DegreeExhausted.
Jet jet_div(const Jet& num, const Jet& den);
// Same with the denominator's zero order m supplied by the caller (structural knowledge).
Jet jet_div_order(const Jet& num, const Jet& den, int m);

// Sum c_gamma h^gamma.
cplx jet_eval_offset(const Jet& j, std::span<const double> h);

// Conversion of exact jets to floating point.
Jet to_float(const ExactJet& e);

}  // namespace sia
