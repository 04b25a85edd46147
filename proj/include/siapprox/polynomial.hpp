#pragma once

#include <map>
#include <span>
#include <string>

#include "siapprox/exact.hpp"
#include "siapprox/multi_index.hpp"

namespace sia {

// Complex polynomial in the normalized monomial basis ()^a = x^a / a!.
class Polynomial {
 public:
  explicit Polynomial(int d = 1) : d_(d) {}
  static Polynomial monomial(const MultiIndex& a, cplx c = 1.0);
  static Polynomial constant(int d, cplx c);

  int dim() const { return d_; }
  int degree() const;  // -1 for the zero polynomial
  bool is_zero() const { return c_.empty(); }
  const std::map<MultiIndex, cplx>& coeffs() const { return c_; }
  cplx coeff(const MultiIndex& a) const;
  void set(const MultiIndex& a, cplx c);
  void add_to(const MultiIndex& a, cplx c);

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(cplx s) const;

  // Normalized derivative D^g = d^g / g!.
  Polynomial diff(const MultiIndex& g) const;
  // Plain partial derivative d^g; in this basis it just lowers indices.
  Polynomial partial(const MultiIndex& g) const;
  // x -> q(x - t).
  Polynomial translate(std::span<const double> t) const;
  cplx eval(std::span<const double> x) const;

  // Largest coefficient magnitude; 0 for the zero polynomial.
  double max_abs() const;
  // Drops coefficients with magnitude <= tol.
  Polynomial pruned(double tol) const;
  std::string str() const;

 private:
  void check(const Polynomial& o) const;
  int d_;
  std::map<MultiIndex, cplx> c_;
};

// Value of the normalized monomial ()^a at x.
double normalized_monomial(const MultiIndex& a, std::span<const double> x);

}  // namespace sia
