#include "siapprox/polynomial.hpp"

#include <cmath>
#include <sstream>

#include "siapprox/errors.hpp"

namespace sia {

Polynomial Polynomial::monomial(const MultiIndex& a, cplx c) {
  Polynomial p(a.dim());
  p.set(a, c);
  return p;
}

Polynomial Polynomial::constant(int d, cplx c) { return monomial(MultiIndex(d), c); }

int Polynomial::degree() const {
  int deg = -1;
  for (const auto& [a, c] : c_) deg = std::max(deg, a.order());
  return deg;
}

cplx Polynomial::coeff(const MultiIndex& a) const {
  auto it = c_.find(a);
  return it == c_.end() ? cplx(0.0) : it->second;
}

void Polynomial::set(const MultiIndex& a, cplx c) {
  if (a.dim() != d_) throw DimensionMismatch("monomial dimension");
  if (c == cplx(0.0))
    c_.erase(a);
  else
    c_[a] = c;
}

void Polynomial::add_to(const MultiIndex& a, cplx c) { set(a, coeff(a) + c); }

void Polynomial::check(const Polynomial& o) const {
  if (d_ != o.d_) throw DimensionMismatch("polynomials of dimension " + std::to_string(d_) + " and " + std::to_string(o.d_));
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  check(o);
  Polynomial r = *this;
  for (const auto& [a, c] : o.c_) r.add_to(a, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * cplx(-1.0); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  check(o);
  Polynomial r(d_);
  for (const auto& [a, ca] : c_)
    for (const auto& [b, cb] : o.c_) {
      // ()^a ()^b = (a+b)!/(a! b!) ()^(a+b)
      double m = 1.0;
      for (int i = 0; i < d_; ++i) m *= binomial(a[i] + b[i], a[i]);
      r.add_to(a + b, ca * cb * m);
    }
  return r;
}

Polynomial Polynomial::operator*(cplx s) const {
  Polynomial r(d_);
  for (const auto& [a, c] : c_) r.set(a, c * s);
  return r;
}

Polynomial Polynomial::partial(const MultiIndex& g) const {
  if (g.dim() != d_) throw DimensionMismatch("derivative order dimension");
  Polynomial r(d_);
  for (const auto& [a, c] : c_)
    if (g.leq(a)) r.set(a - g, c);
  return r;
}

Polynomial Polynomial::diff(const MultiIndex& g) const { return partial(g) * cplx(1.0 / g.factorial()); }

Polynomial Polynomial::translate(std::span<const double> t) const {
  if (static_cast<int>(t.size()) != d_) throw DimensionMismatch("translation vector");
  std::vector<double> neg(t.begin(), t.end());
  for (double& x : neg) x = -x;
  Polynomial r(d_);
  for (const auto& [a, c] : c_)
    for (const auto& b : enumerate_upto(d_, a.order()))
      if (b.leq(a)) r.add_to(b, c * normalized_monomial(a - b, neg));
  return r;
}

cplx Polynomial::eval(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != d_) throw DimensionMismatch("evaluation point");
  cplx s = 0.0;
  for (const auto& [a, c] : c_) s += c * normalized_monomial(a, x);
  return s;
}

double Polynomial::max_abs() const {
  double m = 0.0;
  for (const auto& [a, c] : c_) m = std::max(m, std::abs(c));
  return m;
}

Polynomial Polynomial::pruned(double tol) const {
  Polynomial r(d_);
  for (const auto& [a, c] : c_)
    if (std::abs(c) > tol) r.set(a, c);
  return r;
}

std::string Polynomial::str() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [a, c] : c_) {
    if (!first) os << " + ";
    first = false;
    if (c.imag() == 0.0)
      os << c.real();
    else
      os << "(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i)";
    if (a.order() > 0) os << "*()^" << a.str();
  }
  return os.str();
}

double normalized_monomial(const MultiIndex& a, std::span<const double> x) {
  double v = 1.0;
  for (int i = 0; i < a.dim(); ++i) v *= std::pow(x[i], a[i]) / factorial(a[i]);
  return v;
}

}  // namespace sia
