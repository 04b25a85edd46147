#include "siapprox/exact.hpp"

#include <cmath>
#include <numbers>

#include "siapprox/errors.hpp"

namespace sia {

GaussQ GaussQ::from_double(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw NotExact("non-finite value has no rational representation");
  GaussQ g;
  mpq_set_d(g.re.get_mpq_t(), z.real());
  mpq_set_d(g.im.get_mpq_t(), z.imag());
  return g;
}

GaussQ operator/(const GaussQ& a, const GaussQ& b) {
  mpq_class n = b.re * b.re + b.im * b.im;
  if (sgn(n) == 0) throw NonRemovableSingularity("division by exact zero");
  GaussQ num = a * b.conj();
  return GaussQ(num.re / n, num.im / n);
}

std::string GaussQ::str() const {
  if (sgn(im) == 0) return re.get_str();
  return "(" + re.get_str() + (sgn(im) < 0 ? "" : "+") + im.get_str() + "i)";
}

PiPoly PiPoly::pi_times(const GaussQ& c) {
  PiPoly p;
  p.c_ = {GaussQ(), c};
  p.trim();
  return p;
}

void PiPoly::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

cplx PiPoly::to_complex() const {
  cplx acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * std::numbers::pi + it->to_complex();
  return acc;
}

PiPoly PiPoly::conj() const {
  PiPoly r = *this;
  for (auto& c : r.c_) c = c.conj();
  return r;
}

PiPoly PiPoly::operator-() const {
  PiPoly r = *this;
  for (auto& c : r.c_) c = -c;
  return r;
}

PiPoly& PiPoly::operator+=(const PiPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  trim();
  return *this;
}

PiPoly& PiPoly::operator-=(const PiPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  trim();
  return *this;
}

PiPoly operator*(const PiPoly& a, const PiPoly& b) {
  PiPoly r;
  if (a.is_zero() || b.is_zero()) return r;
  r.c_.assign(a.c_.size() + b.c_.size() - 1, GaussQ());
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
  r.trim();
  return r;
}

std::string PiPoly::str() const {
  if (c_.empty()) return "0";
  std::string s;
  for (std::size_t n = 0; n < c_.size(); ++n) {
    if (c_[n].is_zero()) continue;
    if (!s.empty()) s += " + ";
    s += c_[n].str();
    if (n == 1) s += "*pi";
    if (n > 1) s += "*pi^" + std::to_string(n);
  }
  return s;
}

mpq_class rational_approx(double x, long max_den) {
  // Standard continued-fraction convergents; stop before the denominator bound.
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    double a = std::floor(r);
    if (std::abs(a) > 1e15) break;
    long ai = static_cast<long>(a);
    long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    double frac = r - a;
    if (std::abs(frac) < 1e-15) break;
    r = 1.0 / frac;
  }
  if (k1 == 0) return mpq_class(0);
  mpq_class q(h1, k1);
  q.canonicalize();
  return q;
}

}  // namespace sia
