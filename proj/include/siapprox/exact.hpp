#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>
#include <vector>

namespace sia {

using cplx = std::complex<double>;

// Gaussian rational a + ib with a, b in Q.
struct GaussQ {
  mpq_class re{0}, im{0};

  GaussQ() = default;
  GaussQ(mpq_class r, mpq_class i = 0) : re(std::move(r)), im(std::move(i)) {}
  GaussQ(long n) : re(n), im(0) {}  // NOLINT
  // Exact binary value of a double-precision complex number.
  static GaussQ from_double(cplx z);
  static GaussQ i() { return GaussQ(0, 1); }

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  cplx to_complex() const { return {re.get_d(), im.get_d()}; }
  GaussQ conj() const { return GaussQ(re, -im); }

  GaussQ operator-() const { return GaussQ(-re, -im); }
  GaussQ& operator+=(const GaussQ& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GaussQ& operator-=(const GaussQ& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  friend GaussQ operator+(GaussQ a, const GaussQ& b) { return a += b; }
  friend GaussQ operator-(GaussQ a, const GaussQ& b) { return a -= b; }
  friend GaussQ operator*(const GaussQ& a, const GaussQ& b) {
    return GaussQ(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
  }
  GaussQ& operator*=(const GaussQ& o) { return *this = *this * o; }
  // Division by a nonzero Gaussian rational.
  friend GaussQ operator/(const GaussQ& a, const GaussQ& b);
  bool operator==(const GaussQ& o) const { return re == o.re && im == o.im; }

  std::string str() const;
};

// Element of Q(i)[pi]: a polynomial in pi with Gaussian-rational coefficients.
// Since pi is transcendental, such an element is zero exactly when every
// coefficient is zero. This ring contains all Taylor coefficients that arise
// when symbols built from exponentials, coordinates and rational constants are
// expanded around points of 2*pi*Q^d.
class PiPoly {
 public:
  PiPoly() = default;
  PiPoly(const GaussQ& c) : c_{c} { trim(); }  // NOLINT
  PiPoly(long n) : PiPoly(GaussQ(n)) {}         // NOLINT
  static PiPoly pi_times(const GaussQ& c);     // c * pi

  bool is_zero() const { return c_.empty(); }
  int pi_degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<GaussQ>& coeffs() const { return c_; }
  cplx to_complex() const;
  PiPoly conj() const;

  PiPoly operator-() const;
  PiPoly& operator+=(const PiPoly& o);
  PiPoly& operator-=(const PiPoly& o);
  friend PiPoly operator+(PiPoly a, const PiPoly& b) { return a += b; }
  friend PiPoly operator-(PiPoly a, const PiPoly& b) { return a -= b; }
  friend PiPoly operator*(const PiPoly& a, const PiPoly& b);
  PiPoly& operator*=(const PiPoly& o) { return *this = *this * o; }
  bool operator==(const PiPoly& o) const { return c_ == o.c_; }

  std::string str() const;

 private:
  void trim();
  std::vector<GaussQ> c_;  // c_[n] multiplies pi^n
};

// Rational approximation by continued fractions with bounded denominator.
mpq_class rational_approx(double x, long max_den);

}  // namespace sia
