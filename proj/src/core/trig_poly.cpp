#include "siapprox/trig_poly.hpp"

#include <cmath>

#include "siapprox/errors.hpp"

namespace sia {

GaussQ exact_unit_exp(const mpq_class& x) {
  mpq_class four_x = x * 4;
  four_x.canonicalize();
  if (four_x.get_den() != 1) throw NotExact("exp(-2 pi i x) with x not in Z/4");
  mpz_class r = four_x.get_num() % 4;
  if (r < 0) r += 4;
  switch (r.get_si()) {
    case 0: return GaussQ(1);
    case 1: return GaussQ(0, -1);
    case 2: return GaussQ(-1);
    default: return GaussQ(0, 1);
  }
}

TrigPoly TrigPoly::constant(int d, cplx c) {
  TrigPoly t(d);
  t.set(LatticeIndex(static_cast<std::size_t>(d), 0), c);
  return t;
}

TrigPoly TrigPoly::constant_exact(int d, const GaussQ& c) {
  TrigPoly t(d);
  t.exact_.emplace();
  t.set_exact(LatticeIndex(static_cast<std::size_t>(d), 0), c);
  return t;
}

TrigPoly TrigPoly::monomial(const LatticeIndex& j, cplx c) {
  TrigPoly t(static_cast<int>(j.size()));
  t.set(j, c);
  return t;
}

void TrigPoly::set(const LatticeIndex& j, cplx c) {
  if (static_cast<int>(j.size()) != d_) throw DimensionMismatch("trig coefficient index");
  exact_.reset();
  if (c == cplx(0.0))
    c_.erase(j);
  else
    c_[j] = c;
}

void TrigPoly::set_exact(const LatticeIndex& j, const GaussQ& c) {
  if (static_cast<int>(j.size()) != d_) throw DimensionMismatch("trig coefficient index");
  if (!exact_) {
    if (!c_.empty()) *this = with_exact_from_doubles();
    else exact_.emplace();
  }
  if (c.is_zero()) {
    c_.erase(j);
    exact_->erase(j);
  } else {
    c_[j] = c.to_complex();
    (*exact_)[j] = c;
  }
}

TrigPoly TrigPoly::with_exact_from_doubles() const {
  TrigPoly t = *this;
  t.exact_.emplace();
  for (const auto& [j, c] : c_) (*t.exact_)[j] = GaussQ::from_double(c);
  return t;
}

cplx TrigPoly::eval(std::span<const double> w) const {
  cplx s = 0.0;
  for (const auto& [j, c] : c_) {
    double ph = 0.0;
    for (int k = 0; k < d_; ++k) ph += j[k] * w[k];
    s += c * cplx(std::cos(ph), -std::sin(ph));
  }
  return s;
}

Jet TrigPoly::jet_at(std::span<const double> p, int K) const {
  Jet out(d_, K, std::vector<double>(p.begin(), p.end()));
  const JetLayout& L = out.layout();
  for (const auto& [j, c] : c_) {
    double ph = 0.0;
    for (int k = 0; k < d_; ++k) ph += j[k] * p[k];
    const cplx base = c * cplx(std::cos(ph), -std::sin(ph));
    for (int i = 0; i < L.size(); ++i) {
      // (-i j)^g / g!
      double mag = 1.0;
      for (int k = 0; k < d_; ++k) mag *= std::pow(static_cast<double>(j[k]), L.idx[i][k]) / factorial(L.idx[i][k]);
      if (mag == 0.0) continue;
      static const cplx mi_pow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
      out[i] += base * mag * mi_pow[L.deg[i] % 4];
    }
  }
  return out;
}

ExactJet TrigPoly::exact_jet_at(const RatPoint& q, int K) const {
  if (!exact_) throw NotExact("trigonometric polynomial has no exact coefficients");
  std::vector<double> base(static_cast<std::size_t>(d_));
  for (int k = 0; k < d_; ++k) base[k] = 2.0 * M_PI * q[k].get_d();
  ExactJet out(d_, K, base);
  const JetLayout& L = out.layout();
  for (const auto& [j, c] : *exact_) {
    mpq_class x = 0;
    for (int k = 0; k < d_; ++k) x += j[k] * q[k];
    const GaussQ b = c * exact_unit_exp(x);
    for (int i = 0; i < L.size(); ++i) {
      mpq_class mag = 1;
      for (int k = 0; k < d_; ++k) {
        mpz_class pw;
        mpz_pow_ui(pw.get_mpz_t(), mpz_class(j[k]).get_mpz_t(), static_cast<unsigned long>(L.idx[i][k]));
        mag *= mpq_class(pw) / mpq_class(mpz_class(static_cast<long>(factorial(L.idx[i][k]))));
      }
      if (sgn(mag) == 0) continue;
      static const GaussQ mi_pow[4] = {GaussQ(1), GaussQ(0, -1), GaussQ(-1), GaussQ(0, 1)};
      out[i] += PiPoly(b * GaussQ(mag) * mi_pow[L.deg[i] % 4]);
    }
  }
  return out;
}

TrigPoly TrigPoly::operator+(const TrigPoly& o) const {
  if (d_ != o.d_) throw DimensionMismatch("trig poly sum");
  TrigPoly r(d_);
  if (exact_ && o.exact_) {
    r.exact_.emplace();
    for (const auto& [j, c] : *exact_) r.set_exact(j, c);
    for (const auto& [j, c] : *o.exact_) {
      auto it = r.exact_->find(j);
      r.set_exact(j, it == r.exact_->end() ? c : it->second + c);
    }
    return r;
  }
  r.c_ = c_;
  for (const auto& [j, c] : o.c_) {
    cplx v = r.c_.count(j) ? r.c_[j] + c : c;
    r.set(j, v);
  }
  return r;
}

TrigPoly TrigPoly::operator-(const TrigPoly& o) const {
  if (o.exact_) return *this + o.scaled_exact(GaussQ(-1));
  return *this + o.scaled(-1.0);
}

TrigPoly TrigPoly::operator*(const TrigPoly& o) const {
  if (d_ != o.d_) throw DimensionMismatch("trig poly product");
  TrigPoly r(d_);
  auto add_idx = [&](const LatticeIndex& a, const LatticeIndex& b) {
    LatticeIndex s(a);
    for (int k = 0; k < d_; ++k) s[k] += b[k];
    return s;
  };
  if (exact_ && o.exact_) {
    std::map<LatticeIndex, GaussQ> acc;
    for (const auto& [a, ca] : *exact_)
      for (const auto& [b, cb] : *o.exact_) acc[add_idx(a, b)] += ca * cb;
    r.exact_.emplace();
    for (const auto& [j, c] : acc) r.set_exact(j, c);
    return r;
  }
  std::map<LatticeIndex, cplx> acc;
  for (const auto& [a, ca] : c_)
    for (const auto& [b, cb] : o.c_) acc[add_idx(a, b)] += ca * cb;
  for (const auto& [j, c] : acc) r.set(j, c);
  return r;
}

TrigPoly TrigPoly::scaled(cplx s) const {
  TrigPoly r(d_);
  for (const auto& [j, c] : c_) r.set(j, c * s);
  return r;
}

TrigPoly TrigPoly::scaled_exact(const GaussQ& s) const {
  if (!exact_) return scaled(s.to_complex());
  TrigPoly r(d_);
  r.exact_.emplace();
  for (const auto& [j, c] : *exact_) r.set_exact(j, c * s);
  return r;
}

TrigPoly TrigPoly::adjoint() const {
  TrigPoly r(d_);
  auto neg = [](LatticeIndex j) {
    for (int& x : j) x = -x;
    return j;
  };
  if (exact_) {
    r.exact_.emplace();
    for (const auto& [j, c] : *exact_) r.set_exact(neg(j), c.conj());
    return r;
  }
  for (const auto& [j, c] : c_) r.set(neg(j), std::conj(c));
  return r;
}

TrigPoly TrigPoly::dilated(int m) const {
  TrigPoly r(d_);
  auto mul = [m](LatticeIndex j) {
    for (int& x : j) x *= m;
    return j;
  };
  if (exact_) {
    r.exact_.emplace();
    for (const auto& [j, c] : *exact_) r.set_exact(mul(j), c);
    return r;
  }
  for (const auto& [j, c] : c_) r.set(mul(j), c);
  return r;
}

double TrigPoly::max_abs() const {
  double m = 0.0;
  for (const auto& [j, c] : c_) m = std::max(m, std::abs(c));
  return m;
}

// ---------------------------------------------------------------------------

TrigPolyMatrix::TrigPolyMatrix(int rows, int cols, int d)
    : rows_(rows), cols_(cols), d_(d), e_(static_cast<std::size_t>(rows * cols), TrigPoly(d)) {}

TrigPolyMatrix TrigPolyMatrix::identity(int r, int d) {
  TrigPolyMatrix m(r, r, d);
  for (int i = 0; i < r; ++i) m(i, i) = TrigPoly::constant_exact(d, GaussQ(1));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      if (i != j) m(i, j) = TrigPoly(d).with_exact_from_doubles();
  return m;
}

TrigPolyMatrix TrigPolyMatrix::column(const std::vector<TrigPoly>& entries) {
  if (entries.empty()) throw InputError("empty trig vector");
  TrigPolyMatrix m(static_cast<int>(entries.size()), 1, entries.front().dim());
  for (std::size_t i = 0; i < entries.size(); ++i) m.e_[i] = entries[i];
  return m;
}

bool TrigPolyMatrix::has_exact() const {
  for (const auto& e : e_)
    if (!e.has_exact()) return false;
  return true;
}

Eigen::MatrixXcd TrigPolyMatrix::eval(std::span<const double> w) const {
  Eigen::MatrixXcd m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).eval(w);
  return m;
}

std::vector<Jet> TrigPolyMatrix::jet_at(std::span<const double> p, int K) const {
  std::vector<Jet> out;
  out.reserve(e_.size());
  for (const auto& e : e_) out.push_back(e.jet_at(p, K));
  return out;
}

std::vector<ExactJet> TrigPolyMatrix::exact_jet_at(const RatPoint& q, int K) const {
  std::vector<ExactJet> out;
  out.reserve(e_.size());
  for (const auto& e : e_) out.push_back(e.exact_jet_at(q, K));
  return out;
}

TrigPolyMatrix TrigPolyMatrix::operator*(const TrigPolyMatrix& o) const {
  if (cols_ != o.rows_ || d_ != o.d_) throw DimensionMismatch("trig matrix product");
  TrigPolyMatrix r(rows_, o.cols_, d_);
  const bool ex = has_exact() && o.has_exact();
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < o.cols_; ++j) {
      TrigPoly acc = ex ? TrigPoly(d_).with_exact_from_doubles() : TrigPoly(d_);
      for (int k = 0; k < cols_; ++k) acc = acc + (*this)(i, k) * o(k, j);
      r(i, j) = acc;
    }
  return r;
}

TrigPolyMatrix TrigPolyMatrix::operator+(const TrigPolyMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("trig matrix sum");
  TrigPolyMatrix r = *this;
  for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i] + o.e_[i];
  return r;
}

TrigPolyMatrix TrigPolyMatrix::scaled(cplx s) const {
  TrigPolyMatrix r = *this;
  for (auto& e : r.e_) e = e.scaled(s);
  return r;
}

TrigPolyMatrix TrigPolyMatrix::adjoint() const {
  TrigPolyMatrix r(cols_, rows_, d_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j).adjoint();
  return r;
}

TrigPolyMatrix TrigPolyMatrix::dilated(int m) const {
  TrigPolyMatrix r = *this;
  for (auto& e : r.e_) e = e.dilated(m);
  return r;
}

}  // namespace sia
