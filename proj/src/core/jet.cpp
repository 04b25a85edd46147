#include "siapprox/jet.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "siapprox/errors.hpp"

namespace sia {

int JetLayout::index_of(const MultiIndex& a) const {
  int n = a.order();
  if (n > K) return -1;
  for (int i = deg_start[n]; i < deg_start[n + 1]; ++i)
    if (idx[i] == a) return i;
  return -1;
}

std::shared_ptr<const JetLayout> JetLayout::get(int d, int K) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(d, K);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  auto L = std::make_shared<JetLayout>();
  L->d = d;
  L->K = K;
  L->idx = enumerate_upto(d, K);
  for (const auto& a : L->idx) L->deg.push_back(a.order());
  L->deg_start.assign(K + 2, 0);
  for (int n = 0, i = 0; n <= K + 1; ++n) {
    while (i < L->size() && L->deg[i] < n) ++i;
    L->deg_start[n] = i;
  }
  std::map<MultiIndex, int> pos;
  for (int i = 0; i < L->size(); ++i) pos[L->idx[i]] = i;
  const std::size_t n = L->idx.size();
  L->add.assign(n * n, -1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (L->deg[i] + L->deg[j] <= K) L->add[i * n + j] = pos.at(L->idx[i] + L->idx[j]);
  cache[key] = L;
  return L;
}

namespace {
bool is_exact_zero(const cplx& x) { return x == cplx(0.0); }
bool is_exact_zero(const PiPoly& x) { return x.is_zero(); }
}  // namespace

template <class T>
TaylorJet<T>::TaylorJet(int d, int K, std::vector<double> base)
    : layout_(JetLayout::get(d, K)), base_(std::move(base)), c_(layout_->idx.size(), T(0)) {
  if (static_cast<int>(base_.size()) != d) throw DimensionMismatch("jet base dimension");
}

template <class T>
TaylorJet<T> TaylorJet<T>::constant(int d, int K, std::vector<double> base, const T& c) {
  TaylorJet j(d, K, std::move(base));
  j.c_[0] = c;
  return j;
}

template <class T>
TaylorJet<T> TaylorJet<T>::coordinate(int d, int K, std::vector<double> base, int jdx, const T& value) {
  TaylorJet j(d, K, std::move(base));
  j.c_[0] = value;
  if (K >= 1) j.c_[static_cast<std::size_t>(j.layout_->index_of(MultiIndex::unit(d, jdx)))] = T(1);
  return j;
}

template <class T>
T TaylorJet<T>::coeff(const MultiIndex& a) const {
  int i = layout_->index_of(a);
  return i < 0 ? T(0) : c_[static_cast<std::size_t>(i)];
}

template <class T>
TaylorJet<T> TaylorJet<T>::truncated(int K) const {
  if (K >= degree()) return *this;
  TaylorJet r(dim(), K, base_);
  for (int i = 0; i < r.layout_->size(); ++i) r.c_[i] = c_[i];
  return r;
}

template <class T>
TaylorJet<T> TaylorJet<T>::rebased(std::vector<double> base) const {
  TaylorJet r = *this;
  r.base_ = std::move(base);
  return r;
}

template <class T>
void TaylorJet<T>::check(const TaylorJet& o) const {
  if (dim() != o.dim()) throw DimensionMismatch("jet dimension");
  for (int i = 0; i < dim(); ++i) {
    double a = base_[i], b = o.base_[i];
    if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
      throw BaseMismatch("jets expanded at different base points");
  }
}

template <class T>
TaylorJet<T> TaylorJet<T>::operator-() const {
  TaylorJet r = *this;
  for (auto& c : r.c_) c = -c;
  return r;
}

template <class T>
TaylorJet<T>& TaylorJet<T>::operator+=(const TaylorJet& o) {
  check(o);
  if (o.degree() < degree()) *this = truncated(o.degree());
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

template <class T>
TaylorJet<T>& TaylorJet<T>::operator-=(const TaylorJet& o) {
  check(o);
  if (o.degree() < degree()) *this = truncated(o.degree());
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

template <class T>
TaylorJet<T> TaylorJet<T>::operator*(const TaylorJet& o) const {
  check(o);
  const int K = std::min(degree(), o.degree());
  TaylorJet r(dim(), K, base_);
  const JetLayout& L = *r.layout_;
  const int n = L.size();
  for (int i = 0; i < n; ++i) {
    if (is_exact_zero(c_[i])) continue;
    const int jmax = L.deg_start[K - L.deg[i] + 1];
    for (int j = 0; j < jmax; ++j) {
      if (is_exact_zero(o.c_[j])) continue;
      r.c_[L.sum_index(i, j)] += c_[i] * o.c_[j];
    }
  }
  return r;
}

template <class T>
TaylorJet<T> TaylorJet<T>::scaled(const T& s) const {
  TaylorJet r = *this;
  for (auto& c : r.c_) c = c * s;
  return r;
}

template <class T>
TaylorJet<T> TaylorJet<T>::pow(int n) const {
  if (n < 0) throw InputError("negative jet power");
  TaylorJet result = constant(dim(), degree(), base_, T(1));
  TaylorJet b = *this;
  while (n > 0) {
    if (n & 1) result = result * b;
    n >>= 1;
    if (n) b = b * b;
  }
  return result;
}

template <>
int TaylorJet<cplx>::zero_order() const {
  double mx = 0.0;
  for (const auto& c : c_) mx = std::max(mx, std::abs(c));
  const double tol = kJetZeroTol * std::max(1.0, mx);
  for (int i = 0; i < layout_->size(); ++i)
    if (std::abs(c_[i]) > tol) return layout_->deg[i];
  return degree() + 1;
}

template <>
int TaylorJet<PiPoly>::zero_order() const {
  for (int i = 0; i < layout_->size(); ++i)
    if (!c_[i].is_zero()) return layout_->deg[i];
  return degree() + 1;
}

template class TaylorJet<cplx>;
template class TaylorJet<PiPoly>;

Jet jet_mul(const Jet& a, const Jet& b) { return a * b; }

namespace {

double max_abs(const Jet& j) {
  double m = 0.0;
  for (const auto& c : j.coeffs()) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

Jet jet_div_order(const Jet& num, const Jet& den, int m) {
  if (num.dim() != den.dim()) throw DimensionMismatch("jet dimension");
  const int K = std::min(num.degree(), den.degree());
  if (m > K) throw DegreeExhausted("denominator vanishes to full degree " + std::to_string(K));
  const int d = num.dim();
  const JetLayout& L = *JetLayout::get(d, K);
  const double nscale = std::max(1.0, max_abs(num));

  // Low-order numerator terms must vanish for the singularity to be removable.
  const double low_tol = 1e-7 * nscale;
  for (int i = 0; i < L.deg_start[m]; ++i)
    if (std::abs(num[i]) > low_tol)
      throw NonRemovableSingularity("numerator has order " + std::to_string(L.deg[i]) + " < denominator order " +
                                    std::to_string(m));

  // Leading term of g_m in descending lexicographic order: the last monomial of the slice
  // in ascending order with a nonzero coefficient is the lex-largest one.
  double gmax = 0.0;
  for (int i = L.deg_start[m]; i < L.deg_start[m + 1]; ++i) gmax = std::max(gmax, std::abs(den[i]));
  if (gmax == 0.0) throw DegreeExhausted("empty leading denominator part");
  int lead = -1;
  for (int i = L.deg_start[m + 1] - 1; i >= L.deg_start[m]; --i)
    if (std::abs(den[i]) > 1e-8 * gmax) {
      lead = i;
      break;
    }
  const MultiIndex LM = L.idx[lead];
  const cplx LC = den[lead];

  Jet q(d, K - m, num.base());
  const JetLayout& Q = q.layout();
  std::vector<cplx> rem(L.size());
  for (int n = 0; n <= K - m; ++n) {
    // rem = f_{n+m} - sum_{j=1..n} q_{n-j} g_{m+j}, restricted to degree n+m.
    const int lo = L.deg_start[n + m], hi = L.deg_start[n + m + 1];
    double hmax = 0.0;
    for (int t = lo; t < hi; ++t) rem[t] = num[t];
    for (int qi = 0; qi < Q.deg_start[n]; ++qi) {
      if (q[qi] == cplx(0.0)) continue;
      // Layouts are graded prefixes of each other, so position qi is valid in L too.
      const int gd = n + m - Q.deg[qi];
      for (int gi = L.deg_start[gd]; gi < L.deg_start[gd + 1]; ++gi) rem[L.sum_index(qi, gi)] -= q[qi] * den[gi];
    }
    for (int t = lo; t < hi; ++t) hmax = std::max(hmax, std::abs(rem[t]));
    // Single pass in descending lex order: each step only touches smaller monomials.
    for (int t = hi - 1; t >= lo; --t) {
      if (!LM.leq(L.idx[t])) continue;
      cplx c = rem[t] / LC;
      if (c == cplx(0.0)) continue;
      MultiIndex qa = L.idx[t] - LM;
      const int qpos = L.index_of(qa);
      q[qpos] += c;
      for (int gi = L.deg_start[m]; gi < L.deg_start[m + 1]; ++gi) rem[L.sum_index(qpos, gi)] -= c * den[gi];
    }
    double rmax = 0.0;
    for (int t = lo; t < hi; ++t) rmax = std::max(rmax, std::abs(rem[t]));
    if (rmax > 1e-7 * std::max(hmax, 1e-6 * nscale))
      throw NonRemovableSingularity("inexact homogeneous division at degree " + std::to_string(n + m));
  }
  return q;
}

Jet jet_div(const Jet& num, const Jet& den) {
  const int K = std::min(num.degree(), den.degree());
  const int m = den.truncated(K).zero_order();
  if (m > K) throw DegreeExhausted("denominator vanishes to full degree " + std::to_string(K));
  const int nz = num.truncated(K).zero_order();
  if (nz < m)
    throw NonRemovableSingularity("numerator zero order " + std::to_string(nz) + " < denominator zero order " +
                                  std::to_string(m));
  return jet_div_order(num, den, m);
}

cplx jet_eval_offset(const Jet& j, std::span<const double> h) {
  const JetLayout& L = j.layout();
  cplx s = 0.0;
  for (int i = 0; i < L.size(); ++i) {
    if (j[i] == cplx(0.0)) continue;
    double p = 1.0;
    for (int k = 0; k < L.d; ++k) p *= std::pow(h[k], L.idx[i][k]);
    s += j[i] * p;
  }
  return s;
}

Jet to_float(const ExactJet& e) {
  Jet j(e.dim(), e.degree(), e.base());
  for (int i = 0; i < e.layout().size(); ++i) j[i] = e[i].to_complex();
  return j;
}

}  // namespace sia
