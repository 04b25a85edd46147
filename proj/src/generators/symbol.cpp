#include "siapprox/symbol.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "siapprox/errors.hpp"

namespace sia {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Distance to a singular hyperplane below which evaluation switches to a jet.
constexpr double kNearSingular = 1e-3;
// Degree of that jet.
constexpr int kRerouteDegree = 6;

GaussQ exact_real(double x) { return GaussQ::from_double(cplx(x, 0.0)); }

mpq_class exact_q(double x) {
  mpq_class q;
  mpq_set_d(q.get_mpq_t(), x);
  return q;
}

bool is_one(const ExactJet& j) {
  if (!(j[0] == PiPoly(1))) return false;
  for (int i = 1; i < j.layout().size(); ++i)
    if (!j[i].is_zero()) return false;
  return true;
}

ExactFrac frac_from(ExactJet num) {
  ExactJet den = ExactJet::constant(num.dim(), num.degree(), num.base(), PiPoly(1));
  return {std::move(num), std::move(den)};
}

ExactFrac frac_mul(const ExactFrac& a, const ExactFrac& b) {
  ExactJet den = is_one(a.den) ? b.den : (is_one(b.den) ? a.den : a.den * b.den);
  return {a.num * b.num, den};
}

ExactFrac frac_add(const ExactFrac& a, const ExactFrac& b) {
  if (is_one(a.den) && is_one(b.den)) return {a.num + b.num, a.den};
  return {a.num * b.den + b.num * a.den, a.den * b.den};
}

// ---------------------------------------------------------------------------

class ConstNode : public SymbolNode {
 public:
  ConstNode(int d, cplx c, std::optional<GaussQ> ex) : SymbolNode(d), c_(c), ex_(std::move(ex)) {}
  cplx eval(const double*) const override { return c_; }
  Jet jet(const std::vector<double>& p, int K) const override { return Jet::constant(d_, K, p, c_); }
  ExactFrac exact(const RatPoint& q, int K) const override {
    GaussQ g = ex_ ? *ex_ : GaussQ::from_double(c_);
    return frac_from(ExactJet::constant(d_, K, two_pi_times(q), PiPoly(g)));
  }
  double decay() const override { return 0.0; }
  bool affine_factors(std::vector<AffineFactor>&, int) const override { return true; }
  std::string describe() const override {
    std::ostringstream os;
    if (c_.imag() == 0.0)
      os << c_.real();
    else
      os << "(" << c_.real() << "," << c_.imag() << ")";
    return os.str();
  }
  cplx value() const { return c_; }

 private:
  cplx c_;
  std::optional<GaussQ> ex_;
};

class AffineNode : public SymbolNode {
 public:
  AffineNode(std::vector<double> a, double b) : SymbolNode(static_cast<int>(a.size())), a_(std::move(a)), b_(b) {}
  cplx eval(const double* w) const override {
    double s = b_;
    for (int k = 0; k < d_; ++k) s += a_[k] * w[k];
    return s;
  }
  Jet jet(const std::vector<double>& p, int K) const override {
    Jet j = Jet::constant(d_, K, p, eval(p.data()));
    if (K >= 1)
      for (int k = 0; k < d_; ++k) j[j.layout().index_of(MultiIndex::unit(d_, k))] = a_[k];
    return j;
  }
  ExactFrac exact(const RatPoint& q, int K) const override {
    mpq_class lin = 0;
    for (int k = 0; k < d_; ++k) lin += exact_q(a_[k]) * q[k];
    ExactJet j = ExactJet::constant(d_, K, two_pi_times(q), PiPoly(exact_real(b_)) + PiPoly::pi_times(GaussQ(2 * lin)));
    if (K >= 1)
      for (int k = 0; k < d_; ++k) j[j.layout().index_of(MultiIndex::unit(d_, k))] = PiPoly(exact_real(a_[k]));
    return frac_from(std::move(j));
  }
  double decay() const override { return -1.0; }
  bool affine_factors(std::vector<AffineFactor>& out, int mult) const override {
    out.push_back({a_, b_, mult});
    return true;
  }
  std::string describe() const override {
    std::ostringstream os;
    bool first = true;
    for (int k = 0; k < d_; ++k) {
      if (a_[k] == 0.0) continue;
      if (!first) os << "+";
      first = false;
      if (a_[k] != 1.0) os << a_[k] << "*";
      os << "w" << k + 1;
    }
    if (b_ != 0.0 || first) os << (first ? "" : "+") << b_;
    return os.str();
  }

 private:
  std::vector<double> a_;
  double b_;
};

class ExpNode : public SymbolNode {
 public:
  explicit ExpNode(std::vector<double> a) : SymbolNode(static_cast<int>(a.size())), a_(std::move(a)) {}
  cplx eval(const double* w) const override {
    double ph = 0.0;
    for (int k = 0; k < d_; ++k) ph += a_[k] * w[k];
    return {std::cos(ph), -std::sin(ph)};
  }
  Jet jet(const std::vector<double>& p, int K) const override {
    Jet j(d_, K, p);
    const cplx base = eval(p.data());
    const JetLayout& L = j.layout();
    static const cplx mi[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    for (int i = 0; i < L.size(); ++i) {
      double mag = 1.0;
      for (int k = 0; k < d_; ++k) mag *= std::pow(a_[k], L.idx[i][k]) / factorial(L.idx[i][k]);
      j[i] = base * mag * mi[L.deg[i] % 4];
    }
    return j;
  }
  ExactFrac exact(const RatPoint& q, int K) const override {
    mpq_class x = 0;
    for (int k = 0; k < d_; ++k) x += exact_q(a_[k]) * q[k];
    const GaussQ base = exact_unit_exp(x);
    ExactJet j(d_, K, two_pi_times(q));
    const JetLayout& L = j.layout();
    static const GaussQ mi[4] = {GaussQ(1), GaussQ(0, -1), GaussQ(-1), GaussQ(0, 1)};
    for (int i = 0; i < L.size(); ++i) {
      mpq_class mag = 1;
      for (int k = 0; k < d_; ++k) {
        mpq_class ak = exact_q(a_[k]), pw = 1;
        for (int e = 0; e < L.idx[i][k]; ++e) pw *= ak;
        mag *= pw / mpq_class(static_cast<long>(factorial(L.idx[i][k])));
      }
      j[i] = PiPoly(base * GaussQ(mag) * mi[L.deg[i] % 4]);
    }
    return frac_from(std::move(j));
  }
  double decay() const override { return 0.0; }
  std::string describe() const override {
    std::ostringstream os;
    os << "exp(-i[";
    for (int k = 0; k < d_; ++k) os << (k ? "," : "") << a_[k];
    os << "].w)";
    return os.str();
  }

 private:
  std::vector<double> a_;
};

class TrigNode : public SymbolNode {
 public:
  explicit TrigNode(TrigPoly t) : SymbolNode(t.dim()), t_(std::move(t)) {}
  cplx eval(const double* w) const override { return t_.eval(std::span<const double>(w, d_)); }
  Jet jet(const std::vector<double>& p, int K) const override { return t_.jet_at(p, K); }
  ExactFrac exact(const RatPoint& q, int K) const override {
    // Rounded coefficients are not promoted: their residue would break exact cancellations.
    return frac_from(t_.exact_jet_at(q, K));
  }
  double decay() const override { return 0.0; }
  std::string describe() const override { return "trig[" + std::to_string(t_.coeffs().size()) + " terms]"; }

 private:
  TrigPoly t_;
};

class SumNode : public SymbolNode {
 public:
  explicit SumNode(std::vector<FourierSymbol> t) : SymbolNode(t.front().dim()), t_(std::move(t)) {}
  cplx eval(const double* w) const override {
    cplx s = 0.0;
    for (const auto& t : t_) s += t.node().eval(w);
    return s;
  }
  Jet jet(const std::vector<double>& p, int K) const override {
    Jet s = t_.front().node().jet(p, K);
    for (std::size_t i = 1; i < t_.size(); ++i) s += t_[i].node().jet(p, K);
    return s;
  }
  ExactFrac exact(const RatPoint& q, int K) const override {
    ExactFrac s = t_.front().node().exact(q, K);
    for (std::size_t i = 1; i < t_.size(); ++i) s = frac_add(s, t_[i].node().exact(q, K));
    return s;
  }
  double decay() const override {
    double m = t_.front().decay();
    for (const auto& t : t_) m = std::min(m, t.decay());
    return m;
  }
  std::string describe() const override {
    std::string s = "(";
    for (std::size_t i = 0; i < t_.size(); ++i) s += (i ? " + " : "") + t_[i].describe();
    return s + ")";
  }

 private:
  std::vector<FourierSymbol> t_;
};

class ProductNode : public SymbolNode {
 public:
  explicit ProductNode(std::vector<FourierSymbol> f) : SymbolNode(f.front().dim()), f_(std::move(f)) {}
  cplx eval(const double* w) const override {
    cplx s = 1.0;
    for (const auto& f : f_) s *= f.node().eval(w);
    return s;
  }
  Jet jet(const std::vector<double>& p, int K) const override {
    Jet s = f_.front().node().jet(p, K);
    for (std::size_t i = 1; i < f_.size(); ++i) s = s * f_[i].node().jet(p, K);
    return s;
  }
  ExactFrac exact(const RatPoint& q, int K) const override {
    ExactFrac s = f_.front().node().exact(q, K);
    for (std::size_t i = 1; i < f_.size(); ++i) s = frac_mul(s, f_[i].node().exact(q, K));
    return s;
  }
  double decay() const override {
    double m = 0.0;
    for (const auto& f : f_) m += f.decay();
    return m;
  }
  bool affine_factors(std::vector<AffineFactor>& out, int mult) const override {
    for (const auto& f : f_)
      if (!f.node().affine_factors(out, mult)) return false;
    return true;
  }
  std::string describe() const override {
    std::string s;
    for (std::size_t i = 0; i < f_.size(); ++i) s += (i ? "*" : "") + f_[i].describe();
    return s;
  }

 private:
  std::vector<FourierSymbol> f_;
};

class PowerNode : public SymbolNode {
 public:
  PowerNode(FourierSymbol b, int n) : SymbolNode(b.dim()), b_(std::move(b)), n_(n) {}
  cplx eval(const double* w) const override {
    cplx x = b_.node().eval(w), r = 1.0;
    for (int i = 0; i < n_; ++i) r *= x;
    return r;
  }
  Jet jet(const std::vector<double>& p, int K) const override { return b_.node().jet(p, K).pow(n_); }
  ExactFrac exact(const RatPoint& q, int K) const override {
    ExactFrac e = b_.node().exact(q, K);
    return {e.num.pow(n_), is_one(e.den) ? e.den : e.den.pow(n_)};
  }
  double decay() const override { return n_ * b_.decay(); }
  bool affine_factors(std::vector<AffineFactor>& out, int mult) const override {
    return b_.node().affine_factors(out, mult * n_);
  }
  std::string describe() const override { return "(" + b_.describe() + ")^" + std::to_string(n_); }

 private:
  FourierSymbol b_;
  int n_;
};

class ScaleNode : public SymbolNode {
 public:
  ScaleNode(FourierSymbol b, cplx c, std::optional<GaussQ> ex)
      : SymbolNode(b.dim()), b_(std::move(b)), c_(c), ex_(std::move(ex)) {}
  cplx eval(const double* w) const override { return c_ * b_.node().eval(w); }
  Jet jet(const std::vector<double>& p, int K) const override { return b_.node().jet(p, K).scaled(c_); }
  ExactFrac exact(const RatPoint& q, int K) const override {
    ExactFrac e = b_.node().exact(q, K);
    e.num = e.num.scaled(PiPoly(ex_ ? *ex_ : GaussQ::from_double(c_)));
    return e;
  }
  double decay() const override { return b_.decay(); }
  bool affine_factors(std::vector<AffineFactor>& out, int mult) const override {
    return b_.node().affine_factors(out, mult);
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "(" << c_.real();
    if (c_.imag() != 0.0) os << (c_.imag() < 0 ? "" : "+") << c_.imag() << "i";
    os << ")*" << b_.describe();
    return os.str();
  }

 private:
  FourierSymbol b_;
  cplx c_;
  std::optional<GaussQ> ex_;
};

class DilationNode : public SymbolNode {
 public:
  DilationNode(FourierSymbol b, double c) : SymbolNode(b.dim()), b_(std::move(b)), c_(c) {}
  cplx eval(const double* w) const override {
    double x[8];
    for (int k = 0; k < d_; ++k) x[k] = c_ * w[k];
    return b_.node().eval(x);
  }
  Jet jet(const std::vector<double>& p, int K) const override {
    std::vector<double> cp(p);
    for (double& x : cp) x *= c_;
    Jet inner = b_.node().jet(cp, K);
    Jet out(d_, K, p);
    for (int i = 0; i < out.layout().size(); ++i) out[i] = inner[i] * std::pow(c_, out.layout().deg[i]);
    return out;
  }
  ExactFrac exact(const RatPoint& q, int K) const override {
    const mpq_class c = exact_q(c_);
    RatPoint cq(q);
    for (auto& x : cq) x *= c;
    ExactFrac inner = b_.node().exact(cq, K);
    auto rescale = [&](const ExactJet& j) {
      ExactJet out(d_, K, two_pi_times(q));
      mpq_class pw = 1;
      int last = 0;
      for (int i = 0; i < out.layout().size(); ++i) {
        while (last < out.layout().deg[i]) {
          pw *= c;
          ++last;
        }
        out[i] = j[i] * PiPoly(GaussQ(pw));
      }
      return out;
    };
    return {rescale(inner.num), rescale(inner.den)};
  }
  double decay() const override { return b_.decay(); }
  bool affine_factors(std::vector<AffineFactor>& out, int mult) const override {
    std::vector<AffineFactor> inner;
    if (!b_.node().affine_factors(inner, mult)) return false;
    for (auto& f : inner) {
      for (double& a : f.a) a *= c_;
      out.push_back(f);
    }
    return true;
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "dil[" << c_ << "](" << b_.describe() << ")";
    return os.str();
  }

 private:
  FourierSymbol b_;
  double c_;
};

class ShiftNode : public SymbolNode {
 public:
  ShiftNode(FourierSymbol b, std::vector<double> c) : SymbolNode(b.dim()), b_(std::move(b)), c_(std::move(c)) {}
  cplx eval(const double* w) const override {
    double x[8];
    for (int k = 0; k < d_; ++k) x[k] = w[k] - kTwoPi * c_[k];
    return b_.node().eval(x);
  }
  Jet jet(const std::vector<double>& p, int K) const override {
    std::vector<double> x(p);
    for (int k = 0; k < d_; ++k) x[k] -= kTwoPi * c_[k];
    return b_.node().jet(x, K).rebased(p);
  }
  ExactFrac exact(const RatPoint& q, int K) const override {
    RatPoint x(q);
    for (int k = 0; k < d_; ++k) x[k] -= exact_q(c_[k]);
    ExactFrac e = b_.node().exact(x, K);
    auto base = two_pi_times(q);
    return {e.num.rebased(base), e.den.rebased(base)};
  }
  double decay() const override { return b_.decay(); }
  bool affine_factors(std::vector<AffineFactor>& out, int mult) const override {
    std::vector<AffineFactor> inner;
    if (!b_.node().affine_factors(inner, mult)) return false;
    for (auto& f : inner) {
      for (int k = 0; k < d_; ++k) f.b -= kTwoPi * f.a[k] * c_[k];
      out.push_back(f);
    }
    return true;
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "mod[";
    for (int k = 0; k < d_; ++k) os << (k ? "," : "") << c_[k];
    os << "](" << b_.describe() << ")";
    return os.str();
  }

 private:
  FourierSymbol b_;
  std::vector<double> c_;
};

class PermuteNode : public SymbolNode {
 public:
  PermuteNode(FourierSymbol b, std::vector<int> perm) : SymbolNode(b.dim()), b_(std::move(b)), perm_(std::move(perm)) {}
  cplx eval(const double* w) const override {
    double x[8];
    for (int k = 0; k < d_; ++k) x[k] = w[perm_[k]];
    return b_.node().eval(x);
  }
  Jet jet(const std::vector<double>& p, int K) const override {
    std::vector<double> x(p.size());
    for (int k = 0; k < d_; ++k) x[k] = p[perm_[k]];
    Jet inner = b_.node().jet(x, K);
    Jet out(d_, K, p);
    for (int i = 0; i < inner.layout().size(); ++i) out[out.layout().index_of(map_index(inner.layout().idx[i]))] = inner[i];
    return out;
  }
  ExactFrac exact(const RatPoint& q, int K) const override {
    RatPoint x(q.size());
    for (int k = 0; k < d_; ++k) x[k] = q[perm_[k]];
    ExactFrac inner = b_.node().exact(x, K);
    auto remap = [&](const ExactJet& j) {
      ExactJet out(d_, K, two_pi_times(q));
      for (int i = 0; i < j.layout().size(); ++i) out[out.layout().index_of(map_index(j.layout().idx[i]))] = j[i];
      return out;
    };
    return {remap(inner.num), remap(inner.den)};
  }
  double decay() const override { return b_.decay(); }
  bool affine_factors(std::vector<AffineFactor>& out, int mult) const override {
    std::vector<AffineFactor> inner;
    if (!b_.node().affine_factors(inner, mult)) return false;
    for (auto& f : inner) {
      std::vector<double> a(static_cast<std::size_t>(d_), 0.0);
      for (int k = 0; k < d_; ++k) a[perm_[k]] += f.a[k];
      f.a = a;
      out.push_back(f);
    }
    return true;
  }
  std::string describe() const override { return "perm(" + b_.describe() + ")"; }

 private:
  // Inner argument k is outer coordinate perm[k], so inner exponent g maps to an
  // outer exponent with entry g[k] at position perm[k].
  MultiIndex map_index(const MultiIndex& g) const {
    MultiIndex o(d_);
    for (int k = 0; k < d_; ++k) o[perm_[k]] += g[k];
    return o;
  }
  FourierSymbol b_;
  std::vector<int> perm_;
};

class DecayNode : public SymbolNode {
 public:
  DecayNode(FourierSymbol b, double m) : SymbolNode(b.dim()), b_(std::move(b)), m_(m) {}
  cplx eval(const double* w) const override { return b_.node().eval(w); }
  Jet jet(const std::vector<double>& p, int K) const override { return b_.node().jet(p, K); }
  ExactFrac exact(const RatPoint& q, int K) const override { return b_.node().exact(q, K); }
  double decay() const override { return m_; }
  bool affine_factors(std::vector<AffineFactor>& out, int mult) const override {
    return b_.node().affine_factors(out, mult);
  }
  std::string describe() const override { return b_.describe(); }

 private:
  FourierSymbol b_;
  double m_;
};

class QuotientNode : public SymbolNode {
 public:
  QuotientNode(FourierSymbol n, FourierSymbol d) : SymbolNode(n.dim()), n_(std::move(n)), den_(std::move(d)) {
    structured_ = den_.node().affine_factors(factors_, 1);
    if (structured_) {
      // Drop constant factors (a = 0); they never vanish.
      std::vector<AffineFactor> keep;
      for (auto& f : factors_) {
        double na = 0.0;
        for (double a : f.a) na += a * a;
        if (na > 0.0) keep.push_back(f);
      }
      factors_ = std::move(keep);
    }
  }

  cplx eval(const double* w) const override {
    if (structured_) {
      std::vector<int> near;
      for (std::size_t i = 0; i < factors_.size(); ++i)
        if (distance(factors_[i], w) < kNearSingular) near.push_back(static_cast<int>(i));
      if (!near.empty()) {
        std::vector<double> p = project(near, w);
        Jet j = jet(p, kRerouteDegree);
        std::vector<double> h(static_cast<std::size_t>(d_));
        for (int k = 0; k < d_; ++k) h[k] = w[k] - p[k];
        return jet_eval_offset(j, h);
      }
    }
    return n_.node().eval(w) / den_.node().eval(w);
  }

  Jet jet(const std::vector<double>& p, int K) const override {
    if (structured_) {
      int m = 0;
      for (const auto& f : factors_) {
        double v = f.b, scale = std::abs(f.b);
        for (int k = 0; k < d_; ++k) {
          v += f.a[k] * p[k];
          scale += std::abs(f.a[k] * p[k]);
        }
        if (std::abs(v) <= 1e-10 * std::max(1.0, scale)) m += f.mult;
      }
      Jet N = n_.node().jet(p, K + m), D = den_.node().jet(p, K + m);
      return jet_div_order(N, D, m);
    }
    constexpr int kExtra = 8;
    Jet N = n_.node().jet(p, K + kExtra), D = den_.node().jet(p, K + kExtra);
    return jet_div(N, D).truncated(K);
  }

  ExactFrac exact(const RatPoint& q, int K) const override {
    ExactFrac a = n_.node().exact(q, K), b = den_.node().exact(q, K);
    ExactJet num = is_one(b.den) ? a.num : a.num * b.den;
    ExactJet den = is_one(a.den) ? b.num : a.den * b.num;
    return {std::move(num), std::move(den)};
  }

  double decay() const override { return n_.decay() - den_.decay(); }
  std::string describe() const override { return "(" + n_.describe() + ")/(" + den_.describe() + ")"; }

 private:
  double distance(const AffineFactor& f, const double* w) const {
    double v = f.b, na = 0.0;
    for (int k = 0; k < d_; ++k) {
      v += f.a[k] * w[k];
      na += f.a[k] * f.a[k];
    }
    return std::abs(v) / std::sqrt(na);
  }

  // Nearest point of the intersection of the selected hyperplanes (min-norm correction).
  std::vector<double> project(const std::vector<int>& sel, const double* w) const {
    const int k = static_cast<int>(sel.size());
    Eigen::MatrixXd A(k, d_);
    Eigen::VectorXd r(k);
    for (int i = 0; i < k; ++i) {
      const auto& f = factors_[static_cast<std::size_t>(sel[i])];
      double v = f.b;
      for (int c = 0; c < d_; ++c) {
        A(i, c) = f.a[c];
        v += f.a[c] * w[c];
      }
      r(i) = -v;
    }
    Eigen::VectorXd delta = A.completeOrthogonalDecomposition().solve(r);
    std::vector<double> p(static_cast<std::size_t>(d_));
    for (int c = 0; c < d_; ++c) p[c] = w[c] + delta(c);
    return p;
  }

  FourierSymbol n_, den_;
  bool structured_ = false;
  std::vector<AffineFactor> factors_;
};

// exp(-1 / (1 - |w/R|^2)) inside the ball of radius R, zero outside.
class BumpNode : public SymbolNode {
 public:
  BumpNode(int d, double R) : SymbolNode(d), R_(R) {}
  cplx eval(const double* w) const override {
    double t = 0.0;
    for (int k = 0; k < d_; ++k) t += (w[k] / R_) * (w[k] / R_);
    return t < 1.0 ? std::exp(-1.0 / (1.0 - t)) : 0.0;
  }
  Jet jet(const std::vector<double>&, int) const override {
    throw PreconditionFailed("bump profiles are not analytic; no jets");
  }
  ExactFrac exact(const RatPoint&, int) const override { throw NotExact("bump profile"); }
  double decay() const override { return std::numeric_limits<double>::infinity(); }
  std::string describe() const override { return "bump(" + std::to_string(R_) + ")"; }

 private:
  double R_;
};

}  // namespace

bool SymbolNode::affine_factors(std::vector<AffineFactor>&, int) const { return false; }

// ---------------------------------------------------------------------------

FourierSymbol::FourierSymbol(std::shared_ptr<const SymbolNode> n) : n_(std::move(n)) {}

int FourierSymbol::dim() const { return n_ ? n_->dim() : 0; }

cplx FourierSymbol::eval(std::span<const double> w) const {
  if (static_cast<int>(w.size()) != dim()) throw DimensionMismatch("symbol evaluation point");
  return n_->eval(w.data());
}

Jet FourierSymbol::jet_at(std::span<const double> p, int K) const {
  if (static_cast<int>(p.size()) != dim()) throw DimensionMismatch("jet base point");
  return n_->jet(std::vector<double>(p.begin(), p.end()), K);
}

ExactFrac FourierSymbol::exact_jet_at(const RatPoint& q, int K) const {
  if (static_cast<int>(q.size()) != dim()) throw DimensionMismatch("jet base point");
  return n_->exact(q, K);
}

int FourierSymbol::exact_zero_order(const RatPoint& q, int K) const {
  int extra = 0;
  for (int attempt = 0; attempt < 6; ++attempt) {
    const int Kw = K + extra;
    ExactFrac f = exact_jet_at(q, Kw);
    const int od = f.den.zero_order();
    if (od > Kw) {
      extra = 2 * extra + 4;
      continue;
    }
    const int on = f.num.zero_order();
    if (on <= Kw) return std::min(on - od, K + 1);
    if (Kw + 1 - od > K) return K + 1;
    extra = extra + od + 1;
  }
  throw DegreeExhausted("exact expansion denominator vanishes beyond working degree");
}

int FourierSymbol::float_zero_order(std::span<const double> p, int K) const { return jet_at(p, K).zero_order(); }

int FourierSymbol::zero_order_at_lattice(const RatPoint& q, int K, bool* used_exact) const {
  try {
    int o = exact_zero_order(q, K);
    if (used_exact) *used_exact = true;
    return o;
  } catch (const NotExact&) {
    if (used_exact) *used_exact = false;
    return float_zero_order(two_pi_times(q), K);
  }
}

double FourierSymbol::decay() const { return n_->decay(); }

FourierSymbol FourierSymbol::with_decay(double m) const {
  return FourierSymbol(std::make_shared<DecayNode>(*this, m));
}

std::string FourierSymbol::describe() const { return n_->describe(); }

FourierSymbol FourierSymbol::constant(int d, cplx c) {
  return FourierSymbol(std::make_shared<ConstNode>(d, c, std::nullopt));
}

FourierSymbol FourierSymbol::constant_exact(int d, const GaussQ& c) {
  return FourierSymbol(std::make_shared<ConstNode>(d, c.to_complex(), c));
}

FourierSymbol FourierSymbol::coordinate(int d, int j) {
  std::vector<double> a(static_cast<std::size_t>(d), 0.0);
  a[j] = 1.0;
  return affine(a, 0.0);
}

FourierSymbol FourierSymbol::affine(std::vector<double> a, double b) {
  return FourierSymbol(std::make_shared<AffineNode>(std::move(a), b));
}

FourierSymbol FourierSymbol::exp_phase(std::vector<double> a) {
  return FourierSymbol(std::make_shared<ExpNode>(std::move(a)));
}

FourierSymbol FourierSymbol::bump(int d, double radius) {
  if (radius <= 0.0) throw InputError("bump radius must be positive");
  return FourierSymbol(std::make_shared<BumpNode>(d, radius));
}

FourierSymbol FourierSymbol::trig(const TrigPoly& t) { return FourierSymbol(std::make_shared<TrigNode>(t)); }

FourierSymbol FourierSymbol::quotient(const FourierSymbol& num, const FourierSymbol& den) {
  if (num.dim() != den.dim()) throw DimensionMismatch("quotient operands");
  return FourierSymbol(std::make_shared<QuotientNode>(num, den));
}

FourierSymbol FourierSymbol::sum(const std::vector<FourierSymbol>& terms) {
  if (terms.empty()) throw InputError("empty sum");
  for (const auto& t : terms)
    if (t.dim() != terms.front().dim()) throw DimensionMismatch("sum operands");
  if (terms.size() == 1) return terms.front();
  return FourierSymbol(std::make_shared<SumNode>(terms));
}

FourierSymbol FourierSymbol::product(const std::vector<FourierSymbol>& factors) {
  if (factors.empty()) throw InputError("empty product");
  for (const auto& t : factors)
    if (t.dim() != factors.front().dim()) throw DimensionMismatch("product operands");
  if (factors.size() == 1) return factors.front();
  return FourierSymbol(std::make_shared<ProductNode>(factors));
}

FourierSymbol FourierSymbol::operator+(const FourierSymbol& o) const { return sum({*this, o}); }
FourierSymbol FourierSymbol::operator-(const FourierSymbol& o) const {
  return sum({*this, o.scaled_exact(GaussQ(-1))});
}
FourierSymbol FourierSymbol::operator*(const FourierSymbol& o) const { return product({*this, o}); }

FourierSymbol FourierSymbol::pow(int n) const {
  if (n < 0) throw InputError("negative symbol power");
  if (n == 0) return constant_exact(dim(), GaussQ(1));
  if (n == 1) return *this;
  return FourierSymbol(std::make_shared<PowerNode>(*this, n));
}

FourierSymbol FourierSymbol::scaled(cplx c) const {
  return FourierSymbol(std::make_shared<ScaleNode>(*this, c, std::nullopt));
}

FourierSymbol FourierSymbol::scaled_exact(const GaussQ& c) const {
  return FourierSymbol(std::make_shared<ScaleNode>(*this, c.to_complex(), c));
}

FourierSymbol FourierSymbol::dilated(double c) const {
  return FourierSymbol(std::make_shared<DilationNode>(*this, c));
}

FourierSymbol FourierSymbol::derivative(const MultiIndex& g) const {
  if (g.dim() != dim()) throw DimensionMismatch("derivative order");
  if (g.order() == 0) return *this;
  // (i w)^g / g! = i^{|g|}/g! * prod w_k^{g_k}
  static const GaussQ ipow[4] = {GaussQ(1), GaussQ(0, 1), GaussQ(-1), GaussQ(0, -1)};
  std::vector<FourierSymbol> f;
  for (int k = 0; k < dim(); ++k)
    if (g[k] > 0) f.push_back(coordinate(dim(), k).pow(g[k]));
  f.push_back(*this);
  GaussQ c = ipow[g.order() % 4] * GaussQ(mpq_class(1, static_cast<long>(g.factorial())));
  return product(f).scaled_exact(c);
}

FourierSymbol FourierSymbol::modulated(std::vector<double> c) const {
  if (static_cast<int>(c.size()) != dim()) throw DimensionMismatch("modulation frequency");
  return FourierSymbol(std::make_shared<ShiftNode>(*this, std::move(c)));
}

FourierSymbol FourierSymbol::permuted(std::vector<int> perm) const {
  if (static_cast<int>(perm.size()) != dim()) throw DimensionMismatch("coordinate permutation");
  return FourierSymbol(std::make_shared<PermuteNode>(*this, std::move(perm)));
}

// ---------------------------------------------------------------------------

GeneratorVector::GeneratorVector(std::vector<FourierSymbol> entries, std::vector<std::string> labels)
    : entries_(std::move(entries)), labels_(std::move(labels)) {
  if (entries_.empty()) throw InputError("empty generator vector");
  for (const auto& e : entries_)
    if (e.dim() != entries_.front().dim()) throw DimensionMismatch("generator dimensions differ");
  while (labels_.size() < entries_.size()) labels_.push_back("phi" + std::to_string(labels_.size() + 1));
}

Eigen::VectorXcd GeneratorVector::eval(std::span<const double> w) const {
  Eigen::VectorXcd v(size());
  eval_into(w, v.data());
  return v;
}

void GeneratorVector::eval_into(std::span<const double> w, cplx* out) const {
  for (int i = 0; i < size(); ++i) out[i] = entries_[static_cast<std::size_t>(i)].node().eval(w.data());
}

std::vector<Jet> GeneratorVector::jet_at(std::span<const double> p, int K) const {
  std::vector<Jet> out;
  for (const auto& e : entries_) out.push_back(e.jet_at(p, K));
  return out;
}

double GeneratorVector::decay() const {
  double m = entries_.front().decay();
  for (const auto& e : entries_) m = std::min(m, e.decay());
  return m;
}

std::vector<double> two_pi_times(const RatPoint& q) {
  std::vector<double> p(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) p[i] = kTwoPi * q[i].get_d();
  return p;
}

RatPoint rat_point(const std::vector<int>& lattice) {
  RatPoint q;
  for (int x : lattice) q.emplace_back(x);
  return q;
}

}  // namespace sia
