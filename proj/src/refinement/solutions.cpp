#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "siapprox/errors.hpp"
#include "siapprox/refinement.hpp"

namespace sia {

// ---- Mask ------------------------------------------------------------------

Mask::Mask(TrigPolyMatrix P) : r_(P.rows()), d_(P.dim()), has_trig_(true), P_(std::move(P)) {
  if (P_.rows() != P_.cols()) throw DimensionMismatch("mask must be square");
  const std::vector<double> zero(static_cast<std::size_t>(d_), 0.0);
  P0_ = P_.eval(zero);
  init_spectrum();
}

Mask Mask::from_jets(int r, int d, std::map<MultiIndex, Eigen::MatrixXcd> jets) {
  Mask m;
  m.r_ = r;
  m.d_ = d;
  for (const auto& [a, M] : jets) {
    if (a.dim() != d) throw DimensionMismatch("mask jet index " + a.str());
    if (M.rows() != r || M.cols() != r) throw DimensionMismatch("mask jet " + a.str() + " is not r x r");
  }
  m.jets_ = std::move(jets);
  const auto it = m.jets_.find(MultiIndex(d));
  m.P0_ = it == m.jets_.end() ? Eigen::MatrixXcd::Zero(r, r) : it->second;
  m.init_spectrum();
  return m;
}

void Mask::init_spectrum() {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(P0_, false);
  spec_ = es.eigenvalues();
}

const TrigPolyMatrix& Mask::trig() const {
  if (!has_trig_) throw PreconditionFailed("mask is given by its jets at the origin only");
  return P_;
}

Eigen::MatrixXcd Mask::eval(std::span<const double> w) const { return trig().eval(w); }

std::vector<Eigen::MatrixXcd> Mask::jets_at(std::span<const double> p, int K) const {
  const auto layout = JetLayout::get(d_, K);
  std::vector<Eigen::MatrixXcd> out(static_cast<std::size_t>(layout->size()), Eigen::MatrixXcd::Zero(r_, r_));
  if (has_trig_) {
    const std::vector<Jet> e = P_.jet_at(p, K);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < r_; ++j)
        for (int a = 0; a < layout->size(); ++a) out[a](i, j) = e[static_cast<std::size_t>(i * r_ + j)][a];
    return out;
  }
  for (double x : p)
    if (x != 0.0) throw PreconditionFailed("jets-only mask can be expanded at the origin only");
  for (const auto& [a, M] : jets_) {
    const int pos = layout->index_of(a);
    if (pos >= 0) out[pos] = M;
  }
  return out;
}

std::vector<Eigen::MatrixXcd> Mask::jets_at_zero(int K) const {
  const std::vector<double> zero(static_cast<std::size_t>(d_), 0.0);
  return jets_at(zero, K);
}

int dyadic_spectral_level(const Mask& P) {
  int N = -1;
  for (int i = 0; i < P.spectrum().size(); ++i) {
    const cplx lam = P.spectrum()(i);
    if (std::abs(lam) < 0.5) continue;
    const int n = static_cast<int>(std::lround(std::log2(std::abs(lam))));
    if (n < 0) continue;
    const double two_n = std::ldexp(1.0, n);
    if (std::abs(lam - two_n) <= 1e-8 * two_n) N = std::max(N, n);
  }
  return N;
}

Eigen::MatrixXcd assemble_L(const Mask& P, int N, GradedOrder ord) {
  const int r = P.r(), d = P.d();
  const auto blocks = enumerate_upto(d, N, ord);
  const auto jets = P.jets_at_zero(N);
  const auto layout = JetLayout::get(d, N);
  const int nb = static_cast<int>(blocks.size());
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(r * nb, r * nb);
  for (int a = 0; a < nb; ++a)
    for (int b = 0; b < nb; ++b) {
      if (!blocks[b].leq(blocks[a])) continue;
      Eigen::MatrixXcd blk = -jets[layout->index_of(blocks[a] - blocks[b])];
      if (a == b) blk += std::ldexp(1.0, blocks[a].order()) * Eigen::MatrixXcd::Identity(r, r);
      L.block(r * a, r * b, r, r) = blk;
    }
  return L;
}

Eigen::MatrixXcd kernel_basis(const Eigen::MatrixXcd& A, double rel_tol) {
  const int n = static_cast<int>(A.cols());
  if (A.rows() == 0) return Eigen::MatrixXcd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // A matrix that is pure roundoff must not look full rank, so the cut never
  // drops below rel_tol in absolute terms.
  const double cut = rel_tol * std::max(sv.size() ? sv(0) : 0.0, 1.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

Eigen::VectorXcd JetBlockVector::block(const MultiIndex& a) const {
  for (std::size_t i = 0; i < idx.size(); ++i)
    if (idx[i] == a) return data.segment(static_cast<int>(i) * r, r);
  return Eigen::VectorXcd::Zero(r);
}

std::vector<Jet> extend_solution(const JetBlockVector& w, const Mask& P, int K) {
  const int r = P.r(), d = P.d();
  const auto layout = JetLayout::get(d, K);
  const auto Pj = P.jets_at_zero(K);
  const int n = layout->size();
  std::vector<Eigen::VectorXcd> wa(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const MultiIndex& a = layout->idx[i];
    if (a.order() <= w.N) {
      wa[i] = w.block(a);
      continue;
    }
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(r);
    for (int j = 0; j < i; ++j)
      if (layout->idx[j].leq(a)) rhs += Pj[layout->index_of(a - layout->idx[j])] * wa[j];
    const Eigen::MatrixXcd M = std::ldexp(1.0, a.order()) * Eigen::MatrixXcd::Identity(r, r) - Pj[0];
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
    if (!lu.isInvertible()) throw SingularExtension("2^" + std::to_string(a.order()) + " is an eigenvalue of P(0)");
    wa[i] = lu.solve(rhs);
  }
  std::vector<Jet> out;
  const std::vector<double> zero(static_cast<std::size_t>(d), 0.0);
  for (int c = 0; c < r; ++c) {
    Jet j(d, K, zero);
    for (int i = 0; i < n; ++i) j[i] = wa[i](c);
    out.push_back(std::move(j));
  }
  return out;
}

double extension_residual(const std::vector<Jet>& jets, const Mask& P) {
  const int r = P.r();
  const int K = jets.front().degree();
  const JetLayout& L = jets.front().layout();
  const auto Pj = P.jets_at_zero(K);
  auto vec = [&](int i) {
    Eigen::VectorXcd v(r);
    for (int c = 0; c < r; ++c) v(c) = jets[c][i];
    return v;
  };
  double res = 0.0;
  for (int i = 0; i < L.size(); ++i) {
    Eigen::VectorXcd e = std::ldexp(1.0, L.deg[i]) * vec(i);
    for (int j = 0; j <= i; ++j)
      if (L.idx[j].leq(L.idx[i])) e -= Pj[L.index_of(L.idx[i] - L.idx[j])] * vec(j);
    res = std::max(res, e.norm());
  }
  return res;
}

// ---- Cascade evaluation of solutions ---------------------------------------

namespace {

constexpr double kCascadeRadius = 0.05;
// |u| <= 0.05 at the cascade base, so degree 12 leaves a remainder below 1e-16.
constexpr int kEvalDegree = 12;
constexpr int kJetDepthCap = 12;
constexpr int kJetGuard = 12;

// Phi(w) = P(w/2) ... P(w/2^J) T(w/2^J) with T the Taylor polynomial of Phi at 0.
class RefinableCore {
 public:
  RefinableCore(const Mask& P, std::vector<Jet> T) : P_(P), T_(std::move(T)), r_(P.r()), d_(P.d()) {
    const TrigPolyMatrix& M = P.trig();
    lo_.assign(static_cast<std::size_t>(d_), 0);
    hi_.assign(static_cast<std::size_t>(d_), 0);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < r_; ++j)
        for (const auto& [idx, c] : M(i, j).coeffs()) {
          terms_.push_back({i, j, idx, c});
          for (int k = 0; k < d_; ++k) {
            lo_[k] = std::min(lo_[k], idx[k]);
            hi_[k] = std::max(hi_[k], idx[k]);
          }
        }
    for (int k = 0; k < d_; ++k) {
      span_off_.push_back(span_total_);
      span_total_ += hi_[k] - lo_[k] + 1;
    }
    const JetLayout& L = T_.front().layout();
    eval_degree_ = std::min(kEvalDegree, L.K);
    for (int i = 0; i < L.deg_start[eval_degree_ + 1]; ++i) {
      for (int k = 0; k < d_; ++k) exps_.push_back(L.idx[i][k]);
      for (int c = 0; c < r_; ++c) tc_.push_back(T_[c][i]);
    }
    decay_ = estimate_decay();
  }

  int r() const { return r_; }
  int d() const { return d_; }
  double decay() const { return decay_; }

  // Components are requested one after another at the same point, so the last
  // cascade result is kept per thread.
  Eigen::VectorXcd eval(const double* w) const {
    thread_local const RefinableCore* last_owner = nullptr;
    thread_local std::vector<double> last_w;
    thread_local Eigen::VectorXcd last_val;
    if (last_owner == this && std::equal(last_w.begin(), last_w.end(), w)) return last_val;
    last_val = cascade(w);
    last_w.assign(w, w + d_);
    last_owner = this;
    return last_val;
  }

  Eigen::VectorXcd cascade(const double* w) const {
    thread_local std::vector<double> u;
    thread_local std::vector<cplx> x, y, M, pw;
    u.assign(w, w + d_);
    double m = 0.0;
    for (double t : u) m = std::max(m, std::abs(t));
    int J = 0;
    while (m > kCascadeRadius && J < 200) {
      m *= 0.5;
      ++J;
    }
    for (double& t : u) t = std::ldexp(t, -J);
    taylor_eval(u, x);
    y.resize(static_cast<std::size_t>(r_));
    M.resize(static_cast<std::size_t>(r_ * r_));
    for (int j = J; j >= 1; --j) {
      // u holds w / 2^j here.
      mask_at(u, M, pw);
      for (int a = 0; a < r_; ++a) {
        cplx acc = 0.0;
        for (int b = 0; b < r_; ++b) acc += M[a * r_ + b] * x[b];
        y[a] = acc;
      }
      std::swap(x, y);
      for (double& t : u) t *= 2.0;
    }
    return Eigen::Map<const Eigen::VectorXcd>(x.data(), r_);
  }

  std::vector<Jet> jet(const std::vector<double>& p, int K) const {
    if (K + kJetGuard > T_.front().degree())
      throw DegreeExhausted("refinable jets are stored to degree " + std::to_string(T_.front().degree()));
    double m = 0.0;
    for (double x : p) m = std::max(m, std::abs(x));
    int J = 0;
    while (m > kCascadeRadius) {
      m *= 0.5;
      ++J;
    }
    if (J > kJetDepthCap) throw PreconditionFailed("refinable jet requested beyond the halving depth cap");
    const auto L = JetLayout::get(d_, K);
    const JetLayout& TL = T_.front().layout();
    std::vector<double> q(p);
    for (double& x : q) x = std::ldexp(x, -J);
    // Taylor shift of the stored polynomial to q, then the chain rule for u = w / 2^J.
    std::vector<Jet> x;
    for (int c = 0; c < r_; ++c) {
      Jet out(d_, K, p);
      for (int b = 0; b < L->size(); ++b) {
        const MultiIndex& beta = L->idx[b];
        cplx acc = 0.0;
        for (int g = 0; g < TL.size(); ++g) {
          const MultiIndex& gam = TL.idx[g];
          if (!beta.leq(gam)) continue;
          double f = 1.0;
          for (int k = 0; k < d_; ++k)
            f *= binomial(gam[k], beta[k]) * std::pow(q[k], gam[k] - beta[k]);
          acc += T_[c][g] * f;
        }
        out[b] = acc * std::ldexp(1.0, -J * L->deg[b]);
      }
      x.push_back(std::move(out));
    }
    for (int j = J; j >= 1; --j) {
      std::vector<double> pj(p);
      for (double& y : pj) y = std::ldexp(y, -j);
      const std::vector<Jet> Mj = P_.trig().jet_at(pj, K);
      std::vector<Jet> nx;
      for (int a = 0; a < r_; ++a) {
        Jet acc(d_, K, p);
        for (int b = 0; b < r_; ++b) {
          Jet e = Mj[static_cast<std::size_t>(a * r_ + b)];
          for (int i = 0; i < e.layout().size(); ++i) e[i] *= std::ldexp(1.0, -j * e.layout().deg[i]);
          acc += e.rebased(p) * x[b];
        }
        nx.push_back(std::move(acc));
      }
      x = std::move(nx);
    }
    return x;
  }

 private:
  struct Term {
    int row, col;
    LatticeIndex j;
    cplx c;
  };

  void taylor_eval(const std::vector<double>& u, std::vector<cplx>& x) const {
    thread_local std::vector<double> pw;
    const int K = eval_degree_;
    pw.resize(static_cast<std::size_t>(d_ * (K + 1)));
    for (int k = 0; k < d_; ++k) {
      pw[k * (K + 1)] = 1.0;
      for (int n = 1; n <= K; ++n) pw[k * (K + 1) + n] = pw[k * (K + 1) + n - 1] * u[k];
    }
    x.assign(static_cast<std::size_t>(r_), cplx(0.0));
    const int nt = static_cast<int>(exps_.size()) / d_;
    for (int i = 0; i < nt; ++i) {
      double m = 1.0;
      for (int k = 0; k < d_; ++k) m *= pw[k * (K + 1) + exps_[i * d_ + k]];
      for (int c = 0; c < r_; ++c) x[c] += tc_[i * r_ + c] * m;
    }
  }

  // Entries of P(u), row-major, using the power tables of e^{-i u_k}.
  void mask_at(const std::vector<double>& u, std::vector<cplx>& M, std::vector<cplx>& e) const {
    e.resize(static_cast<std::size_t>(span_total_));
    for (int k = 0; k < d_; ++k) {
      const cplx z = std::polar(1.0, -u[k]);
      cplx p = std::polar(1.0, -lo_[k] * u[k]);
      for (int n = 0; n <= hi_[k] - lo_[k]; ++n) {
        e[span_off_[k] + n] = p;
        p *= z;
      }
    }
    std::fill(M.begin(), M.end(), cplx(0.0));
    for (const auto& t : terms_) {
      cplx z = t.c;
      for (int k = 0; k < d_; ++k) z *= e[span_off_[k] + t.j[k] - lo_[k]];
      M[t.row * r_ + t.col] += z;
    }
  }

  // Decay exponent from the maxima of |Phi| over dyadic annuli 2^j <= |w| < 2^{j+1}.
  double estimate_decay() const {
    std::vector<std::vector<double>> dirs;
    if (d_ == 1) {
      dirs = {{1.0}, {-1.0}};
    } else {
      dirs = default_directions(d_);
      for (int k = 0; k < d_; ++k) {
        std::vector<double> e(static_cast<std::size_t>(d_), 0.0);
        e[k] = 1.0;
        dirs.push_back(e);
        e[k] = -1.0;
        dirs.push_back(e);
      }
    }
    const int steps = d_ == 1 ? 64 : 16;
    std::vector<double> lx, ly;
    for (int j = 3; j <= 8; ++j) {
      double mx = 0.0;
      for (const auto& dir : dirs)
        for (int s = 0; s < steps; ++s) {
          const double rad = std::ldexp(1.0 + (s + 0.5) / steps, j);
          std::vector<double> w(static_cast<std::size_t>(d_));
          for (int k = 0; k < d_; ++k) w[k] = rad * dir[k];
          mx = std::max(mx, eval(w.data()).norm());
        }
      if (mx <= 0.0) return std::numeric_limits<double>::infinity();
      lx.push_back(std::log(std::ldexp(1.0, j)));
      ly.push_back(std::log(mx));
    }
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return std::max(0.0, std::floor((-slope + 0.1) * 4.0) / 4.0);
  }

  Mask P_;
  std::vector<Jet> T_;
  int r_, d_;
  std::vector<Term> terms_;
  std::vector<int> lo_, hi_, span_off_;
  int span_total_ = 0;
  int eval_degree_ = 0;
  std::vector<int> exps_;   // exponents of the Taylor terms used for evaluation
  std::vector<cplx> tc_;    // their coefficients, r per term
  double decay_ = 0.0;
};

class RefinableNode : public SymbolNode {
 public:
  RefinableNode(std::shared_ptr<const RefinableCore> core, int comp, int sol)
      : SymbolNode(core->d()), core_(std::move(core)), comp_(comp), sol_(sol) {}
  cplx eval(const double* w) const override { return core_->eval(w)(comp_); }
  Jet jet(const std::vector<double>& p, int K) const override { return core_->jet(p, K)[comp_]; }
  ExactFrac exact(const RatPoint&, int) const override {
    throw NotExact("refinable solutions are evaluated numerically");
  }
  double decay() const override { return core_->decay(); }
  std::string describe() const override {
    std::ostringstream os;
    os << "refinable[" << sol_ << "][" << comp_ << "]";
    return os.str();
  }

 private:
  std::shared_ptr<const RefinableCore> core_;
  int comp_, sol_;
};

}  // namespace

const GeneratorVector& SolutionBasis::generator(int j) const {
  if (gens.empty()) throw PreconditionFailed("solutions of a jets-only mask cannot be evaluated");
  return gens.at(static_cast<std::size_t>(j));
}

Eigen::MatrixXcd SolutionBasis::values_at_zero() const {
  const int r = mask.r();
  Eigen::MatrixXcd F(r, size());
  for (int j = 0; j < size(); ++j)
    for (int c = 0; c < r; ++c) F(c, j) = jets0[j][c][0];
  return F;
}

SolutionBasis solve_R(const Mask& P, int K) {
  SolutionBasis out;
  out.mask = P;
  out.N = dyadic_spectral_level(P);
  if (out.N < 0) throw ZeroSolutionOnly("no power of two in the spectrum of P(0)");
  const Eigen::MatrixXcd L = assemble_L(P, out.N);
  const Eigen::MatrixXcd V = kernel_basis(L);
  if (V.cols() == 0) throw ZeroSolutionOnly("L is injective on the initial jets");
  const int r = P.r();
  out.K = std::max(K, 16) + kJetGuard;
  const auto blocks = enumerate_upto(P.d(), out.N);
  for (int c = 0; c < V.cols(); ++c) {
    JetBlockVector w;
    w.r = r;
    w.d = P.d();
    w.N = out.N;
    w.idx = blocks;
    w.data = V.col(c);
    // Fix the phase: the first entry of noticeable size becomes real positive.
    for (int i = 0; i < w.data.size(); ++i)
      if (std::abs(w.data(i)) > 1e-8) {
        w.data *= std::conj(w.data(i)) / std::abs(w.data(i));
        break;
      }
    out.jets0.push_back(extend_solution(w, P, out.K));
    out.basis.push_back(std::move(w));
  }
  if (P.has_trig()) {
    for (int j = 0; j < out.size(); ++j) {
      auto core = std::make_shared<const RefinableCore>(P, out.jets0[j]);
      std::vector<FourierSymbol> comps;
      std::vector<std::string> labels;
      for (int c = 0; c < r; ++c) {
        comps.emplace_back(std::make_shared<const RefinableNode>(core, c, j));
        labels.push_back("phi" + std::to_string(j) + "_" + std::to_string(c));
      }
      out.gens.emplace_back(std::move(comps), std::move(labels));
    }
  }
  return out;
}

}  // namespace sia
