#include "siapprox/lattice.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "siapprox/errors.hpp"
#include "siapprox/kernels.hpp"

namespace sia {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSafety = 10.0;

double shell_count(int d, int rho) {
  return std::pow(2.0 * rho + 1.0, d) - std::pow(2.0 * rho - 1.0, d);
}

// Calls fn(n) for every n in Z^d with |n|_inf == rho.
void for_shell(int d, int rho, const std::function<void(const int*)>& fn) {
  std::vector<int> n(static_cast<std::size_t>(d));
  std::function<void(int, bool)> rec = [&](int k, bool on_face) {
    if (k == d) {
      if (on_face) fn(n.data());
      return;
    }
    const bool last = k == d - 1;
    for (int v = -rho; v <= rho; ++v) {
      const bool face = on_face || std::abs(v) == rho;
      // The last coordinate must close the shell if nothing earlier did.
      if (last && !face) continue;
      n[k] = v;
      rec(k + 1, face);
    }
  };
  if (rho == 0) {
    std::fill(n.begin(), n.end(), 0);
    fn(n.data());
    return;
  }
  rec(0, false);
}

// Accumulates sum_{n in shells [lo, hi]} w(n) Phi(omega + alpha_n) Phi(...)^* into (gre, gim).
class ShellAccumulator {
 public:
  ShellAccumulator(const GeneratorVector& Phi, const std::vector<double>& omega, double s, double scale)
      : Phi_(Phi), omega_(omega), s_(s), scale_(scale), r_(Phi.size()), d_(Phi.dim()) {
    xre_.resize(static_cast<std::size_t>(r_ * kBlock));
    xim_.resize(xre_.size());
    w_.resize(kBlock);
    vals_.resize(static_cast<std::size_t>(r_));
    pt_.resize(static_cast<std::size_t>(d_));
  }

  void add_shells(int lo, int hi, std::vector<double>& gre, std::vector<double>& gim) {
    for (int rho = lo; rho <= hi; ++rho)
      for_shell(d_, rho, [&](const int* n) { push(n, gre, gim); });
    flush(gre, gim);
  }

 private:
  static constexpr int kBlock = 256;

  void push(const int* n, std::vector<double>& gre, std::vector<double>& gim) {
    double norm2 = 0.0;
    for (int k = 0; k < d_; ++k) {
      pt_[k] = omega_[k] + kTwoPi * scale_ * n[k];
      norm2 += pt_[k] * pt_[k];
    }
    Phi_.eval_into(pt_, vals_.data());
    double w = 1.0;
    if (s_ != 0.0) w = std::pow(norm2, s_);
    for (int j = 0; j < r_; ++j) {
      xre_[static_cast<std::size_t>(j * kBlock + fill_)] = vals_[j].real();
      xim_[static_cast<std::size_t>(j * kBlock + fill_)] = vals_[j].imag();
    }
    w_[fill_] = w;
    if (++fill_ == kBlock) flush(gre, gim);
  }

  void flush(std::vector<double>& gre, std::vector<double>& gim) {
    if (fill_ == 0) return;
    if (fill_ < kBlock) {
      // Zero weights pad the partial block so the planar layout stays fixed.
      for (int b = fill_; b < kBlock; ++b) {
        w_[b] = 0.0;
        for (int j = 0; j < r_; ++j) {
          xre_[static_cast<std::size_t>(j * kBlock + b)] = 0.0;
          xim_[static_cast<std::size_t>(j * kBlock + b)] = 0.0;
        }
      }
    }
    kernels::hermitian_accumulate(r_, kBlock, xre_.data(), xim_.data(), w_.data(), gre.data(), gim.data());
    fill_ = 0;
  }

  const GeneratorVector& Phi_;
  const std::vector<double>& omega_;
  double s_, scale_;
  int r_, d_;
  int fill_ = 0;
  std::vector<double> xre_, xim_, w_, pt_;
  std::vector<cplx> vals_;
};

double trace_re(const std::vector<double>& gre, int r) {
  double t = 0.0;
  for (int j = 0; j < r; ++j) t += gre[static_cast<std::size_t>(j * r + j)];
  return t;
}

}  // namespace

int BracketConfig::cap_for(int d) const {
  if (radius_cap > 0) return radius_cap;
  switch (d) {
    case 1: return 1 << 18;
    case 2: return 64;
    case 3: return 16;
    default: return 8;
  }
}

std::vector<double> reduce_fundamental(std::span<const double> w) {
  std::vector<double> out(w.begin(), w.end());
  for (double& x : out) {
    x = std::fmod(x + std::numbers::pi, kTwoPi);
    if (x < 0) x += kTwoPi;
    x -= std::numbers::pi;
  }
  return out;
}

double shell_tail_factor(int d, int R, double p) {
  if (std::isinf(p)) return 0.0;
  if (p <= d) return std::numeric_limits<double>::infinity();
  const double base = shell_count(d, R) * std::pow(static_cast<double>(R), -p);
  double sum = 0.0;
  constexpr int kExplicit = 2000;
  for (int rho = R + 1; rho <= R + kExplicit; ++rho) sum += shell_count(d, rho) * std::pow(static_cast<double>(rho), -p);
  // Integral of 2d (2 rho)^{d-1} rho^{-p} beyond the explicit range.
  const double x = R + kExplicit + 0.5;
  sum += 2.0 * d * std::pow(2.0, d - 1) * std::pow(x, d - p) / (p - d);
  return sum / base;
}

GramianSample gramian(const GeneratorVector& Phi, std::span<const double> omega, const BracketConfig& cfg) {
  const int d = Phi.dim(), r = Phi.size();
  if (static_cast<int>(omega.size()) != d) throw DimensionMismatch("gramian point");
  GramianSample out;
  out.omega = reduce_fundamental(omega);
  out.phi0 = Phi.eval(out.omega);
  double n2 = 0.0;
  for (double x : out.omega) n2 += x * x;
  if (n2 == 0.0)
    out.w0 = cfg.s > 0 ? 0.0 : (cfg.s == 0 ? 1.0 : std::numeric_limits<double>::infinity());
  else
    out.w0 = cfg.s == 0.0 ? 1.0 : std::pow(n2, cfg.s);

  const double m = cfg.tail_decay > 0 ? cfg.tail_decay : Phi.decay();
  const double p = 2.0 * m - 2.0 * cfg.s;
  out.divergent = !(p > d);
  const int cap = std::max(cfg.cap_for(d), 2);

  ShellAccumulator acc(Phi, out.omega, cfg.s, cfg.lattice_scale);
  const std::size_t rr = static_cast<std::size_t>(r * r);
  std::vector<double> are(rr, 0.0), aim(rr, 0.0);
  std::vector<double> s1re(rr), s1im(rr), s2re(rr), s2im(rr);
  int R = std::min(std::max(cfg.lattice_radius, 2), cap), prev = 0;
  Eigen::MatrixXcd G0(r, r);
  while (true) {
    if (prev + 1 <= R - 2) acc.add_shells(prev + 1, R - 2, are, aim);
    std::fill(s1re.begin(), s1re.end(), 0.0);
    std::fill(s1im.begin(), s1im.end(), 0.0);
    std::fill(s2re.begin(), s2re.end(), 0.0);
    std::fill(s2im.begin(), s2im.end(), 0.0);
    acc.add_shells(R - 1, R - 1, s1re, s1im);
    acc.add_shells(R, R, s2re, s2im);

    const double tauR = out.divergent ? 0.0 : shell_tail_factor(d, R, p);
    const double tauR1 = out.divergent ? 0.0 : shell_tail_factor(d, R - 1, p);
    const double t1 = trace_re(s1re, r), t2 = trace_re(s2re, r);
    out.tail = t2 * tauR;
    out.tail_error = std::abs(t1 * tauR1 - t2 - t2 * tauR);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        const std::size_t q = static_cast<std::size_t>(i * r + j);
        G0(i, j) = cplx(are[q] + s1re[q] + s2re[q] * (1.0 + tauR), aim[q] + s1im[q] + s2im[q] * (1.0 + tauR));
      }
    out.radius_used = R;
    const double tr = G0.real().trace();
    // The successive-extrapolation discrepancy underestimates the true error by a
    // small factor for slowly decaying symbols, hence the safety margin.
    const bool converged = !out.divergent && (kSafety * out.tail_error <= cfg.tolerance * tr || tr == 0.0);
    if (converged) break;
    if (out.divergent || !cfg.adaptive || R >= cap) {
      out.tail_warning = true;
      break;
    }
    for (std::size_t q = 0; q < rr; ++q) {
      are[q] += s1re[q] + s2re[q];
      aim[q] += s1im[q] + s2im[q];
    }
    prev = R;
    R = std::min(2 * R, cap);
  }
  if (out.divergent) {
    out.tail = std::numeric_limits<double>::infinity();
    out.tail_error = std::numeric_limits<double>::infinity();
  }
  out.G0 = G0;
  out.G = G0 + out.w0 * out.phi0 * out.phi0.adjoint();
  return out;
}

BracketValue bracket(const FourierSymbol& phi, const FourierSymbol& psi, std::span<const double> omega,
                     const BracketConfig& cfg, bool truncated) {
  const bool same = phi.node_ptr() == psi.node_ptr();
  GeneratorVector V = same ? GeneratorVector({phi}) : GeneratorVector({phi, psi});
  GramianSample g = gramian(V, omega, cfg);
  const Eigen::MatrixXcd& M = truncated ? g.G0 : g.G;
  BracketValue out;
  out.value = same ? M(0, 0) : M(0, 1);
  out.tail = g.tail;
  out.tail_error = g.tail_error;
  out.radius_used = g.radius_used;
  out.tail_warning = g.tail_warning;
  return out;
}

}  // namespace sia
