#include "siapprox/empirical.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "siapprox/errors.hpp"
#include "siapprox/kernels.hpp"
#include "siapprox/ladder.hpp"
#include "siapprox/parallel.hpp"

namespace sia {

namespace {

constexpr int kRule = 64;

struct Rule1D {
  std::vector<double> x, w;
};

// Gauss-Legendre on [-a, a].
Rule1D gauss_legendre(int n, double a) {
  if (n != kRule) throw InputError("only the 64-point Gauss-Legendre rule is available");
  using G = boost::math::quadrature::gauss<double, kRule>;
  Rule1D r;
  const auto& xs = G::abscissa();
  const auto& ws = G::weights();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    r.x.push_back(a * xs[i]);
    r.w.push_back(a * ws[i]);
    if (xs[i] != 0.0) {
      r.x.push_back(-a * xs[i]);
      r.w.push_back(a * ws[i]);
    }
  }
  return r;
}

struct Accumulator {
  double sum = 0.0;
  int tail_nodes = 0, rank_nodes = 0;
};

// Node values are stored and reduced in a fixed order, so the result does not
// depend on the thread count.
void tensor_integrate(int d, const Rule1D& rule, const std::function<double(std::span<const double>, bool&, bool&)>& f,
                      Accumulator& acc) {
  const std::size_t n = rule.x.size();
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) total *= n;
  std::vector<double> vals(total, 0.0), wts(total, 0.0);
  std::vector<char> tails(total, 0), ranks(total, 0);
  parallel_for(total, [&](std::size_t idx) {
    std::vector<double> w(static_cast<std::size_t>(d));
    double weight = 1.0;
    std::size_t rest = idx;
    for (int k = 0; k < d; ++k) {
      w[k] = rule.x[rest % n];
      weight *= rule.w[rest % n];
      rest /= n;
    }
    bool tail = false, rank = false;
    vals[idx] = f(w, tail, rank);
    wts[idx] = weight;
    tails[idx] = tail;
    ranks[idx] = rank;
  });
  acc.sum = kernels::weighted_sum(static_cast<int>(total), wts.data(), vals.data());
  for (std::size_t i = 0; i < total; ++i) {
    acc.tail_nodes += tails[i];
    acc.rank_nodes += ranks[i];
  }
}

void collect_warnings(const Accumulator& acc, ProjectionError& out) {
  if (acc.tail_nodes > 0)
    out.warnings.push_back("TailBound: " + std::to_string(acc.tail_nodes) + " nodes above the tail tolerance");
  if (acc.rank_nodes > 0)
    out.warnings.push_back("QuadratureWarning: Gramian rank drop at " + std::to_string(acc.rank_nodes) + " nodes");
}

bool rank_drop(const Eigen::MatrixXcd& G) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (G + G.adjoint()), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return ev(0) < 1e-13 * std::max(ev(ev.size() - 1), 1e-300);
}

// Integrates [g,g] - 2 Re(u*[Phi,g]) + u*G u over the period cell with g = fhat(./h)
// and u = G^+ [Phi,g] + delta.
ProjectionError general_error(const TestFunction& f, const GeneratorVector& Phi, double h, double s,
                              const TrigPolyMatrix* delta, const EmpiricalConfig& cfg) {
  const int d = Phi.dim(), n = Phi.size();
  std::vector<FourierSymbol> all = Phi.entries();
  all.push_back(h == 1.0 ? f.fhat : f.fhat.dilated(1.0 / h));
  const GeneratorVector joint(all);
  BracketConfig bc = cfg.bracket;
  bc.s = s;
  const Rule1D rule = gauss_legendre(cfg.nodes, std::numbers::pi);
  Accumulator acc;
  tensor_integrate(
      d, rule,
      [&](std::span<const double> w, bool& tail, bool& rank) {
        const GramianSample g = gramian(joint, w, bc);
        if (g.divergent) throw PreconditionFailed("lattice sums diverge for this s");
        tail = g.tail_warning;
        const Eigen::MatrixXcd G = 0.5 * (g.G + g.G.adjoint());
        const Eigen::MatrixXcd Gpp = G.topLeftCorner(n, n);
        const Eigen::VectorXcd Gpf = G.topRightCorner(n, 1);
        const double Gff = G(n, n).real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Gpp);
        const auto& ev = es.eigenvalues();
        const double cut = 1e-12 * std::max(ev(n - 1), 1e-300);
        Eigen::VectorXcd u = Eigen::VectorXcd::Zero(n);
        for (int i = 0; i < n; ++i)
          if (ev(i) > cut) {
            const auto q = es.eigenvectors().col(i);
            u += q * ((q.adjoint() * Gpf)(0, 0) / ev(i));
          }
        rank = ev(0) <= cut;
        if (delta) u += delta->eval(w);
        const double e = Gff - 2.0 * (u.adjoint() * Gpf)(0, 0).real() + (u.adjoint() * Gpp * u)(0, 0).real();
        return std::max(e, 0.0);
      },
      acc);
  ProjectionError out;
  out.h = h;
  out.err2 = acc.sum * std::pow(2.0 * std::numbers::pi, -d) * std::pow(h, -d - 2.0 * s);
  collect_warnings(acc, out);
  return out;
}

}  // namespace

TestFunction TestFunction::bump(int d, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InputError("bump fraction must lie in (0, 1]");
  const double R = fraction * std::numbers::pi;
  return {FourierSymbol::bump(d, R), R, "bump(" + std::to_string(fraction) + " pi)"};
}

TestFunction TestFunction::from_symbol(FourierSymbol fhat, std::string tag) {
  return {std::move(fhat), std::nullopt, std::move(tag)};
}

ProjectionError projection_error(const TestFunction& f, const GeneratorVector& Phi, double h, double s,
                                 const EmpiricalConfig& cfg) {
  if (f.fhat.dim() != Phi.dim()) throw DimensionMismatch("test function and generators differ in dimension");
  if (!(h > 0.0 && h <= 1.0)) throw InputError("h must lie in (0, 1]");
  if (!f.band_radius) return general_error(f, Phi, h, s, nullptr, cfg);

  // fhat lives in one period cell of the h-scaled lattice, so the integrand is
  // |fhat(w)|^2 |w|^{2s} (1 - |hw|^{2s} Phi* G^+ Phi)(hw) = |fhat|^2 |w|^{2s} mu(hw).
  const int d = Phi.dim();
  BracketConfig bc = cfg.bracket;
  bc.s = s;
  const double R = *f.band_radius;
  const Rule1D rule = gauss_legendre(cfg.nodes, R);
  Accumulator acc;
  tensor_integrate(
      d, rule,
      [&](std::span<const double> w, bool& tail, bool& rank) {
        const cplx fv = f.fhat.eval(w);
        const double a2 = std::norm(fv);
        if (a2 == 0.0) return 0.0;
        double r2 = 0.0;
        for (double x : w) r2 += x * x;
        std::vector<double> hw(w.begin(), w.end());
        for (double& x : hw) x *= h;
        const GramianSample g = gramian(Phi, hw, bc);
        if (g.divergent) return a2 * std::pow(r2, s);  // S^h captures nothing of f
        tail = g.tail_warning;
        rank = rank_drop(g.G0);
        const double mu = pencil_min_lowrank(g.G0, g.phi0, g.w0);
        return a2 * std::pow(r2, s) * mu;
      },
      acc);
  ProjectionError out;
  out.h = h;
  out.err2 = acc.sum * std::pow(2.0 * std::numbers::pi, -d);
  collect_warnings(acc, out);
  return out;
}

ProjectionError perturbed_error(const TestFunction& f, const GeneratorVector& Phi, double h, double s,
                                const TrigPolyMatrix& delta, const EmpiricalConfig& cfg) {
  if (delta.rows() != Phi.size() || delta.cols() != 1) throw DimensionMismatch("delta must be n x 1");
  if (!(h > 0.0 && h <= 1.0)) throw InputError("h must lie in (0, 1]");
  return general_error(f, Phi, h, s, &delta, cfg);
}

ErrorCurve order_curve(const TestFunction& f, const GeneratorVector& Phi, double s, const EmpiricalConfig& cfg,
                       std::vector<double> h, int n_fit) {
  if (h.empty())
    for (int j = 3; j <= 8; ++j) h.push_back(std::ldexp(1.0, -j));
  if (n_fit < 2 || n_fit > static_cast<int>(h.size())) throw InputError("n_fit must lie in [2, #h]");
  ErrorCurve c;
  c.h = h;
  c.n_fit = n_fit;
  for (double hv : h) {
    ProjectionError e = projection_error(f, Phi, hv, s, cfg);
    c.err2.push_back(e.err2);
    for (auto& w : e.warnings) c.warnings.push_back("h=" + std::to_string(hv) + ": " + w);
  }
  // Least squares of log dist = log sqrt(err2) against log h on the last n_fit points.
  const std::size_t first = h.size() - static_cast<std::size_t>(n_fit);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> xs, ys;
  for (std::size_t i = first; i < h.size(); ++i) {
    const double x = std::log(h[i]);
    const double y = 0.5 * std::log(std::max(c.err2[i], 1e-300));
    xs.push_back(x);
    ys.push_back(y);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = n_fit;
  c.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  c.intercept = (sy - c.slope * sx) / m;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double yhat = c.intercept + c.slope * xs[i];
    rss += (ys[i] - yhat) * (ys[i] - yhat);
    c.fitted.push_back(std::exp(2.0 * yhat));
  }
  c.residual = std::sqrt(rss / m);
  return c;
}

}  // namespace sia
