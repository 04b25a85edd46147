#include "siapprox/ladder.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include "siapprox/errors.hpp"
#include "siapprox/parallel.hpp"

namespace sia {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void collect_lattice(int d, int radius, std::vector<std::vector<int>>& out) {
  std::vector<int> n(static_cast<std::size_t>(d), -radius);
  while (true) {
    bool zero = true;
    for (int x : n) zero = zero && x == 0;
    if (!zero) out.push_back(n);
    int k = 0;
    while (k < d && ++n[k] > radius) n[k++] = -radius;
    if (k == d) break;
  }
}

OrderEstimate finish_estimate(DecayFit fit, double s) {
  OrderEstimate e;
  e.s = s;
  e.order = fit.infinite ? std::numeric_limits<double>::infinity() : (fit.slope + 2.0 * s) / 2.0;
  if (fit.snapped) e.snapped_order = (*fit.snapped + 2.0 * s) / 2.0;
  e.fit = std::move(fit);
  return e;
}

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& A) { return 0.5 * (A + A.adjoint()); }

}  // namespace

SFReport sf_order(const FourierSymbol& phi, int max_k, int radius) {
  SFReport rep;
  rep.max_k = max_k;
  std::vector<std::vector<int>> pts;
  collect_lattice(phi.dim(), radius, pts);
  rep.points.resize(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    bool ex = false;
    const int o = phi.zero_order_at_lattice(rat_point(pts[i]), max_k, &ex);
    rep.points[i] = SFPoint{pts[i], o, ex};
  });
  rep.order = max_k + 1;
  for (const auto& p : rep.points) {
    rep.order = std::min(rep.order, p.order);
    rep.all_exact = rep.all_exact && p.exact;
  }
  if (rep.order > max_k)
    throw InconclusiveAtDegree("every lattice jet vanishes through degree " + std::to_string(max_k));
  return rep;
}

OrderEstimate psi_order(const FourierSymbol& phi, double s, const LadderConfig& cfg) {
  const int d = phi.dim();
  GeneratorVector V({phi});
  BracketConfig bc = cfg.bracket;
  bc.s = s;
  bool warn = false, divergent = false;
  std::mutex mu;
  DecayFit fit = sample_decay(
      d,
      [&](std::span<const double> w) {
        GramianSample g = gramian(V, w, bc);
        {
          std::lock_guard<std::mutex> lock(mu);
          warn = warn || g.tail_warning;
          divergent = divergent || g.divergent;
        }
        // Both brackets are infinite: the alpha = 0 term is negligible and the ratio is 1.
        if (g.divergent) return 1.0;
        const double full = g.G(0, 0).real();
        return full > 0.0 ? g.G0(0, 0).real() / full : 0.0;
      },
      cfg.decay);
  OrderEstimate e = finish_estimate(std::move(fit), s);
  e.tail_warning = warn;
  e.divergent = divergent;
  std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
  if (s >= 0 && std::abs(phi.eval(origin)) < 1e-8) {
    e.degenerate_at_origin = true;
    e.warnings.push_back("DegenerateAtOrigin: |phi(0)| below tolerance; criterion computed anyway");
  }
  if (divergent) e.warnings.push_back("TailBound: lattice sums diverge for this s; ratio taken as 1");
  else if (warn) e.warnings.push_back("TailBound: extrapolation error above tolerance at the radius cap");
  return e;
}

ConsistencyReport psi_order_consistency(const FourierSymbol& phi, const std::vector<double>& s_list,
                                        const LadderConfig& cfg) {
  ConsistencyReport rep;
  for (double s : s_list) rep.rows.push_back(psi_order(phi, s, cfg));
  for (std::size_t i = 0; i < s_list.size(); ++i)
    for (std::size_t j = 0; j < s_list.size(); ++j)
      if (s_list[j] <= s_list[i] && rep.rows[j].order < rep.rows[i].order - 0.1) rep.monotone = false;
  return rep;
}

double pencil_min_lowrank(const Eigen::MatrixXcd& G0in, const Eigen::MatrixXcd& X, double w, Eigen::VectorXcd* argmin) {
  // min_v v*G0v / v*(G0 + w XX*)v = 1 / (1 + w mu), with mu the largest eigenvalue
  // of X*G0^+X. Eigenvalues of G0 below the cut are clamped, which sends the
  // ratio to zero continuously when X reaches into the null space of G0.
  const Eigen::MatrixXcd G0 = hermitian_part(G0in);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> e0(G0);
  const double lmax = e0.eigenvalues().maxCoeff();
  const int r = static_cast<int>(G0.rows());
  if (!(lmax > 0.0)) {
    if (argmin) *argmin = Eigen::VectorXcd::Unit(r, 0);
    return w * X.squaredNorm() > 0.0 ? 0.0 : 1.0;
  }
  const double cut = 1e-12 * lmax;
  Eigen::VectorXd isq(r);
  for (int i = 0; i < r; ++i) isq(i) = 1.0 / std::sqrt(std::max(e0.eigenvalues()(i), cut));
  const Eigen::MatrixXcd Y = isq.asDiagonal() * (e0.eigenvectors().adjoint() * X);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ey(hermitian_part(Y * Y.adjoint()));
  const double mu = std::max(ey.eigenvalues()(r - 1), 0.0);
  if (argmin) {
    Eigen::VectorXcd v = e0.eigenvectors() * (isq.asDiagonal() * ey.eigenvectors().col(r - 1));
    *argmin = v / v.norm();
  }
  return 1.0 / (1.0 + w * mu);
}

PencilValue pencil_min(const GramianSample& g) {
  PencilValue out;
  const Eigen::MatrixXcd G0 = hermitian_part(g.G0), G = hermitian_part(g.G);
  if (!(G.real().trace() > 0.0)) throw NullPencil("Gramian vanishes at the sample");
  out.stable = pencil_min_lowrank(G0, g.phi0, g.w0, nullptr);
  out.reduced = pencil_min_reduced(G0, G);
  return out;
}

double pencil_min_reduced(const Eigen::MatrixXcd& G0in, const Eigen::MatrixXcd& Gin) {
  const Eigen::MatrixXcd G0 = hermitian_part(G0in), G = hermitian_part(Gin);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eg(G);
  const double tol = 1e-12 * G.real().trace();
  std::vector<int> keep;
  for (int i = 0; i < eg.eigenvalues().size(); ++i)
    if (eg.eigenvalues()(i) > tol) keep.push_back(i);
  if (keep.empty()) throw NullPencil("Gramian vanishes at the sample");
  Eigen::MatrixXcd V(G.rows(), static_cast<int>(keep.size()));
  Eigen::VectorXd isq(static_cast<int>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    V.col(static_cast<int>(j)) = eg.eigenvectors().col(keep[j]);
    isq(static_cast<int>(j)) = 1.0 / std::sqrt(eg.eigenvalues()(keep[j]));
  }
  Eigen::MatrixXcd M = isq.asDiagonal() * (V.adjoint() * G0 * V) * isq.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(hermitian_part(M));
  return em.eigenvalues().minCoeff();
}

Eigen::VectorXcd pencil_minimizer(const GramianSample& g) {
  Eigen::VectorXcd v;
  pencil_min_lowrank(g.G0, g.phi0, g.w0, &v);
  return v;
}

OrderEstimate fsi_order(const GeneratorVector& Phi, double s, const LadderConfig& cfg) {
  BracketConfig bc = cfg.bracket;
  bc.s = s;
  bool warn = false;
  std::mutex mu;
  DecayFit fit = sample_decay(
      Phi.dim(),
      [&](std::span<const double> w) {
        GramianSample g = gramian(Phi, w, bc);
        if (g.tail_warning) {
          std::lock_guard<std::mutex> lock(mu);
          warn = true;
        }
        return pencil_min(g).stable;
      },
      cfg.decay);
  OrderEstimate e = finish_estimate(std::move(fit), s);
  e.tail_warning = warn;
  if (warn) e.warnings.push_back("TailBound: extrapolation error above tolerance at the radius cap");
  return e;
}

EigBound eig_upper_bound(const GeneratorVector& Phi, const std::vector<std::vector<int>>& I, double s,
                         const LadderConfig& cfg) {
  EigBound out;
  const int d = Phi.dim(), r = Phi.size();
  if (I.empty()) {
    out.empty_set = true;
    return out;
  }
  for (const auto& n : I) {
    if (static_cast<int>(n.size()) != d) throw DimensionMismatch("lattice offset");
    bool zero = true;
    for (int x : n) zero = zero && x == 0;
    if (zero) throw InputError("the offset set must exclude the origin");
  }
  const int cols = static_cast<int>(I.size());
  auto eig = [&](std::span<const double> w, bool want_min) {
    Eigen::MatrixXcd X(r, cols);
    std::vector<double> p(static_cast<std::size_t>(d));
    for (int c = 0; c < cols; ++c) {
      double n2 = 0.0;
      for (int k = 0; k < d; ++k) {
        p[k] = w[k] + kTwoPi * I[c][k];
        n2 += p[k] * p[k];
      }
      const double sc = s == 0.0 ? 1.0 : std::pow(n2, s / 2.0);
      X.col(c) = Phi.eval(p) * sc;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(X);
    const auto& sv = svd.singularValues();
    if (want_min) return cols < r ? 0.0 : sv(sv.size() - 1) * sv(sv.size() - 1);
    return sv(0) * sv(0);
  };
  out.rho_min = sample_decay(d, [&](std::span<const double> w) { return eig(w, true); }, cfg.decay);
  out.rho_max = sample_decay(d, [&](std::span<const double> w) { return eig(w, false); }, cfg.decay);
  if (!out.rho_min.infinite) {
    const double e = out.rho_min.snapped ? *out.rho_min.snapped : out.rho_min.slope;
    out.bound = e / 2.0;
  }
  return out;
}

SuperfunctionReport superfunction_sample(const GeneratorVector& Phi, double s, double radius, int grid,
                                         const LadderConfig& cfg, const TrigPolyMatrix* candidate,
                                         double threshold) {
  const int d = Phi.dim();
  SuperfunctionReport rep;
  rep.threshold = threshold;
  BracketConfig bc = cfg.bracket;
  bc.s = s;
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(grid);
  rep.points.resize(total);
  rep.v0.resize(total);
  rep.abs_v0_phi.resize(total);
  const double h = 2.0 * radius / grid;
  parallel_for(total, [&](std::size_t idx) {
    std::vector<double> w(static_cast<std::size_t>(d));
    std::size_t t = idx;
    for (int k = 0; k < d; ++k) {
      w[k] = -radius + (static_cast<double>(t % grid) + 0.5) * h;
      t /= grid;
    }
    GramianSample g = gramian(Phi, w, bc);
    Eigen::VectorXcd v = pencil_minimizer(g);
    rep.points[idx] = w;
    rep.v0[idx] = v;
    rep.abs_v0_phi[idx] = std::abs(v.dot(g.phi0));
  });
  rep.min_abs = std::numeric_limits<double>::infinity();
  for (double a : rep.abs_v0_phi) rep.min_abs = std::min(rep.min_abs, a);
  rep.certified = rep.min_abs >= threshold;
  if (candidate) {
    if (candidate->rows() != Phi.size() || candidate->cols() != 1) throw DimensionMismatch("candidate vector");
    std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
    Eigen::VectorXcd v = candidate->eval(origin).col(0);
    const double val = std::abs(v.dot(Phi.eval(origin)));
    rep.candidate_value = val;
    double scale = 1.0;
    for (int i = 0; i < candidate->rows(); ++i) scale = std::max(scale, (*candidate)(i, 0).max_abs());
    rep.candidate_degenerate = val <= 1e-10 * scale;
  }
  return rep;
}

RefinableBound refinable_lower_bound(const FourierSymbol& f, double rho, int M, const LadderConfig& cfg) {
  if (!(rho > 0.0 && rho < std::numbers::pi)) throw InputError("annulus radius must lie in (0, pi)");
  const int d = f.dim();
  RefinableBound out;
  // Annulus grid: four radii in (rho/2, rho] times the default directions.
  std::vector<std::vector<double>> pts;
  for (int i = 1; i <= 4; ++i) {
    const double r = rho * (0.5 + 0.5 * i / 4.0);
    for (const auto& u : default_directions(d, cfg.decay.n_directions)) {
      std::vector<double> p(u);
      for (double& x : p) x *= r;
      pts.push_back(p);
    }
  }
  out.annulus_min = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    const double a = std::abs(f.eval(p));
    out.annulus_min = std::min(out.annulus_min, a);
    out.annulus_max = std::max(out.annulus_max, a);
  }
  if (!std::isfinite(out.annulus_max) || !(out.annulus_min > 1e-8 * out.annulus_max))
    throw AnnulusDegenerate("|f| is not bounded away from zero on the annulus");

  GeneratorVector V({f});
  std::vector<double> radii;
  for (int m = 0; m <= M; ++m) {
    BracketConfig bc = cfg.bracket;
    bc.s = 0.0;
    bc.lattice_scale = std::ldexp(1.0, m);
    std::vector<double> vals(pts.size());
    std::vector<char> div(pts.size(), 0);
    parallel_for(pts.size(), [&](std::size_t i) {
      GramianSample g = gramian(V, pts[i], bc);
      vals[i] = g.G0(0, 0).real();
      div[i] = g.divergent ? 1 : 0;
    });
    double lam = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      lam = std::max(lam, vals[i]);
      if (div[i]) out.divergent = true;
    }
    out.lambda.push_back(out.divergent ? std::numeric_limits<double>::infinity() : lam);
    radii.push_back(std::ldexp(1.0, -m));
  }
  if (out.divergent) return out;
  DecayConfig dc = cfg.decay;
  dc.fit_last = std::max(3, (M + 2) / 2);
  out.fit = fit_profile(radii, out.lambda, dc);
  // lambda_0 may vanish while later terms do not only through cancellation, which
  // cannot happen for sums of squares; an all-zero tail means band-limited.
  bool all_zero_after_0 = true;
  for (std::size_t m = 1; m < out.lambda.size(); ++m) all_zero_after_0 = all_zero_after_0 && out.lambda[m] == 0.0;
  out.infinite = out.fit.infinite || all_zero_after_0;
  if (out.infinite) {
    out.k = std::numeric_limits<double>::infinity();
    return out;
  }
  out.k = out.fit.slope / 2.0;
  if (out.fit.snapped) out.snapped_k = *out.fit.snapped / 2.0;
  return out;
}

std::vector<DualSample> dual_extend(const TrigPolyMatrix& P,
                                    const std::vector<std::pair<std::vector<double>, Eigen::VectorXcd>>& v0,
                                    int levels) {
  std::vector<DualSample> out;
  for (const auto& [w0, v] : v0) {
    if (v.size() != P.rows()) throw DimensionMismatch("dual vector length");
    Eigen::RowVectorXcd vs = v.adjoint();
    out.push_back({0, w0, w0, v});
    std::vector<double> w = w0;
    for (int m = 1; m <= levels; ++m) {
      for (double& x : w) x *= 0.5;
      vs = vs * P.eval(w);
      out.push_back({m, w, w0, vs.adjoint()});
    }
  }
  return out;
}

double dual_identity_residual(const TrigPolyMatrix& P, const GeneratorVector& Phi,
                              const std::vector<std::pair<std::vector<double>, Eigen::VectorXcd>>& v0, int levels,
                              const std::vector<std::vector<int>>& offsets) {
  const auto samples = dual_extend(P, v0, levels);
  const int d = Phi.dim();
  double worst = 0.0;
  std::size_t base = 0;
  for (std::size_t s = 0; s < v0.size(); ++s, base += static_cast<std::size_t>(levels) + 1) {
    const auto& top = samples[base];
    for (int m = 1; m <= levels; ++m) {
      const auto& cur = samples[base + static_cast<std::size_t>(m)];
      for (const auto& a : offsets) {
        std::vector<double> p1(static_cast<std::size_t>(d)), p2(static_cast<std::size_t>(d));
        for (int k = 0; k < d; ++k) {
          p1[k] = cur.omega[k] + kTwoPi * a[k];
          p2[k] = top.omega[k] + std::ldexp(kTwoPi * a[k], m);
        }
        const cplx lhs = cur.v.dot(Phi.eval(p1)), rhs = top.v.dot(Phi.eval(p2));
        const double sc = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        worst = std::max(worst, std::abs(lhs - rhs) / sc);
      }
    }
  }
  return worst;
}

}  // namespace sia
