#include <cmath>
#include <limits>
#include <mutex>
#include <random>

#include "siapprox/errors.hpp"
#include "siapprox/parallel.hpp"
#include "siapprox/refinement.hpp"

namespace sia {

CombinedSample combined_gramian(const SolutionBasis& sol, std::span<const double> omega, const BracketConfig& cfg) {
  const int r = sol.mask.r(), n = sol.size();
  CombinedSample out;
  out.G0 = Eigen::MatrixXcd::Zero(r, r);
  out.X = Eigen::MatrixXcd::Zero(r, n);
  for (int j = 0; j < n; ++j) {
    GramianSample g = gramian(sol.generator(j), omega, cfg);
    out.G0 += g.G0;
    out.X.col(j) = g.phi0;
    out.w0 = g.w0;
    out.omega = g.omega;
    out.tail_warning = out.tail_warning || g.tail_warning;
  }
  out.G = out.G0 + out.w0 * out.X * out.X.adjoint();
  return out;
}

CoherentReport coherent_order(const SolutionBasis& sol, double s, const LadderConfig& cfg) {
  const int d = sol.mask.d();
  BracketConfig bc = cfg.bracket;
  bc.s = s;
  const auto radii = default_radii(cfg.decay);
  const auto dirs = default_directions(d, cfg.decay.n_directions);
  const std::size_t nr = radii.size(), nd = dirs.size();
  std::vector<double> pencil(nr * nd), full(nr * nd), trunc(nr * nd);
  std::vector<std::vector<double>> pts(nr * nd);
  std::vector<Eigen::VectorXcd> mins(nr * nd);
  bool warn = false;
  std::mutex mu;
  parallel_for(nr * nd, [&](std::size_t idx) {
    const std::size_t i = idx / nd, j = idx % nd;
    std::vector<double> w(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) w[k] = radii[i] * dirs[j][k];
    CombinedSample c = combined_gramian(sol, w, bc);
    Eigen::VectorXcd v;
    pencil[idx] = pencil_min_lowrank(c.G0, c.X, c.w0, &v);
    full[idx] = (v.adjoint() * c.G * v)(0, 0).real();
    trunc[idx] = (v.adjoint() * c.G0 * v)(0, 0).real();
    pts[idx] = w;
    mins[idx] = v;
    if (c.tail_warning) {
      std::lock_guard<std::mutex> lock(mu);
      warn = true;
    }
  });
  auto profile = [&](const std::vector<double>& vals) {
    std::vector<double> p(nr, 0.0);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nd; ++j) p[i] = std::max(p[i], vals[i * nd + j]);
    return fit_profile(radii, p, cfg.decay);
  };
  CoherentReport rep;
  DecayFit fit = profile(pencil);
  fit.directions = dirs;
  rep.estimate.s = s;
  rep.estimate.order = fit.infinite ? std::numeric_limits<double>::infinity() : (fit.slope + 2.0 * s) / 2.0;
  if (fit.snapped) rep.estimate.snapped_order = (*fit.snapped + 2.0 * s) / 2.0;
  rep.estimate.fit = std::move(fit);
  rep.estimate.tail_warning = warn;
  if (warn) rep.estimate.warnings.push_back("TailBound: extrapolation error above tolerance at the radius cap");
  rep.full_form = profile(full);
  rep.truncated_form = profile(trunc);
  rep.points = std::move(pts);
  rep.minimizers = std::move(mins);

  const Eigen::MatrixXcd F = sol.values_at_zero();
  rep.degenerate = F.cwiseAbs().maxCoeff() <= 1e-10;
  if (rep.degenerate) rep.estimate.warnings.push_back("Degenerate: every solution vanishes at the origin");
  const double k = rep.estimate.order;
  rep.regular = !rep.degenerate && std::abs(rep.full_form.slope - 2.0 * s) <= 0.25 &&
                rep.truncated_form.slope >= 2.0 * k - 0.25;
  return rep;
}

DecayFit supervector_form_fit(const SolutionBasis& sol, const TrigPolyMatrix& v, double s, const LadderConfig& cfg) {
  const int r = sol.mask.r();
  if (v.rows() != r || v.cols() != 1) throw DimensionMismatch("supervector must be r x 1");
  // v*(w) G0(w) v(w) = sum_j sum_{a != 0} |v*(w + a) Phi_j(w + a)|^2 because v is
  // 2 pi periodic, so the form is the truncated bracket sum of psi_j = v* Phi_j.
  // Summing nonnegative terms avoids the cancellation in v* G0 v.
  std::vector<FourierSymbol> psi;
  for (int j = 0; j < sol.size(); ++j) {
    std::vector<FourierSymbol> terms;
    for (int c = 0; c < r; ++c)
      if (!v(c, 0).is_zero()) terms.push_back(FourierSymbol::trig(v(c, 0).adjoint()) * sol.generator(j)[c]);
    if (!terms.empty()) psi.push_back(terms.size() == 1 ? terms.front() : FourierSymbol::sum(terms));
  }
  if (psi.empty()) throw DegenerateSymbol("supervector is zero");
  GeneratorVector Psi(psi);
  BracketConfig bc = cfg.bracket;
  bc.s = s;
  return sample_decay(
      sol.mask.d(), [&](std::span<const double> w) { return gramian(Psi, w, bc).G0.real().trace(); }, cfg.decay);
}

std::map<MultiIndex, Eigen::MatrixXcd> flatten_mask(const Mask& P, int k) {
  const int r = P.r(), d = P.d();
  if ((P.P0() - Eigen::MatrixXcd::Identity(r, r)).norm() > 1e-10)
    throw AssumptionViolated("P(0) differs from the identity");
  std::map<MultiIndex, Eigen::MatrixXcd> T;
  if (k < 1) return T;
  const auto layout = JetLayout::get(d, k - 1);
  const auto Pj = P.jets_at_zero(k - 1);
  std::vector<Eigen::MatrixXcd> t(static_cast<std::size_t>(layout->size()));
  t[0] = Eigen::MatrixXcd::Identity(r, r);
  for (int a = 1; a < layout->size(); ++a) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(r, r);
    for (int b = 0; b < a; ++b)
      if (layout->idx[b].leq(layout->idx[a])) acc += Pj[layout->index_of(layout->idx[a] - layout->idx[b])] * t[b];
    t[a] = acc / (std::ldexp(1.0, layout->deg[a]) - 1.0);
  }
  for (int a = 0; a < layout->size(); ++a) T[layout->idx[a]] = t[a];
  return T;
}

int flatten_residual_order(const Mask& P, const std::map<MultiIndex, Eigen::MatrixXcd>& T, int K) {
  const int r = P.r(), d = P.d();
  const auto layout = JetLayout::get(d, K);
  const auto Pj = P.jets_at_zero(K);
  auto Tat = [&](const MultiIndex& a) -> Eigen::MatrixXcd {
    const auto it = T.find(a);
    return it == T.end() ? Eigen::MatrixXcd::Zero(r, r) : it->second;
  };
  for (int a = 0; a < layout->size(); ++a) {
    const MultiIndex& alpha = layout->idx[a];
    Eigen::MatrixXcd R = -std::ldexp(1.0, alpha.order()) * Tat(alpha);
    for (int b = 0; b <= a; ++b)
      if (layout->idx[b].leq(alpha)) R += Pj[layout->index_of(alpha - layout->idx[b])] * Tat(layout->idx[b]);
    if (R.norm() > 1e-9) return alpha.order();
  }
  return K + 1;
}

TrigPoly bspline_mask(int k, int d, int coord) {
  if (coord < 0 || coord >= d) throw InputError("bspline mask coordinate out of range");
  TrigPoly t = TrigPoly::constant_exact(d, GaussQ(0));
  t = TrigPoly(d).with_exact_from_doubles();
  mpz_class den = 1;
  den <<= k;
  for (int j = 0; j <= k; ++j) {
    LatticeIndex idx(static_cast<std::size_t>(d), 0);
    idx[coord] = j;
    mpz_class num;
    mpz_bin_uiui(num.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(j));
    t.set_exact(idx, GaussQ(mpq_class(num, den)));
  }
  return t;
}

namespace {

// ((1 + e^{-iw_t}) / 2)^m (1 + eps (e^{-iw_t} - 1)) in coordinate t.
TrigPoly factor(int d, int t, int m, cplx eps) {
  TrigPoly b = bspline_mask(m, d, t);
  if (eps == cplx(0.0)) return b;
  TrigPoly q = TrigPoly::constant(d, 1.0 - eps);
  LatticeIndex e(static_cast<std::size_t>(d), 0);
  e[t] = 1;
  q.set(e, eps);
  return b * q;
}

TrigPolyMatrix constant_matrix(const Eigen::MatrixXcd& A, int d) {
  TrigPolyMatrix M(static_cast<int>(A.rows()), static_cast<int>(A.cols()), d);
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) M(i, j) = TrigPoly::constant(d, A(i, j));
  return M;
}

}  // namespace

std::vector<ZkInstance> random_zk_instances(int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::vector<ZkInstance> out;
  for (int i = 0; i < count; ++i) {
    const int d = i % 4 == 3 ? 2 : 1;
    const int r = pick(1, 2);
    TrigPolyMatrix P(r, r, d);
    for (int c = 0; c < r; ++c) {
      const int m = d == 1 ? pick(1, 3) : pick(2, 3);
      TrigPoly p = TrigPoly::constant(d, 1.0);
      for (int t = 0; t < d; ++t) {
        const cplx eps = m >= 2 ? cplx(0.1 * U(rng), 0.1 * U(rng)) : cplx(0.0);
        p = p * factor(d, t, m, eps);
      }
      P(c, c) = p;
    }
    if (r == 2 && pick(0, 1) == 1) {
      Eigen::MatrixXcd A(2, 2);
      do {
        A << 1.0 + 0.4 * U(rng), 0.4 * U(rng), 0.4 * U(rng), 1.0 + 0.4 * U(rng);
      } while (std::abs(A.determinant()) < 0.3);
      P = constant_matrix(A, d) * P * constant_matrix(A.inverse(), d);
    }
    Mask mask(P);
    const ZkSolution zs = max_Zk_solve(mask, 3);
    ZkInstance inst;
    inst.P = mask;
    const int ks = std::max(zs.k_star, 1);
    TrigPolyMatrix v = zs.v ? *zs.v : TrigPolyMatrix::column(std::vector<TrigPoly>(r, TrigPoly::constant(d, 1.0)));
    int kind = i % 3;
    if (kind == 2 && zs.k_star >= 3) kind = 1;
    switch (kind) {
      case 0:
        inst.kind = "solved";
        inst.k = pick(1, ks);
        break;
      case 1: {
        inst.kind = "perturbed";
        inst.k = pick(1, ks);
        LatticeIndex j(static_cast<std::size_t>(d));
        for (int& x : j) x = pick(0, ks - 1);
        const int c = pick(0, r - 1);
        TrigPoly& e = v(c, 0);
        const auto it = e.coeffs().find(j);
        const cplx old = it == e.coeffs().end() ? cplx(0.0) : it->second;
        e.set(j, old + cplx(0.05 * U(rng), 0.05 * U(rng)));
        break;
      }
      default:
        inst.kind = "beyond";
        inst.k = ks + 1;
        break;
    }
    inst.v = v;
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace sia
