#include "siapprox/generators.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "siapprox/errors.hpp"

namespace sia {

namespace {

const GaussQ kI(0, 1);

// (1 - e^{-i a.w}) / (i a.w)
FourierSymbol difference_quotient(const std::vector<double>& a) {
  const int d = static_cast<int>(a.size());
  FourierSymbol num = FourierSymbol::constant_exact(d, GaussQ(1)) - FourierSymbol::exp_phase(a);
  FourierSymbol den = FourierSymbol::affine(a, 0.0).scaled_exact(kI);
  return FourierSymbol::quotient(num, den);
}

int rank_of(const std::vector<std::vector<int>>& dirs, int d) {
  if (dirs.empty()) return 0;
  Eigen::MatrixXd M(d, static_cast<int>(dirs.size()));
  for (std::size_t j = 0; j < dirs.size(); ++j)
    for (int i = 0; i < d; ++i) M(i, static_cast<int>(j)) = dirs[j][i];
  return static_cast<int>(M.fullPivLu().rank());
}

// Largest number of directions lying in a common hyperplane through the origin.
int max_in_hyperplane(const std::vector<std::vector<int>>& dirs, int d) {
  if (d == 1) return 0;
  int best = 0;
  const int n = static_cast<int>(dirs.size());
  // Hyperplanes spanned by (d-1)-subsets; d <= 3 keeps this small.
  std::vector<int> pick(static_cast<std::size_t>(d - 1));
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == d - 1) {
      std::vector<std::vector<int>> base;
      for (int p : pick) base.push_back(dirs[p]);
      if (rank_of(base, d) != d - 1) return;
      int cnt = 0;
      for (const auto& x : dirs) {
        auto ext = base;
        ext.push_back(x);
        if (rank_of(ext, d) == d - 1) ++cnt;
      }
      best = std::max(best, cnt);
      return;
    }
    for (int i = start; i < n; ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace

FourierSymbol bspline(int k) {
  if (k < 1) throw InputError("B-spline order must be >= 1");
  return bspline_coord(1, 0, k);
}

FourierSymbol bspline_coord(int d, int j, int k, double dilation) {
  std::vector<double> a(static_cast<std::size_t>(d), 0.0);
  a[j] = dilation;
  return difference_quotient(a).pow(k);
}

FourierSymbol boxspline(const std::vector<std::vector<int>>& directions) {
  if (directions.empty()) throw DegenerateDirections("no directions");
  const int d = static_cast<int>(directions.front().size());
  for (const auto& x : directions)
    if (static_cast<int>(x.size()) != d) throw DimensionMismatch("box spline directions");
  if (rank_of(directions, d) < d) throw DegenerateDirections("directions do not span R^" + std::to_string(d));
  std::map<std::vector<int>, int> mult;
  for (const auto& x : directions) ++mult[x];
  std::vector<FourierSymbol> factors;
  for (const auto& [x, m] : mult) factors.push_back(difference_quotient(std::vector<double>(x.begin(), x.end())).pow(m));
  const int n = static_cast<int>(directions.size());
  return FourierSymbol::product(factors).with_decay(n - max_in_hyperplane(directions, d));
}

GeneratorVector fredrickson() {
  const int d = 2;
  auto one = FourierSymbol::constant_exact(d, GaussQ(1));
  auto u = FourierSymbol::coordinate(d, 0), v = FourierSymbol::coordinate(d, 1);
  auto w = FourierSymbol::affine({1.0, 1.0}, 0.0);
  auto Eu = one - FourierSymbol::exp_phase({1.0, 0.0});
  auto Ev = one - FourierSymbol::exp_phase({0.0, 1.0});
  auto Ew = one - FourierSymbol::exp_phase({1.0, 1.0});
  auto bracket = v * Ew - w * Ev;
  auto num = FourierSymbol::product({bracket, Eu, Ev, Ew}).scaled_exact(kI);
  auto den = FourierSymbol::product({u, v, w}).pow(2);
  // Along a coordinate axis direction the symbol decays like |w|^{-3}.
  auto phi1 = FourierSymbol::quotient(num, den).with_decay(3.0);
  auto phi2 = phi1.permuted({1, 0}).with_decay(3.0);
  return GeneratorVector({phi1, phi2}, {"fredrickson1", "fredrickson2"});
}

FourierSymbol delta(int d) { return FourierSymbol::constant_exact(d, GaussQ(1)); }

FourierSymbol convolve(const FourierSymbol& a, const FourierSymbol& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("convolution operands");
  return a * b;
}

std::vector<mpq_class> bad_pair_operator_coeffs(int k, int n_smooth) {
  // Series in tau = i t: E(tau) = (1 - e^{-tau}) / tau = sum_j (-1)^j tau^j / (j+1)!.
  auto E = [&](const mpq_class& scale) {
    std::vector<mpq_class> e(static_cast<std::size_t>(k));
    mpq_class s = 1;
    for (int j = 0; j < k; ++j) {
      mpq_class f(1, static_cast<long>(factorial(j + 1)));
      e[j] = ((j % 2) ? -1 : 1) * f * s;
      s *= scale;
    }
    return e;
  };
  auto mul = [&](const std::vector<mpq_class>& a, const std::vector<mpq_class>& b) {
    std::vector<mpq_class> r(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < k; ++i)
      for (int j = 0; i + j < k; ++j) r[i + j] += a[i] * b[j];
    return r;
  };
  std::vector<mpq_class> s(static_cast<std::size_t>(k), 0);
  s[0] = 1;
  const auto e1 = E(1), eh = E(mpq_class(1, 2));
  for (int i = 0; i < k; ++i) s = mul(s, e1);
  for (int i = 0; i < n_smooth; ++i) s = mul(s, eh);
  // p * s = 1 + O(tau^k): triangular solve.
  std::vector<mpq_class> p(static_cast<std::size_t>(k), 0);
  p[0] = 1;
  for (int j = 1; j < k; ++j) {
    mpq_class acc = 0;
    for (int i = 1; i <= j; ++i) acc += s[i] * p[j - i];
    p[j] = -acc;
  }
  return p;
}

FourierSymbol bad_pair_default_g(int k) {
  if (k < 3) throw InputError("bad pair requires k > 2");
  constexpr int n_smooth = 4;
  const auto p = bad_pair_operator_coeffs(k, n_smooth);
  static const GaussQ ipow[4] = {GaussQ(1), GaussQ(0, 1), GaussQ(-1), GaussQ(0, -1)};
  std::vector<FourierSymbol> tensor;
  for (int j = 0; j < 2; ++j) {
    std::vector<FourierSymbol> terms;
    for (int e = 0; e < k; ++e) {
      GaussQ c = GaussQ(p[e]) * ipow[e % 4];
      if (c.is_zero()) continue;
      terms.push_back(FourierSymbol::coordinate(2, j).pow(e).scaled_exact(c));
    }
    FourierSymbol poly = FourierSymbol::sum(terms);
    tensor.push_back(poly * bspline_coord(2, j, k) * bspline_coord(2, j, n_smooth, 0.5));
  }
  // A tensor product decays like its slowest factor: |t|^{k-1} |t|^{-k} |t|^{-n}.
  return FourierSymbol::product(tensor).with_decay(n_smooth + 1);
}

GeneratorVector bad_pair(const FourierSymbol& g, int k) {
  if (g.dim() != 2) throw PreconditionFailed("bad pair needs a bivariate g");
  if (k <= 2) throw PreconditionFailed("bad pair needs k > 2");
  // 1 - g must vanish to order k at the origin.
  const RatPoint origin = rat_point({0, 0});
  auto one_minus = FourierSymbol::constant_exact(2, GaussQ(1)) - g;
  int o0 = one_minus.zero_order_at_lattice(origin, k);
  if (o0 < k)
    throw PreconditionFailed("1 - g has a zero of order " + std::to_string(o0) + " < " + std::to_string(k) +
                             " at the origin");
  // g must vanish to order k on 2 pi Z^2 \ 0; checked on representatives with |n|_inf <= 2.
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b) {
      if (a == 0 && b == 0) continue;
      int o = g.zero_order_at_lattice(rat_point({a, b}), k);
      if (o < k)
        throw PreconditionFailed("g has a zero of order " + std::to_string(o) + " < " + std::to_string(k) +
                                 " at 2pi*(" + std::to_string(a) + "," + std::to_string(b) + ")");
    }
  auto phi1 = g + g.derivative(MultiIndex{0, 2}).modulated({1.0, 0.0});
  auto phi2 = g - g.derivative(MultiIndex{2, 0}).modulated({1.0, 0.0});
  const double m = g.decay() - 2.0;
  return GeneratorVector({phi1.with_decay(m), phi2.with_decay(m)}, {"badpair1", "badpair2"});
}

TrigPoly realize_taylor(int d, int K, const std::map<MultiIndex, cplx>& target) {
  const auto idx = enumerate_upto(d, K);
  const int n = static_cast<int>(idx.size());
  // Unknown c_j for j in the simplex; row g: sum_j c_j (-i j)^g / g! = target_g.
  Eigen::MatrixXcd A(n, n);
  Eigen::VectorXcd b(n);
  static const cplx mi[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  for (int r = 0; r < n; ++r) {
    const auto& g = idx[r];
    auto it = target.find(g);
    b(r) = it == target.end() ? cplx(0.0) : it->second;
    for (int c = 0; c < n; ++c) {
      double mag = 1.0;
      for (int k = 0; k < d; ++k) mag *= std::pow(static_cast<double>(idx[c][k]), g[k]) / factorial(g[k]);
      A(r, c) = mag * mi[g.order() % 4];
    }
  }
  Eigen::VectorXcd x = A.fullPivLu().solve(b);
  TrigPoly t(d);
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  for (int c = 0; c < n; ++c)
    if (std::abs(x(c)) > 1e-15 * scale) t.set(idx[c].entries(), x(c));
  return t;
}

TrigPolyMatrix bad_pair_v(int k) {
  std::map<MultiIndex, cplx> t1{{MultiIndex{2, 0}, 1.0}}, t2{{MultiIndex{0, 2}, 1.0}};
  return TrigPolyMatrix::column({realize_taylor(2, k + 1, t1), realize_taylor(2, k + 1, t2)});
}

}  // namespace sia
