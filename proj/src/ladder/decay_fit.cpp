#include "siapprox/decay_fit.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "siapprox/errors.hpp"
#include "siapprox/parallel.hpp"

namespace sia {

std::vector<std::vector<double>> default_directions(int d, int count) {
  std::vector<std::vector<double>> dirs;
  if (d == 1) {
    dirs = {{1.0}, {-1.0}};
  } else if (d == 2) {
    const int n = count > 0 ? count : 8;
    for (int j = 0; j < n; ++j) {
      const double t = (j + 0.5) * 2.0 * std::numbers::pi / n;
      dirs.push_back({std::cos(t), std::sin(t)});
    }
  } else {
    // Sign patterns of a generic vector; these avoid every coordinate hyperplane
    // and every plane x_i = +-x_j.
    std::vector<double> g(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) g[k] = 1.0 + 0.37 * k;
    const int n = 1 << d;
    for (int m = 0; m < n && (count == 0 || static_cast<int>(dirs.size()) < count); ++m) {
      std::vector<double> v(g);
      double nrm = 0.0;
      for (int k = 0; k < d; ++k) {
        if (m & (1 << k)) v[k] = -v[k];
        nrm += v[k] * v[k];
      }
      for (double& x : v) x /= std::sqrt(nrm);
      dirs.push_back(v);
    }
  }
  return dirs;
}

std::vector<double> default_radii(const DecayConfig& cfg) {
  std::vector<double> r;
  for (int j = 0; j < cfg.n_radii; ++j) r.push_back(cfg.r0 * std::ldexp(1.0, -j));
  return r;
}

std::optional<double> snap_value(double x, double tol) {
  if (!std::isfinite(x)) return std::nullopt;
  const double n = std::round(x);
  if (std::abs(x - n) <= tol) return n;
  return std::nullopt;
}

DecayFit fit_profile(std::vector<double> radii, std::vector<double> profile, const DecayConfig& cfg) {
  if (radii.size() != profile.size() || radii.empty()) throw InputError("decay fit needs matching samples");
  DecayFit out;
  out.radii = std::move(radii);
  out.profile = std::move(profile);
  const int n = static_cast<int>(out.radii.size());
  const int use = std::min(std::max(cfg.fit_last, 2), n);
  const int first = n - use;
  int zeros = 0;
  for (int i = first; i < n; ++i)
    if (!(out.profile[i] > 0.0)) ++zeros;
  if (zeros == use) {
    out.infinite = true;
    out.slope = std::numeric_limits<double>::infinity();
    return out;
  }
  if (zeros > 0) {
    // Partially vanishing samples: the decay outruns what the data can resolve.
    out.slope = std::numeric_limits<double>::infinity();
    out.residual = std::numeric_limits<double>::infinity();
    return out;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = first; i < n; ++i) {
    const double x = std::log(out.radii[i]), y = std::log(out.profile[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = use * sxx - sx * sx;
  out.slope = (use * sxy - sx * sy) / den;
  out.intercept = (sy - out.slope * sx) / use;
  double res = 0.0;
  for (int i = first; i < n; ++i) {
    const double pred = out.intercept + out.slope * std::log(out.radii[i]);
    res = std::max(res, std::abs(std::log(out.profile[i]) - pred));
  }
  out.residual = res;
  if (res <= cfg.snap_tol) out.snapped = snap_value(out.slope, cfg.snap_tol);
  return out;
}

DecayFit sample_decay(int d, const std::function<double(std::span<const double>)>& f, const DecayConfig& cfg) {
  const auto radii = default_radii(cfg);
  const auto dirs = default_directions(d, cfg.n_directions);
  const std::size_t nr = radii.size(), nd = dirs.size();
  std::vector<double> vals(nr * nd);
  parallel_for(nr * nd, [&](std::size_t idx) {
    const std::size_t i = idx / nd, j = idx % nd;
    std::vector<double> w(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) w[k] = radii[i] * dirs[j][k];
    vals[idx] = f(w);
  });
  std::vector<double> profile(nr, 0.0);
  std::vector<std::vector<double>> table(nr, std::vector<double>(nd));
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nd; ++j) {
      table[i][j] = vals[i * nd + j];
      profile[i] = std::max(profile[i], std::abs(vals[i * nd + j]));
    }
  DecayFit fit = fit_profile(radii, profile, cfg);
  fit.directions = dirs;
  fit.values = std::move(table);
  return fit;
}

}  // namespace sia
