#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace sia {

struct DecayConfig {
  double r0 = 0.4;
  int n_radii = 6;
  // Number of trailing radii used by the least-squares fit.
  int fit_last = 3;
  double snap_tol = 0.25;
  // 0 selects the default direction set for the dimension.
  int n_directions = 0;
};

// Estimated exponent e of f(w) ~ |w|^e as w -> 0, from radial samples.
struct DecayFit {
  std::vector<double> radii;
  std::vector<std::vector<double>> directions;
  std::vector<std::vector<double>> values;  // values[radius][direction]
  std::vector<double> profile;               // max over directions per radius
  double slope = 0.0;
  double residual = 0.0;                     // max |log deviation| on the fitted points
  std::optional<double> snapped;
  bool infinite = false;                     // profile vanishes identically on the fitted radii
  double intercept = 0.0;
};

std::vector<std::vector<double>> default_directions(int d, int count = 0);
std::vector<double> default_radii(const DecayConfig& cfg);

// Least squares of log profile against log radii over the trailing fit_last entries.
DecayFit fit_profile(std::vector<double> radii, std::vector<double> profile, const DecayConfig& cfg);

// Samples f on radii x directions (in parallel), takes the maximum over directions
// at each radius and fits.
DecayFit sample_decay(int d, const std::function<double(std::span<const double>)>& f, const DecayConfig& cfg);

// Nearest integer to x when within tol, otherwise nothing.
std::optional<double> snap_value(double x, double tol);

}  // namespace sia
