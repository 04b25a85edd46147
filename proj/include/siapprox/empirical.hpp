#pragma once

#include <optional>
#include <string>
#include <vector>

#include "siapprox/lattice.hpp"
#include "siapprox/symbol.hpp"
#include "siapprox/trig_poly.hpp"

namespace sia {

struct TestFunction {
  FourierSymbol fhat;
  // Set when fhat vanishes outside the ball of this radius (at most pi).
  std::optional<double> band_radius;
  std::string tag;

  // fhat(w) = exp(-1 / (1 - |w / (fraction pi)|^2)) inside the ball.
  static TestFunction bump(int d, double fraction = 0.9);
  static TestFunction from_symbol(FourierSymbol fhat, std::string tag = "symbol");
};

struct EmpiricalConfig {
  BracketConfig bracket;
  int nodes = 64;  // Gauss-Legendre nodes per dimension
};

struct ProjectionError {
  double h = 1.0;
  double err2 = 0.0;  // dist_s(f, S^h)^2
  std::vector<std::string> warnings;
};

ProjectionError projection_error(const TestFunction& f, const GeneratorVector& Phi, double h, double s,
                                 const EmpiricalConfig& cfg = {});

// Error of the approximant with coefficient symbol tau_f + delta, where tau_f solves the
// normal equations and delta is an n x 1 trig vector. Never smaller than projection_error.
ProjectionError perturbed_error(const TestFunction& f, const GeneratorVector& Phi, double h, double s,
                                const TrigPolyMatrix& delta, const EmpiricalConfig& cfg = {});

struct ErrorCurve {
  std::vector<double> h;
  std::vector<double> err2;
  std::vector<double> fitted;  // err2 predicted by the fitted line, for the fitted points
  double slope = 0.0;          // d log dist / d log h over the fitted tail
  double intercept = 0.0;
  double residual = 0.0;       // rms of the log-log fit
  int n_fit = 4;
  std::vector<std::string> warnings;
};

// Dyadic sweep h = 2^-3 .. 2^-8 by default; the slope uses the last n_fit points.
ErrorCurve order_curve(const TestFunction& f, const GeneratorVector& Phi, double s, const EmpiricalConfig& cfg = {},
                       std::vector<double> h = {}, int n_fit = 4);

}  // namespace sia
