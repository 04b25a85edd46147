#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "siapprox/symbol.hpp"

namespace sia {

struct BracketConfig {
  double s = 0.0;
  // Initial truncation radius in shells |n|_inf <= R of the lattice 2*pi*scale*Z^d.
  int lattice_radius = 8;
  // Largest radius the adaptive loop may reach; 0 selects a default per dimension.
  int radius_cap = 0;
  // Decay exponent m of the generators; 0 takes the value reported by the symbols.
  double tail_decay = 0.0;
  // Accepted extrapolation error relative to the truncated Gramian's trace.
  double tolerance = 1e-6;
  // Lattice spacing multiplier: alpha runs over 2*pi*scale*Z^d.
  double lattice_scale = 1.0;
  bool adaptive = true;

  int cap_for(int d) const;
};

struct GramianSample {
  std::vector<double> omega;   // reduced point
  Eigen::MatrixXcd G;          // full Gramian
  Eigen::MatrixXcd G0;         // alpha != 0 only
  Eigen::VectorXcd phi0;       // generator values at omega
  double w0 = 0.0;             // |omega|^{2s}
  double tail = 0.0;           // trace of the extrapolated tail added to G0
  double tail_error = 0.0;     // discrepancy between successive extrapolations
  int radius_used = 0;
  bool tail_warning = false;
  bool divergent = false;      // 2m - 2s <= d: the lattice sums are infinite
};

// Reduces every coordinate to [-pi, pi).
std::vector<double> reduce_fundamental(std::span<const double> w);

GramianSample gramian(const GeneratorVector& Phi, std::span<const double> omega, const BracketConfig& cfg);

struct BracketValue {
  cplx value;
  double tail = 0.0;
  double tail_error = 0.0;
  int radius_used = 0;
  bool tail_warning = false;
};

// [phi, psi]_s at omega, or the truncated bracket (alpha != 0) when truncated is set.
BracketValue bracket(const FourierSymbol& phi, const FourierSymbol& psi, std::span<const double> omega,
                     const BracketConfig& cfg, bool truncated = false);

// Sum over rho > R of the shell weights N_d(rho) * rho^{-p} divided by the weight at R.
double shell_tail_factor(int d, int R, double p);

}  // namespace sia
