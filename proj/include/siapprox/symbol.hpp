#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "siapprox/jet.hpp"
#include "siapprox/multi_index.hpp"
#include "siapprox/trig_poly.hpp"

namespace sia {

// An exact Taylor expansion kept as a fraction num/den of exact jets, so that
// orders of zeros can be read off without ever dividing: ord = ord(num) - ord(den).
struct ExactFrac {
  ExactJet num;
  ExactJet den;
};

// Affine factor a.w + b of a quotient denominator, with multiplicity.
struct AffineFactor {
  std::vector<double> a;
  double b = 0.0;
  int mult = 1;
};

class SymbolNode;

// Entire Fourier transform of a compactly supported distribution, stored as an
// immutable expression tree. Quotient nodes must have removable singularities;
// their denominators are products of powers of affine forms, which is what lets
// evaluation near a singular hyperplane switch to a Taylor expansion.
class FourierSymbol {
 public:
  FourierSymbol() = default;
  explicit FourierSymbol(std::shared_ptr<const SymbolNode> n);

  int dim() const;
  cplx eval(std::span<const double> w) const;
  cplx operator()(std::span<const double> w) const { return eval(w); }
  cplx eval1(double w) const { return eval(std::span<const double>(&w, 1)); }
  Jet jet_at(std::span<const double> p, int K) const;
  // Exact expansion at the point 2*pi*q. Throws NotExact when some constant or
  // phase is not representable in Q(i)[pi].
  ExactFrac exact_jet_at(const RatPoint& q, int K) const;
  // Order of the zero at 2*pi*q, computed exactly; returns K+1 for "> K".
  int exact_zero_order(const RatPoint& q, int K) const;
  // Order of the zero at p from a float jet with the hybrid tolerance; K+1 for "> K".
  int float_zero_order(std::span<const double> p, int K) const;
  // Exact when possible, float otherwise. *used_exact reports which path ran.
  int zero_order_at_lattice(const RatPoint& q, int K, bool* used_exact = nullptr) const;

  // Exponent m in |f(w)| <= C (1 + |w|)^{-m}, used for lattice-sum tail control.
  double decay() const;
  FourierSymbol with_decay(double m) const;
  std::string describe() const;
  const SymbolNode& node() const { return *n_; }
  const std::shared_ptr<const SymbolNode>& node_ptr() const { return n_; }

  // Leaf constructors.
  static FourierSymbol constant(int d, cplx c);
  static FourierSymbol constant_exact(int d, const GaussQ& c);
  static FourierSymbol coordinate(int d, int j);
  static FourierSymbol affine(std::vector<double> a, double b = 0.0);
  // exp(-i a.w): the symbol of the translate by a.
  static FourierSymbol exp_phase(std::vector<double> a);
  static FourierSymbol trig(const TrigPoly& t);
  // Smooth band-limited profile exp(-1/(1-|w/radius|^2)); evaluable but not analytic.
  static FourierSymbol bump(int d, double radius);
  static FourierSymbol quotient(const FourierSymbol& num, const FourierSymbol& den);
  static FourierSymbol sum(const std::vector<FourierSymbol>& terms);
  static FourierSymbol product(const std::vector<FourierSymbol>& factors);

  FourierSymbol operator+(const FourierSymbol& o) const;
  FourierSymbol operator-(const FourierSymbol& o) const;
  FourierSymbol operator*(const FourierSymbol& o) const;
  FourierSymbol pow(int n) const;
  FourierSymbol scaled(cplx c) const;
  FourierSymbol scaled_exact(const GaussQ& c) const;
  // w -> f(c w).
  FourierSymbol dilated(double c) const;
  // Symbol of D^g applied on the space side: multiplies by (i w)^g / g!.
  FourierSymbol derivative(const MultiIndex& g) const;
  // Symbol of the modulated function e^{2 pi i c.x} f(x): w -> f(w - 2 pi c).
  FourierSymbol modulated(std::vector<double> c) const;
  // w -> f(w) with the coordinates permuted: new coordinate j is old perm[j].
  FourierSymbol permuted(std::vector<int> perm) const;

 private:
  std::shared_ptr<const SymbolNode> n_;
};

class SymbolNode {
 public:
  explicit SymbolNode(int d) : d_(d) {}
  virtual ~SymbolNode() = default;
  int dim() const { return d_; }
  virtual cplx eval(const double* w) const = 0;
  virtual Jet jet(const std::vector<double>& p, int K) const = 0;
  virtual ExactFrac exact(const RatPoint& q, int K) const = 0;
  virtual double decay() const = 0;
  // Appends the affine factorization of this node if it is a product of powers of
  // affine forms (constants allowed); returns false otherwise.
  virtual bool affine_factors(std::vector<AffineFactor>& out, int mult) const;
  virtual std::string describe() const = 0;

 protected:
  int d_;
};

// Column of generator symbols sharing a dimension.
class GeneratorVector {
 public:
  GeneratorVector() = default;
  explicit GeneratorVector(std::vector<FourierSymbol> entries, std::vector<std::string> labels = {});

  int size() const { return static_cast<int>(entries_.size()); }
  int dim() const { return entries_.empty() ? 0 : entries_.front().dim(); }
  const FourierSymbol& operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
  const std::vector<FourierSymbol>& entries() const { return entries_; }
  const std::vector<std::string>& labels() const { return labels_; }

  Eigen::VectorXcd eval(std::span<const double> w) const;
  void eval_into(std::span<const double> w, cplx* out) const;
  std::vector<Jet> jet_at(std::span<const double> p, int K) const;
  double decay() const;  // min over entries

 private:
  std::vector<FourierSymbol> entries_;
  std::vector<std::string> labels_;
};

// Rational vector -> doubles of 2*pi*q.
std::vector<double> two_pi_times(const RatPoint& q);
RatPoint rat_point(const std::vector<int>& lattice);

}  // namespace sia
