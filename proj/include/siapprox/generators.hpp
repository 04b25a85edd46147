#pragma once

#include <vector>

#include "siapprox/symbol.hpp"

namespace sia {

// Centered-at-k/2 cardinal B-spline of order k supported on [0, k], d = 1:
// ((1 - e^{-iw}) / (iw))^k.
FourierSymbol bspline(int k);
// Same symbol in coordinate j of R^d (a univariate factor of a tensor product).
FourierSymbol bspline_coord(int d, int j, int k, double dilation = 1.0);

// prod_xi (1 - e^{-i xi.w}) / (i xi.w). Throws DegenerateDirections if the
// directions do not span R^d.
FourierSymbol boxspline(const std::vector<std::vector<int>>& directions);

// The two C^1 cubic elements on the three-direction mesh.
GeneratorVector fredrickson();

// Dirac delta (constant symbol 1).
FourierSymbol delta(int d);

FourierSymbol convolve(const FourierSymbol& a, const FourierSymbol& b);

// Default g for the bad-pair construction with parameter k: tensor product of
// g1(t) = p(it) * Bk(t) * Bn(t/2) with n = 4 and p the degree-(k-1) truncation
// of 1/(Bk(t) Bn(t/2)) as a power series in it, so that 1 - g has a zero of
// order k at the origin and g a zero of order k at 2 pi Z^2 \ 0.
FourierSymbol bad_pair_default_g(int k);
// Coefficients p_0..p_{k-1} (exact rationals) of that operator, in powers of (it).
std::vector<mpq_class> bad_pair_operator_coeffs(int k, int n_smooth = 4);

// phi1 = g + e D^{(0,2)} g,  phi2 = g - e D^{(2,0)} g  with e = exp(2 pi i x_1).
// Verifies the jet preconditions on g first and throws PreconditionFailed.
GeneratorVector bad_pair(const FourierSymbol& g, int k);

// Trigonometric vector v with v - (()^{(2,0)}, ()^{(0,2)}) = O(|w|^{k+2}) at 0.
TrigPolyMatrix bad_pair_v(int k);

// Trig polynomial supported on {j in Z_+^d : |j| <= K} whose jet at 0 matches the
// given normalized Taylor coefficients for all |g| <= K.
TrigPoly realize_taylor(int d, int K, const std::map<MultiIndex, cplx>& target);

}  // namespace sia
