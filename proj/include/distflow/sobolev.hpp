#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "distflow/hermite.hpp"

namespace distflow {

/// Truncated element of S_p: coefficients plus the regularity exponent.
struct SobolevElement {
  HermiteCoeffs coeffs;
  double index;  // p
};

/// ||c||_p = sqrt( sum_k (2|k|+d)^{2p} c_k^2 ) over stored k.
double sobolev_norm(const HermiteCoeffs& c, double p);

/// <f, g>_p with the (2|k|+d)^{2p} weights, over common indices.
double sobolev_inner(const HermiteCoeffs& f, const HermiteCoeffs& g, double p);

/// S_{-p} x S_p duality pairing: the plain coefficient dot product over
/// common indices. The Cauchy-Schwarz bound ||psi||_{-p} ||phi||_p applies.
double duality_pair(const HermiteCoeffs& psi, const HermiteCoeffs& phi);

/// Coefficient sequence of delta_x: c_k = h_k(x) for |k| <= N.
HermiteCoeffs dirac_coeffs(std::span<const double> x, const TruncationScheme& scheme);

/// Partial sums S_N = sum_{k<=N} (2k+1)^{-2q} h_k(0)^2 of ||delta_0||^2_{-q}
/// for d=1, up to n_max. The threshold behaviour around q = d/4 is read off
/// the growth of this sequence.
std::vector<double> dirac_norm_partial_sums(double q, int n_max);

struct GrowthClassification {
  double loglog_slope;   // fitted slope of log S_N vs log N on the upper half
  double last_increment; // S_N - S_{N-1} at the final N
  bool convergent;       // slope below the classification margin
};

GrowthClassification classify_dirac_norm_growth(double q, int n_max, double margin);

struct BoundednessProbe {
  double max_ratio;
  long argmax_degree;
};

/// Max over random truncated phi of ||d_i phi||_{p-1/2} / ||phi||_p.
/// Coefficients are i.i.d. standard normal under the given seed.
BoundednessProbe derivative_boundedness_probe(double p, int samples,
                                              const TruncationScheme& scheme, int axis,
                                              std::uint64_t seed);

/// Exact ratio on every basis vector (brute-force oracle for the probe).
BoundednessProbe derivative_boundedness_basis_max(double p, const TruncationScheme& scheme,
                                                  int axis);

}  // namespace distflow
