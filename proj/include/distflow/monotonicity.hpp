#pragma once

#include <cstdint>
#include <vector>

#include "distflow/hermite.hpp"

namespace distflow {

/// Constant-coefficient operators A_{oj}, L_o with the declared size bound.
struct ConstantOperatorPair {
  int d = 1;
  std::vector<double> sigma;  // d*d, row-major
  std::vector<double> b;      // d
  double p = 1.0;

  double sigma_at(int i, int j) const { return sigma[static_cast<std::size_t>(i * d + j)]; }
};

/// A_{oj} phi = -sum_i sigma_ij d_i phi; exact coefficients at degree N+1.
HermiteCoeffs apply_constant_A(const ConstantOperatorPair& ops, const HermiteCoeffs& phi, int j);

/// L_o phi = (1/2) sum (sigma sigma^t)_ij d2_ij phi - sum b_i d_i phi, degree N+2.
HermiteCoeffs apply_constant_L(const ConstantOperatorPair& ops, const HermiteCoeffs& phi);

/// 2 <phi, L_o phi>_{p-1} + sum_i ||A_{oi} phi||^2_{p-1}, all inner products
/// by exact degree-extended coefficient arithmetic. The inequality bounds
/// this by C ||phi||^2_{p-1}.
double monotonicity_lhs(const ConstantOperatorPair& ops, const HermiteCoeffs& phi);

struct ConstantEstimate {
  double c_hat = 0.0;
  long argmax_degree = 0;
  std::vector<int> saturation_degrees;   // N values probed
  std::vector<double> saturation_c_hat;  // basis-vector max at each N
};

/// C-hat = max over sampled (sigma, b) in the alpha-box (plus sign-extreme
/// corners) and random truncated phi of LHS / ||phi||^2_{p-1}.
ConstantEstimate estimate_constant(double alpha, double p, int d, int samples,
                                   const TruncationScheme& scheme, std::uint64_t seed);

}  // namespace distflow
