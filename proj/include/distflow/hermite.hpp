#pragma once

#include <functional>
#include <span>
#include <vector>

#include "distflow/multi_index.hpp"

namespace distflow {

/// Truncated coefficient vector c_k = <., h_k>_0 in graded-lex order.
struct HermiteCoeffs {
  TruncationScheme scheme;
  std::vector<double> values;

  explicit HermiteCoeffs(TruncationScheme s)
      : scheme(std::move(s)), values(scheme.size(), 0.0) {}
  HermiteCoeffs(TruncationScheme s, std::vector<double> v);

  int dim() const { return scheme.dimension(); }
  int degree() const { return scheme.max_total_degree(); }

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  /// Unit coordinate vector e_k.
  static HermiteCoeffs unit(const TruncationScheme& s, const MultiIndex& k);
};

HermiteCoeffs operator+(const HermiteCoeffs& a, const HermiteCoeffs& b);
HermiteCoeffs operator-(const HermiteCoeffs& a, const HermiteCoeffs& b);
HermiteCoeffs operator*(double s, const HermiteCoeffs& a);

/// Re-express c on another truncation; coefficients outside the target are
/// dropped, missing ones are zero.
HermiteCoeffs resize_coeffs(const HermiteCoeffs& c, const TruncationScheme& target);

/// Orthonormal 1-d Hermite functions h_0..h_nmax at x, by the stable
/// three-term recurrence h_{n+1} = x sqrt(2/(n+1)) h_n - sqrt(n/(n+1)) h_{n-1}
/// with h_0 = pi^{-1/4} exp(-x^2/2). Magnitudes are tracked through a running
/// rescale so large |x| underflows to 0 instead of producing garbage.
std::vector<double> hermite_eval_axis(int nmax, double x);

/// Polynomial part P_n(x) = h_n(x) e^{x^2/2}, for integrals where the
/// Gaussian factor is cancelled analytically before quadrature.
std::vector<double> hermite_poly_axis(int nmax, double x);

/// Tensor Hermite function h_k(x) = prod_i h_{k_i}(x_i).
double hermite_eval(const MultiIndex& k, std::span<const double> x);

/// Quadrature adapted to Hermite *functions*: nodes are Gauss-Hermite nodes,
/// weights carry the e^{x^2} factor so sums integrate P(x) e^{-x^2} exactly
/// for deg P <= 2Q-1. Products h_j h_k fall in this class for j+k <= 2Q-1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;      // absorbed weights, for Hermite functions
  std::vector<double> raw_weights;  // plain Gauss-Hermite weights for e^{-x^2}
};

QuadratureRule hermite_function_rule(int q);

struct TransformResult {
  HermiteCoeffs coeffs;
  /// l2 magnitude of the top-degree coefficient band, as an aliasing estimate.
  double aliasing_error;
};

using RealFunction = std::function<double(std::span<const double>)>;

/// c_k = quadrature of integral f h_k dx for all |k| <= N.
TransformResult hermite_transform(const RealFunction& f, const TruncationScheme& scheme,
                                  const QuadratureRule& quad);

/// Exact coefficient action of d/dx_i; output degree N+1.
HermiteCoeffs derivative_coeffs(const HermiteCoeffs& c, int axis);

/// Exact coefficient action of multiplication by x_i; output degree N+1.
HermiteCoeffs multiply_by_coordinate(const HermiteCoeffs& c, int axis);

/// Pointwise reconstruction sum_k c_k h_k(x).
double reconstruct(const HermiteCoeffs& c, std::span<const double> x);

/// integral of sum_k c_k h_k over R^d, via the exact substitution rule.
double integral_of(const HermiteCoeffs& c);

}  // namespace distflow
