#pragma once

#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "distflow/hermite.hpp"
#include "distflow/sobolev.hpp"

namespace distflow {

/// delta_x.
struct DiracDelta {
  std::vector<double> location;
};

/// mass * prod_i N(x_i; mean_i, variance_i) density (axis-aligned covariance).
struct GaussianDensity {
  std::vector<double> mean;
  std::vector<double> variance;
  double mass = 1.0;
};

/// The constant function c, as a distribution. Not truncatable; it exists so
/// that the constant-initial-condition counterexample is representable.
struct ConstantFunction {
  double value = 0.0;
  int dimension = 1;
};

/// Evaluable function with rapid decay; quadrature-backed pairings.
struct SmoothFunction {
  RealFunction eval;
  int dimension = 1;
};

/// Truncated coefficient representation, tagged with its Sobolev index.
struct HermiteTruncation {
  HermiteCoeffs coeffs;
  double p = 0.0;
};

/// Tagged representation of y, sigma_ij, b_i.
class TemperedDistribution {
 public:
  using Variant = std::variant<DiracDelta, GaussianDensity, ConstantFunction,
                               SmoothFunction, HermiteTruncation>;

  TemperedDistribution(Variant v);  // NOLINT: implicit by design

  int dim() const;
  const Variant& variant() const { return v_; }

  bool is_dirac() const { return std::holds_alternative<DiracDelta>(v_); }
  bool is_constant() const { return std::holds_alternative<ConstantFunction>(v_); }
  bool is_truncation() const { return std::holds_alternative<HermiteTruncation>(v_); }

  /// Minimal admissible -q for Dirac variants is any q > d/4.
  double minimal_dirac_index() const { return static_cast<double>(dim()) / 4.0; }

 private:
  Variant v_;
};

struct TranslateResult {
  TemperedDistribution value;
  double reprojection_error = 0.0;  // nonzero only for truncations
  bool flagged = false;
};

/// tau_x y. Exact for Dirac / Gaussian / Constant / Smooth; truncations are
/// re-projected by quadrature and report the norm lost to the truncation.
TranslateResult translate(const TemperedDistribution& y, std::span<const double> x,
                          double tolerance = 1e-6);

/// Truncation translation through the matrix exponential of -x.D in
/// coefficient space. Spectrally unstable for large |x|; cross-check oracle
/// for |x| <= 1.
HermiteCoeffs translate_truncation_expm(const HermiteCoeffs& c, std::span<const double> x);

/// 1-d translation overlap matrix T_ab(s) = integral h_a(r-s) h_b(r) dr for
/// a,b <= n, computed exactly by shifted Gauss-Hermite quadrature.
std::vector<std::vector<double>> translation_overlap_1d(int n, double s);

/// y~ with <y~, f> = <y, f~>.
TemperedDistribution reflect(const TemperedDistribution& y);

/// <sigma, tau_x y>, the convolved coefficient field (sigma * y~)(x).
/// Exact where closed forms exist, quadrature otherwise. Unsupported pairs
/// (two Diracs, two constants, ...) throw.
double coefficient_field(const TemperedDistribution& sigma, const TemperedDistribution& y,
                         std::span<const double> x);

/// Duality pairing of a distribution against a truncated test element.
double pair_with_truncation(const TemperedDistribution& psi, const HermiteCoeffs& phi);

/// Pointwise value of a function-like variant; throws for Dirac.
double distribution_value(const TemperedDistribution& t, std::span<const double> r);

/// Total mass (integral) computed by quadrature, for integrable variants.
double quadrature_mass(const TemperedDistribution& y);

/// Max finite-difference slope of the field over a grid on [lo, hi]^d.
/// Advisory check of the locally-Lipschitz hypothesis, not a proof.
double lipschitz_probe(const RealFunction& field, std::span<const double> lo,
                       std::span<const double> hi, int grid);

/// sigma_ij and b_i as tempered distributions.
struct CoefficientMatrix {
  int d = 1;
  std::vector<TemperedDistribution> sigma;  // d*d, row-major
  std::vector<TemperedDistribution> b;      // d

  const TemperedDistribution& sigma_at(int i, int j) const {
    return sigma[static_cast<std::size_t>(i * d + j)];
  }
};

/// A_j phi = -sum_i <sigma_ij, phi> d_i phi; output degree N+1.
HermiteCoeffs apply_A(const CoefficientMatrix& coeffs, const HermiteCoeffs& phi, int j);

struct LDecomposition {
  HermiteCoeffs diffusion;  // (1/2) sum (<s,phi><s,phi>^t)_ij d2_ij phi
  HermiteCoeffs drift;      // -sum <b,phi>_i d_i phi
};

/// L phi split into its diffusion and drift parts; both at degree N+2.
LDecomposition apply_L_split(const CoefficientMatrix& coeffs, const HermiteCoeffs& phi);

/// L phi; output degree N+2.
HermiteCoeffs apply_L(const CoefficientMatrix& coeffs, const HermiteCoeffs& phi);

}  // namespace distflow
