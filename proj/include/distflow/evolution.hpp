#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "distflow/flow.hpp"

namespace distflow {

/// Equal-weight sample cloud for a transition kernel at a fixed time.
/// Weights are 1/M by construction, so they sum to 1 exactly; the cemetery
/// carries the mass of the non-alive samples.
struct EmpiricalKernel {
  double t = 0.0;
  int d = 1;
  std::vector<std::vector<double>> samples;  // [m][axis]; cemetery rows hold inf
  std::vector<char> alive;

  std::size_t size() const { return samples.size(); }
  double alive_fraction() const;
  double cemetery_mass() const { return 1.0 - alive_fraction(); }
};

struct KernelConfig {
  double dt = 1e-2;
  std::vector<double> thresholds{10.0, 100.0, 1000.0, 10000.0};
  /// Declared bound for the boundedness hypothesis; the max |field| seen
  /// along all paths is monitored against it rather than assumed.
  double field_bound = 1e6;
  /// Worker threads for the path loop. Results are independent of the count:
  /// draws are counter-based and the reduction runs in path order.
  int workers = 1;
};

struct KernelEstimate {
  std::vector<EmpiricalKernel> kernels;  // one per grid time
  double max_field_seen = 0.0;
  bool bound_flagged = false;  // some |field| exceeded the declared bound
  bool any_explosion = false;
};

/// M independent driving paths started at x0, sampled at the grid times.
KernelEstimate estimate_kernel(std::span<const double> x0, const TemperedDistribution& y,
                               const CoefficientMatrix& coeffs, std::span<const double> t_grid,
                               int paths, std::uint64_t seed, const KernelConfig& config = {});

struct ConvolutionResult {
  HermiteCoeffs mean;
  std::vector<double> se;  // per-coefficient Monte Carlo standard error
  double mean_norm = 0.0;  // (1/M) sum ||h(tau_x y)||_p, integrability surrogate
  bool flagged = false;    // non-finite or norm blow-up across samples
};

/// (1/M) sum_m h(x_m); cemetery samples contribute 0.
ConvolutionResult nonlinear_convolution(
    const std::function<HermiteCoeffs(std::span<const double>)>& h_of_x,
    const EmpiricalKernel& kernel, const TruncationScheme& scheme, double p = 0.0,
    double norm_cap = 1e12);

struct EvolutionReport {
  std::vector<double> times;
  std::vector<HermiteCoeffs> psi;       // per-time mean coefficients
  std::vector<std::vector<double>> se;  // per-time per-coefficient MC error
  std::vector<double> alive_fraction;
  double max_field_seen = 0.0;
  bool bound_flagged = false;
};

/// psi(t) = E tau_{z_t} y in coefficients. Throws if an explosion occurs while
/// the boundedness monitor is violated (the theorem's eta = infinity fails).
EvolutionReport estimate_psi(const TemperedDistribution& y, const CoefficientMatrix& coeffs,
                             std::span<const double> t_grid, int paths, std::uint64_t seed,
                             const TruncationScheme& scheme, const KernelConfig& config = {});

struct ResidualTable {
  std::vector<double> times;
  std::vector<double> residual;   // ||.||_{p-1} of the pointwise-in-t residual
  std::vector<double> error_bar;  // matched MC + finite-difference budget
  std::vector<double> integrated_residual;  // psi(t) - y - sum L(y) o mu_s ds
};

/// Central-difference d/dt psi minus the convolution of x -> L(tau_x y)
/// against the kernel at the same time, measured at index p-1.
ResidualTable evolution_residual(const EvolutionReport& report,
                                 const std::vector<EmpiricalKernel>& kernels,
                                 const TemperedDistribution& y, const CoefficientMatrix& coeffs,
                                 double p);

struct AdjointResult {
  HermiteCoeffs value;
  double reprojection_error = 0.0;
  bool flagged = false;
};

/// Adjoint action (1/2) sum d2_ij(a_ij phi) - sum d_i(bbar_i phi) on a density
/// given in coefficients, with the field products re-projected by quadrature.
AdjointResult adjoint_apply(const DriftDiffusion& fields, const HermiteCoeffs& phi,
                            double tolerance = 1e-6);

/// Constant-field specialization: products bypass re-projection, so the
/// result is exact coefficient arithmetic at degree N+2.
HermiteCoeffs adjoint_apply_constant(std::span<const double> sigma_bar,
                                     std::span<const double> b_bar, const HermiteCoeffs& phi);

/// Smooth test function with the derivatives needed for generator pairings.
struct SmoothTest {
  std::string name;
  RealFunction f;
  std::vector<RealFunction> grad;  // d entries
  std::vector<RealFunction> hess;  // d*d, row-major
};

struct ForwardReport {
  double q = 0.0;
  std::vector<double> times;
  std::vector<std::string> test_names;
  std::vector<std::vector<double>> pair_residual;  // [time][test]
  std::vector<std::vector<double>> pair_error;     // matched bars
  std::vector<double> norm_residual;  // ||d/dt p - Lbar* p||_{-q-1}
  std::vector<double> first_moment_lhs;  // d/dt E X_t (first axis)
  std::vector<double> first_moment_rhs;  // E bbar(X_t)
  std::vector<double> first_moment_se;
};

/// Residual of the forward equation for the driving kernel, via pairings
/// <p_t, f> against the test panel and in the dual norm. Rejects q <= d/4.
ForwardReport forward_residual(std::span<const double> x0, const TemperedDistribution& y,
                               const CoefficientMatrix& coeffs, std::span<const double> t_grid,
                               int paths, double q, std::uint64_t seed,
                               const TruncationScheme& scheme,
                               const std::vector<SmoothTest>& tests,
                               const KernelConfig& config = {});

using Observable = std::function<double(const TemperedDistribution&)>;

struct SemigroupReport {
  double single_stage = 0.0;
  double single_se = 0.0;
  double two_stage = 0.0;
  double two_se = 0.0;
  double difference = 0.0;
  double combined_se = 0.0;
  double alive_probability = 1.0;  // T_t 1 over the single-stage family
};

/// Markov consistency: E f(Y_{s+t}) vs the two-stage estimate with a
/// fresh-noise inner family. Inner and outer paths use disjoint seed
/// lineages, so the estimate is reproducible under any schedule.
SemigroupReport semigroup_estimate(const Observable& f, const TemperedDistribution& y,
                                   const CoefficientMatrix& coeffs, double s, double t,
                                   int outer_paths, int inner_paths, std::uint64_t seed,
                                   const KernelConfig& config = {});

struct GeneratorEstimate {
  std::vector<double> t_grid;
  std::vector<double> raw;       // (1/t)(E<phi, Y_t> - <phi, y>)
  std::vector<double> se;
  double extrapolated = 0.0;     // Richardson limit over the grid
  double analytic = 0.0;         // <phi, L(y)> by coefficient arithmetic
};

/// Small-time generator limit against the operator value.
GeneratorEstimate generator_special_case(const TemperedDistribution& y,
                                         const CoefficientMatrix& coeffs,
                                         const HermiteCoeffs& phi,
                                         std::span<const double> t_small_grid, int paths,
                                         std::uint64_t seed, const KernelConfig& config = {});

}  // namespace distflow
