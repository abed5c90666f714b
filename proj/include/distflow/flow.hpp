#pragma once

#include <optional>
#include <vector>

#include "distflow/distribution.hpp"
#include "distflow/sde.hpp"

namespace distflow {

/// Alive state (a translate of the initial condition) or the cemetery.
/// Observables vanish at the cemetery: f(delta) := 0.
struct FlowState {
  std::optional<TemperedDistribution> dist;  // nullopt = cemetery

  bool alive() const { return dist.has_value(); }
};

/// Convolved coefficient fields x -> <sigma_ij, tau_x y>, <b_i, tau_x y>.
DriftDiffusion convolved_fields(const CoefficientMatrix& coeffs, const TemperedDistribution& y);

/// Distribution-valued trajectory Y_t = tau_{z_t} y over the driving z-path.
class FlowPath {
 public:
  FlowPath(TemperedDistribution y0, PathResult z) : y0_(std::move(y0)), z_(std::move(z)) {}

  const TemperedDistribution& initial() const { return y0_; }
  const PathResult& driving_path() const { return z_; }

  bool alive_at(std::size_t i) const { return z_.alive[i] != 0; }
  FlowState state_at(std::size_t i) const;

  /// <phi, Y_t>; zero at the cemetery.
  double observe(const HermiteCoeffs& phi, std::size_t i) const;

 private:
  TemperedDistribution y0_;
  PathResult z_;
};

struct FlowConfig {
  std::vector<double> thresholds{10.0, 100.0, 1000.0, 10000.0};
};

FlowPath evolve_flow(const TemperedDistribution& y, const CoefficientMatrix& coeffs,
                     const BrownianPath& brownian, const FlowConfig& config = {});

/// Coefficient truncation of an initial condition, for residual evaluation.
HermiteCoeffs truncate_distribution(const TemperedDistribution& y, const TruncationScheme& scheme);

struct ResidualStats {
  std::vector<double> max_abs_per_test;
  double max_abs = 0.0;
};

/// Residual of the integrated strong-solution identity along the path:
/// R(t) = <phi, Y_t - y> - sum_j int <phi, A_j(Y_s)> dB_s - int <phi, L(Y_s)> ds
/// with left-point discretization on the simulation grid.
ResidualStats strong_solution_residual(const FlowPath& flow, const CoefficientMatrix& coeffs,
                                       double p, const std::vector<HermiteCoeffs>& test_set,
                                       const BrownianPath& brownian);

/// max_t | x + z_t(tau_x y) - X_t(x) | on identical noise.
double translation_invariance_check(const TemperedDistribution& y, const CoefficientMatrix& coeffs,
                                    std::span<const double> x, const BrownianPath& brownian,
                                    const FlowConfig& config = {});

/// max_t | integral Y_t - integral y | by quadrature over sampled alive times.
double conservation_check(const FlowPath& flow, std::size_t sample_stride = 16);

struct WeakLimitRow {
  std::vector<double> z;
  std::vector<double> pairings;  // |<phi_i, tau_z y>|
};

std::vector<WeakLimitRow> weak_limit_check(const TemperedDistribution& y,
                                           const std::vector<std::vector<double>>& z_sequence,
                                           const std::vector<HermiteCoeffs>& test_set);

}  // namespace distflow
