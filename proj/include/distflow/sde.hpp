#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "distflow/hermite.hpp"
#include "distflow/rng.hpp"

namespace distflow {

/// Sampled Brownian increments for one path. Values are a pure function of
/// (master seed, path id, refinement level, step), so any two materializations
/// are bit-identical.
struct BrownianPath {
  double horizon = 1.0;
  double dt = 1e-3;
  int dim = 1;
  std::uint64_t master_seed = 0;
  std::uint64_t path_id = 0;
  int level = 0;  // number of bridge halvings applied to the base grid
  std::vector<std::vector<double>> increments;  // [axis][step]

  std::size_t steps() const { return increments.empty() ? 0 : increments[0].size(); }
};

BrownianPath sample_brownian(int dim, double horizon, double dt, std::uint64_t master_seed,
                             std::uint64_t path_id);

/// Midpoint Brownian-bridge refinement. Summing refined increments over a
/// coarse interval reproduces the coarse increment bit-exactly.
BrownianPath refine_brownian(const BrownianPath& path, int levels);

/// d*d diffusion fields and d drift fields on R^d.
struct DriftDiffusion {
  int d = 1;
  std::vector<RealFunction> sigma;  // d*d, row-major; sigma[i*d+j]
  std::vector<RealFunction> b;      // d

  double sigma_at(int i, int j, std::span<const double> x) const {
    return sigma[static_cast<std::size_t>(i * d + j)](x);
  }
  double b_at(int i, std::span<const double> x) const {
    return b[static_cast<std::size_t>(i)](x);
  }
};

/// Discretized trajectory with explosion bookkeeping. States at and after the
/// eta estimate carry the cemetery marker (infinity) and alive = false.
struct PathResult {
  std::vector<double> times;
  std::vector<std::vector<double>> states;  // [time][axis]
  std::vector<char> alive;
  bool exploded = false;
  bool field_failure = false;  // non-finite field value forced the cemetery
  std::vector<double> thresholds;
  std::vector<double> hitting_times;  // eta^n per threshold; inf if not hit
  double eta_lower = 0.0;             // hit time of the largest threshold
  double eta_upper = 0.0;             // eta_lower + dt

  std::size_t step_count() const { return times.size(); }
};

/// Euler-Maruyama for dX = sigma(X) dB + b(X) dt with explosion thresholds.
PathResult simulate_path(const DriftDiffusion& fields, std::span<const double> x0,
                         const BrownianPath& brownian, std::span<const double> thresholds);

struct StrongErrorTable {
  std::vector<double> dts;
  std::vector<double> errors;  // mean over paths of sup_t |X^dt - X^finest|
  double fitted_order = 0.0;
};

/// Error-vs-dt table against the finest refinement of the same noise.
/// dts must be descending and each divisible by the next.
StrongErrorTable strong_error(const DriftDiffusion& fields, std::span<const double> x0,
                              int paths, double horizon, std::span<const double> dts,
                              std::uint64_t master_seed);

/// Least-squares slope of log y against log x.
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace distflow
