#include "distflow/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <thread>

#include "distflow/sobolev.hpp"

namespace distflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t grid_index(double t, double dt) {
  double raw = t / dt;
  auto idx = static_cast<std::size_t>(std::llround(raw));
  if (std::abs(static_cast<double>(idx) * dt - t) > 1e-9 * std::max(1.0, t)) {
    throw std::invalid_argument("grid time is not a multiple of dt");
  }
  return idx;
}

/// Wrap fields so the largest |value| seen is tracked against the bound.
DriftDiffusion monitored_fields(const DriftDiffusion& fields,
                                std::shared_ptr<double> max_seen) {
  DriftDiffusion out;
  out.d = fields.d;
  auto wrap = [&](const RealFunction& f) {
    return RealFunction([f, max_seen](std::span<const double> x) {
      double v = f(x);
      *max_seen = std::max(*max_seen, std::abs(v));
      return v;
    });
  };
  for (const auto& f : fields.sigma) out.sigma.push_back(wrap(f));
  for (const auto& f : fields.b) out.b.push_back(wrap(f));
  return out;
}

double std_error(double sum, double sumsq, int m) {
  if (m < 2) return 0.0;
  double mean = sum / m;
  double var = std::max(0.0, sumsq / m - mean * mean);
  return std::sqrt(var / m);
}

}  // namespace

double EmpiricalKernel::alive_fraction() const {
  if (alive.empty()) return 1.0;
  std::size_t n = 0;
  for (char a : alive) n += (a != 0);
  return static_cast<double>(n) / static_cast<double>(alive.size());
}

KernelEstimate estimate_kernel(std::span<const double> x0, const TemperedDistribution& y,
                               const CoefficientMatrix& coeffs, std::span<const double> t_grid,
                               int paths, std::uint64_t seed, const KernelConfig& config) {
  if (paths < 1) throw std::invalid_argument("estimate_kernel: paths < 1");
  if (t_grid.empty()) throw std::invalid_argument("estimate_kernel: empty grid");
  const int d = coeffs.d;
  const double horizon = *std::max_element(t_grid.begin(), t_grid.end());

  KernelEstimate est;
  est.kernels.resize(t_grid.size());
  for (std::size_t g = 0; g < t_grid.size(); ++g) {
    est.kernels[g].t = t_grid[g];
    est.kernels[g].d = d;
  }

  std::vector<std::size_t> grid_idx(t_grid.size());
  for (std::size_t g = 0; g < t_grid.size(); ++g) grid_idx[g] = grid_index(t_grid[g], config.dt);

  // Per-path slots filled by the workers, reduced afterwards in path order so
  // the result is identical for any worker count.
  struct Slot {
    std::vector<std::vector<double>> states;  // per grid time
    std::vector<char> alive;
    bool exploded = false;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(paths));

  const int workers = std::max(1, config.workers);
  std::vector<double> worker_max(static_cast<std::size_t>(workers), 0.0);
  std::vector<double> x0_copy(x0.begin(), x0.end());
  auto run_chunk = [&](int begin, int end, int w) {
    auto max_seen = std::make_shared<double>(0.0);
    DriftDiffusion fields = monitored_fields(convolved_fields(coeffs, y), max_seen);
    for (int m = begin; m < end; ++m) {
      BrownianPath bp = sample_brownian(d, std::max(horizon, config.dt), config.dt, seed,
                                        static_cast<std::uint64_t>(m));
      PathResult path = simulate_path(fields, x0_copy, bp, config.thresholds);
      Slot& slot = slots[static_cast<std::size_t>(m)];
      slot.exploded = path.exploded || path.field_failure;
      for (std::size_t g = 0; g < t_grid.size(); ++g) {
        std::size_t idx = std::min(grid_idx[g], path.times.size() - 1);
        bool alive = path.alive[idx] != 0;
        slot.alive.push_back(alive ? 1 : 0);
        slot.states.push_back(alive ? path.states[idx]
                                    : std::vector<double>(static_cast<std::size_t>(d), kInf));
      }
    }
    worker_max[static_cast<std::size_t>(w)] = *max_seen;
  };

  if (workers == 1) {
    run_chunk(0, paths, 0);
  } else {
    std::vector<std::thread> pool;
    int chunk = (paths + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      int begin = w * chunk;
      int end = std::min(paths, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run_chunk, begin, end, w);
    }
    for (auto& t : pool) t.join();
  }

  for (int m = 0; m < paths; ++m) {
    const Slot& slot = slots[static_cast<std::size_t>(m)];
    est.any_explosion = est.any_explosion || slot.exploded;
    for (std::size_t g = 0; g < t_grid.size(); ++g) {
      est.kernels[g].alive.push_back(slot.alive[g]);
      est.kernels[g].samples.push_back(slot.states[g]);
    }
  }
  for (double m : worker_max) est.max_field_seen = std::max(est.max_field_seen, m);
  est.bound_flagged = est.max_field_seen > config.field_bound;
  return est;
}

ConvolutionResult nonlinear_convolution(
    const std::function<HermiteCoeffs(std::span<const double>)>& h_of_x,
    const EmpiricalKernel& kernel, const TruncationScheme& scheme, double p, double norm_cap) {
  const int m_total = static_cast<int>(kernel.size());
  if (m_total == 0) throw std::invalid_argument("nonlinear_convolution: empty kernel");

  HermiteCoeffs sum(scheme);
  std::vector<double> sumsq(scheme.size(), 0.0);
  ConvolutionResult out{HermiteCoeffs(scheme), {}, 0.0, false};

  for (int m = 0; m < m_total; ++m) {
    if (!kernel.alive[static_cast<std::size_t>(m)]) continue;  // h(delta) = 0
    HermiteCoeffs h = resize_coeffs(h_of_x(kernel.samples[static_cast<std::size_t>(m)]), scheme);
    double n = sobolev_norm(h, p);
    if (!std::isfinite(n) || n > norm_cap) out.flagged = true;
    out.mean_norm += n / m_total;
    for (std::size_t i = 0; i < h.values.size(); ++i) {
      sum.values[i] += h.values[i];
      sumsq[i] += h.values[i] * h.values[i];
    }
  }
  out.mean = (1.0 / m_total) * sum;
  out.se.resize(scheme.size());
  for (std::size_t i = 0; i < scheme.size(); ++i) {
    out.se[i] = std_error(sum.values[i], sumsq[i], m_total);
  }
  return out;
}

EvolutionReport estimate_psi(const TemperedDistribution& y, const CoefficientMatrix& coeffs,
                             std::span<const double> t_grid, int paths, std::uint64_t seed,
                             const TruncationScheme& scheme, const KernelConfig& config) {
  std::vector<double> origin(static_cast<std::size_t>(coeffs.d), 0.0);
  KernelEstimate kernels = estimate_kernel(origin, y, coeffs, t_grid, paths, seed, config);
  if (kernels.any_explosion && !kernels.bound_flagged) {
    throw std::runtime_error(
        "estimate_psi: explosion under fields within the declared bound");
  }

  HermiteCoeffs base = truncate_distribution(y, scheme);
  TemperedDistribution base_dist{HermiteTruncation{base, 0.0}};
  auto h_of_x = [&](std::span<const double> x) -> HermiteCoeffs {
    return std::get<HermiteTruncation>(translate(base_dist, x).value.variant()).coeffs;
  };

  EvolutionReport report;
  report.max_field_seen = kernels.max_field_seen;
  report.bound_flagged = kernels.bound_flagged;
  for (std::size_t g = 0; g < t_grid.size(); ++g) {
    report.times.push_back(t_grid[g]);
    report.alive_fraction.push_back(kernels.kernels[g].alive_fraction());
    if (t_grid[g] == 0.0) {
      // psi(0, y) = y bit-exactly: every sample sits at the origin.
      report.psi.push_back(base);
      report.se.emplace_back(scheme.size(), 0.0);
      continue;
    }
    ConvolutionResult conv = nonlinear_convolution(h_of_x, kernels.kernels[g], scheme);
    report.psi.push_back(std::move(conv.mean));
    report.se.push_back(std::move(conv.se));
  }
  return report;
}

ResidualTable evolution_residual(const EvolutionReport& report,
                                 const std::vector<EmpiricalKernel>& kernels,
                                 const TemperedDistribution& y, const CoefficientMatrix& coeffs,
                                 double p) {
  const std::size_t n = report.times.size();
  if (n < 5) throw std::invalid_argument("evolution_residual: need >= 5 grid points");
  const double dt = report.times[1] - report.times[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(report.times[i] - report.times[i - 1] - dt) > 1e-9) {
      throw std::invalid_argument("evolution_residual: non-uniform grid");
    }
  }

  const TruncationScheme& scheme = report.psi.front().scheme;
  HermiteCoeffs base = truncate_distribution(y, scheme);
  TemperedDistribution base_dist{HermiteTruncation{base, 0.0}};
  auto l_at_translate = [&](std::span<const double> x) -> HermiteCoeffs {
    HermiteCoeffs shifted =
        std::get<HermiteTruncation>(translate(base_dist, x).value.variant()).coeffs;
    return resize_coeffs(apply_L(coeffs, shifted), scheme);
  };

  std::vector<ConvolutionResult> conv(n, ConvolutionResult{HermiteCoeffs(scheme), {}, 0.0, false});
  for (std::size_t i = 0; i < n; ++i) {
    conv[i] = nonlinear_convolution(l_at_translate, kernels[i], scheme);
  }

  ResidualTable table;
  // Left-Riemann integral of the convolution term, for the integrated form.
  std::vector<HermiteCoeffs> integral(n, HermiteCoeffs(scheme));
  for (std::size_t i = 1; i < n; ++i) {
    integral[i] = integral[i - 1] + dt * conv[i - 1].mean;
  }

  for (std::size_t i = 1; i + 1 < n; ++i) {
    HermiteCoeffs dpsi = (1.0 / (2.0 * dt)) * (report.psi[i + 1] - report.psi[i - 1]);
    HermiteCoeffs res = dpsi - conv[i].mean;
    table.times.push_back(report.times[i]);
    table.residual.push_back(sobolev_norm(res, p - 1.0));

    // Error budget: MC error of both sides plus the central-difference bias,
    // the latter from a third-difference curvature estimate where available.
    double mc2 = 0.0;
    const auto& idx = scheme.indices();
    for (std::size_t c = 0; c < scheme.size(); ++c) {
      double w = std::pow(2.0 * idx[c].total() + scheme.dimension(), 2.0 * (p - 1.0));
      double se_d = std::hypot(report.se[i + 1][c], report.se[i - 1][c]) / (2.0 * dt);
      double se_c = conv[i].se[c];
      mc2 += w * (se_d * se_d + se_c * se_c);
    }
    double fd = 0.0;
    if (i >= 2 && i + 2 < n) {
      HermiteCoeffs third = (1.0 / (2.0 * dt * dt * dt)) *
                            ((report.psi[i + 2] - report.psi[i - 2]) -
                             2.0 * (report.psi[i + 1] - report.psi[i - 1]));
      fd = dt * dt / 6.0 * sobolev_norm(third, p - 1.0);
    }
    table.error_bar.push_back(std::sqrt(mc2) + fd);

    HermiteCoeffs integrated = report.psi[i] - report.psi[0] - integral[i];
    table.integrated_residual.push_back(sobolev_norm(integrated, p - 1.0));
  }
  return table;
}

AdjointResult adjoint_apply(const DriftDiffusion& fields, const HermiteCoeffs& phi,
                            double tolerance) {
  const int d = phi.dim();
  if (fields.d != d) throw std::invalid_argument("adjoint_apply: dimension mismatch");
  TruncationScheme target(d, phi.degree() + 2);
  QuadratureRule quad = hermite_function_rule(phi.degree() + 8);

  AdjointResult out{HermiteCoeffs(target), 0.0, false};
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      // a_ij(x) phi(x), re-projected, then d2_ij.
      auto prod = hermite_transform(
          [&](std::span<const double> x) {
            double a = 0.0;
            for (int k = 0; k < d; ++k) a += fields.sigma_at(i, k, x) * fields.sigma_at(j, k, x);
            return a * reconstruct(phi, x);
          },
          phi.scheme, quad);
      out.reprojection_error = std::max(out.reprojection_error, prod.aliasing_error);
      out.value = out.value + 0.5 * derivative_coeffs(derivative_coeffs(prod.coeffs, i), j);
    }
    auto bprod = hermite_transform(
        [&](std::span<const double> x) { return fields.b_at(i, x) * reconstruct(phi, x); },
        phi.scheme, quad);
    out.reprojection_error = std::max(out.reprojection_error, bprod.aliasing_error);
    out.value = out.value + (-1.0) * resize_coeffs(derivative_coeffs(bprod.coeffs, i), target);
  }
  out.flagged = out.reprojection_error > tolerance;
  return out;
}

HermiteCoeffs adjoint_apply_constant(std::span<const double> sigma_bar,
                                     std::span<const double> b_bar, const HermiteCoeffs& phi) {
  const int d = phi.dim();
  TruncationScheme target(d, phi.degree() + 2);
  HermiteCoeffs out(target);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double a = 0.0;
      for (int k = 0; k < d; ++k) {
        a += sigma_bar[static_cast<std::size_t>(i * d + k)] *
             sigma_bar[static_cast<std::size_t>(j * d + k)];
      }
      if (a != 0.0) {
        out = out + (0.5 * a) * derivative_coeffs(derivative_coeffs(phi, i), j);
      }
    }
    double bi = b_bar[static_cast<std::size_t>(i)];
    if (bi != 0.0) out = out + (-bi) * resize_coeffs(derivative_coeffs(phi, i), target);
  }
  return out;
}

ForwardReport forward_residual(std::span<const double> x0, const TemperedDistribution& y,
                               const CoefficientMatrix& coeffs, std::span<const double> t_grid,
                               int paths, double q, std::uint64_t seed,
                               const TruncationScheme& scheme,
                               const std::vector<SmoothTest>& tests,
                               const KernelConfig& config) {
  const int d = coeffs.d;
  if (q <= static_cast<double>(d) / 4.0) {
    throw std::invalid_argument("forward_residual: q must exceed d/4");
  }
  const std::size_t n = t_grid.size();
  if (n < 3) throw std::invalid_argument("forward_residual: need >= 3 grid points");
  const double dt_grid = t_grid[1] - t_grid[0];

  KernelEstimate est = estimate_kernel(x0, y, coeffs, t_grid, paths, seed, config);
  DriftDiffusion fields = convolved_fields(coeffs, y);

  auto lbar = [&](const SmoothTest& f, std::span<const double> x) {
    double v = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        double a = 0.0;
        for (int k = 0; k < d; ++k) a += fields.sigma_at(i, k, x) * fields.sigma_at(j, k, x);
        if (a != 0.0) v += 0.5 * a * f.hess[static_cast<std::size_t>(i * d + j)](x);
      }
      v += fields.b_at(i, x) * f.grad[static_cast<std::size_t>(i)](x);
    }
    return v;
  };

  ForwardReport report;
  report.q = q;
  for (const auto& f : tests) report.test_names.push_back(f.name);

  // Empirical density coefficients per time.
  std::vector<HermiteCoeffs> p_hat;
  for (std::size_t g = 0; g < n; ++g) {
    HermiteCoeffs acc(scheme);
    for (std::size_t m = 0; m < est.kernels[g].size(); ++m) {
      if (!est.kernels[g].alive[m]) continue;
      acc = acc + dirac_coeffs(est.kernels[g].samples[m], scheme);
    }
    p_hat.push_back((1.0 / paths) * acc);
  }

  for (std::size_t i = 1; i + 1 < n; ++i) {
    report.times.push_back(t_grid[i]);

    std::vector<double> res_row, err_row;
    for (const auto& f : tests) {
      // Paired per-path estimator of d/dt <p, f> - <p, Lbar f>.
      double sum = 0.0, sumsq = 0.0;
      int m_used = 0;
      for (int m = 0; m < paths; ++m) {
        auto mu = static_cast<std::size_t>(m);
        if (!est.kernels[i - 1].alive[mu] || !est.kernels[i].alive[mu] ||
            !est.kernels[i + 1].alive[mu]) {
          continue;
        }
        double dfd = (f.f(est.kernels[i + 1].samples[mu]) - f.f(est.kernels[i - 1].samples[mu])) /
                     (2.0 * dt_grid);
        double r = dfd - lbar(f, est.kernels[i].samples[mu]);
        sum += r;
        sumsq += r * r;
        ++m_used;
      }
      double mean = m_used > 0 ? sum / m_used : 0.0;
      res_row.push_back(mean);
      err_row.push_back(std_error(sum, sumsq, m_used));
    }
    report.pair_residual.push_back(std::move(res_row));
    report.pair_error.push_back(std::move(err_row));

    HermiteCoeffs dp = (1.0 / (2.0 * dt_grid)) * (p_hat[i + 1] - p_hat[i - 1]);
    AdjointResult lstar = adjoint_apply(fields, p_hat[i]);
    report.norm_residual.push_back(
        sobolev_norm(dp - resize_coeffs(lstar.value, scheme), -q - 1.0));

    // First-moment identity on the first axis.
    double sum = 0.0, sumsq = 0.0, rhs_sum = 0.0;
    int m_used = 0;
    for (int m = 0; m < paths; ++m) {
      auto mu = static_cast<std::size_t>(m);
      if (!est.kernels[i - 1].alive[mu] || !est.kernels[i].alive[mu] ||
          !est.kernels[i + 1].alive[mu]) {
        continue;
      }
      double dx = (est.kernels[i + 1].samples[mu][0] - est.kernels[i - 1].samples[mu][0]) /
                  (2.0 * dt_grid);
      double b0 = fields.b_at(0, est.kernels[i].samples[mu]);
      rhs_sum += b0;
      double r = dx - b0;
      sum += r;
      sumsq += r * r;
      ++m_used;
    }
    report.first_moment_lhs.push_back(m_used > 0 ? (sum + rhs_sum) / m_used : 0.0);
    report.first_moment_rhs.push_back(m_used > 0 ? rhs_sum / m_used : 0.0);
    report.first_moment_se.push_back(std_error(sum, sumsq, m_used));
  }
  return report;
}

SemigroupReport semigroup_estimate(const Observable& f, const TemperedDistribution& y,
                                   const CoefficientMatrix& coeffs, double s, double t,
                                   int outer_paths, int inner_paths, std::uint64_t seed,
                                   const KernelConfig& config) {
  const int d = coeffs.d;
  CounterRng rng(seed);
  const std::uint64_t seed_single = rng.child_seed(1, 0);
  const std::uint64_t seed_outer = rng.child_seed(2, 0);

  DriftDiffusion fields = convolved_fields(coeffs, y);
  std::vector<double> origin(static_cast<std::size_t>(d), 0.0);

  SemigroupReport report;

  // Single stage: Y_{s+t}(y) directly.
  {
    double sum = 0.0, sumsq = 0.0;
    int alive_count = 0;
    std::size_t idx = grid_index(s + t, config.dt);
    for (int m = 0; m < outer_paths; ++m) {
      BrownianPath bp = sample_brownian(d, std::max(s + t, config.dt), config.dt, seed_single,
                                        static_cast<std::uint64_t>(m));
      PathResult path = simulate_path(fields, origin, bp, config.thresholds);
      std::size_t k = std::min(idx, path.times.size() - 1);
      double v = 0.0;  // f(delta) = 0
      if (path.alive[k]) {
        v = f(translate(y, path.states[k]).value);
        ++alive_count;
      }
      sum += v;
      sumsq += v * v;
    }
    report.single_stage = sum / outer_paths;
    report.single_se = std_error(sum, sumsq, outer_paths);
    report.alive_probability = static_cast<double>(alive_count) / outer_paths;
  }

  // Two stage: outer run to t, fresh-noise inner run of length s from each
  // outer endpoint. Lineages are disjoint by construction.
  {
    double sum = 0.0, sumsq = 0.0;
    std::size_t idx_t = grid_index(t, config.dt);
    std::size_t idx_s = grid_index(s, config.dt);
    for (int m = 0; m < outer_paths; ++m) {
      BrownianPath bp = sample_brownian(d, std::max(t, config.dt), config.dt, seed_outer,
                                        static_cast<std::uint64_t>(m));
      PathResult path = simulate_path(fields, origin, bp, config.thresholds);
      std::size_t k = std::min(idx_t, path.times.size() - 1);
      double g = 0.0;
      if (path.alive[k]) {
        TemperedDistribution y_mid = translate(y, path.states[k]).value;
        DriftDiffusion inner_fields = convolved_fields(coeffs, y_mid);
        std::uint64_t inner_seed = rng.child_seed(3, static_cast<std::uint64_t>(m));
        double inner_sum = 0.0;
        for (int mm = 0; mm < inner_paths; ++mm) {
          BrownianPath ibp = sample_brownian(d, std::max(s, config.dt), config.dt, inner_seed,
                                             static_cast<std::uint64_t>(mm));
          PathResult ipath = simulate_path(inner_fields, origin, ibp, config.thresholds);
          std::size_t kk = std::min(idx_s, ipath.times.size() - 1);
          if (ipath.alive[kk]) inner_sum += f(translate(y_mid, ipath.states[kk]).value);
        }
        g = inner_sum / inner_paths;
      }
      sum += g;
      sumsq += g * g;
    }
    report.two_stage = sum / outer_paths;
    report.two_se = std_error(sum, sumsq, outer_paths);
  }

  report.difference = report.single_stage - report.two_stage;
  report.combined_se = std::hypot(report.single_se, report.two_se);
  return report;
}

GeneratorEstimate generator_special_case(const TemperedDistribution& y,
                                         const CoefficientMatrix& coeffs,
                                         const HermiteCoeffs& phi,
                                         std::span<const double> t_small_grid, int paths,
                                         std::uint64_t seed, const KernelConfig& config) {
  const int d = coeffs.d;
  DriftDiffusion fields = convolved_fields(coeffs, y);
  std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
  const double base = pair_with_truncation(y, phi);

  GeneratorEstimate out;
  for (double t : t_small_grid) {
    std::size_t idx = grid_index(t, config.dt);
    double sum = 0.0, sumsq = 0.0;
    for (int m = 0; m < paths; ++m) {
      BrownianPath bp = sample_brownian(d, std::max(t, config.dt), config.dt, seed,
                                        static_cast<std::uint64_t>(m));
      PathResult path = simulate_path(fields, origin, bp, config.thresholds);
      std::size_t k = std::min(idx, path.times.size() - 1);
      double u = 0.0;
      if (path.alive[k]) {
        u = (pair_with_truncation(translate(y, path.states[k]).value, phi) - base) / t;
      }
      sum += u;
      sumsq += u * u;
    }
    out.t_grid.push_back(t);
    out.raw.push_back(sum / paths);
    out.se.push_back(std_error(sum, sumsq, paths));
  }

  // Richardson: the bias is O(t), so the least-squares intercept of raw vs t
  // is the limit estimate.
  {
    double n = static_cast<double>(out.t_grid.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < out.t_grid.size(); ++i) {
      sx += out.t_grid[i];
      sy += out.raw[i];
      sxx += out.t_grid[i] * out.t_grid[i];
      sxy += out.t_grid[i] * out.raw[i];
    }
    double denom = n * sxx - sx * sx;
    out.extrapolated = denom != 0.0 ? (sy * sxx - sx * sxy) / denom : sy / n;
  }

  TruncationScheme rich(phi.dim(), phi.degree() + 6);
  HermiteCoeffs y_trunc = truncate_distribution(y, rich);
  out.analytic = duality_pair(apply_L(coeffs, y_trunc), phi);
  return out;
}

}  // namespace distflow
