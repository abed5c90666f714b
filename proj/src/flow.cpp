#include "distflow/flow.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace distflow {

DriftDiffusion convolved_fields(const CoefficientMatrix& coeffs, const TemperedDistribution& y) {
  const int d = coeffs.d;
  auto shared_coeffs = std::make_shared<CoefficientMatrix>(coeffs);
  auto shared_y = std::make_shared<TemperedDistribution>(y);
  DriftDiffusion fields;
  fields.d = d;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      fields.sigma.push_back([shared_coeffs, shared_y, i, j](std::span<const double> x) {
        return coefficient_field(shared_coeffs->sigma_at(i, j), *shared_y, x);
      });
    }
    fields.b.push_back([shared_coeffs, shared_y, i](std::span<const double> x) {
      return coefficient_field(shared_coeffs->b[static_cast<std::size_t>(i)], *shared_y, x);
    });
  }
  return fields;
}

FlowState FlowPath::state_at(std::size_t i) const {
  if (!alive_at(i)) return FlowState{std::nullopt};
  return FlowState{translate(y0_, z_.states[i]).value};
}

double FlowPath::observe(const HermiteCoeffs& phi, std::size_t i) const {
  if (!alive_at(i)) return 0.0;  // f(delta) = 0
  return pair_with_truncation(translate(y0_, z_.states[i]).value, phi);
}

FlowPath evolve_flow(const TemperedDistribution& y, const CoefficientMatrix& coeffs,
                     const BrownianPath& brownian, const FlowConfig& config) {
  DriftDiffusion fields = convolved_fields(coeffs, y);
  std::vector<double> origin(static_cast<std::size_t>(coeffs.d), 0.0);
  PathResult z = simulate_path(fields, origin, brownian, config.thresholds);
  return FlowPath(y, std::move(z));
}

HermiteCoeffs truncate_distribution(const TemperedDistribution& y, const TruncationScheme& scheme) {
  return std::visit(
      [&](const auto& v) -> HermiteCoeffs {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, HermiteTruncation>) {
          return resize_coeffs(v.coeffs, scheme);
        } else if constexpr (std::is_same_v<T, DiracDelta>) {
          return dirac_coeffs(v.location, scheme);
        } else if constexpr (std::is_same_v<T, ConstantFunction>) {
          throw std::invalid_argument("truncate_distribution: constant is not truncatable");
        } else {
          QuadratureRule quad = hermite_function_rule(scheme.max_total_degree() + 8);
          TemperedDistribution copy(v);
          return hermite_transform(
                     [&](std::span<const double> r) { return distribution_value(copy, r); },
                     scheme, quad)
              .coeffs;
        }
      },
      y.variant());
}

ResidualStats strong_solution_residual(const FlowPath& flow, const CoefficientMatrix& coeffs,
                                       double p, const std::vector<HermiteCoeffs>& test_set,
                                       const BrownianPath& brownian) {
  (void)p;
  const PathResult& z = flow.driving_path();
  const int d = coeffs.d;
  if (test_set.empty()) throw std::invalid_argument("strong_solution_residual: empty test set");
  const TruncationScheme scheme = test_set.front().scheme;
  TruncationScheme rep_scheme(scheme.dimension(), scheme.max_total_degree() + 2);
  HermiteCoeffs y_coeffs = truncate_distribution(flow.initial(), rep_scheme);

  const double dt = brownian.dt;
  const std::size_t n_tests = test_set.size();
  ResidualStats stats;
  stats.max_abs_per_test.assign(n_tests, 0.0);

  std::vector<double> accum(n_tests, 0.0);  // running stochastic + drift integral
  std::vector<double> base(n_tests);
  for (std::size_t f = 0; f < n_tests; ++f) base[f] = duality_pair(y_coeffs, test_set[f]);

  for (std::size_t step = 0; step + 1 < z.times.size(); ++step) {
    if (!z.alive[step] || !z.alive[step + 1]) break;
    // Y_s as a truncation, via the exact overlap translation.
    TranslateResult shifted = translate(TemperedDistribution(HermiteTruncation{y_coeffs, 0.0}),
                                        z.states[step]);
    const HermiteCoeffs& c_s = std::get<HermiteTruncation>(shifted.value.variant()).coeffs;

    // Field values at z_s from the exact representation of Y_s.
    std::vector<double> sig(static_cast<std::size_t>(d * d));
    std::vector<double> bb(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        sig[static_cast<std::size_t>(i * d + j)] =
            coefficient_field(coeffs.sigma_at(i, j), flow.initial(), z.states[step]);
      }
      bb[static_cast<std::size_t>(i)] =
          coefficient_field(coeffs.b[static_cast<std::size_t>(i)], flow.initial(), z.states[step]);
    }

    std::vector<HermiteCoeffs> dc;
    dc.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) dc.push_back(derivative_coeffs(c_s, i));

    for (std::size_t f = 0; f < n_tests; ++f) {
      const HermiteCoeffs& phi = test_set[f];
      // sum_j <phi, A_j(Y_s)> dB_j
      for (int j = 0; j < d; ++j) {
        double a_pair = 0.0;
        for (int i = 0; i < d; ++i) {
          a_pair -= sig[static_cast<std::size_t>(i * d + j)] *
                    duality_pair(dc[static_cast<std::size_t>(i)], phi);
        }
        accum[f] += a_pair * brownian.increments[static_cast<std::size_t>(j)][step];
      }
      // <phi, L(Y_s)> dt
      double l_pair = 0.0;
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          double a = 0.0;
          for (int k = 0; k < d; ++k) {
            a += sig[static_cast<std::size_t>(i * d + k)] * sig[static_cast<std::size_t>(j * d + k)];
          }
          if (a != 0.0) {
            l_pair += 0.5 * a * duality_pair(derivative_coeffs(dc[static_cast<std::size_t>(i)], j), phi);
          }
        }
        l_pair -= bb[static_cast<std::size_t>(i)] * duality_pair(dc[static_cast<std::size_t>(i)], phi);
      }
      accum[f] += l_pair * dt;

      // R at t_{step+1}
      if (z.alive[step + 1]) {
        TranslateResult next = translate(TemperedDistribution(HermiteTruncation{y_coeffs, 0.0}),
                                         z.states[step + 1]);
        const HermiteCoeffs& c_next = std::get<HermiteTruncation>(next.value.variant()).coeffs;
        double lhs = duality_pair(c_next, phi) - base[f];
        double r = lhs - accum[f];
        stats.max_abs_per_test[f] = std::max(stats.max_abs_per_test[f], std::abs(r));
      }
    }
  }
  for (double m : stats.max_abs_per_test) stats.max_abs = std::max(stats.max_abs, m);
  return stats;
}

double translation_invariance_check(const TemperedDistribution& y, const CoefficientMatrix& coeffs,
                                    std::span<const double> x, const BrownianPath& brownian,
                                    const FlowConfig& config) {
  DriftDiffusion fields = convolved_fields(coeffs, y);
  PathResult direct = simulate_path(fields, x, brownian, config.thresholds);

  TemperedDistribution shifted_y = translate(y, x).value;
  FlowPath flow = evolve_flow(shifted_y, coeffs, brownian, config);
  const PathResult& z = flow.driving_path();

  double max_dev = 0.0;
  for (std::size_t t = 0; t < z.times.size() && t < direct.times.size(); ++t) {
    if (!z.alive[t] || !direct.alive[t]) break;
    for (std::size_t i = 0; i < x.size(); ++i) {
      max_dev = std::max(max_dev, std::abs(x[i] + z.states[t][i] - direct.states[t][i]));
    }
  }
  return max_dev;
}

double conservation_check(const FlowPath& flow, std::size_t sample_stride) {
  double mass0 = quadrature_mass(flow.initial());
  const PathResult& z = flow.driving_path();
  double max_err = 0.0;
  for (std::size_t t = 0; t < z.times.size(); t += std::max<std::size_t>(1, sample_stride)) {
    if (!z.alive[t]) continue;  // mass undefined at the cemetery
    double mass_t = quadrature_mass(translate(flow.initial(), z.states[t]).value);
    max_err = std::max(max_err, std::abs(mass_t - mass0));
  }
  return max_err;
}

std::vector<WeakLimitRow> weak_limit_check(const TemperedDistribution& y,
                                           const std::vector<std::vector<double>>& z_sequence,
                                           const std::vector<HermiteCoeffs>& test_set) {
  std::vector<WeakLimitRow> rows;
  rows.reserve(z_sequence.size());
  for (const auto& z : z_sequence) {
    WeakLimitRow row;
    row.z = z;
    TemperedDistribution shifted = translate(y, z).value;
    for (const auto& phi : test_set) {
      row.pairings.push_back(std::abs(pair_with_truncation(shifted, phi)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace distflow
