#include "distflow/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "distflow/rng.hpp"

namespace distflow {

double sobolev_norm(const HermiteCoeffs& c, double p) {
  const double d = static_cast<double>(c.dim());
  const auto& idx = c.scheme.indices();
  double sum = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    double w = std::pow(2.0 * static_cast<double>(idx[i].total()) + d, 2.0 * p);
    sum += w * c.values[i] * c.values[i];
  }
  return std::sqrt(sum);
}

double sobolev_inner(const HermiteCoeffs& f, const HermiteCoeffs& g, double p) {
  if (f.dim() != g.dim()) throw std::invalid_argument("sobolev_inner: dimension mismatch");
  const double d = static_cast<double>(f.dim());
  const HermiteCoeffs& small = (f.scheme.size() <= g.scheme.size()) ? f : g;
  const HermiteCoeffs& big = (f.scheme.size() <= g.scheme.size()) ? g : f;
  const auto& idx = small.scheme.indices();
  double sum = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (small.values[i] == 0.0) continue;
    auto pos = big.scheme.position(idx[i]);
    if (!pos) continue;
    double w = std::pow(2.0 * static_cast<double>(idx[i].total()) + d, 2.0 * p);
    sum += w * small.values[i] * big.values[*pos];
  }
  return sum;
}

double duality_pair(const HermiteCoeffs& psi, const HermiteCoeffs& phi) {
  return sobolev_inner(psi, phi, 0.0);
}

HermiteCoeffs dirac_coeffs(std::span<const double> x, const TruncationScheme& scheme) {
  const int d = scheme.dimension();
  if (static_cast<int>(x.size()) != d) {
    throw std::invalid_argument("dirac_coeffs: dimension mismatch");
  }
  const int n = scheme.max_total_degree();
  std::vector<std::vector<double>> table(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    table[static_cast<std::size_t>(i)] = hermite_eval_axis(n, x[static_cast<std::size_t>(i)]);
  }
  HermiteCoeffs c(scheme);
  const auto& idx = scheme.indices();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    double prod = 1.0;
    for (int a = 0; a < d; ++a) {
      prod *= table[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx[i][a])];
    }
    c.values[i] = prod;
  }
  return c;
}

std::vector<double> dirac_norm_partial_sums(double q, int n_max) {
  // h_k(0): zero for odd k; h_{2m}(0) follows from the recurrence at x=0,
  // h_{n+1}(0) = -sqrt(n/(n+1)) h_{n-1}(0). Stable for any n_max.
  std::vector<double> sums(static_cast<std::size_t>(n_max) + 1, 0.0);
  double h_even = 1.0 / std::pow(std::numbers::pi, 0.25);  // h_0(0)
  double running = h_even * h_even;
  sums[0] = running;
  for (int n = 1; n <= n_max; ++n) {
    double value = 0.0;
    if (n % 2 == 0) {
      h_even *= -std::sqrt((n - 1.0) / n);
      value = h_even;
    }
    running += std::pow(2.0 * n + 1.0, -2.0 * q) * value * value;
    sums[static_cast<std::size_t>(n)] = running;
  }
  return sums;
}

GrowthClassification classify_dirac_norm_growth(double q, int n_max, double margin) {
  auto sums = dirac_norm_partial_sums(q, n_max);
  // Fit log S_N against log N on the upper half of the range; a convergent
  // series flattens (slope -> 0), a divergent one keeps a positive slope.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int n = n_max / 2; n <= n_max; ++n) {
    double lx = std::log(static_cast<double>(n));
    double ly = std::log(sums[static_cast<std::size_t>(n)]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  GrowthClassification out;
  out.loglog_slope = slope;
  out.last_increment = sums[static_cast<std::size_t>(n_max)] - sums[static_cast<std::size_t>(n_max) - 1];
  out.convergent = slope < margin;
  return out;
}

BoundednessProbe derivative_boundedness_probe(double p, int samples,
                                              const TruncationScheme& scheme, int axis,
                                              std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("derivative_boundedness_probe: samples < 1");
  CounterRng rng(seed);
  BoundednessProbe best{0.0, 0};
  for (int s = 0; s < samples; ++s) {
    HermiteCoeffs phi(scheme);
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
      phi.values[i] = rng.normal(static_cast<std::uint64_t>(s), i);
    }
    double denom = sobolev_norm(phi, p);
    if (denom == 0.0) continue;
    double ratio = sobolev_norm(derivative_coeffs(phi, axis), p - 0.5) / denom;
    if (ratio > best.max_ratio) {
      best.max_ratio = ratio;
      // dominant degree of the sample, for diagnostics
      std::size_t arg = 0;
      for (std::size_t i = 1; i < phi.values.size(); ++i) {
        if (std::abs(phi.values[i]) > std::abs(phi.values[arg])) arg = i;
      }
      best.argmax_degree = scheme.indices()[arg].total();
    }
  }
  return best;
}

BoundednessProbe derivative_boundedness_basis_max(double p, const TruncationScheme& scheme,
                                                  int axis) {
  BoundednessProbe best{0.0, 0};
  const auto& idx = scheme.indices();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    HermiteCoeffs e = HermiteCoeffs::unit(scheme, idx[i]);
    double ratio = sobolev_norm(derivative_coeffs(e, axis), p - 0.5) / sobolev_norm(e, p);
    if (ratio > best.max_ratio) {
      best.max_ratio = ratio;
      best.argmax_degree = idx[i].total();
    }
  }
  return best;
}

}  // namespace distflow
