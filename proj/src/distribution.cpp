#include "distflow/distribution.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace distflow {

namespace {

double gaussian_value(const GaussianDensity& g, std::span<const double> r) {
  double v = g.mass;
  for (std::size_t i = 0; i < g.mean.size(); ++i) {
    double var = g.variance[i];
    double z = r[i] - g.mean[i];
    v *= std::exp(-z * z / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
  }
  return v;
}

/// Tensor iteration over a per-axis rule.
template <typename Fn>
void for_each_node(const QuadratureRule& rule, int d, Fn&& fn) {
  std::vector<std::size_t> node(static_cast<std::size_t>(d), 0);
  std::vector<double> x(static_cast<std::size_t>(d));
  const std::size_t q = rule.nodes.size();
  for (;;) {
    double raw = 1.0, abs = 1.0;
    for (int i = 0; i < d; ++i) {
      x[static_cast<std::size_t>(i)] = rule.nodes[node[static_cast<std::size_t>(i)]];
      raw *= rule.raw_weights[node[static_cast<std::size_t>(i)]];
      abs *= rule.weights[node[static_cast<std::size_t>(i)]];
    }
    fn(std::span<const double>(x), raw, abs);
    int axis = 0;
    while (axis < d) {
      if (++node[static_cast<std::size_t>(axis)] < q) break;
      node[static_cast<std::size_t>(axis)] = 0;
      ++axis;
    }
    if (axis == d) break;
  }
}

/// integral f(r) N(r; mean, var) dr by Gauss-Hermite against the Gaussian.
double gaussian_expectation(const RealFunction& f, std::span<const double> mean,
                            std::span<const double> variance, int q) {
  const int d = static_cast<int>(mean.size());
  QuadratureRule rule = hermite_function_rule(q);
  const double norm = std::pow(std::numbers::pi, -0.5 * d);
  double sum = 0.0;
  std::vector<double> r(static_cast<std::size_t>(d));
  for_each_node(rule, d, [&](std::span<const double> t, double raw, double) {
    for (int i = 0; i < d; ++i) {
      r[static_cast<std::size_t>(i)] =
          mean[static_cast<std::size_t>(i)] +
          std::sqrt(2.0 * variance[static_cast<std::size_t>(i)]) * t[static_cast<std::size_t>(i)];
    }
    sum += raw * f(r);
  });
  return norm * sum;
}

/// integral g(r) dr for g decaying like a Hermite function, via the absorbed
/// weights. Exact for P(r) e^{-r^2} integrands, an approximation otherwise.
double decay_integral(const RealFunction& g, int d, int q) {
  QuadratureRule rule = hermite_function_rule(q);
  double sum = 0.0;
  for_each_node(rule, d, [&](std::span<const double> x, double, double abs) {
    sum += abs * g(x);
  });
  return sum;
}

bool function_like(const TemperedDistribution& t) {
  return !t.is_dirac();
}

/// Pointwise value of a function-like variant.
double value_at(const TemperedDistribution& t, std::span<const double> r) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GaussianDensity>) {
          return gaussian_value(v, r);
        } else if constexpr (std::is_same_v<T, ConstantFunction>) {
          return v.value;
        } else if constexpr (std::is_same_v<T, SmoothFunction>) {
          return v.eval(r);
        } else if constexpr (std::is_same_v<T, HermiteTruncation>) {
          return reconstruct(v.coeffs, r);
        } else {
          throw std::invalid_argument("value_at: Dirac has no pointwise value");
        }
      },
      t.variant());
}

}  // namespace

double distribution_value(const TemperedDistribution& t, std::span<const double> r) {
  return value_at(t, r);
}

TemperedDistribution::TemperedDistribution(Variant v) : v_(std::move(v)) {
  if (auto* g = std::get_if<GaussianDensity>(&v_)) {
    if (g->mean.size() != g->variance.size() || g->mean.empty()) {
      throw std::invalid_argument("GaussianDensity: mean/variance size mismatch");
    }
    for (double var : g->variance) {
      if (!(var > 0.0)) throw std::invalid_argument("GaussianDensity: variance <= 0");
    }
  }
}

int TemperedDistribution::dim() const {
  return std::visit(
      [](const auto& v) -> int {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DiracDelta>) {
          return static_cast<int>(v.location.size());
        } else if constexpr (std::is_same_v<T, GaussianDensity>) {
          return static_cast<int>(v.mean.size());
        } else if constexpr (std::is_same_v<T, ConstantFunction>) {
          return v.dimension;
        } else if constexpr (std::is_same_v<T, SmoothFunction>) {
          return v.dimension;
        } else {
          return v.coeffs.dim();
        }
      },
      v_);
}

std::vector<std::vector<double>> translation_overlap_1d(int n, double s) {
  // T_ab(s) = e^{-s^2/4} integral P_a(t - s/2) P_b(t + s/2) e^{-t^2} dt,
  // exact by Gauss-Hermite with Q >= n+1.
  QuadratureRule rule = hermite_function_rule(n + 2);
  std::vector<std::vector<double>> t(static_cast<std::size_t>(n) + 1,
                                     std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
  const double damp = std::exp(-s * s / 4.0);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    double tq = rule.nodes[q];
    auto pa = hermite_poly_axis(n, tq - s / 2.0);
    auto pb = hermite_poly_axis(n, tq + s / 2.0);
    double w = rule.raw_weights[q] * damp;
    for (int a = 0; a <= n; ++a) {
      for (int b = 0; b <= n; ++b) {
        t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] +=
            w * pa[static_cast<std::size_t>(a)] * pb[static_cast<std::size_t>(b)];
      }
    }
  }
  return t;
}

namespace {

/// Project tau_x applied to a truncation back onto its scheme: a per-axis
/// contraction with the 1-d overlap matrices through a dense box buffer.
HermiteCoeffs translate_truncation(const HermiteCoeffs& c, std::span<const double> x) {
  const int d = c.dim();
  const int n = c.degree();
  const std::size_t width = static_cast<std::size_t>(n) + 1;
  std::size_t box_size = 1;
  for (int i = 0; i < d; ++i) box_size *= width;

  std::vector<double> box(box_size, 0.0), next(box_size);
  const auto& idx = c.scheme.indices();
  auto flat = [&](const MultiIndex& k) {
    std::size_t f = 0;
    for (int i = d - 1; i >= 0; --i) f = f * width + static_cast<std::size_t>(k[i]);
    return f;
  };
  for (std::size_t i = 0; i < idx.size(); ++i) box[flat(idx[i])] = c.values[i];

  std::size_t stride = 1;
  for (int axis = 0; axis < d; ++axis) {
    auto t = translation_overlap_1d(n, x[static_cast<std::size_t>(axis)]);
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t base = 0; base < box_size; ++base) {
      std::size_t a = (base / stride) % width;
      std::size_t rest = base - a * stride;
      // c'_a = <tau_s f, h_a> = sum_b c_b integral h_b(r - s) h_a(r) dr,
      // which is the transposed overlap matrix.
      double sum = 0.0;
      for (std::size_t b = 0; b < width; ++b) {
        sum += t[b][a] * box[rest + b * stride];
      }
      next[base] = sum;
    }
    box.swap(next);
    stride *= width;
  }

  HermiteCoeffs out(c.scheme);
  for (std::size_t i = 0; i < idx.size(); ++i) out.values[i] = box[flat(idx[i])];
  return out;
}

}  // namespace

TranslateResult translate(const TemperedDistribution& y, std::span<const double> x,
                          double tolerance) {
  if (static_cast<int>(x.size()) != y.dim()) {
    throw std::invalid_argument("translate: dimension mismatch");
  }
  return std::visit(
      [&](const auto& v) -> TranslateResult {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DiracDelta>) {
          DiracDelta out = v;
          for (std::size_t i = 0; i < out.location.size(); ++i) out.location[i] += x[i];
          return {TemperedDistribution(out), 0.0, false};
        } else if constexpr (std::is_same_v<T, GaussianDensity>) {
          GaussianDensity out = v;
          for (std::size_t i = 0; i < out.mean.size(); ++i) out.mean[i] += x[i];
          return {TemperedDistribution(out), 0.0, false};
        } else if constexpr (std::is_same_v<T, ConstantFunction>) {
          return {TemperedDistribution(v), 0.0, false};
        } else if constexpr (std::is_same_v<T, SmoothFunction>) {
          std::vector<double> shift(x.begin(), x.end());
          RealFunction base = v.eval;
          SmoothFunction out{
              [base, shift](std::span<const double> r) {
                std::vector<double> arg(r.size());
                for (std::size_t i = 0; i < r.size(); ++i) arg[i] = r[i] - shift[i];
                return base(arg);
              },
              v.dimension};
          return {TemperedDistribution(out), 0.0, false};
        } else {
          HermiteCoeffs shifted = translate_truncation(v.coeffs, x);
          // Translation preserves the L2 norm; the deficit is what fell
          // outside the truncated span.
          double before = sobolev_norm(v.coeffs, 0.0);
          double after = sobolev_norm(shifted, 0.0);
          double err = std::sqrt(std::max(0.0, before * before - after * after));
          return {TemperedDistribution(HermiteTruncation{std::move(shifted), v.p}), err,
                  err > tolerance};
        }
      },
      y.variant());
}

HermiteCoeffs translate_truncation_expm(const HermiteCoeffs& c, std::span<const double> x) {
  // tau_x = exp(-sum_i x_i d_i) truncated to the scheme; plain Taylor sum.
  HermiteCoeffs term = c;
  HermiteCoeffs sum = c;
  const int max_terms = 120;
  for (int k = 1; k <= max_terms; ++k) {
    HermiteCoeffs next(c.scheme);
    for (int i = 0; i < c.dim(); ++i) {
      if (x[static_cast<std::size_t>(i)] == 0.0) continue;
      HermiteCoeffs di = resize_coeffs(derivative_coeffs(term, i), c.scheme);
      next = next + (-x[static_cast<std::size_t>(i)] / k) * di;
    }
    term = next;
    sum = sum + term;
    if (sobolev_norm(term, 0.0) < 1e-16 * sobolev_norm(sum, 0.0)) break;
  }
  return sum;
}

TemperedDistribution reflect(const TemperedDistribution& y) {
  return std::visit(
      [&](const auto& v) -> TemperedDistribution {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DiracDelta>) {
          DiracDelta out = v;
          for (double& c : out.location) c = -c;
          return TemperedDistribution(out);
        } else if constexpr (std::is_same_v<T, GaussianDensity>) {
          GaussianDensity out = v;
          for (double& c : out.mean) c = -c;
          return TemperedDistribution(out);
        } else if constexpr (std::is_same_v<T, ConstantFunction>) {
          return TemperedDistribution(v);
        } else if constexpr (std::is_same_v<T, SmoothFunction>) {
          RealFunction base = v.eval;
          return TemperedDistribution(
              SmoothFunction{[base](std::span<const double> r) {
                               std::vector<double> arg(r.size());
                               for (std::size_t i = 0; i < r.size(); ++i) arg[i] = -r[i];
                               return base(arg);
                             },
                             v.dimension});
        } else {
          // Parity: c_k -> (-1)^{|k|} c_k, exact.
          HermiteTruncation out = v;
          const auto& idx = out.coeffs.scheme.indices();
          for (std::size_t i = 0; i < idx.size(); ++i) {
            if (idx[i].total() % 2 == 1) out.coeffs.values[i] = -out.coeffs.values[i];
          }
          return TemperedDistribution(out);
        }
      },
      y.variant());
}

double pair_with_truncation(const TemperedDistribution& psi, const HermiteCoeffs& phi) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DiracDelta>) {
          return reconstruct(phi, v.location);
        } else if constexpr (std::is_same_v<T, GaussianDensity>) {
          double val = gaussian_expectation(
              [&](std::span<const double> r) { return reconstruct(phi, r); }, v.mean,
              v.variance, phi.degree() + 8);
          return v.mass * val;
        } else if constexpr (std::is_same_v<T, ConstantFunction>) {
          return v.value * integral_of(phi);
        } else if constexpr (std::is_same_v<T, SmoothFunction>) {
          return decay_integral(
              [&](std::span<const double> r) { return v.eval(r) * reconstruct(phi, r); },
              v.dimension, phi.degree() + 24);
        } else {
          return duality_pair(v.coeffs, phi);
        }
      },
      psi.variant());
}

double quadrature_mass(const TemperedDistribution& y) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GaussianDensity>) {
          std::vector<double> mean = v.mean, var = v.variance;
          double val = gaussian_expectation([](std::span<const double>) { return 1.0; },
                                            mean, var, 24);
          return v.mass * val;
        } else if constexpr (std::is_same_v<T, SmoothFunction>) {
          return decay_integral(v.eval, v.dimension, 48);
        } else if constexpr (std::is_same_v<T, HermiteTruncation>) {
          return integral_of(v.coeffs);
        } else {
          throw std::invalid_argument("quadrature_mass: variant has no finite mass integral");
        }
      },
      y.variant());
}

double coefficient_field(const TemperedDistribution& sigma, const TemperedDistribution& y,
                         std::span<const double> x) {
  if (sigma.dim() != y.dim() || static_cast<int>(x.size()) != y.dim()) {
    throw std::invalid_argument("coefficient_field: dimension mismatch");
  }
  const int d = y.dim();

  if (sigma.is_dirac() && y.is_dirac()) {
    throw std::invalid_argument("coefficient_field: Dirac paired with Dirac is divergent");
  }
  if (sigma.is_constant() && y.is_constant()) {
    throw std::invalid_argument("coefficient_field: constant paired with constant is divergent");
  }

  // tau_x delta_a = delta_{a+x}: evaluate sigma there.
  if (const auto* yd = std::get_if<DiracDelta>(&y.variant())) {
    std::vector<double> r(yd->location);
    for (int i = 0; i < d; ++i) r[static_cast<std::size_t>(i)] += x[static_cast<std::size_t>(i)];
    return value_at(sigma, r);
  }
  // <delta_s, tau_x y> = (tau_x y)(s) = y(s - x).
  if (const auto* sd = std::get_if<DiracDelta>(&sigma.variant())) {
    std::vector<double> r(sd->location);
    for (int i = 0; i < d; ++i) r[static_cast<std::size_t>(i)] -= x[static_cast<std::size_t>(i)];
    return value_at(y, r);
  }
  // <c, tau_x y> = c * mass(y), independent of x.
  if (const auto* sc = std::get_if<ConstantFunction>(&sigma.variant())) {
    return sc->value * quadrature_mass(y);
  }
  // <sigma, tau_x c> = c * integral sigma.
  if (const auto* yc = std::get_if<ConstantFunction>(&y.variant())) {
    return yc->value * quadrature_mass(sigma);
  }

  const auto* sg = std::get_if<GaussianDensity>(&sigma.variant());
  const auto* yg = std::get_if<GaussianDensity>(&y.variant());
  if (sg && yg) {
    // Gaussian convolution closed form, axis by axis.
    double v = sg->mass * yg->mass;
    for (int i = 0; i < d; ++i) {
      double var = sg->variance[static_cast<std::size_t>(i)] + yg->variance[static_cast<std::size_t>(i)];
      double z = sg->mean[static_cast<std::size_t>(i)] - yg->mean[static_cast<std::size_t>(i)] -
                 x[static_cast<std::size_t>(i)];
      v *= std::exp(-z * z / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
    }
    return v;
  }

  const auto* st = std::get_if<HermiteTruncation>(&sigma.variant());
  const auto* yt = std::get_if<HermiteTruncation>(&y.variant());
  if (st && yt) {
    // sigma^T T(x) y through the exact overlap route.
    HermiteCoeffs shifted = translate_truncation(yt->coeffs, x);
    return duality_pair(st->coeffs, shifted);
  }

  // One Gaussian side: integrate the other side against it.
  if (yg) {
    std::vector<double> mean(yg->mean);
    for (int i = 0; i < d; ++i) mean[static_cast<std::size_t>(i)] += x[static_cast<std::size_t>(i)];
    double val = gaussian_expectation(
        [&](std::span<const double> r) { return value_at(sigma, r); }, mean, yg->variance, 40);
    return yg->mass * val;
  }
  if (sg) {
    std::vector<double> shift(x.begin(), x.end());
    double val = gaussian_expectation(
        [&](std::span<const double> r) {
          std::vector<double> arg(r.size());
          for (std::size_t i = 0; i < r.size(); ++i) arg[i] = r[i] - shift[i];
          return value_at(y, arg);
        },
        sg->mean, sg->variance, 40);
    return sg->mass * val;
  }

  // Smooth x truncation / smooth x smooth: quadrature centered on the
  // decaying factor.
  if (!function_like(sigma) || !function_like(y)) {
    throw std::invalid_argument("coefficient_field: unsupported variant pair");
  }
  std::vector<double> shift(x.begin(), x.end());
  int q = 64;
  if (yt) q = yt->coeffs.degree() + 32;
  return decay_integral(
      [&](std::span<const double> t) {
        std::vector<double> r(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) r[i] = t[i] + shift[i];
        std::vector<double> tt(t.begin(), t.end());
        return value_at(sigma, r) * value_at(y, tt);
      },
      d, q);
}

double lipschitz_probe(const RealFunction& field, std::span<const double> lo,
                       std::span<const double> hi, int grid) {
  const int d = static_cast<int>(lo.size());
  if (grid < 2) throw std::invalid_argument("lipschitz_probe: grid < 2");
  std::vector<double> step(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    step[static_cast<std::size_t>(i)] =
        (hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]) / (grid - 1);
  }
  std::vector<int> node(static_cast<std::size_t>(d), 0);
  std::vector<double> x(static_cast<std::size_t>(d)), xp(static_cast<std::size_t>(d));
  double max_slope = 0.0;
  for (;;) {
    for (int i = 0; i < d; ++i) {
      x[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)] +
                                       node[static_cast<std::size_t>(i)] * step[static_cast<std::size_t>(i)];
    }
    double f0 = field(x);
    for (int i = 0; i < d; ++i) {
      if (node[static_cast<std::size_t>(i)] + 1 >= grid) continue;
      xp = x;
      xp[static_cast<std::size_t>(i)] += step[static_cast<std::size_t>(i)];
      double slope = std::abs(field(xp) - f0) / step[static_cast<std::size_t>(i)];
      max_slope = std::max(max_slope, slope);
    }
    int axis = 0;
    while (axis < d) {
      if (++node[static_cast<std::size_t>(axis)] < grid) break;
      node[static_cast<std::size_t>(axis)] = 0;
      ++axis;
    }
    if (axis == d) break;
  }
  return max_slope;
}

HermiteCoeffs apply_A(const CoefficientMatrix& coeffs, const HermiteCoeffs& phi, int j) {
  const int d = coeffs.d;
  if (j < 0 || j >= d) throw std::invalid_argument("apply_A: bad axis");
  TruncationScheme target(phi.dim(), phi.degree() + 1);
  HermiteCoeffs out(target);
  for (int i = 0; i < d; ++i) {
    double pairing = pair_with_truncation(coeffs.sigma_at(i, j), phi);
    if (pairing == 0.0) continue;
    out = out + (-pairing) * derivative_coeffs(phi, i);
  }
  return out;
}

LDecomposition apply_L_split(const CoefficientMatrix& coeffs, const HermiteCoeffs& phi) {
  const int d = coeffs.d;
  std::vector<double> s(static_cast<std::size_t>(d * d));
  std::vector<double> bb(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      s[static_cast<std::size_t>(i * d + j)] = pair_with_truncation(coeffs.sigma_at(i, j), phi);
    }
    bb[static_cast<std::size_t>(i)] = pair_with_truncation(coeffs.b[static_cast<std::size_t>(i)], phi);
  }

  TruncationScheme target(phi.dim(), phi.degree() + 2);
  HermiteCoeffs diffusion(target);
  HermiteCoeffs drift(target);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double a = 0.0;  // (<s,phi><s,phi>^t)_{ij}
      for (int k = 0; k < d; ++k) {
        a += s[static_cast<std::size_t>(i * d + k)] * s[static_cast<std::size_t>(j * d + k)];
      }
      if (a == 0.0) continue;
      diffusion = diffusion + (0.5 * a) * derivative_coeffs(derivative_coeffs(phi, i), j);
    }
    if (bb[static_cast<std::size_t>(i)] != 0.0) {
      drift = drift + (-bb[static_cast<std::size_t>(i)]) *
                          resize_coeffs(derivative_coeffs(phi, i), target);
    }
  }
  return {std::move(diffusion), std::move(drift)};
}

HermiteCoeffs apply_L(const CoefficientMatrix& coeffs, const HermiteCoeffs& phi) {
  auto parts = apply_L_split(coeffs, phi);
  return parts.diffusion + parts.drift;
}

}  // namespace distflow
