#include "distflow/hermite.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace distflow {

namespace {
constexpr double kPiQuarterInv = 0.75112554446494248;  // pi^{-1/4}
}

HermiteCoeffs::HermiteCoeffs(TruncationScheme s, std::vector<double> v)
    : scheme(std::move(s)), values(std::move(v)) {
  if (values.size() != scheme.size()) {
    throw std::invalid_argument("HermiteCoeffs: value count does not match scheme");
  }
}

HermiteCoeffs HermiteCoeffs::unit(const TruncationScheme& s, const MultiIndex& k) {
  HermiteCoeffs c(s);
  auto pos = s.position(k);
  if (!pos) throw std::invalid_argument("HermiteCoeffs::unit: index outside scheme");
  c.values[*pos] = 1.0;
  return c;
}

HermiteCoeffs operator+(const HermiteCoeffs& a, const HermiteCoeffs& b) {
  if (!(a.scheme == b.scheme)) throw std::invalid_argument("coeff schemes differ");
  HermiteCoeffs out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
  return out;
}

HermiteCoeffs operator-(const HermiteCoeffs& a, const HermiteCoeffs& b) {
  if (!(a.scheme == b.scheme)) throw std::invalid_argument("coeff schemes differ");
  HermiteCoeffs out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= b.values[i];
  return out;
}

HermiteCoeffs operator*(double s, const HermiteCoeffs& a) {
  HermiteCoeffs out = a;
  for (double& v : out.values) v *= s;
  return out;
}

HermiteCoeffs resize_coeffs(const HermiteCoeffs& c, const TruncationScheme& target) {
  if (target.dimension() != c.dim()) {
    throw std::invalid_argument("resize_coeffs: dimension mismatch");
  }
  HermiteCoeffs out(target);
  const auto& idx = c.scheme.indices();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (auto pos = target.position(idx[i])) out.values[*pos] = c.values[i];
  }
  return out;
}

std::vector<double> hermite_eval_axis(int nmax, double x) {
  std::vector<double> h(static_cast<std::size_t>(nmax) + 1, 0.0);
  if (!std::isfinite(x)) throw std::invalid_argument("hermite_eval_axis: x not finite");
  // Run the recurrence on u_n = h_n(x) * exp(shift) and rescale when the
  // magnitudes leave a safe window; exp(-x^2/2) alone underflows near |x|=38.
  double shift = x * x / 2.0;
  double u_prev = 0.0;
  double u = kPiQuarterInv;  // h_0 * e^{x^2/2}
  for (int n = 0; n <= nmax; ++n) {
    double unshifted = (shift < 700.0) ? u * std::exp(-shift) : 0.0;
    h[static_cast<std::size_t>(n)] = unshifted;
    if (n == nmax) break;
    double nn = static_cast<double>(n);
    double next = x * std::sqrt(2.0 / (nn + 1.0)) * u - std::sqrt(nn / (nn + 1.0)) * u_prev;
    u_prev = u;
    u = next;
    double mag = std::max(std::abs(u), std::abs(u_prev));
    if (mag > 1e150) {
      u /= 1e150;
      u_prev /= 1e150;
      shift -= std::log(1e150);
    }
  }
  return h;
}

double hermite_eval(const MultiIndex& k, std::span<const double> x) {
  if (k.dim() != static_cast<int>(x.size())) {
    throw std::invalid_argument("hermite_eval: dimension mismatch");
  }
  double prod = 1.0;
  for (int i = 0; i < k.dim(); ++i) {
    auto h = hermite_eval_axis(k[i], x[i]);
    prod *= h[static_cast<std::size_t>(k[i])];
  }
  return prod;
}

QuadratureRule hermite_function_rule(int q) {
  if (q < 1) throw std::invalid_argument("hermite_function_rule: q < 1");
  // Golub-Welsch on the Jacobi matrix of the physicists' Hermite weight.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(q, q);
  for (int i = 1; i < q; ++i) {
    double beta = std::sqrt(static_cast<double>(i) / 2.0);
    jacobi(i, i - 1) = beta;
    jacobi(i - 1, i) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(q));
  rule.weights.resize(static_cast<std::size_t>(q));
  rule.raw_weights.resize(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) {
    // The eigenvalue locates the node; Newton on the orthonormal polynomial
    // (P_q' = sqrt(2q) P_{q-1}) polishes it to full precision.
    double x = solver.eigenvalues()(i);
    for (int it = 0; it < 3; ++it) {
      auto p = hermite_poly_axis(q, x);
      double dp = std::sqrt(2.0 * q) * p[static_cast<std::size_t>(q) - 1];
      if (dp == 0.0) break;
      x -= p[static_cast<std::size_t>(q)] / dp;
    }
    // Christoffel weights: exact relative accuracy even where the raw weight
    // underflows toward e^{-x^2}. (The first-eigenvector-component formula
    // loses ~half the digits of the smallest weights, which the absorbed
    // e^{x^2} factor would amplify.)
    auto p = hermite_poly_axis(q - 1, x);
    auto h = hermite_eval_axis(q - 1, x);
    double sum_p = 0.0, sum_h = 0.0;
    for (int k = 0; k < q; ++k) {
      sum_p += p[static_cast<std::size_t>(k)] * p[static_cast<std::size_t>(k)];
      sum_h += h[static_cast<std::size_t>(k)] * h[static_cast<std::size_t>(k)];
    }
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.raw_weights[static_cast<std::size_t>(i)] = 1.0 / sum_p;
    rule.weights[static_cast<std::size_t>(i)] = 1.0 / sum_h;
  }
  return rule;
}

std::vector<double> hermite_poly_axis(int nmax, double x) {
  std::vector<double> p(static_cast<std::size_t>(nmax) + 1);
  p[0] = kPiQuarterInv;
  if (nmax >= 1) p[1] = x * std::sqrt(2.0) * p[0];
  for (int n = 1; n < nmax; ++n) {
    double nn = static_cast<double>(n);
    p[static_cast<std::size_t>(n) + 1] =
        x * std::sqrt(2.0 / (nn + 1.0)) * p[static_cast<std::size_t>(n)] -
        std::sqrt(nn / (nn + 1.0)) * p[static_cast<std::size_t>(n) - 1];
  }
  return p;
}

TransformResult hermite_transform(const RealFunction& f, const TruncationScheme& scheme,
                                  const QuadratureRule& quad) {
  const int d = scheme.dimension();
  const int n = scheme.max_total_degree();
  const std::size_t q = quad.nodes.size();
  if (static_cast<int>(q) < n + 1) {
    throw std::invalid_argument("hermite_transform: need Q >= N+1 per axis");
  }

  // Per-axis table H[a][node] shared by every coefficient.
  std::vector<std::vector<double>> table(q);
  for (std::size_t j = 0; j < q; ++j) table[j] = hermite_eval_axis(n, quad.nodes[j]);

  HermiteCoeffs coeffs(scheme);
  std::vector<std::size_t> node(static_cast<std::size_t>(d), 0);
  std::vector<double> x(static_cast<std::size_t>(d));
  // Evaluate f once per node tuple, accumulate every coefficient in a fixed
  // order so results do not depend on any parallel schedule upstream.
  std::vector<double> fw;
  std::vector<std::vector<std::size_t>> tuples;
  for (;;) {
    for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = quad.nodes[node[static_cast<std::size_t>(i)]];
    double w = 1.0;
    for (int i = 0; i < d; ++i) w *= quad.weights[node[static_cast<std::size_t>(i)]];
    fw.push_back(f(x) * w);
    tuples.push_back(node);
    int axis = 0;
    while (axis < d) {
      if (++node[static_cast<std::size_t>(axis)] < q) break;
      node[static_cast<std::size_t>(axis)] = 0;
      ++axis;
    }
    if (axis == d) break;
  }

  const auto& idx = scheme.indices();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    double sum = 0.0;
    for (std::size_t t = 0; t < tuples.size(); ++t) {
      double basis = 1.0;
      for (int a = 0; a < d; ++a) {
        basis *= table[tuples[t][static_cast<std::size_t>(a)]][static_cast<std::size_t>(idx[i][a])];
      }
      sum += fw[t] * basis;
    }
    coeffs.values[i] = sum;
  }

  double tail = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i].total() == n) tail += coeffs.values[i] * coeffs.values[i];
  }
  return TransformResult{std::move(coeffs), std::sqrt(tail)};
}

HermiteCoeffs derivative_coeffs(const HermiteCoeffs& c, int axis) {
  const int d = c.dim();
  if (axis < 0 || axis >= d) throw std::invalid_argument("derivative_coeffs: bad axis");
  TruncationScheme target(d, c.degree() + 1);
  HermiteCoeffs out(target);
  const auto& idx = c.scheme.indices();
  // d h_n = sqrt(n/2) h_{n-1} - sqrt((n+1)/2) h_{n+1} on the chosen axis.
  for (std::size_t i = 0; i < idx.size(); ++i) {
    double v = c.values[i];
    if (v == 0.0) continue;
    int ki = idx[i][axis];
    MultiIndex k = idx[i];
    if (ki > 0) {
      k.entries[static_cast<std::size_t>(axis)] = ki - 1;
      out.values[*target.position(k)] += v * std::sqrt(ki / 2.0);
    }
    k.entries[static_cast<std::size_t>(axis)] = ki + 1;
    out.values[*target.position(k)] -= v * std::sqrt((ki + 1) / 2.0);
  }
  return out;
}

HermiteCoeffs multiply_by_coordinate(const HermiteCoeffs& c, int axis) {
  const int d = c.dim();
  if (axis < 0 || axis >= d) throw std::invalid_argument("multiply_by_coordinate: bad axis");
  TruncationScheme target(d, c.degree() + 1);
  HermiteCoeffs out(target);
  const auto& idx = c.scheme.indices();
  // x h_n = sqrt(n/2) h_{n-1} + sqrt((n+1)/2) h_{n+1}.
  for (std::size_t i = 0; i < idx.size(); ++i) {
    double v = c.values[i];
    if (v == 0.0) continue;
    int ki = idx[i][axis];
    MultiIndex k = idx[i];
    if (ki > 0) {
      k.entries[static_cast<std::size_t>(axis)] = ki - 1;
      out.values[*target.position(k)] += v * std::sqrt(ki / 2.0);
    }
    k.entries[static_cast<std::size_t>(axis)] = ki + 1;
    out.values[*target.position(k)] += v * std::sqrt((ki + 1) / 2.0);
  }
  return out;
}

double reconstruct(const HermiteCoeffs& c, std::span<const double> x) {
  const int d = c.dim();
  if (static_cast<int>(x.size()) != d) {
    throw std::invalid_argument("reconstruct: dimension mismatch");
  }
  const int n = c.degree();
  std::vector<std::vector<double>> table(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) table[static_cast<std::size_t>(i)] = hermite_eval_axis(n, x[static_cast<std::size_t>(i)]);
  const auto& idx = c.scheme.indices();
  double sum = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (c.values[i] == 0.0) continue;
    double basis = 1.0;
    for (int a = 0; a < d; ++a) basis *= table[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx[i][a])];
    sum += c.values[i] * basis;
  }
  return sum;
}

double integral_of(const HermiteCoeffs& c) {
  const int n = c.degree();
  // integral h_n dx = sqrt(2) * integral P_n(sqrt(2) t) e^{-t^2} dt, exact by
  // Gauss-Hermite once Q exceeds the polynomial degree.
  QuadratureRule rule = hermite_function_rule(n + 2);
  std::vector<double> axis_integral(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    auto p = hermite_poly_axis(n, std::numbers::sqrt2 * rule.nodes[j]);
    for (int a = 0; a <= n; ++a) {
      axis_integral[static_cast<std::size_t>(a)] +=
          std::numbers::sqrt2 * rule.raw_weights[j] * p[static_cast<std::size_t>(a)];
    }
  }
  const auto& idx = c.scheme.indices();
  double sum = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (c.values[i] == 0.0) continue;
    double prod = 1.0;
    for (int a = 0; a < c.dim(); ++a) prod *= axis_integral[static_cast<std::size_t>(idx[i][a])];
    sum += c.values[i] * prod;
  }
  return sum;
}

}  // namespace distflow
