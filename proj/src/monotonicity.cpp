#include "distflow/monotonicity.hpp"

#include <cmath>
#include <stdexcept>

#include "distflow/rng.hpp"
#include "distflow/sobolev.hpp"

namespace distflow {

HermiteCoeffs apply_constant_A(const ConstantOperatorPair& ops, const HermiteCoeffs& phi, int j) {
  TruncationScheme target(phi.dim(), phi.degree() + 1);
  HermiteCoeffs out(target);
  for (int i = 0; i < ops.d; ++i) {
    double s = ops.sigma_at(i, j);
    if (s == 0.0) continue;
    out = out + (-s) * derivative_coeffs(phi, i);
  }
  return out;
}

HermiteCoeffs apply_constant_L(const ConstantOperatorPair& ops, const HermiteCoeffs& phi) {
  TruncationScheme target(phi.dim(), phi.degree() + 2);
  HermiteCoeffs out(target);
  for (int i = 0; i < ops.d; ++i) {
    for (int j = 0; j < ops.d; ++j) {
      double a = 0.0;
      for (int k = 0; k < ops.d; ++k) a += ops.sigma_at(i, k) * ops.sigma_at(j, k);
      if (a == 0.0) continue;
      out = out + (0.5 * a) * derivative_coeffs(derivative_coeffs(phi, i), j);
    }
    double bi = ops.b[static_cast<std::size_t>(i)];
    if (bi != 0.0) {
      out = out + (-bi) * resize_coeffs(derivative_coeffs(phi, i), target);
    }
  }
  return out;
}

double monotonicity_lhs(const ConstantOperatorPair& ops, const HermiteCoeffs& phi) {
  const double pm1 = ops.p - 1.0;
  HermiteCoeffs l_phi = apply_constant_L(ops, phi);
  double value = 2.0 * sobolev_inner(phi, l_phi, pm1);
  for (int j = 0; j < ops.d; ++j) {
    double n = sobolev_norm(apply_constant_A(ops, phi, j), pm1);
    value += n * n;
  }
  return value;
}

ConstantEstimate estimate_constant(double alpha, double p, int d, int samples,
                                   const TruncationScheme& scheme, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("estimate_constant: samples < 1");
  CounterRng rng(seed);
  ConstantEstimate out;

  auto ratio_for = [&](const ConstantOperatorPair& ops, const HermiteCoeffs& phi) {
    double denom = sobolev_norm(phi, p - 1.0);
    if (denom == 0.0) return 0.0;
    return monotonicity_lhs(ops, phi) / (denom * denom);
  };

  // Sign-extreme corners of the alpha-box, then uniform samples.
  std::vector<ConstantOperatorPair> operators;
  const int n_entries = d * d + d;
  for (long mask = 0; mask < (1L << n_entries); ++mask) {
    ConstantOperatorPair ops;
    ops.d = d;
    ops.p = p;
    ops.sigma.resize(static_cast<std::size_t>(d * d));
    ops.b.resize(static_cast<std::size_t>(d));
    for (int e = 0; e < n_entries; ++e) {
      double v = ((mask >> e) & 1) ? alpha : -alpha;
      if (e < d * d) {
        ops.sigma[static_cast<std::size_t>(e)] = v;
      } else {
        ops.b[static_cast<std::size_t>(e - d * d)] = v;
      }
    }
    operators.push_back(std::move(ops));
  }
  for (int s = 0; s < samples; ++s) {
    ConstantOperatorPair ops;
    ops.d = d;
    ops.p = p;
    ops.sigma.resize(static_cast<std::size_t>(d * d));
    ops.b.resize(static_cast<std::size_t>(d));
    for (int e = 0; e < d * d; ++e) {
      ops.sigma[static_cast<std::size_t>(e)] =
          alpha * (2.0 * rng.uniform(1, static_cast<std::uint64_t>(s) * 64 + static_cast<std::uint64_t>(e)) - 1.0);
    }
    for (int e = 0; e < d; ++e) {
      ops.b[static_cast<std::size_t>(e)] =
          alpha * (2.0 * rng.uniform(2, static_cast<std::uint64_t>(s) * 64 + static_cast<std::uint64_t>(e)) - 1.0);
    }
    operators.push_back(std::move(ops));
  }

  for (std::size_t o = 0; o < operators.size(); ++o) {
    // basis vectors plus a random phi per operator sample
    const auto& idx = scheme.indices();
    for (std::size_t i = 0; i < idx.size(); ++i) {
      HermiteCoeffs e = HermiteCoeffs::unit(scheme, idx[i]);
      double r = ratio_for(operators[o], e);
      if (r > out.c_hat) {
        out.c_hat = r;
        out.argmax_degree = idx[i].total();
      }
    }
    HermiteCoeffs phi(scheme);
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
      phi.values[i] = rng.normal(3, o * 4096 + i);
    }
    double r = ratio_for(operators[o], phi);
    if (r > out.c_hat) {
      out.c_hat = r;
      std::size_t arg = 0;
      for (std::size_t i = 1; i < phi.values.size(); ++i) {
        if (std::abs(phi.values[i]) > std::abs(phi.values[arg])) arg = i;
      }
      out.argmax_degree = idx[arg].total();
    }
  }

  // Saturation diagnostic: basis-vector maxima while doubling N.
  for (int n = std::max(2, scheme.max_total_degree() / 4); n <= scheme.max_total_degree(); n *= 2) {
    TruncationScheme sub(scheme.dimension(), n);
    double best = 0.0;
    for (const auto& k : sub.indices()) {
      HermiteCoeffs e = HermiteCoeffs::unit(sub, k);
      for (const auto& ops : operators) best = std::max(best, ratio_for(ops, e));
    }
    out.saturation_degrees.push_back(n);
    out.saturation_c_hat.push_back(best);
  }
  return out;
}

}  // namespace distflow
