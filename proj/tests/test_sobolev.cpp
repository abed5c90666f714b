#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "distflow/sobolev.hpp"

using namespace distflow;

TEST_CASE("norm of a basis vector is the bare weight") {
  // ||e_2||_{1/2} = (2*2+1)^{1/2} = sqrt(5) in d=1.
  TruncationScheme s(1, 4);
  auto e2 = HermiteCoeffs::unit(s, MultiIndex{{2}});
  CHECK(sobolev_norm(e2, 0.5) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
  CHECK(sobolev_norm(e2, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sobolev_norm(e2, -0.5) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-14));
}

TEST_CASE("p = 0 norm is plain l2 and scales are nested") {
  TruncationScheme s(1, 12);
  HermiteCoeffs c(s);
  double l2 = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    c[i] = std::sin(1.7 * static_cast<double>(i) + 0.3);
    l2 += c[i] * c[i];
  }
  CHECK(sobolev_norm(c, 0.0) == doctest::Approx(std::sqrt(l2)).epsilon(1e-13));
  // ||.||_q <= ||.||_p for 0 <= q <= p (weights >= 1 and increasing).
  CHECK(sobolev_norm(c, 0.25) <= sobolev_norm(c, 0.75));
  CHECK(sobolev_norm(c, 0.75) <= sobolev_norm(c, 1.5));
  // And the dual scales shrink.
  CHECK(sobolev_norm(c, -0.75) <= sobolev_norm(c, -0.25));
}

TEST_CASE("inner product polarizes the norm") {
  TruncationScheme s(1, 8);
  HermiteCoeffs f(s), g(s);
  for (std::size_t i = 0; i < s.size(); ++i) {
    f[i] = 0.2 * static_cast<double>(i) - 0.5;
    g[i] = std::cos(0.9 * static_cast<double>(i));
  }
  for (double p : {-1.0, 0.0, 0.5}) {
    double n2 = sobolev_norm(f, p);
    CHECK(sobolev_inner(f, f, p) == doctest::Approx(n2 * n2).epsilon(1e-12));
    double lhs = sobolev_inner(f + g, f + g, p);
    double rhs = sobolev_inner(f, f, p) + 2.0 * sobolev_inner(f, g, p) +
                 sobolev_inner(g, g, p);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("duality pairing is the coefficient dot product") {
  TruncationScheme s(1, 6);
  HermiteCoeffs psi(s), phi(s);
  double dot = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    psi[i] = 1.0 / (1.0 + static_cast<double>(i));
    phi[i] = static_cast<double>(i % 3) - 1.0;
    dot += psi[i] * phi[i];
  }
  CHECK(duality_pair(psi, phi) == doctest::Approx(dot).epsilon(1e-14));
  // Cauchy-Schwarz at the dual pair of scales.
  for (double p : {0.5, 1.0}) {
    CHECK(std::abs(duality_pair(psi, phi)) <=
          sobolev_norm(psi, -p) * sobolev_norm(phi, p) * (1.0 + 1e-12));
  }
}

TEST_CASE("L2 pairing of the ground-state Gaussian against itself") {
  // psi = phi = transform of e^{-x^2/2}; the pairing is integral e^{-x^2} = sqrt(pi).
  TruncationScheme s(1, 10);
  auto rule = hermite_function_rule(24);
  auto g = hermite_transform(
      [](std::span<const double> x) { return std::exp(-x[0] * x[0] / 2.0); }, s, rule);
  CHECK(duality_pair(g.coeffs, g.coeffs) ==
        doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("dirac coefficients evaluate test functions") {
  TruncationScheme s(1, 12);
  std::vector<double> loc{1.5};
  auto delta = dirac_coeffs(loc, s);
  auto e4 = HermiteCoeffs::unit(s, MultiIndex{{4}});
  double expected = hermite_eval(MultiIndex{{4}}, loc);
  CHECK(duality_pair(delta, e4) == doctest::Approx(expected).epsilon(1e-12));

  // A smooth truncated test function is reproduced up to truncation error.
  auto rule = hermite_function_rule(32);
  auto f = hermite_transform(
      [](std::span<const double> x) { return std::exp(-x[0] * x[0] / 2.0) * x[0]; }, s,
      rule);
  double at_loc = reconstruct(f.coeffs, loc);
  CHECK(duality_pair(delta, f.coeffs) == doctest::Approx(at_loc).epsilon(1e-8));
}

TEST_CASE("dirac partial sums: divergent below the threshold, flat above") {
  auto below = dirac_norm_partial_sums(0.2, 20000);
  auto above = dirac_norm_partial_sums(0.3, 20000);
  // The tails go like N^{1-4q} up to the classification point, so the
  // doubling ratio separates the two regimes even at finite N.
  double grow_below = below.back() / below[below.size() / 2];
  double grow_above = above.back() / above[above.size() / 2];
  CHECK(grow_below > grow_above * 1.02);
  CHECK(grow_above < 1.05);
  // Partial sums are nondecreasing by construction.
  for (std::size_t i = 1; i < above.size(); i += 997)
    CHECK(above[i] >= above[i - 1]);
}

TEST_CASE("growth classification brackets q = 1/4 in d = 1") {
  auto conv = classify_dirac_norm_growth(0.3, 100000, 0.05);
  CHECK(conv.convergent);
  CHECK(conv.last_increment < 1e-3);
  auto div = classify_dirac_norm_growth(0.2, 100000, 0.05);
  CHECK(!div.convergent);
  CHECK(div.loglog_slope > conv.loglog_slope);
}

TEST_CASE("derivative probe never beats the basis maximum") {
  TruncationScheme s(1, 40);
  auto basis = derivative_boundedness_basis_max(1.0, s, 0);
  auto probe = derivative_boundedness_probe(1.0, 200, s, 0, 777);
  CHECK(probe.max_ratio <= basis.max_ratio * 1.05);
  CHECK(basis.max_ratio > 0.0);
}

TEST_CASE("basis maximum at p = 0 matches a direct sweep") {
  TruncationScheme s(1, 40);
  double best = 0.0;
  long arg = 0;
  for (int n = 0; n <= 40; ++n) {
    auto en = HermiteCoeffs::unit(s, MultiIndex{{n}});
    double r = sobolev_norm(derivative_coeffs(en, 0), -0.5) / sobolev_norm(en, 0.0);
    if (r > best) {
      best = r;
      arg = n;
    }
  }
  auto got = derivative_boundedness_basis_max(0.0, s, 0);
  CHECK(got.max_ratio == doctest::Approx(best).epsilon(1e-12));
  CHECK(got.argmax_degree == arg);
}

TEST_CASE("probe is deterministic in the seed") {
  TruncationScheme s(1, 16);
  auto a = derivative_boundedness_probe(0.5, 64, s, 0, 42);
  auto b = derivative_boundedness_probe(0.5, 64, s, 0, 42);
  CHECK(a.max_ratio == b.max_ratio);
  CHECK(a.argmax_degree == b.argmax_degree);
}
