#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "distflow/hermite.hpp"

using namespace distflow;

namespace {

const double kPi = std::numbers::pi;

double h0_at(double x) { return std::pow(kPi, -0.25) * std::exp(-x * x / 2.0); }

}  // namespace

TEST_CASE("graded-lex enumeration is frozen") {
  TruncationScheme s(2, 2);
  // |k| = 0, then |k| = 1, then |k| = 2, lexicographic within each band.
  std::vector<std::vector<int>> expected = {
      {0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}};
  REQUIRE(s.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(s.index(i).entries == expected[i]);
    auto pos = s.position(MultiIndex{expected[i]});
    REQUIRE(pos.has_value());
    CHECK(*pos == i);
  }
  CHECK(!s.position(MultiIndex{{3, 0}}).has_value());
  CHECK(!s.position(MultiIndex{{0, 0, 0}}).has_value());
}

TEST_CASE("basis size is C(N+d, d)") {
  CHECK(TruncationScheme(1, 10).size() == 11);
  CHECK(TruncationScheme(2, 8).size() == 45);
  CHECK(TruncationScheme(3, 4).size() == 35);
}

TEST_CASE("h_0(0) = pi^{-1/4}") {
  auto vals = hermite_eval_axis(0, 0.0);
  CHECK(vals[0] == doctest::Approx(0.7511255444649425).epsilon(1e-12));
}

TEST_CASE("tensor value at the origin, d=2") {
  MultiIndex k{{0, 0}};
  std::vector<double> x{0.0, 0.0};
  CHECK(hermite_eval(k, x) == doctest::Approx(0.5641895835477563).epsilon(1e-12));
}

TEST_CASE("odd functions vanish at 0 and parity holds pointwise") {
  auto at = hermite_eval_axis(9, 0.0);
  for (int n = 1; n <= 9; n += 2) CHECK(at[static_cast<std::size_t>(n)] == 0.0);

  auto plus = hermite_eval_axis(9, 1.37);
  auto minus = hermite_eval_axis(9, -1.37);
  for (int n = 0; n <= 9; ++n) {
    double sign = (n % 2 == 0) ? 1.0 : -1.0;
    CHECK(plus[static_cast<std::size_t>(n)] ==
          doctest::Approx(sign * minus[static_cast<std::size_t>(n)]).epsilon(1e-13));
  }
}

TEST_CASE("large |x| underflows to zero, no NaNs") {
  auto vals = hermite_eval_axis(12, 40.0);
  for (double v : vals) {
    CHECK(std::isfinite(v));
    CHECK(std::abs(v) < 1e-200);
  }
}

TEST_CASE("quadrature integrates polynomial times Gaussian exactly") {
  // With Q nodes the rule is exact for x^m e^{-x^2}, m <= 2Q-1.
  auto rule = hermite_function_rule(8);
  // integral x^2 e^{-x^2} = sqrt(pi)/2, via the raw weights.
  double m2 = 0.0, m0 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    m0 += rule.raw_weights[i];
    m2 += rule.raw_weights[i] * rule.nodes[i] * rule.nodes[i];
  }
  CHECK(m0 == doctest::Approx(std::sqrt(kPi)).epsilon(1e-14));
  CHECK(m2 == doctest::Approx(std::sqrt(kPi) / 2.0).epsilon(1e-13));
}

TEST_CASE("absorbed weights give an orthonormal Gram matrix") {
  int q = 24;
  auto rule = hermite_function_rule(q);
  int nmax = 20;  // j + k <= 40 < 2q - 1
  std::vector<std::vector<double>> h(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    h[i] = hermite_eval_axis(nmax, rule.nodes[i]);
  for (int j = 0; j <= nmax; ++j) {
    for (int k = j; k <= nmax; ++k) {
      double g = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        g += rule.weights[i] * h[i][static_cast<std::size_t>(j)] *
             h[i][static_cast<std::size_t>(k)];
      if (j == k)
        CHECK(g == doctest::Approx(1.0).epsilon(1e-12));
      else
        CHECK(std::abs(g) < 1e-12);
    }
  }
}

TEST_CASE("transform of the ground-state Gaussian") {
  // f = e^{-x^2/2} = pi^{1/4} h_0, so c_0 = pi^{1/4} and everything else ~ 0.
  TruncationScheme s(1, 10);
  auto rule = hermite_function_rule(24);
  auto res = hermite_transform(
      [](std::span<const double> x) { return std::exp(-x[0] * x[0] / 2.0); }, s, rule);
  CHECK(res.coeffs[0] == doctest::Approx(1.3313353638003897).epsilon(1e-12));
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(std::abs(res.coeffs[i]) < 1e-12);
  CHECK(res.aliasing_error < 1e-12);
}

TEST_CASE("transform round-trips reconstruct") {
  TruncationScheme s(1, 12);
  HermiteCoeffs c(s);
  c[0] = 0.4;
  c[3] = -1.1;
  c[7] = 0.25;
  auto rule = hermite_function_rule(32);
  auto res = hermite_transform(
      [&](std::span<const double> x) { return reconstruct(c, x); }, s, rule);
  for (std::size_t i = 0; i < s.size(); ++i)
    CHECK(res.coeffs[i] == doctest::Approx(c[i]).epsilon(1e-9));
}

TEST_CASE("derivative acts by the ladder formula") {
  // d/dx h_0 = -sqrt(1/2) h_1.
  TruncationScheme s(1, 4);
  auto e0 = HermiteCoeffs::unit(s, MultiIndex{{0}});
  auto d = derivative_coeffs(e0, 0);
  auto pos1 = d.scheme.position(MultiIndex{{1}});
  REQUIRE(pos1.has_value());
  CHECK(d[*pos1] == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-14));
  for (std::size_t i = 0; i < d.scheme.size(); ++i)
    if (i != *pos1) CHECK(d[i] == 0.0);

  // x h_0 = sqrt(1/2) h_1.
  auto m = multiply_by_coordinate(e0, 0);
  auto mp = m.scheme.position(MultiIndex{{1}});
  REQUIRE(mp.has_value());
  CHECK(m[*mp] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
}

TEST_CASE("derivative matches a central difference pointwise") {
  TruncationScheme s(1, 8);
  HermiteCoeffs c(s);
  c[1] = 0.8;
  c[4] = -0.3;
  c[6] = 1.7;
  auto d = derivative_coeffs(c, 0);
  double eps = 1e-6;
  for (double x : {-2.0, -0.5, 0.0, 1.3, 2.7}) {
    std::vector<double> xp{x + eps}, xm{x - eps}, x0{x};
    double fd = (reconstruct(c, xp) - reconstruct(c, xm)) / (2.0 * eps);
    CHECK(reconstruct(d, x0) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("commutator [d/dx, x] = identity on untruncated indices") {
  TruncationScheme s(1, 6);
  HermiteCoeffs c(s);
  for (std::size_t i = 0; i < s.size(); ++i) c[i] = 0.3 * static_cast<double>(i) - 0.9;
  auto dx = derivative_coeffs(multiply_by_coordinate(c, 0), 0);
  auto xd = multiply_by_coordinate(derivative_coeffs(c, 0), 0);
  auto comm = dx - xd;
  // Both compositions live at degree N+2; the identity holds where the
  // intermediate degree-(N+1) band cannot leak back, i.e. |k| <= N - 1.
  for (std::size_t i = 0; i < comm.scheme.size(); ++i) {
    if (comm.scheme.index(i).total() > s.max_total_degree() - 1) continue;
    auto pos = s.position(comm.scheme.index(i));
    REQUIRE(pos.has_value());
    CHECK(comm[i] == doctest::Approx(c[*pos]).epsilon(1e-13));
  }
}

TEST_CASE("integral of h_0 is sqrt(2) pi^{1/4}") {
  TruncationScheme s(1, 6);
  auto e0 = HermiteCoeffs::unit(s, MultiIndex{{0}});
  CHECK(integral_of(e0) ==
        doctest::Approx(std::sqrt(2.0) * std::pow(kPi, 0.25)).epsilon(1e-12));
  // Odd basis functions integrate to zero.
  auto e1 = HermiteCoeffs::unit(s, MultiIndex{{1}});
  CHECK(std::abs(integral_of(e1)) < 1e-14);
}

TEST_CASE("integral agrees with quadrature for a generic truncation") {
  TruncationScheme s(1, 8);
  HermiteCoeffs c(s);
  c[0] = 1.0;
  c[2] = -0.6;
  c[5] = 0.2;
  // Substituting x = sqrt(2) u turns P(x) e^{-x^2/2} into a polynomial
  // against e^{-u^2}, which the rule integrates exactly.
  auto rule = hermite_function_rule(32);
  double by_quad = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    std::vector<double> x{std::sqrt(2.0) * rule.nodes[i]};
    by_quad += rule.weights[i] * reconstruct(c, x);
  }
  by_quad *= std::sqrt(2.0);
  CHECK(integral_of(c) == doctest::Approx(by_quad).epsilon(1e-10));
}

TEST_CASE("resize drops and zero-fills") {
  TruncationScheme big(1, 6), small(1, 3);
  HermiteCoeffs c(big);
  for (std::size_t i = 0; i < big.size(); ++i) c[i] = static_cast<double>(i + 1);
  auto down = resize_coeffs(c, small);
  for (std::size_t i = 0; i < small.size(); ++i) CHECK(down[i] == c[i]);
  auto up = resize_coeffs(down, big);
  for (std::size_t i = 0; i < big.size(); ++i)
    CHECK(up[i] == (i < small.size() ? c[i] : 0.0));
}

TEST_CASE("recurrence matches the explicit h_2") {
  // h_2(x) = pi^{-1/4} (2x^2 - 1) / sqrt(2) e^{-x^2/2}.
  for (double x : {-1.5, 0.0, 0.4, 2.2}) {
    auto vals = hermite_eval_axis(2, x);
    double expected = h0_at(x) * (2.0 * x * x - 1.0) / std::sqrt(2.0);
    CHECK(vals[2] == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("polynomial part carries the Gaussian factor") {
  for (double x : {-2.0, 0.3, 1.1}) {
    auto h = hermite_eval_axis(6, x);
    auto p = hermite_poly_axis(6, x);
    for (int n = 0; n <= 6; ++n)
      CHECK(p[static_cast<std::size_t>(n)] * std::exp(-x * x / 2.0) ==
            doctest::Approx(h[static_cast<std::size_t>(n)]).epsilon(1e-12));
  }
}
