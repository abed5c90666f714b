#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "distflow/monotonicity.hpp"
#include "distflow/sobolev.hpp"

using namespace distflow;

namespace {

HermiteCoeffs random_phi(const TruncationScheme& s, unsigned tag) {
  HermiteCoeffs c(s);
  for (std::size_t i = 0; i < s.size(); ++i)
    c[i] = std::sin(0.7 * static_cast<double>(i * (tag + 3)) + 0.2 * tag);
  return c;
}

}  // namespace

TEST_CASE("constant A is the scaled ladder derivative") {
  ConstantOperatorPair ops{1, {0.8}, {0.0}, 1.0};
  TruncationScheme s(1, 5);
  auto e0 = HermiteCoeffs::unit(s, MultiIndex{{0}});
  auto a = apply_constant_A(ops, e0, 0);
  // A e_0 = -0.8 h_0' = 0.8 sqrt(1/2) h_1.
  auto pos = a.scheme.position(MultiIndex{{1}});
  REQUIRE(pos.has_value());
  CHECK(a[*pos] == doctest::Approx(0.8 * std::sqrt(0.5)).epsilon(1e-14));
}

TEST_CASE("constant L on e_0 matches the hand expansion") {
  // L e_0 = (1/2) h_0'' with sigma = 1, b = 0.
  // h_0'' = (x^2 - 1) h_0 = (1/sqrt(2)) h_2 * sqrt(2)/... use the ladder:
  // x^2 h_0 = (1/2) h_0 + (1/sqrt(2)) h_2 + (1/2) h_0 ... easier to check
  // pointwise through reconstruction.
  ConstantOperatorPair ops{1, {1.0}, {0.0}, 0.0};
  TruncationScheme s(1, 4);
  auto e0 = HermiteCoeffs::unit(s, MultiIndex{{0}});
  auto l = apply_constant_L(ops, e0);
  double pi14 = std::pow(std::acos(-1.0), -0.25);
  for (double x : {-1.0, 0.0, 0.7, 1.9}) {
    std::vector<double> xv{x};
    double h0pp = pi14 * (x * x - 1.0) * std::exp(-x * x / 2.0);
    CHECK(reconstruct(l, xv) == doctest::Approx(0.5 * h0pp).epsilon(1e-12));
  }
}

TEST_CASE("lhs vanishes for the zero element") {
  ConstantOperatorPair ops{1, {0.4}, {-0.3}, 0.5};
  TruncationScheme s(1, 6);
  CHECK(monotonicity_lhs(ops, HermiteCoeffs(s)) == 0.0);
}

TEST_CASE("p = 1, d = 1 telescopes to zero") {
  // 2 <phi, (1/2) s^2 phi'' - b phi'>_0 + s^2 ||phi'||_0^2 = 0 by parts.
  TruncationScheme s(1, 12);
  for (unsigned tag = 0; tag < 4; ++tag) {
    auto phi = random_phi(s, tag);
    double n0 = sobolev_norm(phi, 0.0);
    ConstantOperatorPair ops{1, {0.9 - 0.2 * tag}, {0.5 * tag - 0.7}, 1.0};
    CHECK(std::abs(monotonicity_lhs(ops, phi)) <= 1e-10 * n0 * n0);
  }
}

TEST_CASE("p = 0 value on e_0 matches a brute-force weighted sum") {
  ConstantOperatorPair ops{1, {1.0}, {0.0}, 0.0};
  TruncationScheme s(1, 2);
  auto e0 = HermiteCoeffs::unit(s, MultiIndex{{0}});
  // phi' = -sqrt(1/2) h_1; phi'' = (1/sqrt(2)) h_2 * sqrt(2) - (1/2) h_0 ...
  // assemble both from the ladder coefficients and sum by hand at p-1 = -1.
  auto d1 = derivative_coeffs(e0, 0);
  auto d2 = derivative_coeffs(d1, 0);
  double inner = 0.0;  // 2 <e_0, (1/2) d2>_{-1}
  for (std::size_t i = 0; i < d2.scheme.size(); ++i) {
    auto pos = d2.scheme.index(i);
    if (pos.total() != 0) continue;
    double w = std::pow(2.0 * static_cast<double>(pos.total()) + 1.0, -2.0);
    inner += 2.0 * w * 1.0 * 0.5 * d2[i];
  }
  double grad = 0.0;  // ||d1||_{-1}^2
  for (std::size_t i = 0; i < d1.scheme.size(); ++i) {
    double w = std::pow(2.0 * static_cast<double>(d1.scheme.index(i).total()) + 1.0, -2.0);
    grad += w * d1[i] * d1[i];
  }
  CHECK(monotonicity_lhs(ops, e0) == doctest::Approx(inner + grad).epsilon(1e-13));
}

TEST_CASE("lhs is exactly quadratic in sigma with zero drift") {
  TruncationScheme s(1, 8);
  auto phi = random_phi(s, 5);
  ConstantOperatorPair one{1, {0.6}, {0.0}, 0.0};
  ConstantOperatorPair two{1, {1.2}, {0.0}, 0.0};
  ConstantOperatorPair neg{1, {-0.6}, {0.0}, 0.0};
  double l1 = monotonicity_lhs(one, phi);
  double l2 = monotonicity_lhs(two, phi);
  double ln = monotonicity_lhs(neg, phi);
  CHECK(l2 == doctest::Approx(4.0 * l1).epsilon(1e-12));
  CHECK(ln == doctest::Approx(l1).epsilon(1e-12));
}

TEST_CASE("alpha = 0 estimates a zero constant") {
  TruncationScheme s(1, 6);
  auto est = estimate_constant(0.0, 0.5, 1, 100, s, 1);
  CHECK(est.c_hat == 0.0);
}

TEST_CASE("p = 1, d = 1 estimate is numerically zero") {
  TruncationScheme s(1, 8);
  auto est = estimate_constant(1.0, 1.0, 1, 200, s, 7);
  CHECK(est.c_hat <= 1e-8);
}

TEST_CASE("p = 0, d = 1, alpha = 1 saturates in N") {
  TruncationScheme s(1, 16);
  auto est = estimate_constant(1.0, 0.0, 1, 300, s, 9);
  CHECK(est.c_hat > 0.0);
  REQUIRE(est.saturation_degrees.size() >= 2);
  // The basis-vector maximum stops growing once N passes the argmax band.
  double last = est.saturation_c_hat.back();
  double prev = est.saturation_c_hat[est.saturation_c_hat.size() - 2];
  CHECK(last <= prev * 1.01 + 1e-12);
  // Regression anchor recorded from the first run of this configuration.
  CHECK(est.c_hat == doctest::Approx(3.36).epsilon(1e-9));
  CHECK(est.argmax_degree == 1);
  // Basis vectors at the corner operator never beat the estimate, which
  // takes its max over exactly this family among others.
  ConstantOperatorPair ops{1, {1.0}, {1.0}, 0.0};
  for (int n = 0; n <= 16; ++n) {
    auto en = HermiteCoeffs::unit(s, MultiIndex{{n}});
    double norm = sobolev_norm(en, -1.0);
    CHECK(monotonicity_lhs(ops, en) <= (est.c_hat + 1e-9) * norm * norm);
  }
}

TEST_CASE("estimate is deterministic in the seed") {
  TruncationScheme s(1, 8);
  auto a = estimate_constant(0.7, 0.25, 1, 150, s, 33);
  auto b = estimate_constant(0.7, 0.25, 1, 150, s, 33);
  CHECK(a.c_hat == b.c_hat);
  CHECK(a.argmax_degree == b.argmax_degree);
}
