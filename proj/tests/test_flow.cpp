#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "distflow/flow.hpp"

using namespace distflow;

namespace {

TemperedDistribution gaussian(double mean, double var, double mass = 1.0) {
  return TemperedDistribution(GaussianDensity{{mean}, {var}, mass});
}

CoefficientMatrix zero_coeffs() {
  return CoefficientMatrix{1,
                           {TemperedDistribution(ConstantFunction{0.0, 1})},
                           {TemperedDistribution(ConstantFunction{0.0, 1})}};
}

CoefficientMatrix smooth_coeffs() {
  return CoefficientMatrix{
      1,
      {TemperedDistribution(GaussianDensity{{0.0}, {1.0}, 0.4})},
      {TemperedDistribution(GaussianDensity{{0.3}, {0.8}, 0.2})}};
}

}  // namespace

TEST_CASE("zero coefficients freeze the flow") {
  auto y = gaussian(0.0, 1.0);
  auto bm = sample_brownian(1, 0.5, 1e-2, 11, 0);
  auto flow = evolve_flow(y, zero_coeffs(), bm);
  for (std::size_t i = 0; i < flow.driving_path().times.size(); ++i) {
    REQUIRE(flow.alive_at(i));
    const auto& g = std::get<GaussianDensity>(flow.state_at(i).dist->variant());
    CHECK(g.mean[0] == 0.0);
  }
}

TEST_CASE("dirac initial condition tracks the classical SDE") {
  auto coeffs = smooth_coeffs();
  auto y = TemperedDistribution(DiracDelta{{0.0}});

  // Direct finite-dimensional run on the same convolved fields and noise.
  auto fields = convolved_fields(coeffs, y);
  TruncationScheme s(1, 8);
  std::vector<HermiteCoeffs> tests;
  for (int n = 0; n < 5; ++n) tests.push_back(HermiteCoeffs::unit(s, MultiIndex{{n}}));

  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    auto bm = sample_brownian(1, 0.5, 1e-2, seed, 0);
    auto flow = evolve_flow(y, coeffs, bm);
    std::vector<double> x0{0.0};
    FlowConfig cfg;
    auto direct = simulate_path(fields, x0, bm, cfg.thresholds);
    for (std::size_t i = 0; i < direct.times.size(); i += 7) {
      if (!direct.alive[i]) continue;
      for (const auto& phi : tests) {
        double expected = reconstruct(phi, direct.states[i]);
        CHECK(flow.observe(phi, i) == doctest::Approx(expected).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("constant initial condition is a fixed point while z drifts") {
  auto y = TemperedDistribution(ConstantFunction{2.0, 1});
  CoefficientMatrix coeffs{
      1,
      {TemperedDistribution(GaussianDensity{{0.0}, {1.0}, 0.5})},
      {TemperedDistribution(GaussianDensity{{0.0}, {1.0}, 0.5})}};
  auto bm = sample_brownian(1, 0.5, 1e-2, 21, 0);
  auto flow = evolve_flow(y, coeffs, bm);
  const auto& z = flow.driving_path();
  double max_z = 0.0;
  for (std::size_t i = 0; i < z.times.size(); ++i) {
    REQUIRE(flow.alive_at(i));
    CHECK(std::get<ConstantFunction>(flow.state_at(i).dist->variant()).value == 2.0);
    max_z = std::max(max_z, std::abs(z.states[i][0]));
  }
  CHECK(max_z > 0.0);
}

TEST_CASE("observables vanish at the cemetery") {
  // Force a blow-up with a large constant drift against a tiny threshold.
  CoefficientMatrix coeffs{
      1,
      {TemperedDistribution(ConstantFunction{0.0, 1})},
      {TemperedDistribution(GaussianDensity{{0.0}, {1.0}, 50.0})}};
  auto y = gaussian(0.0, 1.0);
  auto bm = sample_brownian(1, 2.0, 1e-2, 5, 0);
  FlowConfig cfg;
  cfg.thresholds = {1.0, 1.2, 1.5, 2.0};
  auto flow = evolve_flow(y, coeffs, bm, cfg);
  const auto& z = flow.driving_path();
  REQUIRE(z.exploded);
  TruncationScheme s(1, 4);
  auto e0 = HermiteCoeffs::unit(s, MultiIndex{{0}});
  bool dead_seen = false;
  for (std::size_t i = 0; i < z.times.size(); ++i) {
    if (!flow.alive_at(i)) {
      dead_seen = true;
      CHECK(!flow.state_at(i).alive());
      CHECK(flow.observe(e0, i) == 0.0);
    }
  }
  CHECK(dead_seen);
}

TEST_CASE("strong-solution residual vanishes for the frozen flow") {
  auto y = gaussian(0.0, 1.0);
  auto bm = sample_brownian(1, 0.5, 1e-2, 31, 0);
  auto flow = evolve_flow(y, zero_coeffs(), bm);
  TruncationScheme s(1, 6);
  std::vector<HermiteCoeffs> tests{HermiteCoeffs::unit(s, MultiIndex{{0}}),
                                   HermiteCoeffs::unit(s, MultiIndex{{2}})};
  auto stats = strong_solution_residual(flow, zero_coeffs(), 0.0, tests, bm);
  CHECK(stats.max_abs <= 1e-15);
}

TEST_CASE("residual scales like sqrt(dt) for constant fields") {
  CoefficientMatrix coeffs{
      1,
      {TemperedDistribution(ConstantFunction{0.6, 1})},
      {TemperedDistribution(ConstantFunction{0.2, 1})}};
  auto y = gaussian(0.0, 1.0);
  TruncationScheme s(1, 8);
  std::vector<HermiteCoeffs> tests{HermiteCoeffs::unit(s, MultiIndex{{0}}),
                                   HermiteCoeffs::unit(s, MultiIndex{{1}}),
                                   HermiteCoeffs::unit(s, MultiIndex{{3}})};
  std::vector<double> dts{1e-2, 5e-3, 2.5e-3};
  std::vector<double> residuals;
  for (double dt : dts) {
    // Average the per-path maxima; a plain max over paths is too noisy for
    // a three-point slope fit.
    double mean = 0.0;
    int paths = 32;
    for (std::uint64_t pid = 0; pid < static_cast<std::uint64_t>(paths); ++pid) {
      auto bm = sample_brownian(1, 0.5, dt, 64, pid);
      auto flow = evolve_flow(y, coeffs, bm);
      auto stats = strong_solution_residual(flow, coeffs, 0.0, tests, bm);
      mean += stats.max_abs / paths;
    }
    residuals.push_back(mean);
  }
  CHECK(fit_loglog_slope(dts, residuals) >= 0.4);
}

TEST_CASE("residuals are per-test, with no cross-talk") {
  auto coeffs = smooth_coeffs();
  auto y = gaussian(0.0, 1.0);
  auto bm = sample_brownian(1, 0.25, 1e-2, 87, 0);
  auto flow = evolve_flow(y, coeffs, bm);
  TruncationScheme s(1, 6);
  std::vector<HermiteCoeffs> small{HermiteCoeffs::unit(s, MultiIndex{{0}}),
                                   HermiteCoeffs::unit(s, MultiIndex{{1}})};
  auto big = small;
  big.push_back(HermiteCoeffs::unit(s, MultiIndex{{2}}));
  big.push_back(HermiteCoeffs::unit(s, MultiIndex{{4}}));
  auto a = strong_solution_residual(flow, coeffs, 0.0, small, bm);
  auto b = strong_solution_residual(flow, coeffs, 0.0, big, bm);
  for (std::size_t i = 0; i < small.size(); ++i)
    CHECK(a.max_abs_per_test[i] == b.max_abs_per_test[i]);
}

TEST_CASE("translation invariance: zero shift and smooth fields") {
  auto coeffs = smooth_coeffs();
  auto y = gaussian(0.0, 1.0);
  auto bm = sample_brownian(1, 0.5, 1e-2, 12, 0);

  std::vector<double> zero{0.0};
  CHECK(translation_invariance_check(y, coeffs, zero, bm) == 0.0);

  std::vector<double> one{1.0};
  CHECK(translation_invariance_check(y, coeffs, one, bm) <= 1e-9);
}

TEST_CASE("translation invariance: constant fields have a closed form") {
  CoefficientMatrix coeffs{
      1,
      {TemperedDistribution(ConstantFunction{0.5, 1})},
      {TemperedDistribution(ConstantFunction{0.1, 1})}};
  // Constant sigma, b against a unit-mass Gaussian give constant fields.
  auto y = gaussian(0.0, 1.0);
  auto bm = sample_brownian(1, 0.5, 1e-2, 13, 0);
  std::vector<double> x{0.8};
  CHECK(translation_invariance_check(y, coeffs, x, bm) <= 1e-12);
}

TEST_CASE("mass is conserved along the flow") {
  auto coeffs = smooth_coeffs();
  auto bm = sample_brownian(1, 0.5, 1e-2, 14, 0);

  auto unit_flow = evolve_flow(gaussian(0.0, 1.0), coeffs, bm);
  CHECK(conservation_check(unit_flow) <= 1e-8);

  auto heavy_flow = evolve_flow(gaussian(0.2, 1.5, 2.5), coeffs, bm);
  CHECK(conservation_check(heavy_flow) <= 1e-8);
}

TEST_CASE("pairings decay along a diverging sequence for Gaussian y") {
  TruncationScheme s(1, 6);
  std::vector<HermiteCoeffs> tests{HermiteCoeffs::unit(s, MultiIndex{{0}})};
  std::vector<std::vector<double>> zs{{2.0}, {4.0}, {6.0}, {8.0}, {10.0}};
  auto rows = weak_limit_check(gaussian(0.0, 1.0), zs, tests);
  REQUIRE(rows.size() == zs.size());
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i].pairings[0] <= rows[i - 1].pairings[0]);
  CHECK(rows.back().pairings[0] < 1e-6);
}

TEST_CASE("constant y has no weak decay against integrating tests") {
  TruncationScheme s(1, 4);
  std::vector<HermiteCoeffs> tests{HermiteCoeffs::unit(s, MultiIndex{{0}})};
  std::vector<std::vector<double>> zs{{1.0}, {10.0}, {100.0}};
  auto rows = weak_limit_check(TemperedDistribution(ConstantFunction{3.0, 1}), zs, tests);
  double expected = 3.0 * integral_of(tests[0]);
  for (const auto& row : rows)
    CHECK(row.pairings[0] == doctest::Approx(std::abs(expected)).epsilon(1e-10));
}

TEST_CASE("zero test function pairs to zero everywhere") {
  TruncationScheme s(1, 4);
  std::vector<HermiteCoeffs> tests{HermiteCoeffs(s)};
  std::vector<std::vector<double>> zs{{0.0}, {5.0}};
  auto rows = weak_limit_check(gaussian(0.0, 1.0), zs, tests);
  for (const auto& row : rows) CHECK(row.pairings[0] == 0.0);
}

TEST_CASE("pairing transport across the translation") {
  // <f, tau_z y> = <tau_{-z} f, y> for truncated f.
  auto y = gaussian(0.1, 0.9);
  TruncationScheme s(1, 16);
  HermiteCoeffs f(s);
  f[0] = 1.0;
  f[2] = -0.3;
  std::vector<double> z{0.6}, mz{-0.6};
  auto moved_y = translate(y, z);
  double lhs = pair_with_truncation(moved_y.value, f);
  auto moved_f =
      translate(TemperedDistribution(HermiteTruncation{f, 0.0}), mz);
  double rhs =
      pair_with_truncation(y, std::get<HermiteTruncation>(moved_f.value.variant()).coeffs);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
}
