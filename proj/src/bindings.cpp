// Python bindings for the distflow core. The classes mirror the C++ API;
// span parameters are taken as std::vector so pybind11 can convert lists
// and numpy arrays directly.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <vector>

#include "distflow/acceptance.hpp"
#include "distflow/distribution.hpp"
#include "distflow/evolution.hpp"
#include "distflow/flow.hpp"
#include "distflow/hermite.hpp"
#include "distflow/monotonicity.hpp"
#include "distflow/sde.hpp"
#include "distflow/sobolev.hpp"

namespace py = pybind11;
using namespace distflow;

namespace {

// Python callables receive the state as a list of floats. The wrapped
// functions are only invoked from single-threaded entry points here, so the
// GIL is always held when they run.
RealFunction wrap_real(py::function f) {
  return [f](std::span<const double> x) {
    return py::cast<double>(f(std::vector<double>(x.begin(), x.end())));
  };
}

DriftDiffusion make_fields(int d, const std::vector<py::function>& sigma,
                           const std::vector<py::function>& b) {
  if (static_cast<int>(sigma.size()) != d * d || static_cast<int>(b.size()) != d) {
    throw std::invalid_argument("DriftDiffusion: need d*d sigma and d b entries");
  }
  DriftDiffusion out;
  out.d = d;
  for (const auto& f : sigma) out.sigma.push_back(wrap_real(f));
  for (const auto& f : b) out.b.push_back(wrap_real(f));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hermite-truncated tempered distributions and translation flows";

  // --- basis -------------------------------------------------------------
  py::class_<MultiIndex>(m, "MultiIndex")
      .def(py::init([](std::vector<int> entries) { return MultiIndex{std::move(entries)}; }))
      .def_readonly("entries", &MultiIndex::entries)
      .def_property_readonly("dim", &MultiIndex::dim)
      .def("total", &MultiIndex::total)
      .def("__eq__", [](const MultiIndex& a, const MultiIndex& b) { return a == b; })
      .def("__repr__", [](const MultiIndex& k) {
        std::string s = "MultiIndex([";
        for (std::size_t i = 0; i < k.entries.size(); ++i)
          s += (i ? ", " : "") + std::to_string(k.entries[i]);
        return s + "])";
      });

  py::class_<TruncationScheme>(m, "TruncationScheme")
      .def(py::init<int, int>(), py::arg("dimension"), py::arg("max_total_degree"))
      .def_property_readonly("dimension", &TruncationScheme::dimension)
      .def_property_readonly("max_total_degree", &TruncationScheme::max_total_degree)
      .def("__len__", &TruncationScheme::size)
      .def("indices", &TruncationScheme::indices)
      .def("index", &TruncationScheme::index, py::arg("i"))
      .def("position", &TruncationScheme::position, py::arg("k"))
      .def("__eq__",
           [](const TruncationScheme& a, const TruncationScheme& b) { return a == b; });

  py::class_<HermiteCoeffs>(m, "HermiteCoeffs")
      .def(py::init<TruncationScheme>(), py::arg("scheme"))
      .def(py::init<TruncationScheme, std::vector<double>>(), py::arg("scheme"),
           py::arg("values"))
      .def_readonly("scheme", &HermiteCoeffs::scheme)
      .def_property(
          "values", [](const HermiteCoeffs& c) { return c.values; },
          [](HermiteCoeffs& c, std::vector<double> v) {
            if (v.size() != c.scheme.size())
              throw std::invalid_argument("values: size mismatch with scheme");
            c.values = std::move(v);
          })
      .def("__len__", [](const HermiteCoeffs& c) { return c.values.size(); })
      .def("__getitem__",
           [](const HermiteCoeffs& c, std::size_t i) { return c.values.at(i); })
      .def("__setitem__",
           [](HermiteCoeffs& c, std::size_t i, double v) { c.values.at(i) = v; })
      .def("__add__", [](const HermiteCoeffs& a, const HermiteCoeffs& b) { return a + b; })
      .def("__sub__", [](const HermiteCoeffs& a, const HermiteCoeffs& b) { return a - b; })
      .def("__rmul__", [](const HermiteCoeffs& a, double s) { return s * a; })
      .def_static("unit", &HermiteCoeffs::unit, py::arg("scheme"), py::arg("k"));

  m.def("resize_coeffs", &resize_coeffs, py::arg("c"), py::arg("target"));
  m.def("hermite_eval_axis", &hermite_eval_axis, py::arg("nmax"), py::arg("x"));
  m.def("hermite_poly_axis", &hermite_poly_axis, py::arg("nmax"), py::arg("x"));
  m.def(
      "hermite_eval",
      [](const MultiIndex& k, std::vector<double> x) { return hermite_eval(k, x); },
      py::arg("k"), py::arg("x"));

  py::class_<QuadratureRule>(m, "QuadratureRule")
      .def_readonly("nodes", &QuadratureRule::nodes)
      .def_readonly("weights", &QuadratureRule::weights)
      .def_readonly("raw_weights", &QuadratureRule::raw_weights);
  m.def("hermite_function_rule", &hermite_function_rule, py::arg("q"));

  py::class_<TransformResult>(m, "TransformResult")
      .def_readonly("coeffs", &TransformResult::coeffs)
      .def_readonly("aliasing_error", &TransformResult::aliasing_error);
  m.def(
      "hermite_transform",
      [](py::function f, const TruncationScheme& scheme, const QuadratureRule& quad) {
        return hermite_transform(wrap_real(std::move(f)), scheme, quad);
      },
      py::arg("f"), py::arg("scheme"), py::arg("quad"));

  m.def("derivative_coeffs", &derivative_coeffs, py::arg("c"), py::arg("axis"));
  m.def("multiply_by_coordinate", &multiply_by_coordinate, py::arg("c"), py::arg("axis"));
  m.def(
      "reconstruct",
      [](const HermiteCoeffs& c, std::vector<double> x) { return reconstruct(c, x); },
      py::arg("c"), py::arg("x"));
  m.def("integral_of", &integral_of, py::arg("c"));

  // --- Sobolev scale -----------------------------------------------------
  m.def("sobolev_norm", &sobolev_norm, py::arg("c"), py::arg("p"));
  m.def("sobolev_inner", &sobolev_inner, py::arg("f"), py::arg("g"), py::arg("p"));
  m.def("duality_pair", &duality_pair, py::arg("psi"), py::arg("phi"));
  m.def(
      "dirac_coeffs",
      [](std::vector<double> x, const TruncationScheme& s) { return dirac_coeffs(x, s); },
      py::arg("x"), py::arg("scheme"));
  m.def("dirac_norm_partial_sums", &dirac_norm_partial_sums, py::arg("q"), py::arg("n_max"));

  py::class_<GrowthClassification>(m, "GrowthClassification")
      .def_readonly("loglog_slope", &GrowthClassification::loglog_slope)
      .def_readonly("last_increment", &GrowthClassification::last_increment)
      .def_readonly("convergent", &GrowthClassification::convergent);
  m.def("classify_dirac_norm_growth", &classify_dirac_norm_growth, py::arg("q"),
        py::arg("n_max"), py::arg("margin"));

  py::class_<BoundednessProbe>(m, "BoundednessProbe")
      .def_readonly("max_ratio", &BoundednessProbe::max_ratio)
      .def_readonly("argmax_degree", &BoundednessProbe::argmax_degree);
  m.def("derivative_boundedness_probe", &derivative_boundedness_probe, py::arg("p"),
        py::arg("samples"), py::arg("scheme"), py::arg("axis"), py::arg("seed"));
  m.def("derivative_boundedness_basis_max", &derivative_boundedness_basis_max, py::arg("p"),
        py::arg("scheme"), py::arg("axis"));

  // --- tempered distributions --------------------------------------------
  py::class_<DiracDelta>(m, "DiracDelta")
      .def(py::init([](std::vector<double> loc) { return DiracDelta{std::move(loc)}; }),
           py::arg("location"))
      .def_readonly("location", &DiracDelta::location);

  py::class_<GaussianDensity>(m, "GaussianDensity")
      .def(py::init([](std::vector<double> mean, std::vector<double> variance, double mass) {
             return GaussianDensity{std::move(mean), std::move(variance), mass};
           }),
           py::arg("mean"), py::arg("variance"), py::arg("mass") = 1.0)
      .def_readonly("mean", &GaussianDensity::mean)
      .def_readonly("variance", &GaussianDensity::variance)
      .def_readonly("mass", &GaussianDensity::mass);

  py::class_<ConstantFunction>(m, "ConstantFunction")
      .def(py::init([](double value, int dimension) {
             return ConstantFunction{value, dimension};
           }),
           py::arg("value"), py::arg("dimension") = 1)
      .def_readonly("value", &ConstantFunction::value)
      .def_readonly("dimension", &ConstantFunction::dimension);

  py::class_<SmoothFunction>(m, "SmoothFunction")
      .def(py::init([](py::function f, int dimension) {
             return SmoothFunction{wrap_real(std::move(f)), dimension};
           }),
           py::arg("eval"), py::arg("dimension") = 1)
      .def_readonly("dimension", &SmoothFunction::dimension);

  py::class_<HermiteTruncation>(m, "HermiteTruncation")
      .def(py::init([](HermiteCoeffs c, double p) {
             return HermiteTruncation{std::move(c), p};
           }),
           py::arg("coeffs"), py::arg("p") = 0.0)
      .def_readonly("coeffs", &HermiteTruncation::coeffs)
      .def_readonly("p", &HermiteTruncation::p);

  py::class_<TemperedDistribution>(m, "TemperedDistribution")
      .def(py::init<DiracDelta>())
      .def(py::init<GaussianDensity>())
      .def(py::init<ConstantFunction>())
      .def(py::init<SmoothFunction>())
      .def(py::init<HermiteTruncation>())
      .def_property_readonly("dim", &TemperedDistribution::dim)
      .def_property_readonly("is_dirac", &TemperedDistribution::is_dirac)
      .def_property_readonly("is_constant", &TemperedDistribution::is_constant)
      .def_property_readonly("is_truncation", &TemperedDistribution::is_truncation)
      .def("minimal_dirac_index", &TemperedDistribution::minimal_dirac_index)
      .def("variant", [](const TemperedDistribution& t) {
        return std::visit([](const auto& v) { return py::cast(v); }, t.variant());
      });
  py::implicitly_convertible<DiracDelta, TemperedDistribution>();
  py::implicitly_convertible<GaussianDensity, TemperedDistribution>();
  py::implicitly_convertible<ConstantFunction, TemperedDistribution>();
  py::implicitly_convertible<SmoothFunction, TemperedDistribution>();
  py::implicitly_convertible<HermiteTruncation, TemperedDistribution>();

  py::class_<TranslateResult>(m, "TranslateResult")
      .def_readonly("value", &TranslateResult::value)
      .def_readonly("reprojection_error", &TranslateResult::reprojection_error)
      .def_readonly("flagged", &TranslateResult::flagged);
  m.def(
      "translate",
      [](const TemperedDistribution& y, std::vector<double> x, double tol) {
        return translate(y, x, tol);
      },
      py::arg("y"), py::arg("x"), py::arg("tolerance") = 1e-6);
  m.def(
      "translate_truncation_expm",
      [](const HermiteCoeffs& c, std::vector<double> x) {
        return translate_truncation_expm(c, x);
      },
      py::arg("c"), py::arg("x"));
  m.def("translation_overlap_1d", &translation_overlap_1d, py::arg("n"), py::arg("s"));
  m.def("reflect", &reflect, py::arg("y"));
  m.def(
      "coefficient_field",
      [](const TemperedDistribution& sigma, const TemperedDistribution& y,
         std::vector<double> x) { return coefficient_field(sigma, y, x); },
      py::arg("sigma"), py::arg("y"), py::arg("x"));
  m.def("pair_with_truncation", &pair_with_truncation, py::arg("psi"), py::arg("phi"));
  m.def(
      "distribution_value",
      [](const TemperedDistribution& t, std::vector<double> r) {
        return distribution_value(t, r);
      },
      py::arg("t"), py::arg("r"));
  m.def("quadrature_mass", &quadrature_mass, py::arg("y"));

  py::class_<CoefficientMatrix>(m, "CoefficientMatrix")
      .def(py::init([](int d, std::vector<TemperedDistribution> sigma,
                       std::vector<TemperedDistribution> b) {
             if (static_cast<int>(sigma.size()) != d * d ||
                 static_cast<int>(b.size()) != d) {
               throw std::invalid_argument(
                   "CoefficientMatrix: need d*d sigma and d b entries");
             }
             return CoefficientMatrix{d, std::move(sigma), std::move(b)};
           }),
           py::arg("d"), py::arg("sigma"), py::arg("b"))
      .def_readonly("d", &CoefficientMatrix::d)
      .def("sigma_at", &CoefficientMatrix::sigma_at, py::arg("i"), py::arg("j"));

  m.def("apply_A", &apply_A, py::arg("coeffs"), py::arg("phi"), py::arg("j"));
  py::class_<LDecomposition>(m, "LDecomposition")
      .def_readonly("diffusion", &LDecomposition::diffusion)
      .def_readonly("drift", &LDecomposition::drift);
  m.def("apply_L_split", &apply_L_split, py::arg("coeffs"), py::arg("phi"));
  m.def("apply_L", &apply_L, py::arg("coeffs"), py::arg("phi"));

  // --- SDE engine ---------------------------------------------------------
  py::class_<BrownianPath>(m, "BrownianPath")
      .def_readonly("horizon", &BrownianPath::horizon)
      .def_readonly("dt", &BrownianPath::dt)
      .def_readonly("dim", &BrownianPath::dim)
      .def_readonly("master_seed", &BrownianPath::master_seed)
      .def_readonly("path_id", &BrownianPath::path_id)
      .def_readonly("level", &BrownianPath::level)
      .def_readonly("increments", &BrownianPath::increments)
      .def("steps", &BrownianPath::steps);
  m.def("sample_brownian", &sample_brownian, py::arg("dim"), py::arg("horizon"),
        py::arg("dt"), py::arg("master_seed"), py::arg("path_id"));
  m.def("refine_brownian", &refine_brownian, py::arg("path"), py::arg("levels"));

  py::class_<DriftDiffusion>(m, "DriftDiffusion")
      .def(py::init(&make_fields), py::arg("d"), py::arg("sigma"), py::arg("b"))
      .def_readonly("d", &DriftDiffusion::d);

  py::class_<PathResult>(m, "PathResult")
      .def_readonly("times", &PathResult::times)
      .def_readonly("states", &PathResult::states)
      .def_property_readonly(
          "alive",
          [](const PathResult& p) {
            return std::vector<bool>(p.alive.begin(), p.alive.end());
          })
      .def_readonly("exploded", &PathResult::exploded)
      .def_readonly("field_failure", &PathResult::field_failure)
      .def_readonly("thresholds", &PathResult::thresholds)
      .def_readonly("hitting_times", &PathResult::hitting_times)
      .def_readonly("eta_lower", &PathResult::eta_lower)
      .def_readonly("eta_upper", &PathResult::eta_upper);
  m.def(
      "simulate_path",
      [](const DriftDiffusion& fields, std::vector<double> x0, const BrownianPath& bm,
         std::vector<double> thresholds) {
        return simulate_path(fields, x0, bm, thresholds);
      },
      py::arg("fields"), py::arg("x0"), py::arg("brownian"), py::arg("thresholds"));

  py::class_<StrongErrorTable>(m, "StrongErrorTable")
      .def_readonly("dts", &StrongErrorTable::dts)
      .def_readonly("errors", &StrongErrorTable::errors)
      .def_readonly("fitted_order", &StrongErrorTable::fitted_order);
  m.def(
      "strong_error",
      [](const DriftDiffusion& fields, std::vector<double> x0, int paths, double horizon,
         std::vector<double> dts, std::uint64_t seed) {
        return strong_error(fields, x0, paths, horizon, dts, seed);
      },
      py::arg("fields"), py::arg("x0"), py::arg("paths"), py::arg("horizon"),
      py::arg("dts"), py::arg("master_seed"));
  m.def(
      "fit_loglog_slope",
      [](std::vector<double> x, std::vector<double> y) { return fit_loglog_slope(x, y); },
      py::arg("x"), py::arg("y"));

  // --- translation flow ----------------------------------------------------
  m.def("convolved_fields", &convolved_fields, py::arg("coeffs"), py::arg("y"));

  py::class_<FlowState>(m, "FlowState")
      .def_property_readonly("alive", &FlowState::alive)
      .def_property_readonly("dist",
                             [](const FlowState& s) -> py::object {
                               if (!s.dist) return py::none();
                               return py::cast(*s.dist);
                             });

  py::class_<FlowConfig>(m, "FlowConfig")
      .def(py::init<>())
      .def_readwrite("thresholds", &FlowConfig::thresholds);

  py::class_<FlowPath>(m, "FlowPath")
      .def_property_readonly("initial", &FlowPath::initial)
      .def_property_readonly("driving_path", &FlowPath::driving_path)
      .def("alive_at", &FlowPath::alive_at, py::arg("i"))
      .def("state_at", &FlowPath::state_at, py::arg("i"))
      .def("observe", &FlowPath::observe, py::arg("phi"), py::arg("i"));
  m.def("evolve_flow", &evolve_flow, py::arg("y"), py::arg("coeffs"), py::arg("brownian"),
        py::arg("config") = FlowConfig{});
  m.def("truncate_distribution", &truncate_distribution, py::arg("y"), py::arg("scheme"));

  py::class_<ResidualStats>(m, "ResidualStats")
      .def_readonly("max_abs_per_test", &ResidualStats::max_abs_per_test)
      .def_readonly("max_abs", &ResidualStats::max_abs);
  m.def("strong_solution_residual", &strong_solution_residual, py::arg("flow"),
        py::arg("coeffs"), py::arg("p"), py::arg("test_set"), py::arg("brownian"));
  m.def(
      "translation_invariance_check",
      [](const TemperedDistribution& y, const CoefficientMatrix& coeffs,
         std::vector<double> x, const BrownianPath& bm, const FlowConfig& cfg) {
        return translation_invariance_check(y, coeffs, x, bm, cfg);
      },
      py::arg("y"), py::arg("coeffs"), py::arg("x"), py::arg("brownian"),
      py::arg("config") = FlowConfig{});
  m.def("conservation_check", &conservation_check, py::arg("flow"),
        py::arg("sample_stride") = 16);

  py::class_<WeakLimitRow>(m, "WeakLimitRow")
      .def_readonly("z", &WeakLimitRow::z)
      .def_readonly("pairings", &WeakLimitRow::pairings);
  m.def("weak_limit_check", &weak_limit_check, py::arg("y"), py::arg("z_sequence"),
        py::arg("test_set"));

  // --- monotonicity ---------------------------------------------------------
  py::class_<ConstantOperatorPair>(m, "ConstantOperatorPair")
      .def(py::init([](int d, std::vector<double> sigma, std::vector<double> b, double p) {
             return ConstantOperatorPair{d, std::move(sigma), std::move(b), p};
           }),
           py::arg("d"), py::arg("sigma"), py::arg("b"), py::arg("p") = 1.0)
      .def_readonly("d", &ConstantOperatorPair::d)
      .def_readonly("sigma", &ConstantOperatorPair::sigma)
      .def_readonly("b", &ConstantOperatorPair::b)
      .def_readonly("p", &ConstantOperatorPair::p);
  m.def("apply_constant_A", &apply_constant_A, py::arg("ops"), py::arg("phi"), py::arg("j"));
  m.def("apply_constant_L", &apply_constant_L, py::arg("ops"), py::arg("phi"));
  m.def("monotonicity_lhs", &monotonicity_lhs, py::arg("ops"), py::arg("phi"));

  py::class_<ConstantEstimate>(m, "ConstantEstimate")
      .def_readonly("c_hat", &ConstantEstimate::c_hat)
      .def_readonly("argmax_degree", &ConstantEstimate::argmax_degree)
      .def_readonly("saturation_degrees", &ConstantEstimate::saturation_degrees)
      .def_readonly("saturation_c_hat", &ConstantEstimate::saturation_c_hat);
  m.def("estimate_constant", &estimate_constant, py::arg("alpha"), py::arg("p"),
        py::arg("d"), py::arg("samples"), py::arg("scheme"), py::arg("seed"));

  // --- evolution of the mean ------------------------------------------------
  py::class_<EmpiricalKernel>(m, "EmpiricalKernel")
      .def_readonly("t", &EmpiricalKernel::t)
      .def_readonly("d", &EmpiricalKernel::d)
      .def_readonly("samples", &EmpiricalKernel::samples)
      .def("__len__", &EmpiricalKernel::size)
      .def("alive_fraction", &EmpiricalKernel::alive_fraction)
      .def("cemetery_mass", &EmpiricalKernel::cemetery_mass);

  py::class_<KernelConfig>(m, "KernelConfig")
      .def(py::init<>())
      .def_readwrite("dt", &KernelConfig::dt)
      .def_readwrite("thresholds", &KernelConfig::thresholds)
      .def_readwrite("field_bound", &KernelConfig::field_bound)
      .def_readwrite("workers", &KernelConfig::workers);

  py::class_<KernelEstimate>(m, "KernelEstimate")
      .def_readonly("kernels", &KernelEstimate::kernels)
      .def_readonly("max_field_seen", &KernelEstimate::max_field_seen)
      .def_readonly("bound_flagged", &KernelEstimate::bound_flagged)
      .def_readonly("any_explosion", &KernelEstimate::any_explosion);
  m.def(
      "estimate_kernel",
      [](std::vector<double> x0, const TemperedDistribution& y,
         const CoefficientMatrix& coeffs, std::vector<double> t_grid, int paths,
         std::uint64_t seed, const KernelConfig& cfg) {
        return estimate_kernel(x0, y, coeffs, t_grid, paths, seed, cfg);
      },
      py::arg("x0"), py::arg("y"), py::arg("coeffs"), py::arg("t_grid"), py::arg("paths"),
      py::arg("seed"), py::arg("config") = KernelConfig{});

  py::class_<EvolutionReport>(m, "EvolutionReport")
      .def_readonly("times", &EvolutionReport::times)
      .def_readonly("psi", &EvolutionReport::psi)
      .def_readonly("se", &EvolutionReport::se)
      .def_readonly("alive_fraction", &EvolutionReport::alive_fraction)
      .def_readonly("max_field_seen", &EvolutionReport::max_field_seen)
      .def_readonly("bound_flagged", &EvolutionReport::bound_flagged);
  m.def(
      "estimate_psi",
      [](const TemperedDistribution& y, const CoefficientMatrix& coeffs,
         std::vector<double> t_grid, int paths, std::uint64_t seed,
         const TruncationScheme& scheme, const KernelConfig& cfg) {
        return estimate_psi(y, coeffs, t_grid, paths, seed, scheme, cfg);
      },
      py::arg("y"), py::arg("coeffs"), py::arg("t_grid"), py::arg("paths"),
      py::arg("seed"), py::arg("scheme"), py::arg("config") = KernelConfig{});

  py::class_<ResidualTable>(m, "ResidualTable")
      .def_readonly("times", &ResidualTable::times)
      .def_readonly("residual", &ResidualTable::residual)
      .def_readonly("error_bar", &ResidualTable::error_bar)
      .def_readonly("integrated_residual", &ResidualTable::integrated_residual);
  m.def("evolution_residual", &evolution_residual, py::arg("report"), py::arg("kernels"),
        py::arg("y"), py::arg("coeffs"), py::arg("p"));

  py::class_<AdjointResult>(m, "AdjointResult")
      .def_readonly("value", &AdjointResult::value)
      .def_readonly("reprojection_error", &AdjointResult::reprojection_error)
      .def_readonly("flagged", &AdjointResult::flagged);
  m.def("adjoint_apply", &adjoint_apply, py::arg("fields"), py::arg("phi"),
        py::arg("tolerance") = 1e-6);
  m.def(
      "adjoint_apply_constant",
      [](std::vector<double> sigma_bar, std::vector<double> b_bar,
         const HermiteCoeffs& phi) {
        return adjoint_apply_constant(sigma_bar, b_bar, phi);
      },
      py::arg("sigma_bar"), py::arg("b_bar"), py::arg("phi"));

  py::class_<SemigroupReport>(m, "SemigroupReport")
      .def_readonly("single_stage", &SemigroupReport::single_stage)
      .def_readonly("single_se", &SemigroupReport::single_se)
      .def_readonly("two_stage", &SemigroupReport::two_stage)
      .def_readonly("two_se", &SemigroupReport::two_se)
      .def_readonly("difference", &SemigroupReport::difference)
      .def_readonly("combined_se", &SemigroupReport::combined_se)
      .def_readonly("alive_probability", &SemigroupReport::alive_probability);
  m.def(
      "semigroup_estimate",
      [](py::function f, const TemperedDistribution& y, const CoefficientMatrix& coeffs,
         double s, double t, int outer_paths, int inner_paths, std::uint64_t seed,
         const KernelConfig& cfg) {
        Observable obs = [f](const TemperedDistribution& dist) {
          return py::cast<double>(f(dist));
        };
        return semigroup_estimate(obs, y, coeffs, s, t, outer_paths, inner_paths, seed,
                                  cfg);
      },
      py::arg("f"), py::arg("y"), py::arg("coeffs"), py::arg("s"), py::arg("t"),
      py::arg("outer_paths"), py::arg("inner_paths"), py::arg("seed"),
      py::arg("config") = KernelConfig{});

  py::class_<GeneratorEstimate>(m, "GeneratorEstimate")
      .def_readonly("t_grid", &GeneratorEstimate::t_grid)
      .def_readonly("raw", &GeneratorEstimate::raw)
      .def_readonly("se", &GeneratorEstimate::se)
      .def_readonly("extrapolated", &GeneratorEstimate::extrapolated)
      .def_readonly("analytic", &GeneratorEstimate::analytic);
  m.def(
      "generator_special_case",
      [](const TemperedDistribution& y, const CoefficientMatrix& coeffs,
         const HermiteCoeffs& phi, std::vector<double> t_grid, int paths,
         std::uint64_t seed, const KernelConfig& cfg) {
        return generator_special_case(y, coeffs, phi, t_grid, paths, seed, cfg);
      },
      py::arg("y"), py::arg("coeffs"), py::arg("phi"), py::arg("t_small_grid"),
      py::arg("paths"), py::arg("seed"), py::arg("config") = KernelConfig{});

  // --- acceptance -----------------------------------------------------------
  py::class_<CriterionResult>(m, "CriterionResult")
      .def_readonly("number", &CriterionResult::number)
      .def_readonly("name", &CriterionResult::name)
      .def_readonly("pass_", &CriterionResult::pass)
      .def_readonly("details", &CriterionResult::details)
      .def("__repr__", [](const CriterionResult& r) {
        return std::string(r.pass ? "PASS " : "FAIL ") + std::to_string(r.number) + ": " +
               r.name;
      });

  py::class_<AcceptanceOptions>(m, "AcceptanceOptions")
      .def(py::init<>())
      .def_readwrite("seed", &AcceptanceOptions::seed)
      .def_readwrite("quick", &AcceptanceOptions::quick)
      .def_readwrite("workers", &AcceptanceOptions::workers);
  m.def("run_acceptance", &run_acceptance, py::arg("options") = AcceptanceOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def("run_criterion", &run_criterion, py::arg("number"),
        py::arg("options") = AcceptanceOptions{}, py::call_guard<py::gil_scoped_release>());
}
