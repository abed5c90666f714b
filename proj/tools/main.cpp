// Command-line front end: configuration-driven experiments with
// machine-readable artifacts (summary.json, series.csv, config.resolved).
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "distflow/acceptance.hpp"
#include "distflow/evolution.hpp"
#include "distflow/io.hpp"
#include "distflow/monotonicity.hpp"
#include "distflow/sobolev.hpp"

namespace {

using distflow::CoefficientMatrix;
using distflow::TemperedDistribution;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitHypothesis = 3;
constexpr int kExitAcceptance = 4;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HypothesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key=value configuration with schema validation.
class Config {
 public:
  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
      }
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      std::size_t pos = 0;
      double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("field '" + key + "': expected a number, got '" + it->second + "'");
    }
  }

  long get_long(const std::string& key, long fallback) {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      std::size_t pos = 0;
      long v = std::stol(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("field '" + key + "': expected an integer, got '" + it->second + "'");
    }
  }

  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        out.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ConfigError("field '" + key + "': bad list entry '" + item + "'");
      }
    }
    if (out.empty()) throw ConfigError("field '" + key + "': empty list");
    return out;
  }

  /// Unknown keys are rejected; echoed keys come from the schema walk above.
  void reject_unknown() const {
    std::string unknown;
    for (const auto& [key, value] : values_) {
      if (!used_.count(key)) {
        if (!unknown.empty()) unknown += ", ";
        unknown += key;
      }
    }
    if (!unknown.empty()) throw ConfigError("unknown config fields: " + unknown);
  }

  /// Every resolved parameter, sorted, for config.resolved.
  void note_resolved(const std::string& key, const std::string& value) {
    resolved_[key] = value;
  }
  std::string resolved_text() const {
    std::string out;
    for (const auto& [key, value] : resolved_) out += key + "=" + value + "\n";
    return out;
  }

 private:
  static std::string trim(std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
  std::map<std::string, std::string> resolved_;
};

std::string fmt_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

/// Distribution spec: "gaussian:mean,var,mass" | "dirac:loc" | "constant:c".
TemperedDistribution parse_dist(const std::string& spec, const std::string& field) {
  auto colon = spec.find(':');
  std::string kind = spec.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        args.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ConfigError("field '" + field + "': bad number '" + item + "' in '" + spec + "'");
      }
    }
  }
  if (kind == "gaussian") {
    if (args.size() != 3) {
      throw ConfigError("field '" + field + "': gaussian takes mean,var,mass");
    }
    if (args[1] <= 0.0) throw ConfigError("field '" + field + "': variance must be positive");
    return TemperedDistribution(distflow::GaussianDensity{{args[0]}, {args[1]}, args[2]});
  }
  if (kind == "dirac") {
    if (args.size() != 1) throw ConfigError("field '" + field + "': dirac takes a location");
    return TemperedDistribution(distflow::DiracDelta{{args[0]}});
  }
  if (kind == "constant") {
    if (args.size() != 1) throw ConfigError("field '" + field + "': constant takes a value");
    return TemperedDistribution(distflow::ConstantFunction{args[0], 1});
  }
  throw ConfigError("field '" + field + "': unknown distribution kind '" + kind +
                    "' (gaussian|dirac|constant)");
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<long> paths;
  std::optional<double> dt;
  std::optional<long> workers;
  std::string level = "quick";
};

void apply_overrides(Config& config, const CommonArgs& args) {
  if (!args.config_path.empty()) config.load_file(args.config_path);
  if (args.seed) config.set("seed", std::to_string(*args.seed));
  if (args.paths) config.set("M", std::to_string(*args.paths));
  if (args.dt) config.set("dt", fmt_double(*args.dt));
  if (args.workers) config.set("workers", std::to_string(*args.workers));
}

std::filesystem::path make_run_dir(const std::string& base, const std::string& name) {
  auto now = std::chrono::system_clock::now();
  auto t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%S", &tm);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() %
            1000;
  std::ostringstream stamp;
  stamp << buf << '.' << std::setw(3) << std::setfill('0') << ms;
  std::filesystem::path dir = std::filesystem::path(base) / name / stamp.str();
  std::filesystem::create_directories(dir);
  return dir;
}

void emit(const std::filesystem::path& dir, const nlohmann::ordered_json& summary,
          const std::string& series, const Config& config) {
  distflow::io::write_file(dir / "summary.json", distflow::io::dump_json(summary));
  distflow::io::write_file(dir / "series.csv", series);
  distflow::io::write_file(dir / "config.resolved", config.resolved_text());
  std::cout << "wrote " << (dir / "summary.json").string() << "\n";
}

struct CommonParams {
  std::uint64_t seed;
  double dt;
  double horizon;
  long paths;
  int workers;
  std::vector<double> thresholds;
};

CommonParams read_common(Config& config) {
  CommonParams p;
  p.seed = static_cast<std::uint64_t>(config.get_long("seed", 20260823));
  p.dt = config.get_double("dt", 1e-2);
  p.horizon = config.get_double("T", 0.5);
  p.paths = config.get_long("M", 1000);
  p.workers = static_cast<int>(config.get_long("workers", 1));
  p.thresholds = config.get_list("thresholds", {10.0, 100.0, 1000.0, 10000.0});
  if (p.dt <= 0.0) throw ConfigError("field 'dt': must be positive");
  if (p.horizon <= 0.0) throw ConfigError("field 'T': must be positive");
  if (p.paths < 1) throw ConfigError("field 'M': must be >= 1");
  if (p.workers < 1) throw ConfigError("field 'workers': must be >= 1");
  config.note_resolved("seed", std::to_string(p.seed));
  config.note_resolved("dt", fmt_double(p.dt));
  config.note_resolved("T", fmt_double(p.horizon));
  config.note_resolved("M", std::to_string(p.paths));
  config.note_resolved("workers", std::to_string(p.workers));
  std::string th;
  for (std::size_t i = 0; i < p.thresholds.size(); ++i) {
    if (i) th += ",";
    th += fmt_double(p.thresholds[i]);
  }
  config.note_resolved("thresholds", th);
  return p;
}

CoefficientMatrix read_fields(Config& config) {
  std::string sigma_spec = config.get_string("sigma", "constant:1");
  std::string b_spec = config.get_string("b", "constant:0");
  config.note_resolved("sigma", sigma_spec);
  config.note_resolved("b", b_spec);
  return CoefficientMatrix{1, {parse_dist(sigma_spec, "sigma")}, {parse_dist(b_spec, "b")}};
}

TemperedDistribution read_y(Config& config) {
  std::string y_spec = config.get_string("y", "gaussian:0,1,1");
  config.note_resolved("y", y_spec);
  return parse_dist(y_spec, "y");
}

nlohmann::ordered_json config_echo(const CommonParams& p) {
  nlohmann::ordered_json j;
  j["seed"] = p.seed;
  j["dt"] = p.dt;
  j["T"] = p.horizon;
  j["M"] = p.paths;
  j["workers"] = p.workers;
  j["thresholds"] = p.thresholds;
  return j;
}

int cmd_flow(Config& config, const CommonArgs& args) {
  CommonParams p = read_common(config);
  TemperedDistribution y = read_y(config);
  CoefficientMatrix coeffs = read_fields(config);
  config.reject_unknown();

  distflow::BrownianPath bp = distflow::sample_brownian(1, p.horizon, p.dt, p.seed, 0);
  distflow::FlowConfig fc;
  fc.thresholds = p.thresholds;
  distflow::FlowPath flow = distflow::evolve_flow(y, coeffs, bp, fc);
  const auto& z = flow.driving_path();

  nlohmann::ordered_json summary;
  summary["experiment"] = "flow";
  summary["config"] = config_echo(p);
  summary["final_displacement"] = z.alive.back() ? z.states.back()[0] : 0.0;
  summary["exploded"] = z.exploded;
  summary["eta_lower"] = z.eta_lower;
  summary["eta_upper"] = z.eta_upper;
  bool massless = y.is_dirac() || y.is_constant();
  summary["conservation_drift"] =
      massless ? nlohmann::ordered_json(nullptr)
               : nlohmann::ordered_json(distflow::conservation_check(flow, 16));

  emit(make_run_dir(args.out_dir, "flow"), summary, distflow::io::path_csv(z), config);
  return kExitOk;
}

int cmd_evolve(Config& config, const CommonArgs& args) {
  CommonParams p = read_common(config);
  TemperedDistribution y = read_y(config);
  CoefficientMatrix coeffs = read_fields(config);
  int n = static_cast<int>(config.get_long("N", 12));
  double pp = config.get_double("p", 0.0);
  long grid_points = config.get_long("grid", 6);
  double bound = config.get_double("field_bound", 1e6);
  config.note_resolved("N", std::to_string(n));
  config.note_resolved("p", fmt_double(pp));
  config.note_resolved("grid", std::to_string(grid_points));
  config.note_resolved("field_bound", fmt_double(bound));
  config.reject_unknown();
  if (n < 2) throw ConfigError("field 'N': must be >= 2");
  if (grid_points < 5) throw ConfigError("field 'grid': need >= 5 points for residuals");

  std::vector<double> grid;
  for (long i = 0; i < grid_points; ++i) {
    grid.push_back(p.horizon * static_cast<double>(i) / static_cast<double>(grid_points - 1));
  }
  distflow::KernelConfig kc;
  kc.dt = p.dt;
  kc.thresholds = p.thresholds;
  kc.field_bound = bound;
  kc.workers = p.workers;
  distflow::TruncationScheme scheme(1, n);

  std::vector<double> origin{0.0};
  distflow::KernelEstimate kernels = distflow::estimate_kernel(
      origin, y, coeffs, grid, static_cast<int>(p.paths), p.seed, kc);
  if (kernels.bound_flagged) {
    throw HypothesisError("coefficient field exceeded declared bound " + fmt_double(bound) +
                          " (max seen " + fmt_double(kernels.max_field_seen) + ")");
  }
  distflow::EvolutionReport report =
      distflow::estimate_psi(y, coeffs, grid, static_cast<int>(p.paths), p.seed, scheme, kc);
  distflow::ResidualTable table =
      distflow::evolution_residual(report, kernels.kernels, y, coeffs, pp);

  nlohmann::ordered_json summary;
  summary["experiment"] = "evolve";
  summary["config"] = config_echo(p);
  summary["max_field_seen"] = report.max_field_seen;
  for (std::size_t g = 0; g < report.times.size(); ++g) {
    nlohmann::ordered_json row;
    row["t"] = report.times[g];
    row["psi"] = distflow::io::coeffs_json(report.psi[g], pp);
    row["se"] = report.se[g];
    row["alive_fraction"] = report.alive_fraction[g];
    summary["psi"].push_back(row);
  }
  summary["residual_times"] = table.times;
  summary["residual"] = table.residual;
  summary["residual_error_bar"] = table.error_bar;
  summary["integrated_residual"] = table.integrated_residual;

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < table.times.size(); ++i) {
    rows.push_back({table.times[i], table.residual[i], table.error_bar[i],
                    table.integrated_residual[i]});
  }
  emit(make_run_dir(args.out_dir, "evolve"), summary,
       distflow::io::table_csv({"t", "residual", "error_bar", "integrated_residual"}, rows),
       config);
  return kExitOk;
}

int cmd_kernel(Config& config, const CommonArgs& args) {
  CommonParams p = read_common(config);
  TemperedDistribution y = read_y(config);
  CoefficientMatrix coeffs = read_fields(config);
  double x0v = config.get_double("x0", 0.0);
  long grid_points = config.get_long("grid", 6);
  config.note_resolved("x0", fmt_double(x0v));
  config.note_resolved("grid", std::to_string(grid_points));
  config.reject_unknown();
  if (grid_points < 1) throw ConfigError("field 'grid': must be >= 1");

  std::vector<double> grid;
  for (long i = 1; i <= grid_points; ++i) {
    grid.push_back(p.horizon * static_cast<double>(i) / static_cast<double>(grid_points));
  }
  distflow::KernelConfig kc;
  kc.dt = p.dt;
  kc.thresholds = p.thresholds;
  kc.workers = p.workers;
  std::vector<double> x0{x0v};
  distflow::KernelEstimate est =
      distflow::estimate_kernel(x0, y, coeffs, grid, static_cast<int>(p.paths), p.seed, kc);

  nlohmann::ordered_json summary;
  summary["experiment"] = "kernel";
  summary["config"] = config_echo(p);
  summary["x0"] = x0v;
  summary["max_field_seen"] = est.max_field_seen;
  summary["bound_flagged"] = est.bound_flagged;
  for (const auto& k : est.kernels) {
    nlohmann::ordered_json row;
    row["t"] = k.t;
    row["alive_fraction"] = k.alive_fraction();
    row["cemetery_mass"] = k.cemetery_mass();
    summary["kernels"].push_back(row);
  }
  emit(make_run_dir(args.out_dir, "kernel"), summary, distflow::io::kernel_csv(est.kernels),
       config);
  return kExitOk;
}

std::vector<distflow::SmoothTest> default_test_panel() {
  std::vector<distflow::SmoothTest> tests;
  for (int k = 0; k < 5; ++k) {
    distflow::SmoothTest t;
    t.name = "h_" + std::to_string(k);
    t.f = [k](std::span<const double> x) {
      return distflow::hermite_eval_axis(k, x[0])[static_cast<std::size_t>(k)];
    };
    t.grad = {distflow::RealFunction([k](std::span<const double> x) {
      auto h = distflow::hermite_eval_axis(k + 1, x[0]);
      double v = -std::sqrt((k + 1) / 2.0) * h[static_cast<std::size_t>(k + 1)];
      if (k > 0) v += std::sqrt(k / 2.0) * h[static_cast<std::size_t>(k - 1)];
      return v;
    })};
    t.hess = {distflow::RealFunction([k](std::span<const double> x) {
      auto h = distflow::hermite_eval_axis(k + 2, x[0]);
      double v = std::sqrt((k + 1) * (k + 2) / 4.0) * h[static_cast<std::size_t>(k + 2)];
      v -= (k + 0.5) * h[static_cast<std::size_t>(k)];
      if (k > 1) v += std::sqrt(k * (k - 1) / 4.0) * h[static_cast<std::size_t>(k - 2)];
      return v;
    })};
    tests.push_back(std::move(t));
  }
  {
    distflow::SmoothTest t;
    t.name = "x";
    t.f = [](std::span<const double> x) { return x[0]; };
    t.grad = {distflow::RealFunction([](std::span<const double>) { return 1.0; })};
    t.hess = {distflow::RealFunction([](std::span<const double>) { return 0.0; })};
    tests.push_back(std::move(t));
  }
  {
    distflow::SmoothTest t;
    t.name = "x^2";
    t.f = [](std::span<const double> x) { return x[0] * x[0]; };
    t.grad = {distflow::RealFunction([](std::span<const double> x) { return 2.0 * x[0]; })};
    t.hess = {distflow::RealFunction([](std::span<const double>) { return 2.0; })};
    tests.push_back(std::move(t));
  }
  return tests;
}

int cmd_forward(Config& config, const CommonArgs& args) {
  CommonParams p = read_common(config);
  TemperedDistribution y = read_y(config);
  CoefficientMatrix coeffs = read_fields(config);
  double q = config.get_double("q", 0.5);
  int n = static_cast<int>(config.get_long("N", 10));
  double x0v = config.get_double("x0", 0.0);
  long grid_points = config.get_long("grid", 7);
  config.note_resolved("q", fmt_double(q));
  config.note_resolved("N", std::to_string(n));
  config.note_resolved("x0", fmt_double(x0v));
  config.note_resolved("grid", std::to_string(grid_points));
  config.reject_unknown();
  if (q <= 0.25) throw ConfigError("field 'q': q must exceed d/4");
  if (grid_points < 3) throw ConfigError("field 'grid': need >= 3 points");

  std::vector<double> grid;
  for (long i = 0; i < grid_points; ++i) {
    grid.push_back(p.horizon * static_cast<double>(i) / static_cast<double>(grid_points - 1));
  }
  distflow::KernelConfig kc;
  kc.dt = p.dt;
  kc.thresholds = p.thresholds;
  kc.workers = p.workers;
  distflow::TruncationScheme scheme(1, n);
  std::vector<double> x0{x0v};
  auto tests = default_test_panel();
  distflow::ForwardReport report =
      distflow::forward_residual(x0, y, coeffs, grid, static_cast<int>(p.paths), q, p.seed,
                                 scheme, tests, kc);

  nlohmann::ordered_json summary;
  summary["experiment"] = "forward";
  summary["config"] = config_echo(p);
  summary["q"] = q;
  summary["tests"] = report.test_names;
  summary["times"] = report.times;
  summary["pair_residual"] = report.pair_residual;
  summary["pair_error"] = report.pair_error;
  summary["norm_residual"] = report.norm_residual;
  summary["first_moment_lhs"] = report.first_moment_lhs;
  summary["first_moment_rhs"] = report.first_moment_rhs;
  summary["first_moment_se"] = report.first_moment_se;

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < report.times.size(); ++i) {
    rows.push_back({report.times[i], report.norm_residual[i], report.first_moment_lhs[i],
                    report.first_moment_rhs[i], report.first_moment_se[i]});
  }
  emit(make_run_dir(args.out_dir, "forward"), summary,
       distflow::io::table_csv(
           {"t", "norm_residual", "first_moment_lhs", "first_moment_rhs", "first_moment_se"},
           rows),
       config);
  return kExitOk;
}

int cmd_monotonicity(Config& config, const CommonArgs& args) {
  CommonParams p = read_common(config);
  double alpha = config.get_double("alpha", 2.0);
  double pp = config.get_double("p", 1.0);
  int d = static_cast<int>(config.get_long("d", 1));
  int n = static_cast<int>(config.get_long("N", 16));
  int samples = static_cast<int>(config.get_long("samples", 64));
  config.note_resolved("alpha", fmt_double(alpha));
  config.note_resolved("p", fmt_double(pp));
  config.note_resolved("d", std::to_string(d));
  config.note_resolved("N", std::to_string(n));
  config.note_resolved("samples", std::to_string(samples));
  config.reject_unknown();
  if (d < 1 || d > 3) throw ConfigError("field 'd': must be 1..3");
  if (alpha <= 0.0) throw ConfigError("field 'alpha': must be positive");

  distflow::TruncationScheme scheme(d, n);
  distflow::ConstantEstimate est =
      distflow::estimate_constant(alpha, pp, d, samples, scheme, p.seed);

  nlohmann::ordered_json summary;
  summary["experiment"] = "monotonicity";
  summary["config"] = config_echo(p);
  summary["alpha"] = alpha;
  summary["p"] = pp;
  summary["d"] = d;
  summary["N"] = n;
  summary["C_hat"] = est.c_hat;
  summary["argmax_degree"] = est.argmax_degree;
  summary["saturation_degrees"] = est.saturation_degrees;
  summary["saturation_C_hat"] = est.saturation_c_hat;

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < est.saturation_degrees.size(); ++i) {
    rows.push_back({static_cast<double>(est.saturation_degrees[i]), est.saturation_c_hat[i]});
  }
  emit(make_run_dir(args.out_dir, "monotonicity"), summary,
       distflow::io::table_csv({"N", "C_hat"}, rows), config);
  return kExitOk;
}

int cmd_sobolev_probe(Config& config, const CommonArgs& args) {
  CommonParams p = read_common(config);
  double pp = config.get_double("p", 0.5);
  double q = config.get_double("q", 0.3);
  int n = static_cast<int>(config.get_long("N", 24));
  int samples = static_cast<int>(config.get_long("samples", 200));
  long growth_n = config.get_long("growth_N", 100000);
  config.note_resolved("p", fmt_double(pp));
  config.note_resolved("q", fmt_double(q));
  config.note_resolved("N", std::to_string(n));
  config.note_resolved("samples", std::to_string(samples));
  config.note_resolved("growth_N", std::to_string(growth_n));
  config.reject_unknown();

  distflow::TruncationScheme scheme(1, n);
  distflow::BoundednessProbe probe =
      distflow::derivative_boundedness_probe(pp, samples, scheme, 0, p.seed);
  distflow::BoundednessProbe exact = distflow::derivative_boundedness_basis_max(pp, scheme, 0);
  distflow::GrowthClassification growth =
      distflow::classify_dirac_norm_growth(q, static_cast<int>(growth_n), 0.05);

  nlohmann::ordered_json summary;
  summary["experiment"] = "sobolev-probe";
  summary["config"] = config_echo(p);
  summary["p"] = pp;
  summary["derivative_ratio_sampled"] = probe.max_ratio;
  summary["derivative_ratio_basis"] = exact.max_ratio;
  summary["q"] = q;
  summary["dirac_loglog_slope"] = growth.loglog_slope;
  summary["dirac_last_increment"] = growth.last_increment;
  summary["dirac_convergent"] = growth.convergent;

  std::vector<double> sums = distflow::dirac_norm_partial_sums(q, 2000);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < sums.size(); i += 50) {
    rows.push_back({static_cast<double>(i), sums[i]});
  }
  emit(make_run_dir(args.out_dir, "sobolev-probe"), summary,
       distflow::io::table_csv({"N", "partial_sum"}, rows), config);
  return kExitOk;
}

int cmd_uniqueness(Config& config, const CommonArgs& args) {
  CommonParams p = read_common(config);
  TemperedDistribution y = read_y(config);
  CoefficientMatrix coeffs = read_fields(config);
  int n = static_cast<int>(config.get_long("N", 8));
  config.note_resolved("N", std::to_string(n));
  config.reject_unknown();

  // Same Brownian path at dt and dt/4: strong solutions driven by identical
  // noise must agree up to the discretization error.
  distflow::BrownianPath coarse = distflow::sample_brownian(1, p.horizon, p.dt, p.seed, 0);
  distflow::BrownianPath fine = distflow::refine_brownian(coarse, 2);
  distflow::FlowConfig fc;
  fc.thresholds = p.thresholds;
  distflow::FlowPath run_a = distflow::evolve_flow(y, coeffs, coarse, fc);
  distflow::FlowPath run_b = distflow::evolve_flow(y, coeffs, fine, fc);

  distflow::TruncationScheme scheme(1, n);
  std::vector<distflow::HermiteCoeffs> tests;
  for (int k = 0; k < 5; ++k) {
    tests.push_back(distflow::HermiteCoeffs::unit(scheme, distflow::MultiIndex{{k}}));
  }
  double worst = 0.0;
  const auto& za = run_a.driving_path();
  for (std::size_t t = 0; t < za.times.size(); ++t) {
    std::size_t tf = 4 * t;
    if (tf >= run_b.driving_path().times.size()) break;
    if (!run_a.alive_at(t) || !run_b.alive_at(tf)) break;
    for (const auto& phi : tests) {
      worst = std::max(worst, std::abs(run_a.observe(phi, t) - run_b.observe(phi, tf)));
    }
  }

  nlohmann::ordered_json summary;
  summary["experiment"] = "uniqueness";
  summary["config"] = config_echo(p);
  summary["max_observable_gap"] = worst;
  summary["order_scale_sqrt_dt"] = std::sqrt(p.dt);

  emit(make_run_dir(args.out_dir, "uniqueness"), summary,
       distflow::io::table_csv({"max_observable_gap", "sqrt_dt"}, {{worst, std::sqrt(p.dt)}}),
       config);
  return kExitOk;
}

int cmd_verify(Config& config, const CommonArgs& args) {
  CommonParams p = read_common(config);
  config.reject_unknown();
  distflow::AcceptanceOptions options;
  options.seed = p.seed;
  options.quick = args.level != "full";
  options.workers = p.workers;

  auto results = distflow::run_acceptance(options);
  bool all_pass = true;
  nlohmann::ordered_json summary;
  summary["experiment"] = "verify";
  summary["level"] = options.quick ? "quick" : "full";
  summary["config"] = config_echo(p);
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << " " << r.number << " " << r.name << ": "
              << r.details << "\n";
    all_pass = all_pass && r.pass;
    nlohmann::ordered_json row;
    row["number"] = r.number;
    row["name"] = r.name;
    row["pass"] = r.pass;
    row["details"] = r.details;
    summary["criteria"].push_back(row);
  }
  summary["all_pass"] = all_pass;

  std::vector<std::vector<double>> rows;
  for (const auto& r : results) {
    rows.push_back({static_cast<double>(r.number), r.pass ? 1.0 : 0.0});
  }
  emit(make_run_dir(args.out_dir, "verify"), summary,
       distflow::io::table_csv({"criterion", "pass"}, rows), config);
  return all_pass ? kExitOk : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for translation-driven distribution-valued diffusions"};
  app.require_subcommand(1);

  CommonArgs args;
  Config config;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "key=value config file");
    sub->add_option("--seed", args.seed, "master seed override");
    sub->add_option("--paths", args.paths, "Monte Carlo path count override (M)");
    sub->add_option("--dt", args.dt, "time step override");
    sub->add_option("--out", args.out_dir, "output base directory");
    sub->add_option("--workers", args.workers, "worker thread count");
    sub->add_option("--level", args.level, "verify level: quick|full")
        ->check(CLI::IsMember({"quick", "full"}));
    return sub;
  };

  auto* flow = add_common(app.add_subcommand("flow", "simulate one distribution-valued path"));
  auto* evolve = add_common(app.add_subcommand("evolve", "mean evolution and its residual"));
  auto* kernel = add_common(app.add_subcommand("kernel", "empirical transition kernel"));
  auto* forward = add_common(app.add_subcommand("forward", "forward-equation residuals"));
  auto* mono = add_common(app.add_subcommand("monotonicity", "operator inequality constant"));
  auto* sobolev = add_common(app.add_subcommand("sobolev-probe", "norm and threshold probes"));
  auto* uniq = add_common(app.add_subcommand("uniqueness", "same-noise agreement check"));
  auto* verify = add_common(app.add_subcommand("verify", "acceptance criteria battery"));

  CLI11_PARSE(app, argc, argv);

  try {
    apply_overrides(config, args);
    if (flow->parsed()) return cmd_flow(config, args);
    if (evolve->parsed()) return cmd_evolve(config, args);
    if (kernel->parsed()) return cmd_kernel(config, args);
    if (forward->parsed()) return cmd_forward(config, args);
    if (mono->parsed()) return cmd_monotonicity(config, args);
    if (sobolev->parsed()) return cmd_sobolev_probe(config, args);
    if (uniq->parsed()) return cmd_uniqueness(config, args);
    if (verify->parsed()) return cmd_verify(config, args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis violation: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitConfig;
}
