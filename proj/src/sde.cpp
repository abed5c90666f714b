#include "distflow/sde.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace distflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t stream_id(std::uint64_t path_id, int level, int axis) {
  return (path_id << 16) ^ (static_cast<std::uint64_t>(level) << 8) ^
         static_cast<std::uint64_t>(axis);
}

/// Increments are snapped to a power-of-two grid ~2^-33 sqrt(dt) wide. On
/// that grid a bridge split half +/- bridge is exact in double arithmetic,
/// so summing refined increments reproduces the coarse ones bit-for-bit --
/// which is impossible with full-precision draws whenever the bridge sample
/// exceeds the increment in magnitude. The relative distortion (~1e-10) is
/// far below every statistical tolerance in use.
double snap_to_grid(double v, double coarse_dt) {
  const double quantum = std::ldexp(1.0, std::ilogb(std::sqrt(coarse_dt)) - 33);
  return std::nearbyint(v / quantum) * quantum;
}

}  // namespace

BrownianPath sample_brownian(int dim, double horizon, double dt, std::uint64_t master_seed,
                             std::uint64_t path_id) {
  if (dim < 1 || dt <= 0.0 || horizon <= 0.0) {
    throw std::invalid_argument("sample_brownian: bad parameters");
  }
  CounterRng rng(master_seed);
  auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  if (steps == 0) steps = 1;
  BrownianPath path;
  path.horizon = horizon;
  path.dt = dt;
  path.dim = dim;
  path.master_seed = master_seed;
  path.path_id = path_id;
  path.level = 0;
  path.increments.resize(static_cast<std::size_t>(dim));
  const double scale = std::sqrt(dt);
  for (int axis = 0; axis < dim; ++axis) {
    auto& inc = path.increments[static_cast<std::size_t>(axis)];
    inc.resize(steps);
    for (std::size_t i = 0; i < steps; ++i) {
      inc[i] = snap_to_grid(scale * rng.normal(stream_id(path_id, 0, axis), i), dt);
    }
  }
  return path;
}

BrownianPath refine_brownian(const BrownianPath& path, int levels) {
  if (levels < 1) throw std::invalid_argument("refine_brownian: levels < 1");
  CounterRng rng(path.master_seed);
  BrownianPath out = path;
  for (int l = 0; l < levels; ++l) {
    const double coarse_dt = out.dt;
    const int level = out.level + 1;
    const std::size_t steps = out.steps();
    BrownianPath fine = out;
    fine.dt = coarse_dt / 2.0;
    fine.level = level;
    for (int axis = 0; axis < out.dim; ++axis) {
      const auto& inc = out.increments[static_cast<std::size_t>(axis)];
      auto& ref = fine.increments[static_cast<std::size_t>(axis)];
      ref.assign(2 * steps, 0.0);
      for (std::size_t i = 0; i < steps; ++i) {
        // Bridge midpoint: mean D/2, variance dt/4. Both the halves and
        // their sum stay on the shared grid, so the split is exact.
        double xi = rng.normal(stream_id(path.path_id, level, axis), i);
        double bridge = snap_to_grid(0.5 * std::sqrt(coarse_dt) * xi, coarse_dt);
        ref[2 * i] = inc[i] / 2.0 + bridge;
        ref[2 * i + 1] = inc[i] / 2.0 - bridge;
      }
    }
    out = std::move(fine);
  }
  return out;
}

PathResult simulate_path(const DriftDiffusion& fields, std::span<const double> x0,
                         const BrownianPath& brownian, std::span<const double> thresholds) {
  const int d = fields.d;
  if (static_cast<int>(x0.size()) != d || brownian.dim != d) {
    throw std::invalid_argument("simulate_path: dimension mismatch");
  }
  if (thresholds.empty()) throw std::invalid_argument("simulate_path: thresholds empty");
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (thresholds[i] <= thresholds[i - 1]) {
      throw std::invalid_argument("simulate_path: thresholds must increase");
    }
  }

  const std::size_t steps = brownian.steps();
  const double dt = brownian.dt;
  PathResult out;
  out.thresholds.assign(thresholds.begin(), thresholds.end());
  out.hitting_times.assign(thresholds.size(), kInf);
  out.times.reserve(steps + 1);
  out.states.reserve(steps + 1);
  out.alive.reserve(steps + 1);

  std::vector<double> x(x0.begin(), x0.end());
  bool dead = false;
  out.times.push_back(0.0);
  out.states.push_back(x);
  out.alive.push_back(1);

  std::vector<double> drift(static_cast<std::size_t>(d));
  for (std::size_t step = 0; step < steps; ++step) {
    double t_next = static_cast<double>(step + 1) * dt;
    if (!dead) {
      bool bad_field = false;
      std::vector<double> next = x;
      for (int i = 0; i < d && !bad_field; ++i) {
        double v = fields.b_at(i, x);
        if (!std::isfinite(v)) bad_field = true;
        next[static_cast<std::size_t>(i)] += v * dt;
        for (int j = 0; j < d && !bad_field; ++j) {
          double s = fields.sigma_at(i, j, x);
          if (!std::isfinite(s)) bad_field = true;
          next[static_cast<std::size_t>(i)] +=
              s * brownian.increments[static_cast<std::size_t>(j)][step];
        }
      }
      if (bad_field) {
        out.field_failure = true;
        out.exploded = true;
        out.eta_lower = t_next - dt;
        out.eta_upper = t_next;
        for (double& th : out.hitting_times) {
          if (std::isinf(th)) th = t_next - dt;
        }
        dead = true;
      } else {
        x = std::move(next);
        double norm = 0.0;
        for (double c : x) norm += c * c;
        norm = std::sqrt(norm);
        if (!std::isfinite(norm)) norm = kInf;
        for (std::size_t n = 0; n < out.thresholds.size(); ++n) {
          if (std::isinf(out.hitting_times[n]) && norm >= out.thresholds[n]) {
            out.hitting_times[n] = t_next;
          }
        }
        if (norm >= out.thresholds.back()) {
          out.exploded = true;
          out.eta_lower = t_next;
          out.eta_upper = t_next + dt;
          dead = true;
        }
      }
    }
    out.times.push_back(t_next);
    if (dead) {
      out.states.emplace_back(static_cast<std::size_t>(d), kInf);
      out.alive.push_back(0);
    } else {
      out.states.push_back(x);
      out.alive.push_back(1);
    }
  }
  if (!out.exploded) {
    out.eta_lower = kInf;
    out.eta_upper = kInf;
  }
  return out;
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    double lx = std::log(x[i]);
    double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double denom = static_cast<double>(n) * sxx - sx * sx;
  return (static_cast<double>(n) * sxy - sx * sy) / denom;
}

StrongErrorTable strong_error(const DriftDiffusion& fields, std::span<const double> x0,
                              int paths, double horizon, std::span<const double> dts,
                              std::uint64_t master_seed) {
  if (dts.size() < 2) throw std::invalid_argument("strong_error: need at least two dts");
  std::vector<int> halvings(dts.size(), 0);
  for (std::size_t i = 1; i < dts.size(); ++i) {
    double ratio = dts[i - 1] / dts[i];
    int k = static_cast<int>(std::llround(std::log2(ratio)));
    if (k < 1 || std::abs(ratio - std::ldexp(1.0, k)) > 1e-9 * ratio) {
      throw std::invalid_argument("strong_error: dts must halve by powers of two");
    }
    halvings[i] = halvings[i - 1] + k;
  }
  const std::vector<double> thresholds{1e12};

  StrongErrorTable table;
  table.dts.assign(dts.begin(), dts.end() - 1);
  table.errors.assign(dts.size() - 1, 0.0);
  for (int path_id = 0; path_id < paths; ++path_id) {
    BrownianPath coarse = sample_brownian(fields.d, horizon, dts[0], master_seed,
                                          static_cast<std::uint64_t>(path_id));
    BrownianPath finest = refine_brownian(coarse, halvings.back());
    PathResult ref = simulate_path(fields, x0, finest, thresholds);
    for (std::size_t level = 0; level + 1 < dts.size(); ++level) {
      BrownianPath bp = (halvings[level] == 0) ? coarse : refine_brownian(coarse, halvings[level]);
      PathResult run = simulate_path(fields, x0, bp, thresholds);
      std::size_t stride = static_cast<std::size_t>(1)
                           << (halvings.back() - halvings[level]);
      double sup = 0.0;
      for (std::size_t t = 0; t < run.states.size(); ++t) {
        std::size_t rt = t * stride;
        if (rt >= ref.states.size()) break;
        if (!run.alive[t] || !ref.alive[rt]) break;
        for (int i = 0; i < fields.d; ++i) {
          sup = std::max(sup, std::abs(run.states[t][static_cast<std::size_t>(i)] -
                                       ref.states[rt][static_cast<std::size_t>(i)]));
        }
      }
      table.errors[level] += sup / paths;
    }
  }
  table.fitted_order = fit_loglog_slope(table.dts, table.errors);
  return table;
}

}  // namespace distflow
