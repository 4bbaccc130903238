#include "oxide/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include <fmt/core.h>

namespace oxide {

double tw_distance(const State& state, const Mesh& mesh, const TravellingWave& tw) {
  double acc = 0.0;
  for (std::size_t i = 1; i <= mesh.cells(); ++i) {
    const double e = state.u[i] - tw.rescaled(mesh.center(i));
    acc += mesh.size(i) * e * e;
  }
  return state.L * acc;
}

double h1_norm(std::span<const double> z, const Mesh& mesh) {
  if (z.size() != mesh.cells() + 2) throw std::invalid_argument("h1_norm: expected I+2 values");
  double acc = z[0] * z[0];
  for (std::size_t i = 1; i < z.size(); ++i) {
    const double d = z[i] - z[i - 1];
    acc += d * d / mesh.gap(i - 1);
  }
  return std::sqrt(acc);
}

double l2_norm(std::span<const double> z, const Mesh& mesh) {
  if (z.size() != mesh.cells() + 2) throw std::invalid_argument("l2_norm: expected I+2 values");
  double acc = 0.0;
  for (std::size_t i = 1; i <= mesh.cells(); ++i) acc += mesh.size(i) * z[i] * z[i];
  return std::sqrt(acc);
}

DiscreteNorms discrete_norms(const Trajectory& traj, const Mesh& mesh) {
  DiscreteNorms out;
  double acc = 0.0;
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    const double nk = h1_norm(traj.states[k].u, mesh);
    acc += traj.grid.dt() * static_cast<double>(traj.steps[k] - traj.steps[k - 1]) * nk * nk;
  }
  out.l2h1 = std::sqrt(acc);
  out.h1 = h1_norm(traj.final_state().u, mesh);
  out.l2 = l2_norm(traj.final_state().u, mesh);
  return out;
}

namespace {

constexpr double kNestTol = 1e-12;

/// owner[j] = coarse cell (0-based) containing fine cell j.
std::vector<std::size_t> nest_cells(const Mesh& fine, const Mesh& coarse) {
  std::vector<std::size_t> owner(fine.cells());
  std::size_t c = 0;
  for (std::size_t j = 0; j < fine.cells(); ++j) {
    while (c < coarse.cells() && fine.edge(j) >= coarse.edge(c + 1) - kNestTol) ++c;
    if (c >= coarse.cells() || fine.edge(j + 1) > coarse.edge(c + 1) + kNestTol)
      throw std::invalid_argument("project_reference: coarse mesh is not a union of fine cells");
    owner[j] = c;
  }
  for (std::size_t k = 1; k <= coarse.cells(); ++k) {
    const double e = coarse.edge(k);
    const auto fe = fine.edges();
    const bool hit = std::any_of(fe.begin(), fe.end(), [&](double x) { return std::abs(x - e) <= kNestTol; });
    if (!hit) throw std::invalid_argument("project_reference: coarse edge is not a fine edge");
  }
  return owner;
}

}  // namespace

ProjectedField project_reference(const Trajectory& fine, const Mesh& fine_mesh, const Mesh& coarse_mesh,
                                 const TimeGrid& coarse_time) {
  const double ratio_real = coarse_time.dt() / fine.grid.dt();
  const auto ratio = static_cast<std::size_t>(std::llround(ratio_real));
  if (ratio == 0 || std::abs(ratio_real - static_cast<double>(ratio)) > 1e-9 * ratio_real)
    throw std::invalid_argument("project_reference: coarse time step is not a multiple of the fine one");
  if (ratio * coarse_time.steps() != fine.grid.steps())
    throw std::invalid_argument("project_reference: time grids do not share the horizon");
  if (fine.states.size() != fine.grid.steps() + 1)
    throw std::invalid_argument("project_reference: fine trajectory must hold every level");
  for (std::size_t k = 0; k < fine.steps.size(); ++k)
    if (fine.steps[k] != k) throw std::invalid_argument("project_reference: fine trajectory must hold every level");

  const auto owner = nest_cells(fine_mesh, coarse_mesh);
  const std::size_t Ic = coarse_mesh.cells();
  ProjectedField out;
  out.values.assign(coarse_time.steps(), std::vector<double>(Ic, 0.0));
  out.X0.assign(coarse_time.steps(), 0.0);
  out.X1.assign(coarse_time.steps(), 0.0);

  for (std::size_t n = 0; n < coarse_time.steps(); ++n) {
    auto& row = out.values[n];
    for (std::size_t s = 1; s <= ratio; ++s) {
      const State& f = fine.states[n * ratio + s];
      for (std::size_t j = 0; j < fine_mesh.cells(); ++j) row[owner[j]] += fine_mesh.size(j + 1) * f.u[j + 1];
      out.X0[n] += f.X0;
      out.X1[n] += f.X1;
    }
    for (std::size_t c = 0; c < Ic; ++c) row[c] /= static_cast<double>(ratio) * coarse_mesh.size(c + 1);
    out.X0[n] /= static_cast<double>(ratio);
    out.X1[n] /= static_cast<double>(ratio);
  }
  return out;
}

namespace {

Trajectory run_level(const ModelParams& params, const StudySettings& s, std::size_t k, const SolverOptions& opts) {
  const std::size_t cells = s.base_cells << k;
  const std::size_t steps = s.base_steps << (2 * k);
  auto traj = run(params, uniform_mesh(cells), TimeGrid::from_count(s.horizon, steps), opts, s.mode);
  if (!traj.completed())
    throw LevelFailure(k, traj.termination.kind,
                       fmt::format("convergence level {} stopped ({}): {}", k, to_string(traj.termination.kind),
                                   traj.termination.detail));
  return traj;
}

std::optional<double> log_rate(double e, double e_prev, double x, double x_prev) {
  if (!(e > 0.0) || !(e_prev > 0.0)) return std::nullopt;
  return (std::log(e) - std::log(e_prev)) / (std::log(x) - std::log(x_prev));
}

}  // namespace

ConvergenceReport convergence_study(const ModelParams& params, const StudySettings& settings,
                                    const SolverOptions& opts) {
  if (settings.reference <= settings.finest)
    throw std::invalid_argument("convergence_study: reference level must exceed the finest level");
  if (!(settings.horizon > 0.0)) throw std::invalid_argument("convergence_study: horizon must be positive");
  params.validate();
  opts.validate();

  const std::size_t count = settings.finest + 1;
  std::vector<Trajectory> runs;
  Trajectory reference;
  if (settings.parallel) {
    auto ref_future = std::async(std::launch::async, run_level, std::cref(params), std::cref(settings),
                                 settings.reference, std::cref(opts));
    std::vector<std::future<Trajectory>> futures;
    for (std::size_t k = 0; k < count; ++k)
      futures.push_back(std::async(std::launch::async, run_level, std::cref(params), std::cref(settings), k,
                                   std::cref(opts)));
    for (auto& f : futures) runs.push_back(f.get());
    reference = ref_future.get();
  } else {
    for (std::size_t k = 0; k < count; ++k) runs.push_back(run_level(params, settings, k, opts));
    reference = run_level(params, settings, settings.reference, opts);
  }

  const Mesh ref_mesh = uniform_mesh(settings.base_cells << settings.reference);
  ConvergenceReport report{settings.reference, settings.horizon, {}};
  for (std::size_t k = 0; k < count; ++k) {
    const Trajectory& tr = runs[k];
    const Mesh mesh = uniform_mesh(settings.base_cells << k);
    const auto proj = project_reference(reference, ref_mesh, mesh, tr.grid);

    LevelError row;
    row.level = k;
    row.cells = mesh.cells();
    row.steps = tr.grid.steps();
    row.h = mesh.max_size();
    row.dt = tr.grid.dt();
    double acc = 0.0;
    for (std::size_t n = 1; n <= tr.grid.steps(); ++n) {
      const auto& u = tr.states[n].u;
      double cell_acc = 0.0;
      for (std::size_t i = 1; i <= mesh.cells(); ++i) {
        const double e = u[i] - proj.values[n - 1][i - 1];
        cell_acc += mesh.size(i) * e * e;
      }
      acc += row.dt * cell_acc;
      row.err_0 = std::max(row.err_0, std::abs(tr.states[n].X0 - proj.X0[n - 1]));
      row.err_1 = std::max(row.err_1, std::abs(tr.states[n].X1 - proj.X1[n - 1]));
    }
    row.err_w = std::sqrt(acc);
    if (k > 0) {
      const auto& prev = report.levels.back();
      row.rate_w = log_rate(row.err_w, prev.err_w, row.h, prev.h);
      row.rate_0 = log_rate(row.err_0, prev.err_0, row.dt, prev.dt);
      row.rate_1 = log_rate(row.err_1, prev.err_1, row.dt, prev.dt);
    }
    report.levels.push_back(row);
  }
  return report;
}

ConcentrationBounds linf_bounds(const ModelParams& params) {
  return {std::min(params.u_init.infimum(params.L0), params.growth_level()),
          std::max(params.u_init.supremum(params.L0), params.dissolution_level())};
}

Interval width_rate_bounds(const ModelParams& p, double m, double M) {
  const double base = -p.alpha0 - p.R * p.alpha1;
  const double slope = p.beta0 + p.R * p.beta1;
  return {base + m * slope, base + M * slope};
}

Interval growth_rate_bounds(const ModelParams& p, double m, double M) {
  return {-p.alpha1 + p.beta1 * m, -p.alpha1 + p.beta1 * M};
}

Interval velocity_bounds(const ModelParams& p, double m, double M) {
  if (!(m <= M)) throw std::invalid_argument("velocity_bounds: need m <= M");
  // v = beta0 u_0 - alpha0 - xi dL with xi in [0,1]
  const Interval dL = width_rate_bounds(p, m, M);
  return {p.beta0 * m - p.alpha0 - std::max(dL.hi, 0.0), p.beta0 * M - p.alpha0 - std::min(dL.lo, 0.0)};
}

std::optional<double> horizon_bound(const ModelParams& p, double m) {
  const double denom = (p.alpha0 + p.R * p.alpha1) - m * (p.beta0 + p.R * p.beta1);
  if (!(denom > 0.0)) return std::nullopt;
  return p.L0 / denom;
}

double mass_balance_defect(const State& prev, const State& next, const Mesh& mesh, double dt,
                           const ModelParams& params) {
  double before = 0.0;
  double after = 0.0;
  for (std::size_t i = 1; i <= mesh.cells(); ++i) {
    before += mesh.size(i) * prev.u[i];
    after += mesh.size(i) * next.u[i];
  }
  return next.L * after - prev.L * before - dt * (params.a - params.b * next.left_trace());
}

BoundsReport check_bounds(const Trajectory& traj, const Mesh& mesh, const ModelParams& params, double tol) {
  for (std::size_t k = 0; k < traj.steps.size(); ++k)
    if (traj.steps[k] != k) throw std::invalid_argument("check_bounds: trajectory must store every level");

  BoundsReport report;
  report.bounds = linf_bounds(params);
  const auto [m, M] = report.bounds;
  const Interval v_range = velocity_bounds(params, m, M);
  const Interval x1_range = growth_rate_bounds(params, m, M);
  const auto regime = classify(params);
  const std::optional<double> L_hat =
      regime.regime == RegimeClassification::Regime::UniqueWave ? std::optional(regime.wave->L_hat) : std::nullopt;
  const double dt = traj.grid.dt();

  auto flag = [&](std::size_t n, const char* what, double value, double limit) {
    report.violations.push_back({n, what, value, limit});
  };
  auto check_levels = [&](std::size_t n, const State& s) {
    for (double u : s.u) {
      if (u < m - tol) flag(n, "maximum principle (lower)", u, m);
      if (u > M + tol) flag(n, "maximum principle (upper)", u, M);
    }
  };

  check_levels(0, traj.states.front());
  for (std::size_t n = 1; n < traj.states.size(); ++n) {
    const State& prev = traj.states[n - 1];
    const State& next = traj.states[n];
    check_levels(n, next);

    const double mass = std::abs(mass_balance_defect(prev, next, mesh, dt, params));
    report.max_mass_defect = std::max(report.max_mass_defect, mass);
    if (mass > tol) flag(n, "mass balance", mass, tol);

    if (L_hat) {
      const double lower = std::min(m / M * prev.L, *L_hat);
      if (!(next.L > lower - tol)) flag(n, "width bound", next.L, lower);
    }

    for (double v : velocities(prev, next, mesh, dt, params.R).values)
      if (!v_range.contains(v, tol)) flag(n, "velocity bracket", v, v < v_range.lo ? v_range.lo : v_range.hi);

    const double dX1 = (next.X1 - prev.X1) / dt;
    if (!x1_range.contains(dX1, tol)) flag(n, "dX1 bracket", dX1, dX1 < x1_range.lo ? x1_range.lo : x1_range.hi);
    ++report.steps_checked;
  }
  return report;
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares_slope: need >= 2 pairs");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("least_squares_slope: abscissae are all equal");
  return sxy / sxx;
}

double log_distance_slope(const Trajectory& traj, const Mesh& mesh, const TravellingWave& tw, double t_lo,
                          double t_hi) {
  std::vector<double> t, logd;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const double tk = traj.grid.time(traj.steps[k]);
    if (tk < t_lo - 1e-12 || tk > t_hi + 1e-12) continue;
    const double d = tw_distance(traj.states[k], mesh, tw);
    if (!(d > 0.0)) continue;
    t.push_back(tk);
    logd.push_back(std::log(d));
  }
  return least_squares_slope(t, logd);
}

std::vector<DiagnosticsRow> diagnostics(const Trajectory& traj, const Mesh& mesh, const ModelParams& params) {
  const auto regime = classify(params);
  const bool has_wave = regime.regime == RegimeClassification::Regime::UniqueWave;
  std::vector<DiagnosticsRow> rows;
  rows.reserve(traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const State& s = traj.states[k];
    DiagnosticsRow row{traj.grid.time(traj.steps[k]), s.X0, s.X1, s.L, s.left_trace(), s.right_trace(), {}, 0.0};
    if (has_wave) row.d = tw_distance(s, mesh, *regime.wave);
    if (k > 0)
      row.mass_balance_defect = mass_balance_defect(traj.states[k - 1], s, mesh, traj.grid.dt(), params);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace oxide
