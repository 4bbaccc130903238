#include "oxide/scheme.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "edge_terms.hpp"
#include "newton.hpp"

namespace oxide {

double SolverOptions::floor_for(const ModelParams& params) const {
  return width_floor.value_or(1e-8 * params.L0);
}

void SolverOptions::validate() const {
  if (!(newton_tol > 0.0)) throw std::invalid_argument("newton_tol must be positive");
  if (max_newton_iters <= 0) throw std::invalid_argument("max_newton_iters must be positive");
  if (homotopy_steps <= 0) throw std::invalid_argument("homotopy_steps must be positive");
  if (max_homotopy_steps < homotopy_steps)
    throw std::invalid_argument("max_homotopy_steps must be at least homotopy_steps");
  if (width_floor && !(*width_floor > 0.0)) throw std::invalid_argument("width_floor must be positive");
}

VelocityField velocities(const State& prev, const State& next, const Mesh& mesh, double dt, double R) {
  if (!(dt > 0.0)) throw std::invalid_argument("velocities: dt must be positive");
  const double dX0 = (next.X0 - prev.X0) / dt;
  const double dX1 = (next.X1 - prev.X1) / dt;
  const double dL = (next.L - prev.L) / dt;
  VelocityField v;
  v.values.resize(mesh.cells() + 1);
  for (std::size_t i = 0; i <= mesh.cells(); ++i) v.values[i] = (1.0 - R) * dX1 - mesh.edge(i) * dL - dX0;
  return v;
}

double sg_flux(double uL, double uR, double v, double L, double h_edge) {
  if (!(L > 0.0)) throw std::domain_error("sg_flux: width must be positive");
  if (!(h_edge > 0.0)) throw std::invalid_argument("sg_flux: edge gap must be positive");
  return detail::linearize_edge(uL, uR, v, L, h_edge).flux;
}

FluxField fluxes(const State& state, const VelocityField& v, const Mesh& mesh) {
  FluxField F;
  F.values.resize(mesh.cells() + 1);
  for (std::size_t i = 0; i <= mesh.cells(); ++i)
    F.values[i] = sg_flux(state.u[i], state.u[i + 1], v.values[i], state.L, mesh.gap(i));
  return F;
}

namespace {

void check_shapes(const State& prev, const State& cand, const Mesh& mesh) {
  if (prev.u.size() != mesh.cells() + 2 || cand.u.size() != mesh.cells() + 2)
    throw std::invalid_argument("state size does not match the mesh");
}

/// Residual in bordered row order (row k attached to u_k, then the three
/// interface rows), optionally filling the Jacobian.
Eigen::VectorXd assemble_direct(const State& prev, const State& cand, const Mesh& mesh, double dt,
                                const ModelParams& p, BorderedSystem* jac) {
  check_shapes(prev, cand, mesh);
  if (!(cand.L > 0.0)) throw std::domain_error("width collapsed: candidate L <= 0");
  const std::size_t I = mesh.cells();
  const double L = cand.L;
  const auto v = velocities(prev, cand, mesh, dt, p.R);

  std::vector<detail::EdgeTerms> edge(I + 1);
  for (std::size_t e = 0; e <= I; ++e)
    edge[e] = detail::linearize_edge(cand.u[e], cand.u[e + 1], v.values[e], L, mesh.gap(e));

  // dv/d(X0, X1, L) at edge e
  const auto dv = [&](std::size_t e) {
    return std::array<double, 3>{-1.0 / dt, (1.0 - p.R) / dt, -mesh.edge(e) / dt};
  };
  // dF_e/d(X0, X1, L)
  const auto dF_border = [&](std::size_t e) {
    const auto d = dv(e);
    return std::array<double, 3>{edge[e].d_velocity * d[0], edge[e].d_velocity * d[1],
                                 edge[e].d_width + edge[e].d_velocity * d[2]};
  };

  Eigen::VectorXd r(static_cast<Eigen::Index>(I + 5));
  r[0] = edge[0].flux - p.a + p.b * cand.u[0];
  for (std::size_t i = 1; i <= I; ++i) {
    const double h = mesh.size(i);
    r[i] = h * (L * cand.u[i] - prev.L * prev.u[i]) / dt + edge[i].flux - edge[i - 1].flux;
  }
  r[I + 1] = edge[I].flux;
  const double dX0 = (cand.X0 - prev.X0) / dt;
  const double dX1 = (cand.X1 - prev.X1) / dt;
  r[I + 2] = dX0 - p.alpha0 + p.beta0 * cand.u[0] - (1.0 - p.R) * dX1;
  r[I + 3] = dX1 + p.alpha1 - p.beta1 * cand.u[I + 1];
  r[I + 4] = cand.L - cand.X1 + cand.X0;

  if (jac == nullptr) return r;
  BorderedSystem& J = *jac;

  J.diag[0] = edge[0].d_left + p.b;
  J.upper[0] = edge[0].d_right;
  {
    const auto d = dF_border(0);
    for (int c = 0; c < 3; ++c) J.right(0, c) = d[c];
  }
  for (std::size_t i = 1; i <= I; ++i) {
    const double h = mesh.size(i);
    J.lower[i] = -edge[i - 1].d_left;
    J.diag[i] = h * L / dt + edge[i].d_left - edge[i - 1].d_right;
    J.upper[i] = edge[i].d_right;
    const auto plus = dF_border(i);
    const auto minus = dF_border(i - 1);
    for (int c = 0; c < 3; ++c) J.right(static_cast<Eigen::Index>(i), c) = plus[c] - minus[c];
    J.right(static_cast<Eigen::Index>(i), 2) += h * cand.u[i] / dt;
  }
  J.lower[I + 1] = edge[I].d_left;
  J.diag[I + 1] = edge[I].d_right;
  {
    const auto d = dF_border(I);
    for (int c = 0; c < 3; ++c) J.right(static_cast<Eigen::Index>(I + 1), c) = d[c];
  }

  J.bottom.setZero();
  J.corner.setZero();
  J.bottom(0, 0) = p.beta0;
  J.corner(0, 0) = 1.0 / dt;
  J.corner(0, 1) = -(1.0 - p.R) / dt;
  J.bottom(1, static_cast<Eigen::Index>(I + 1)) = -p.beta1;
  J.corner(1, 1) = 1.0 / dt;
  J.corner(2, 0) = 1.0;
  J.corner(2, 1) = -1.0;
  J.corner(2, 2) = 1.0;
  return r;
}

/// Bordered row k -> residual row.
std::size_t residual_row(std::size_t k, std::size_t I) {
  if (k == 0) return I;
  if (k <= I) return k - 1;
  return k;
}

Eigen::VectorXd pack(const State& s) {
  const auto n = static_cast<Eigen::Index>(s.u.size());
  Eigen::VectorXd x(n + 3);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = s.u[static_cast<std::size_t>(i)];
  x[n] = s.X0;
  x[n + 1] = s.X1;
  x[n + 2] = s.L;
  return x;
}

State unpack(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size() - 3;
  State s;
  s.u.assign(x.data(), x.data() + n);
  s.X0 = x[n];
  s.X1 = x[n + 1];
  s.L = x[n + 2];
  return s;
}

}  // namespace

Eigen::VectorXd residual(const State& prev, const State& cand, const Mesh& mesh, double dt,
                         const ModelParams& params) {
  const std::size_t I = mesh.cells();
  const Eigen::VectorXd bordered = assemble_direct(prev, cand, mesh, dt, params, nullptr);
  Eigen::VectorXd r(bordered.size());
  for (std::size_t k = 0; k < I + 5; ++k) r[static_cast<Eigen::Index>(residual_row(k, I))] = bordered[static_cast<Eigen::Index>(k)];
  return r;
}

BorderedSystem jacobian(const State& prev, const State& cand, const Mesh& mesh, double dt,
                        const ModelParams& params) {
  BorderedSystem J(mesh.cells() + 2, 3);
  assemble_direct(prev, cand, mesh, dt, params, &J);
  return J;
}

Eigen::MatrixXd dense_jacobian(const State& prev, const State& cand, const Mesh& mesh, double dt,
                               const ModelParams& params) {
  const std::size_t I = mesh.cells();
  const Eigen::MatrixXd bordered = jacobian(prev, cand, mesh, dt, params).dense();
  Eigen::MatrixXd out(bordered.rows(), bordered.cols());
  for (std::size_t k = 0; k < I + 5; ++k)
    out.row(static_cast<Eigen::Index>(residual_row(k, I))) = bordered.row(static_cast<Eigen::Index>(k));
  return out;
}

StepResult newton_step_solve(const State& prev, const Mesh& mesh, double dt, const ModelParams& params,
                             const SolverOptions& opts) {
  const std::size_t I = mesh.cells();
  const double floor = opts.floor_for(params);
  const auto n = static_cast<Eigen::Index>(I + 2);

  auto assemble = [&](const Eigen::VectorXd& x) {
    BorderedSystem J(I + 2, 3);
    Eigen::VectorXd r = assemble_direct(prev, unpack(x), mesh, dt, params, &J);
    return std::pair{std::move(r), std::move(J)};
  };
  auto admissible = [&](const Eigen::VectorXd& x) {
    if (!(x[n + 2] > floor)) return detail::Admissibility::WidthBelowFloor;
    if ((x.head(n).array() < 0.0).any()) return detail::Admissibility::NegativeConcentration;
    return detail::Admissibility::Ok;
  };

  auto outcome = detail::damped_newton(pack(prev), assemble, admissible, opts.newton_tol, opts.max_newton_iters);
  StepResult result;
  result.status = outcome.status;
  result.state = unpack(outcome.x);
  result.iterations = outcome.iterations;
  result.increment_inf = outcome.increment_inf;
  if (result.state.L > 0.0)
    result.residual_inf = residual(prev, result.state, mesh, dt, params).lpNorm<Eigen::Infinity>();
  if (result.converged() && result.state.L <= floor) result.status = SolveStatus::WidthCollapsed;
  return result;
}

StepResult solve_step(const State& prev, const Mesh& mesh, double dt, const ModelParams& params,
                      const SolverOptions& opts) {
  StepResult direct = newton_step_solve(prev, mesh, dt, params, opts);
  if (direct.converged()) return direct;
  StepResult continued = homotopy_solve(prev, mesh, dt, params, opts);
  if (continued.converged()) {
    continued.iterations += direct.iterations;
    return continued;
  }
  // Either path running into the width floor means the layer is vanishing.
  if (direct.status == SolveStatus::WidthCollapsed || continued.status == SolveStatus::WidthCollapsed) {
    continued.status = SolveStatus::WidthCollapsed;
  }
  continued.iterations += direct.iterations;
  return continued;
}

Trajectory run_from(const State& initial, const ModelParams& params, const Mesh& mesh, const TimeGrid& grid,
                    const SolverOptions& opts, std::size_t stride, const StepObserver& observer) {
  params.validate();
  opts.validate();
  if (stride == 0) throw std::invalid_argument("run: stride must be positive");
  if (initial.u.size() != mesh.cells() + 2) throw std::invalid_argument("run: initial state does not match mesh");

  Trajectory traj;
  traj.grid = grid;
  traj.states.push_back(initial);
  traj.steps.push_back(0);
  traj.reports.reserve(grid.steps());

  State current = initial;
  const double dt = grid.dt();
  for (std::size_t n = 1; n <= grid.steps(); ++n) {
    StepResult step = solve_step(current, mesh, dt, params, opts);
    if (!step.converged()) {
      traj.termination.step = n;
      if (step.status == SolveStatus::WidthCollapsed) {
        traj.termination.kind = Termination::Kind::WidthCollapsed;
        traj.termination.detail = "oxide width reached the floor at t = " + std::to_string(grid.time(n));
      } else {
        traj.termination.kind = Termination::Kind::SolverFailed;
        traj.termination.detail = "Newton and continuation failed at step " + std::to_string(n);
      }
      break;
    }
    const double closure = std::abs(step.state.L - (step.state.X1 - step.state.X0));
    if (closure > 10.0 * opts.newton_tol * std::max(1.0, std::abs(step.state.X1))) {
      traj.termination = {Termination::Kind::SolverFailed, n, "width closure violated"};
      break;
    }
    const StepReport report{step.iterations, step.residual_inf, step.used_homotopy};
    traj.reports.push_back(report);
    current = std::move(step.state);
    if (observer) observer(n, current, report);
    if (n % stride == 0 || n == grid.steps()) {
      traj.states.push_back(current);
      traj.steps.push_back(n);
    }
  }
  // Keep the last accepted level even when it falls between strides.
  if (!traj.completed() && traj.steps.back() != traj.reports.size()) {
    traj.states.push_back(current);
    traj.steps.push_back(traj.reports.size());
  }
  return traj;
}

Trajectory run(const ModelParams& params, const Mesh& mesh, const TimeGrid& grid, const SolverOptions& opts,
               InitialMode mode, std::size_t stride, const StepObserver& observer) {
  return run_from(discretize_initial(params, mesh, mode), params, mesh, grid, opts, stride, observer);
}

}  // namespace oxide
