// Continuation solver for one time step.
//
// For lambda in [0,1] the system
//   (lambda (L - L') u_i + L' (u_i - u_i')) h_i / dt + lambda (F_{i+1/2} - F_{i-1/2}) = 0
//   lambda (F_{1/2} - a + b u_0) + (1 - lambda) (beta0 u_0 - alpha0)            = 0
//   lambda F_{I+1/2} + (1 - lambda) (alpha1 - beta1 u_{I+1})                   = 0
//   R dX1 - dL - alpha0 + beta0 u_0                                             = 0
//   dX1 + alpha1 - beta1 u_{I+1}                                                = 0
// with v_{i+1/2} = -R dX1 xi_{i+1/2} + (1 - xi_{i+1/2}) (beta0 u_0 - alpha0)
// is linear and explicitly solvable at lambda = 0 and coincides with the
// scheme at lambda = 1. The relaxation on the right boundary is oriented so
// that a trace above alpha1/beta1 drives an outflow, mirroring the left
// boundary; the opposite orientation turns the boundary into a source and the
// path leaves the positive cone for small lambda.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "edge_terms.hpp"
#include "newton.hpp"
#include "oxide/scheme.hpp"

namespace oxide {

namespace {

// Bordered layout: core = (u_1, ..., u_{I+1}), border = (u_0, X1, L).
// Public layout:   (u_0, ..., u_{I+1}, X1, L).

Eigen::VectorXd to_bordered(const Eigen::VectorXd& y, std::size_t I) {
  const auto n = static_cast<Eigen::Index>(I);
  Eigen::VectorXd z(n + 4);
  z.head(n + 1) = y.segment(1, n + 1);
  z[n + 1] = y[0];
  z[n + 2] = y[n + 2];
  z[n + 3] = y[n + 3];
  return z;
}

Eigen::VectorXd from_bordered(const Eigen::VectorXd& z, std::size_t I) {
  const auto n = static_cast<Eigen::Index>(I);
  Eigen::VectorXd y(n + 4);
  y[0] = z[n + 1];
  y.segment(1, n + 1) = z.head(n + 1);
  y[n + 2] = z[n + 2];
  y[n + 3] = z[n + 3];
  return y;
}

/// Residual in bordered row order: cell balances, right flux, then
/// (left flux, X0 motion, X1 motion).
Eigen::VectorXd assemble_homotopy(const State& prev, const Eigen::VectorXd& z, const Mesh& mesh, double dt,
                                  const ModelParams& p, double lambda, BorderedSystem* jac) {
  const std::size_t I = mesh.cells();
  const auto n = static_cast<Eigen::Index>(I);
  const double u0 = z[n + 1];
  const double X1 = z[n + 2];
  const double L = z[n + 3];
  if (!(L > 0.0)) throw std::domain_error("width collapsed: candidate L <= 0");
  const auto u = [&](std::size_t i) { return i == 0 ? u0 : z[static_cast<Eigen::Index>(i - 1)]; };

  const double dX1 = (X1 - prev.X1) / dt;
  const double dL = (L - prev.L) / dt;
  const double dissolution = p.beta0 * u0 - p.alpha0;

  std::vector<detail::EdgeTerms> edge(I + 1);
  std::vector<std::array<double, 3>> border(I + 1);  // dF_e/d(u_0, X1, L)
  for (std::size_t e = 0; e <= I; ++e) {
    const double xi = mesh.edge(e);
    const double v = -p.R * dX1 * xi + (1.0 - xi) * dissolution;
    edge[e] = detail::linearize_edge(u(e), u(e + 1), v, L, mesh.gap(e));
    border[e] = {edge[e].d_velocity * (1.0 - xi) * p.beta0 + (e == 0 ? edge[e].d_left : 0.0),
                 edge[e].d_velocity * (-p.R * xi / dt), edge[e].d_width};
  }

  Eigen::VectorXd r(n + 4);
  for (std::size_t i = 1; i <= I; ++i) {
    const double h = mesh.size(i);
    r[static_cast<Eigen::Index>(i - 1)] =
        (lambda * (L - prev.L) * u(i) + prev.L * (u(i) - prev.u[i])) * h / dt +
        lambda * (edge[i].flux - edge[i - 1].flux);
  }
  r[n] = lambda * edge[I].flux + (1.0 - lambda) * (p.alpha1 - p.beta1 * u(I + 1));
  r[n + 1] = lambda * (edge[0].flux - p.a + p.b * u0) + (1.0 - lambda) * dissolution;
  r[n + 2] = p.R * dX1 - dL - p.alpha0 + p.beta0 * u0;
  r[n + 3] = dX1 + p.alpha1 - p.beta1 * u(I + 1);

  if (jac == nullptr) return r;
  BorderedSystem& J = *jac;
  J.bottom.setZero();
  J.corner.setZero();

  for (std::size_t i = 1; i <= I; ++i) {
    const auto c = static_cast<Eigen::Index>(i - 1);
    const double h = mesh.size(i);
    J.diag[c] = (lambda * (L - prev.L) + prev.L) * h / dt + lambda * (edge[i].d_left - edge[i - 1].d_right);
    if (i >= 2) J.lower[c] = -lambda * edge[i - 1].d_left;
    J.upper[c] = lambda * edge[i].d_right;
    for (int k = 0; k < 3; ++k) J.right(c, k) = lambda * (border[i][k] - border[i - 1][k]);
    J.right(c, 2) += lambda * u(i) * h / dt;
  }
  J.lower[n] = lambda * edge[I].d_left;
  J.diag[n] = lambda * edge[I].d_right - (1.0 - lambda) * p.beta1;
  for (int k = 0; k < 3; ++k) J.right(n, k) = lambda * border[I][k];

  J.bottom(0, 0) = lambda * edge[0].d_right;
  J.corner(0, 0) = lambda * (border[0][0] + p.b) + (1.0 - lambda) * p.beta0;
  J.corner(0, 1) = lambda * border[0][1];
  J.corner(0, 2) = lambda * border[0][2];

  J.corner(1, 0) = p.beta0;
  J.corner(1, 1) = p.R / dt;
  J.corner(1, 2) = -1.0 / dt;

  J.bottom(2, n) = -p.beta1;
  J.corner(2, 1) = 1.0 / dt;
  return r;
}

}  // namespace

namespace homotopy {

Eigen::VectorXd start(const State& prev, const ModelParams& params) {
  const auto m = static_cast<Eigen::Index>(prev.u.size());
  Eigen::VectorXd y(m + 2);
  for (Eigen::Index i = 0; i < m; ++i) y[i] = prev.u[static_cast<std::size_t>(i)];
  y[0] = params.dissolution_level();
  y[m - 1] = params.growth_level();
  y[m] = prev.X1;
  y[m + 1] = prev.L;
  return y;
}

Eigen::VectorXd residual(const State& prev, const Eigen::VectorXd& unknowns, const Mesh& mesh, double dt,
                         const ModelParams& params, double lambda) {
  const std::size_t I = mesh.cells();
  if (unknowns.size() != static_cast<Eigen::Index>(I + 4))
    throw std::invalid_argument("homotopy residual: unknown vector has the wrong size");
  const Eigen::VectorXd rb = assemble_homotopy(prev, to_bordered(unknowns, I), mesh, dt, params, lambda, nullptr);
  const auto n = static_cast<Eigen::Index>(I);
  Eigen::VectorXd r(n + 4);
  r.head(n) = rb.head(n);
  r[n] = rb[n + 1];      // left flux
  r[n + 1] = rb[n];      // right flux
  r[n + 2] = rb[n + 2];
  r[n + 3] = rb[n + 3];
  return r;
}

State to_state(const Eigen::VectorXd& unknowns) {
  const Eigen::Index m = unknowns.size() - 2;
  State s;
  s.u.assign(unknowns.data(), unknowns.data() + m);
  s.X1 = unknowns[m];
  s.L = unknowns[m + 1];
  s.X0 = s.X1 - s.L;
  return s;
}

}  // namespace homotopy

StepResult homotopy_solve(const State& prev, const Mesh& mesh, double dt, const ModelParams& params,
                          const SolverOptions& opts) {
  const std::size_t I = mesh.cells();
  const auto n = static_cast<Eigen::Index>(I);
  const double floor = opts.floor_for(params);

  auto admissible = [&](const Eigen::VectorXd& z) {
    if (!(z[n + 3] > floor)) return detail::Admissibility::WidthBelowFloor;
    if ((z.head(n + 2).array() < 0.0).any()) return detail::Admissibility::NegativeConcentration;
    return detail::Admissibility::Ok;
  };

  StepResult result;
  result.used_homotopy = true;
  bool hit_floor = false;
  const Eigen::VectorXd z0 = to_bordered(homotopy::start(prev, params), I);

  for (int steps = opts.homotopy_steps; steps <= opts.max_homotopy_steps; steps *= 2) {
    Eigen::VectorXd z = z0;
    bool path_ok = true;
    for (int k = 1; k <= steps; ++k) {
      const double lambda = static_cast<double>(k) / static_cast<double>(steps);
      auto assemble = [&](const Eigen::VectorXd& x) {
        BorderedSystem J(I + 1, 3);
        Eigen::VectorXd r = assemble_homotopy(prev, x, mesh, dt, params, lambda, &J);
        return std::pair{std::move(r), std::move(J)};
      };
      auto outcome = detail::damped_newton(z, assemble, admissible, opts.newton_tol, opts.max_newton_iters);
      result.iterations += outcome.iterations;
      if (outcome.status != SolveStatus::Converged) {
        hit_floor = hit_floor || outcome.status == SolveStatus::WidthCollapsed;
        path_ok = false;
        break;
      }
      z = std::move(outcome.x);
      result.increment_inf = outcome.increment_inf;
    }
    if (path_ok) {
      result.status = SolveStatus::Converged;
      result.state = homotopy::to_state(from_bordered(z, I));
      result.homotopy_steps = steps;
      result.residual_inf = oxide::residual(prev, result.state, mesh, dt, params).lpNorm<Eigen::Infinity>();
      return result;
    }
  }
  result.status = hit_floor ? SolveStatus::WidthCollapsed : SolveStatus::NoConvergence;
  result.state = prev;
  return result;
}

}  // namespace oxide
