#pragma once

// Implicit ALE finite volume scheme with Scharfetter-Gummel fluxes.
//
// Per time step the unknowns are (u_0, ..., u_{I+1}, X0, X1, L) and the
// residual stacks, in this order:
//   [0, I)   cell balances   h_i (L u_i - L' u_i') / dt + F_{i+1/2} - F_{i-1/2}
//   I        left flux       F_{1/2} - a + b u_0
//   I+1      right flux      F_{I+1/2}
//   I+2      X0 motion       dX0 - alpha0 + beta0 u_0 - (1-R) dX1
//   I+3      X1 motion       dX1 + alpha1 - beta1 u_{I+1}
//   I+4      width closure   L - X1 + X0
// where primes denote the previous level and dF = (F - F') / dt.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "oxide/bordered_system.hpp"
#include "oxide/core.hpp"

namespace oxide {

struct SolverOptions {
  double newton_tol = 1e-10;  // sup-norm of the Newton increment
  int max_newton_iters = 50;
  int homotopy_steps = 16;
  int max_homotopy_steps = 1024;
  std::optional<double> width_floor;  // absolute; 1e-8 * L0 when unset

  double floor_for(const ModelParams& params) const;
  void validate() const;
  bool operator==(const SolverOptions&) const = default;
};

/// v_{i+1/2}, 0 <= i <= I.
struct VelocityField {
  std::vector<double> values;
};

/// F_{i+1/2}, 0 <= i <= I.
struct FluxField {
  std::vector<double> values;
};

/// v_{i+1/2} = (1-R) dX1 - xi_{i+1/2} dL - dX0.
VelocityField velocities(const State& prev, const State& next, const Mesh& mesh, double dt, double R);

/// Scharfetter-Gummel flux (B(-w) uL - B(w) uR) / (L h) with w = L h v.
double sg_flux(double uL, double uR, double v, double L, double h_edge);

FluxField fluxes(const State& state, const VelocityField& v, const Mesh& mesh);

constexpr std::size_t residual_size(std::size_t cells) { return cells + 5; }

/// Throws std::domain_error when cand.L <= 0 (width collapse).
Eigen::VectorXd residual(const State& prev, const State& cand, const Mesh& mesh, double dt,
                         const ModelParams& params);

/// Analytic Jacobian in bordered form: the core rows/columns are the
/// concentrations u_0..u_{I+1} (core row k is the equation attached to u_k:
/// left flux, cell balance, right flux), the border is (X0, X1, L) with rows
/// (X0 motion, X1 motion, width closure).
BorderedSystem jacobian(const State& prev, const State& cand, const Mesh& mesh, double dt,
                        const ModelParams& params);

/// Same matrix, dense, rows in residual order and columns (u_0..u_{I+1}, X0, X1, L).
Eigen::MatrixXd dense_jacobian(const State& prev, const State& cand, const Mesh& mesh, double dt,
                               const ModelParams& params);

enum class SolveStatus { Converged, NoConvergence, WidthCollapsed };

struct StepResult {
  SolveStatus status = SolveStatus::NoConvergence;
  State state;
  int iterations = 0;         // Newton iterations (summed over the path for homotopy)
  double increment_inf = 0.0;
  double residual_inf = 0.0;  // scheme residual at `state`
  bool used_homotopy = false;
  int homotopy_steps = 0;     // lambda increments of the successful path

  bool converged() const { return status == SolveStatus::Converged; }
};

/// Damped Newton from `prev`. Steps are halved (at most 30 times) while the
/// candidate has L <= width floor or a negative concentration.
StepResult newton_step_solve(const State& prev, const Mesh& mesh, double dt, const ModelParams& params,
                             const SolverOptions& opts);

/// Continuation in lambda from the explicitly solvable system (lambda = 0)
/// to the scheme (lambda = 1), Newton-correcting at each increment and
/// doubling the increment count on failure.
StepResult homotopy_solve(const State& prev, const Mesh& mesh, double dt, const ModelParams& params,
                          const SolverOptions& opts);

/// Newton, then homotopy when Newton fails.
StepResult solve_step(const State& prev, const Mesh& mesh, double dt, const ModelParams& params,
                      const SolverOptions& opts);

// The lambda-system works on (u_0, ..., u_{I+1}, X1, L); X0 = X1 - L afterwards.
namespace homotopy {

/// u_i = u_i' inside, u_0 = alpha0/beta0, u_{I+1} = alpha1/beta1, X1 = X1', L = L'.
Eigen::VectorXd start(const State& prev, const ModelParams& params);

/// Residual of the lambda-system, rows (cell balances, left, right, X0 motion, X1 motion).
Eigen::VectorXd residual(const State& prev, const Eigen::VectorXd& unknowns, const Mesh& mesh, double dt,
                         const ModelParams& params, double lambda);

State to_state(const Eigen::VectorXd& unknowns);

}  // namespace homotopy

using StepObserver = std::function<void(std::size_t step, const State& state, const StepReport& report)>;

/// Time loop over the grid from the discretized initial data. Stops early on
/// width collapse or solver failure; stores every `stride`-th level plus the last.
Trajectory run(const ModelParams& params, const Mesh& mesh, const TimeGrid& grid, const SolverOptions& opts,
               InitialMode mode = InitialMode::CellAverage, std::size_t stride = 1,
               const StepObserver& observer = {});

Trajectory run_from(const State& initial, const ModelParams& params, const Mesh& mesh, const TimeGrid& grid,
                    const SolverOptions& opts, std::size_t stride = 1, const StepObserver& observer = {});

}  // namespace oxide
