#pragma once

// Diagnostics over computed trajectories: distance to the travelling wave,
// discrete norms, the nested-mesh convergence study and post hoc checks of
// the a priori bounds.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "oxide/core.hpp"
#include "oxide/scheme.hpp"
#include "oxide/travelling_wave.hpp"

namespace oxide {

/// d = L sum_i h_i (u_i - uhat(L_hat xi_i))^2 over interior cells.
double tw_distance(const State& state, const Mesh& mesh, const TravellingWave& tw);

/// (sum_{i=1}^{I+1} (z_i - z_{i-1})^2 / h_{i-1/2} + z_0^2)^{1/2} for z of length I+2.
double h1_norm(std::span<const double> z, const Mesh& mesh);

/// L2(0,1) norm of the piecewise constant reconstruction (interior cells).
double l2_norm(std::span<const double> z, const Mesh& mesh);

struct DiscreteNorms {
  double h1 = 0.0;    // final level
  double l2h1 = 0.0;  // (sum_{n>=1} dt |z^n|_1^2)^{1/2}
  double l2 = 0.0;    // final level
};

/// Norms of the concentration along a stride-1 trajectory.
DiscreteNorms discrete_norms(const Trajectory& traj, const Mesh& mesh);

/// Coarse space-time averages of a fine trajectory. `values[n-1][i-1]` is the
/// average over (t_{n-1}, t_n] x (xi_{i-1/2}, xi_{i+1/2}) for 1 <= n <= N,
/// `X0[n-1]`, `X1[n-1]` the time averages over (t_{n-1}, t_n].
struct ProjectedField {
  std::vector<std::vector<double>> values;
  std::vector<double> X0;
  std::vector<double> X1;
};

/// Throws std::invalid_argument unless the coarse grid is nested in the fine one
/// and the fine trajectory holds every level up to the common horizon.
ProjectedField project_reference(const Trajectory& fine, const Mesh& fine_mesh, const Mesh& coarse_mesh,
                                 const TimeGrid& coarse_time);

struct LevelError {
  std::size_t level = 0;
  std::size_t cells = 0;
  std::size_t steps = 0;
  double h = 0.0;
  double dt = 0.0;
  double err_w = 0.0;
  double err_0 = 0.0;
  double err_1 = 0.0;
  std::optional<double> rate_w;  // absent on the coarsest level
  std::optional<double> rate_0;
  std::optional<double> rate_1;
};

struct ConvergenceReport {
  std::size_t reference_level = 0;
  double horizon = 0.0;
  std::vector<LevelError> levels;
};

struct StudySettings {
  std::size_t finest = 3;      // levels k = 0..finest
  std::size_t reference = 4;   // must exceed `finest`
  double horizon = 0.2;
  std::size_t base_cells = 50;  // I_k = base_cells 2^k
  std::size_t base_steps = 10;  // N_k = base_steps 4^k
  InitialMode mode = InitialMode::CellAverage;
  bool parallel = true;
};

class LevelFailure : public std::runtime_error {
 public:
  LevelFailure(std::size_t level, Termination::Kind kind, const std::string& what)
      : std::runtime_error(what), level_(level), kind_(kind) {}
  std::size_t level() const { return level_; }
  Termination::Kind kind() const { return kind_; }

 private:
  std::size_t level_;
  Termination::Kind kind_;
};

/// Runs every level and the reference, projects the reference onto each
/// level and computes errors and log-ratio rates (space for w, time for the
/// interfaces). Throws LevelFailure if any run does not complete.
ConvergenceReport convergence_study(const ModelParams& params, const StudySettings& settings,
                                    const SolverOptions& opts = {});

/// m = min(inf u_init, alpha1/beta1), M = max(sup u_init, alpha0/beta0).
struct ConcentrationBounds {
  double m = 0.0;
  double M = 0.0;
};
ConcentrationBounds linf_bounds(const ModelParams& params);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
};

/// Range of dL/dt allowed by m <= u <= M.
Interval width_rate_bounds(const ModelParams& params, double m, double M);
/// Range of dX1/dt allowed by m <= u <= M.
Interval growth_rate_bounds(const ModelParams& params, double m, double M);
/// (v_flat, v_sharp) bracketing every discrete velocity.
Interval velocity_bounds(const ModelParams& params, double m, double M);

/// T* = L0 / ((alpha0 + R alpha1) - m (beta0 + R beta1)); nullopt when the
/// denominator is not positive (no restriction).
std::optional<double> horizon_bound(const ModelParams& params, double m);

struct BoundViolation {
  std::size_t step = 0;
  std::string check;
  double value = 0.0;
  double limit = 0.0;
};

struct BoundsReport {
  ConcentrationBounds bounds;
  std::size_t steps_checked = 0;
  double max_mass_defect = 0.0;
  std::vector<BoundViolation> violations;
  bool passed() const { return violations.empty(); }
};

/// Post hoc per-step check of the maximum principle, mass balance, the width
/// bound (only when a travelling wave exists), the velocity bracket and the
/// dX1 bracket. Requires a stride-1 trajectory.
BoundsReport check_bounds(const Trajectory& traj, const Mesh& mesh, const ModelParams& params,
                          double tol = 1e-9);

/// L^n sum h_i u_i^n - L^{n-1} sum h_i u_i^{n-1} - dt (a - b u_0^n).
double mass_balance_defect(const State& prev, const State& next, const Mesh& mesh, double dt,
                           const ModelParams& params);

/// Least-squares slope of y against x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

/// Slope of log d^n over the stored levels with t_n in [t_lo, t_hi].
double log_distance_slope(const Trajectory& traj, const Mesh& mesh, const TravellingWave& tw, double t_lo,
                          double t_hi);

struct DiagnosticsRow {
  double t = 0.0;
  double X0 = 0.0;
  double X1 = 0.0;
  double L = 0.0;
  double u0 = 0.0;
  double uI1 = 0.0;
  std::optional<double> d;  // only when a travelling wave exists
  double mass_balance_defect = 0.0;
};

/// One row per stored level; the mass defect of row k is measured against the
/// previously stored level, so it is only meaningful for stride-1 trajectories.
std::vector<DiagnosticsRow> diagnostics(const Trajectory& traj, const Mesh& mesh, const ModelParams& params);

}  // namespace oxide
