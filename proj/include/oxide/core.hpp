#pragma once

// Shared domain types: model parameters, the reference mesh of [0,1],
// one discrete time level, and trajectory storage.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace oxide {

/// Closed-form initial profile `scale * exp(rate * x) + offset`.
struct ExponentialProfile {
  double scale = 0.0;
  double rate = 0.0;
  double offset = 0.0;
  bool operator==(const ExponentialProfile&) const = default;
};

/// Piecewise-linear interpolation of samples `(x[k], values[k])`, x ascending.
struct TabulatedProfile {
  std::vector<double> x;
  std::vector<double> values;
  bool operator==(const TabulatedProfile&) const = default;
};

/// Initial concentration u_init on the physical interval [0, L0].
class InitialProfile {
 public:
  using Form = std::variant<ExponentialProfile, TabulatedProfile>;

  InitialProfile() : form_(ExponentialProfile{0.0, 0.0, 1.0}) {}
  explicit InitialProfile(Form form);

  static InitialProfile constant(double value);
  static InitialProfile exponential(double scale, double rate, double offset);
  static InitialProfile tabulated(std::vector<double> x, std::vector<double> values);

  double operator()(double x) const;

  /// Exact integral over [x0, x1] for the exponential family, nullopt otherwise.
  std::optional<double> exact_integral(double x0, double x1) const;

  /// Infimum / supremum over [0, length]. Exact for both supported forms.
  double infimum(double length) const;
  double supremum(double length) const;

  const Form& form() const { return form_; }
  bool operator==(const InitialProfile&) const = default;

 private:
  Form form_;
};

/// Kinetic constants and initial data of the oxide model.
struct ModelParams {
  double a = 1.0;
  double b = 1.0;
  double alpha0 = 1.0;
  double beta0 = 1.0;
  double alpha1 = 1.0;
  double beta1 = 1.0;
  double R = 1.0;  // Pilling-Bedworth ratio
  double L0 = 1.0;
  InitialProfile u_init;

  /// Throws std::invalid_argument unless every constant is finite and > 0.
  void validate() const;

  double intake_level() const { return a / b; }           // a/b
  double dissolution_level() const { return alpha0 / beta0; }  // alpha0/beta0
  double growth_level() const { return alpha1 / beta1; }  // alpha1/beta1

  bool operator==(const ModelParams&) const = default;
};

/// Partition of the reference interval [0,1].
///
/// Index conventions follow the finite volume layout: edges xi_{i+1/2} are
/// stored for 0 <= i <= I, centers xi_i for 0 <= i <= I+1 (with xi_0 = 0 and
/// xi_{I+1} = 1 the boundary nodes), cell sizes h_i for 1 <= i <= I at
/// position i-1, and center gaps h_{i+1/2} = xi_{i+1} - xi_i for 0 <= i <= I.
class Mesh {
 public:
  /// Throws std::invalid_argument on a malformed edge list.
  explicit Mesh(std::vector<double> edges);

  std::size_t cells() const { return sizes_.size(); }
  std::span<const double> edges() const { return edges_; }
  std::span<const double> centers() const { return centers_; }
  std::span<const double> cell_sizes() const { return sizes_; }
  std::span<const double> gaps() const { return gaps_; }

  double edge(std::size_t i) const { return edges_[i]; }
  double center(std::size_t i) const { return centers_[i]; }
  /// h_i for 1 <= i <= I.
  double size(std::size_t i) const { return sizes_[i - 1]; }
  /// h_{i+1/2} for 0 <= i <= I.
  double gap(std::size_t i) const { return gaps_[i]; }
  /// max_i h_i
  double max_size() const;

 private:
  std::vector<double> edges_;
  std::vector<double> centers_;
  std::vector<double> sizes_;
  std::vector<double> gaps_;
};

Mesh uniform_mesh(std::size_t cells);

/// Uniform time discretization t_n = n * dt, 0 <= n <= N, with N * dt = T.
class TimeGrid {
 public:
  static TimeGrid from_step(double dt, double horizon);
  static TimeGrid from_count(double horizon, std::size_t steps);

  double dt() const { return dt_; }
  std::size_t steps() const { return steps_; }
  double horizon() const { return horizon_; }
  double time(std::size_t n) const { return static_cast<double>(n) * dt_; }

  bool operator==(const TimeGrid&) const = default;

 private:
  TimeGrid(double dt, std::size_t steps, double horizon)
      : dt_(dt), steps_(steps), horizon_(horizon) {}
  double dt_;
  std::size_t steps_;
  double horizon_;
};

/// One time level: u_0..u_{I+1} (u_0 and u_{I+1} are the boundary traces),
/// the interface positions and the width L = X1 - X0.
struct State {
  std::vector<double> u;
  double X0 = 0.0;
  double X1 = 0.0;
  double L = 0.0;

  std::size_t cells() const { return u.size() - 2; }
  double left_trace() const { return u.front(); }
  double right_trace() const { return u.back(); }
};

enum class InitialMode { CellAverage, CenterSample };

/// X0 = 0, X1 = L = L0, u from u_init either by exact cell averages
/// (3-point Gauss-Legendre per cell for tabulated data) or by sampling at
/// the physical cell centers. Boundary entries are u_init(0) and u_init(L0).
State discretize_initial(const ModelParams& params, const Mesh& mesh,
                         InitialMode mode = InitialMode::CellAverage);

/// Per-step solver bookkeeping.
struct StepReport {
  int newton_iterations = 0;
  double residual_inf = 0.0;
  bool used_homotopy = false;
};

struct Termination {
  enum class Kind { Completed, WidthCollapsed, SolverFailed };
  Kind kind = Kind::Completed;
  std::size_t step = 0;  // failing step index when not Completed
  std::string detail;
};

std::string to_string(Termination::Kind kind);

/// Stored time levels. `steps[k]` is the time index of `states[k]`;
/// `reports[n-1]` describes the solve that produced level n.
struct Trajectory {
  TimeGrid grid = TimeGrid::from_count(1.0, 1);
  std::vector<State> states;
  std::vector<std::size_t> steps;
  std::vector<StepReport> reports;
  Termination termination;

  bool completed() const { return termination.kind == Termination::Kind::Completed; }
  const State& final_state() const { return states.back(); }
  /// Index of the last accepted time level.
  std::size_t last_step() const { return steps.back(); }
};

}  // namespace oxide
