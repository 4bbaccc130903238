#pragma once

#include <optional>
#include <vector>

#include "oxide/core.hpp"

namespace oxide {

/// Rigidly translating solution: X0(t) = c t, X1(t) = L + c t and
/// u(t, x) = level * exp(-R c (x - c t)) on [X0(t), X1(t)].
struct TravellingWave {
  double level = 1.0;   // a/b, the trace at the left interface
  double c_hat = 0.0;   // speed
  double L_hat = 1.0;   // width
  double R = 1.0;

  /// Profile in the wave frame, y in [0, L_hat].
  double profile(double y) const;
  /// Profile rescaled onto the reference interval: profile(L_hat * xi).
  double rescaled(double xi) const { return profile(L_hat * xi); }
};

struct RegimeClassification {
  enum class Regime { UniqueWave, EquilibriumContinuum, NoWave };
  Regime regime = Regime::NoWave;
  /// Present for UniqueWave; for EquilibriumContinuum it holds the c_hat = 0
  /// representative of width L0 (any positive width is admissible).
  std::optional<TravellingWave> wave;
  double level = 0.0;  // a/b
};

constexpr double kRegimeTolerance = 1e-12;

/// Sorts parameters into the three regimes. Strict inequalities must hold by
/// a relative margin `tol`; equalities are accepted within `tol`.
RegimeClassification classify(const ModelParams& params, double tol = kRegimeTolerance);

/// (a/b) exp(-R c_hat L_hat xi_i) for 0 <= i <= I+1.
std::vector<double> wave_profile_on_mesh(const TravellingWave& tw, const Mesh& mesh);

/// Center-sampled wave at time t: X0 = c t, X1 = L_hat + c t.
State wave_state(const TravellingWave& tw, const Mesh& mesh, double t);

}  // namespace oxide
