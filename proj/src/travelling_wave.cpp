#include "oxide/travelling_wave.hpp"

#include <algorithm>
#include <cmath>

namespace oxide {

namespace {

double scale_of(double x, double y) { return std::max(std::abs(x), std::abs(y)); }

bool nearly_equal(double x, double y, double tol) { return std::abs(x - y) <= tol * scale_of(x, y); }

bool clearly_less(double x, double y, double tol) { return y - x > tol * scale_of(x, y); }

}  // namespace

double TravellingWave::profile(double y) const { return level * std::exp(-R * c_hat * y); }

RegimeClassification classify(const ModelParams& params, double tol) {
  params.validate();
  const double level = params.intake_level();
  const double dissolution = params.dissolution_level();
  const double growth = params.growth_level();
  const double mixed = (params.alpha0 + params.R * params.alpha1) / (params.beta0 + params.R * params.beta1);

  RegimeClassification out;
  out.level = level;

  if (nearly_equal(level, dissolution, tol) && nearly_equal(dissolution, growth, tol)) {
    out.regime = RegimeClassification::Regime::EquilibriumContinuum;
    out.wave = TravellingWave{level, 0.0, params.L0, params.R};
    return out;
  }

  const bool direct = clearly_less(mixed, level, tol) && clearly_less(level, dissolution, tol);
  const bool reversed = clearly_less(level, mixed, tol) && clearly_less(dissolution, level, tol);
  if (!direct && !reversed) return out;

  const double c_hat = (params.alpha0 - params.beta0 * level) / params.R;
  const double endpoint_ratio = params.b / (params.beta1 * params.a) * (params.alpha1 + c_hat);
  const double L_hat = -std::log(endpoint_ratio) / (params.R * c_hat);
  if (!(L_hat > 0.0) || !std::isfinite(L_hat)) return out;

  out.regime = RegimeClassification::Regime::UniqueWave;
  out.wave = TravellingWave{level, c_hat, L_hat, params.R};
  return out;
}

std::vector<double> wave_profile_on_mesh(const TravellingWave& tw, const Mesh& mesh) {
  const auto centers = mesh.centers();
  std::vector<double> u(centers.size());
  std::transform(centers.begin(), centers.end(), u.begin(), [&](double xi) { return tw.rescaled(xi); });
  return u;
}

State wave_state(const TravellingWave& tw, const Mesh& mesh, double t) {
  State s;
  s.u = wave_profile_on_mesh(tw, mesh);
  s.X0 = tw.c_hat * t;
  s.X1 = tw.L_hat + tw.c_hat * t;
  s.L = tw.L_hat;
  return s;
}

}  // namespace oxide
