#include "oxide/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "oxide/bernoulli.hpp"
#include "oxide/scheme.hpp"

namespace oxide {

namespace densities {

ConvexDensity quadratic() {
  return {"quadratic", [](double r) { return 0.5 * r * r; }, [](double r) { return r; },
          [](double r) { return 0.5 * r * r; }};
}

ConvexDensity quartic() {
  return {"quartic", [](double r) { return r * r * r * r; }, [](double r) { return 4.0 * r * r * r; },
          [](double r) { return 3.0 * r * r * r * r; }};
}

ConvexDensity smoothed_ramp(double threshold, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("smoothed_ramp: width must be positive");
  // softplus s(r) = width * log(1 + exp((r - threshold) / width)), s' = logistic
  auto ramp = [=](double r) {
    const double x = (r - threshold) / width;
    return x > 0.0 ? width * (x + std::log1p(std::exp(-x))) : width * std::log1p(std::exp(x));
  };
  auto slope = [=](double r) {
    const double x = (r - threshold) / width;
    return x > 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  };
  auto phi = [=](double r) {
    const double s = ramp(r);
    return s * s;
  };
  auto phi_prime = [=](double r) { return 2.0 * ramp(r) * slope(r); };
  auto pi = [=](double r) { return r * phi_prime(r) - phi(r); };
  return {"ramp", phi, phi_prime, pi};
}

ConvexDensity entropy() {
  auto guard = [](double r) {
    if (!(r > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return r;
  };
  return {"entropy", [=](double r) { r = guard(r); return r * std::log(r) - r + 1.0; },
          [=](double r) { return std::log(guard(r)); }, [=](double r) { return guard(r) - 1.0; }};
}

ConvexDensity outside_band(double m, double M) {
  if (!(m <= M)) throw std::invalid_argument("outside_band: need m <= M");
  auto phi = [=](double r) {
    const double below = std::max(m - r, 0.0);
    const double above = std::max(r - M, 0.0);
    return below * below * below + above * above * above;
  };
  auto phi_prime = [=](double r) {
    const double below = std::max(m - r, 0.0);
    const double above = std::max(r - M, 0.0);
    return 3.0 * (above * above - below * below);
  };
  auto pi = [=](double r) { return r * phi_prime(r) - phi(r); };
  return {"outside_band", phi, phi_prime, pi};
}

std::vector<ConvexDensity> builtin() { return {quadratic(), quartic(), smoothed_ramp(), entropy()}; }

ConvexDensity by_name(const std::string& name) {
  for (auto& d : builtin())
    if (d.name == name) return d;
  throw std::invalid_argument("unknown energy density '" + name + "' (expected quadratic, quartic, ramp, entropy)");
}

}  // namespace densities

bool is_convex_on(const ConvexDensity& phi, double lo, double hi, int samples) {
  double previous = phi.phi_prime(lo);
  for (int k = 1; k <= samples; ++k) {
    const double r = lo + (hi - lo) * k / samples;
    const double current = phi.phi_prime(r);
    if (current < previous - 1e-12 * std::max(1.0, std::abs(previous))) return false;
    previous = current;
  }
  return true;
}

double free_energy(const State& state, const Mesh& mesh, const ConvexDensity& phi) {
  double acc = 0.0;
  for (std::size_t i = 1; i <= mesh.cells(); ++i) acc += mesh.size(i) * phi.phi(state.u[i]);
  return state.L * acc;
}

namespace {

double total_energy(const EnergyLedger& ledger, double H) {
  const auto& p = ledger.params;
  const auto& phi = ledger.phi;
  // The exchange sums enter with a minus sign: this is the orientation under
  // which H_tot + sum dt D telescopes, and it agrees with X1 - X1(0) = -growth_sum.
  return H - phi.pi(p.dissolution_level()) * ledger.dissolution_sum -
         phi.phi_prime(p.intake_level()) * ledger.intake_sum -
         p.R * phi.pi(p.growth_level()) * ledger.growth_sum;
}

}  // namespace

EnergyLedger start_ledger(const State& initial, const Mesh& mesh, const ConvexDensity& phi,
                          const ModelParams& params) {
  EnergyLedger ledger{phi, params, 0.0, 0.0, 0.0, {}};
  const double H = free_energy(initial, mesh, phi);
  ledger.entries.push_back({0, 0.0, H, H, 0.0, 0.0});
  return ledger;
}

EnergyLedger total_free_energy_increment(EnergyLedger ledger, const State& state_n, const Mesh& mesh, double dt) {
  const auto& p = ledger.params;
  ledger.dissolution_sum += dt * (p.alpha0 - p.beta0 * state_n.left_trace());
  ledger.intake_sum += dt * (p.a - p.b * state_n.left_trace());
  ledger.growth_sum += dt * (p.alpha1 - p.beta1 * state_n.right_trace());
  const std::size_t n = ledger.entries.empty() ? 1 : ledger.entries.back().n + 1;
  const double H = free_energy(state_n, mesh, ledger.phi);
  ledger.entries.push_back({n, static_cast<double>(n) * dt, H, total_energy(ledger, H), 0.0, 0.0});
  return ledger;
}

double mean_value_theta(double ui, double uj, const ConvexDensity& phi) {
  constexpr double kDegenerate = 1e-13;
  const double dphi = phi.phi_prime(uj) - phi.phi_prime(ui);
  const double du = ui - uj;
  if (std::abs(dphi) <= kDegenerate || std::abs(du) <= kDegenerate) return 0.5;
  const double dpi = phi.pi(uj) - phi.pi(ui);
  const double theta = (dpi / dphi - uj) / du;
  if (!std::isfinite(theta)) return 0.5;
  return std::clamp(theta, 0.0, 1.0);
}

DissipationSplit dissipation_split(const State& prev, const State& next, const Mesh& mesh, double dt,
                                   const ModelParams& params, const ConvexDensity& phi) {
  const std::size_t I = mesh.cells();
  const auto v = velocities(prev, next, mesh, dt, params.R);
  const auto& u = next.u;

  DissipationSplit out;
  for (std::size_t e = 0; e <= I; ++e) {
    const double scale = next.L * mesh.gap(e);
    const double w = scale * v.values[e];
    const double theta = mean_value_theta(u[e], u[e + 1], phi);
    const double weight = bernoulli(w) * theta + bernoulli(-w) * (1.0 - theta);
    out.bulk += weight * (phi.phi_prime(u[e + 1]) - phi.phi_prime(u[e])) / scale * (u[e + 1] - u[e]);
  }

  const double u0 = next.left_trace();
  const double u1 = next.right_trace();
  const auto& p = params;
  out.boundary = (p.beta0 * u0 - p.alpha0) * (phi.pi(u0) - phi.pi(p.dissolution_level())) +
                 (p.b * u0 - p.a) * (phi.phi_prime(u0) - phi.phi_prime(p.intake_level())) +
                 p.R * (p.beta1 * u1 - p.alpha1) * (phi.pi(u1) - phi.pi(p.growth_level()));
  return out;
}

EnergyLedger energy_ledger(const Trajectory& traj, const Mesh& mesh, const ModelParams& params,
                           const ConvexDensity& phi) {
  for (std::size_t k = 0; k < traj.steps.size(); ++k)
    if (traj.steps[k] != k) throw std::invalid_argument("energy_ledger: trajectory must store every level");
  const double dt = traj.grid.dt();
  EnergyLedger ledger = start_ledger(traj.states.front(), mesh, phi, params);
  for (std::size_t n = 1; n < traj.states.size(); ++n) {
    ledger = total_free_energy_increment(std::move(ledger), traj.states[n], mesh, dt);
    const auto split = dissipation_split(traj.states[n - 1], traj.states[n], mesh, dt, params, phi);
    ledger.entries.back().D_bulk = split.bulk;
    ledger.entries.back().D_bound = split.boundary;
  }
  return ledger;
}

double max_dissipation_defect(const EnergyLedger& ledger, double dt) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n < ledger.entries.size(); ++n) {
    const auto& e = ledger.entries[n];
    const double rate = (e.H_tot - ledger.entries[n - 1].H_tot) / dt;
    worst = std::max(worst, rate + e.D_bulk + e.D_bound);
  }
  return worst;
}

}  // namespace oxide
