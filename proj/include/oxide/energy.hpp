#pragma once

// Discrete free energies, boundary exchange bookkeeping and the bulk/boundary
// dissipation split for an arbitrary convex density phi.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "oxide/core.hpp"

namespace oxide {

struct ConvexDensity {
  std::string name;
  std::function<double(double)> phi;
  std::function<double(double)> phi_prime;
  std::function<double(double)> pi;  // r phi'(r) - phi(r)
};

namespace densities {

ConvexDensity quadratic();  // r^2 / 2
ConvexDensity quartic();    // r^4
/// Square of a softplus ramp: (eps log(1 + e^{(r-c)/eps}))^2, a C-infinity (r-c)_+^2.
ConvexDensity smoothed_ramp(double threshold = 1.0, double width = 0.05);
ConvexDensity entropy();    // r log r - r + 1, r > 0
/// (m - r)_+^3 + (r - M)_+^3: C^2, convex, zero exactly on [m, M].
ConvexDensity outside_band(double m, double M);

/// The family used by the dissipation checks: quadratic, quartic, ramp, entropy.
std::vector<ConvexDensity> builtin();

/// Looks up a built-in by name ("quadratic", "quartic", "ramp", "entropy").
ConvexDensity by_name(const std::string& name);

}  // namespace densities

/// Secant monotonicity of phi' on `samples` equispaced points of [lo, hi].
bool is_convex_on(const ConvexDensity& phi, double lo, double hi, int samples = 200);

/// H = sum_{i=1}^I L h_i phi(u_i).
double free_energy(const State& state, const Mesh& mesh, const ConvexDensity& phi);

struct LedgerEntry {
  std::size_t n = 0;
  double t = 0.0;
  double H = 0.0;
  double H_tot = 0.0;
  double D_bulk = 0.0;
  double D_bound = 0.0;
};

/// Running H^{tot,n} with the three boundary exchange sums
///   S0 = sum_k dt (alpha0 - beta0 u_0^k), Sa = sum_k dt (a - b u_0^k), S1 = sum_k dt (alpha1 - beta1 u_{I+1}^k),
/// H^{tot,n} = H^n - pi(alpha0/beta0) S0 - phi'(a/b) Sa - R pi(alpha1/beta1) S1.
struct EnergyLedger {
  ConvexDensity phi;
  ModelParams params;
  double dissolution_sum = 0.0;
  double intake_sum = 0.0;
  double growth_sum = 0.0;
  std::vector<LedgerEntry> entries;
};

/// Ledger holding level 0 (H^{tot,0} = H^0).
EnergyLedger start_ledger(const State& initial, const Mesh& mesh, const ConvexDensity& phi,
                          const ModelParams& params);

/// Adds step n's exchanges and appends H^n, H^{tot,n}. Dissipation fields
/// of the new entry are left at zero; see `energy_ledger` for the full replay.
EnergyLedger total_free_energy_increment(EnergyLedger ledger, const State& state_n, const Mesh& mesh, double dt);

/// theta_{i+1/2} in [0,1] with pi(u_{i+1}) - pi(u_i) = (theta u_i + (1-theta) u_{i+1}) (phi'(u_{i+1}) - phi'(u_i)).
double mean_value_theta(double ui, double uj, const ConvexDensity& phi);

struct DissipationSplit {
  double bulk = 0.0;
  double boundary = 0.0;
};

DissipationSplit dissipation_split(const State& prev, const State& next, const Mesh& mesh, double dt,
                                   const ModelParams& params, const ConvexDensity& phi);

/// Replays a stored trajectory (stride 1) into a complete ledger.
EnergyLedger energy_ledger(const Trajectory& traj, const Mesh& mesh, const ModelParams& params,
                           const ConvexDensity& phi);

/// Largest value of (H^{tot,n} - H^{tot,n-1}) / dt + D_bulk + D_bound over the ledger.
double max_dissipation_defect(const EnergyLedger& ledger, double dt);

}  // namespace oxide
