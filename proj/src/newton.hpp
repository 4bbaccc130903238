#pragma once

// Damped Newton iteration shared by the direct and the continuation solvers.

#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "oxide/bordered_system.hpp"
#include "oxide/scheme.hpp"

namespace oxide::detail {

enum class Admissibility { Ok, NegativeConcentration, WidthBelowFloor };

struct NewtonOutcome {
  Eigen::VectorXd x;
  SolveStatus status = SolveStatus::NoConvergence;
  int iterations = 0;
  double increment_inf = 0.0;
};

constexpr int kMaxHalvings = 30;

/// `assemble(x)` returns {residual, jacobian}; `admissible(x)` screens candidates.
template <class Assemble, class Admissible>
NewtonOutcome damped_newton(Eigen::VectorXd x, Assemble&& assemble, Admissible&& admissible, double tol,
                            int max_iters) {
  NewtonOutcome out;
  for (int iter = 1; iter <= max_iters; ++iter) {
    out.iterations = iter;
    auto [r, J] = assemble(x);
    if (!r.allFinite()) break;
    const Eigen::VectorXd dx = J.solve(-r);
    if (!dx.allFinite()) break;

    double step = 1.0;
    Admissibility verdict = Admissibility::Ok;
    Eigen::VectorXd cand;
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
      cand = x + step * dx;
      verdict = admissible(cand);
      if (verdict == Admissibility::Ok) break;
      step *= 0.5;
    }
    if (verdict != Admissibility::Ok) {
      out.x = std::move(x);
      out.status = verdict == Admissibility::WidthBelowFloor ? SolveStatus::WidthCollapsed
                                                             : SolveStatus::NoConvergence;
      return out;
    }
    out.increment_inf = step * dx.lpNorm<Eigen::Infinity>();
    x = std::move(cand);
    if (step == 1.0 && out.increment_inf <= tol) {
      out.x = std::move(x);
      out.status = SolveStatus::Converged;
      return out;
    }
  }
  out.x = std::move(x);
  out.status = SolveStatus::NoConvergence;
  return out;
}

}  // namespace oxide::detail
