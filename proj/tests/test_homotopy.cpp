#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oxide/scheme.hpp"

using namespace oxide;

namespace {

ModelParams testcase1() {
  ModelParams p;
  p.a = 1;
  p.b = 1;
  p.alpha0 = 1.5;
  p.beta0 = 1;
  p.alpha1 = 0.5;
  p.beta1 = 4;
  p.R = 2;
  p.u_init = InitialProfile::exponential(1.0, -0.5, 2.0);
  return p;
}

Eigen::VectorXd lambda_unknowns(const State& s) {
  Eigen::VectorXd z(static_cast<Eigen::Index>(s.u.size() + 2));
  for (std::size_t i = 0; i < s.u.size(); ++i) z(static_cast<Eigen::Index>(i)) = s.u[i];
  z(z.size() - 2) = s.X1;
  z(z.size() - 1) = s.L;
  return z;
}

double sup_diff(const State& a, const State& b) {
  double d = std::max({std::fabs(a.X0 - b.X0), std::fabs(a.X1 - b.X1), std::fabs(a.L - b.L)});
  for (std::size_t i = 0; i < a.u.size(); ++i) d = std::max(d, std::fabs(a.u[i] - b.u[i]));
  return d;
}

}  // namespace

TEST_CASE("starting point solves the lambda = 0 system") {
  const ModelParams p = testcase1();
  const Mesh mesh = uniform_mesh(12);
  const State prev = discretize_initial(p, mesh);
  const Eigen::VectorXd z0 = homotopy::start(prev, p);
  REQUIRE(z0.size() == 16);
  CHECK(z0(0) == 1.5);
  CHECK(z0(13) == 0.125);
  CHECK(z0(5) == prev.u[5]);
  CHECK(z0(14) == prev.X1);
  CHECK(z0(15) == prev.L);
  CHECK(homotopy::residual(prev, z0, mesh, 0.01, p, 0.0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lambda = 1 has the scheme's root") {
  const ModelParams p = testcase1();
  const Mesh mesh = uniform_mesh(12);
  const State prev = discretize_initial(p, mesh);
  const auto direct = newton_step_solve(prev, mesh, 0.01, p, {});
  REQUIRE(direct.converged());
  const auto r = homotopy::residual(prev, lambda_unknowns(direct.state), mesh, 0.01, p, 1.0);
  CHECK(r.cwiseAbs().maxCoeff() < 1e-9);
  const State back = homotopy::to_state(lambda_unknowns(direct.state));
  CHECK(back.X0 == doctest::Approx(direct.state.X0).epsilon(1e-14));
}

TEST_CASE("homotopy agrees with Newton on regular steps") {
  const ModelParams p = testcase1();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dts(1e-3, 5e-2);
  std::uniform_int_distribution<int> cells(4, 60);
  for (int k = 0; k < 8; ++k) {
    const Mesh mesh = uniform_mesh(static_cast<std::size_t>(cells(rng)));
    const double dt = dts(rng);
    const State prev = discretize_initial(p, mesh);
    const auto direct = newton_step_solve(prev, mesh, dt, p, {});
    const auto cont = homotopy_solve(prev, mesh, dt, p, {});
    REQUIRE(direct.converged());
    REQUIRE(cont.converged());
    CHECK(cont.used_homotopy);
    CHECK(cont.homotopy_steps >= 16);
    CHECK(sup_diff(direct.state, cont.state) <= 1e-9);
  }
}
