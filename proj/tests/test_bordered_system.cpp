#include <doctest.h>

#include <random>

#include "oxide/bordered_system.hpp"

using oxide::BorderedSystem;

namespace {

BorderedSystem random_system(std::size_t core, std::size_t border, std::mt19937_64& rng, double dominance) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  BorderedSystem s(core, border);
  for (std::size_t i = 0; i < core; ++i) {
    s.lower[i] = i > 0 ? dist(rng) : 0.0;
    s.upper[i] = i + 1 < core ? dist(rng) : 0.0;
    s.diag[i] = dominance + dist(rng);
  }
  for (std::size_t i = 0; i < core; ++i)
    for (std::size_t j = 0; j < border; ++j) {
      s.right(i, j) = dist(rng);
      s.bottom(j, i) = dist(rng);
    }
  for (std::size_t i = 0; i < border; ++i)
    for (std::size_t j = 0; j < border; ++j) s.corner(i, j) = dist(rng) + (i == j ? 4.0 : 0.0);
  return s;
}

}  // namespace

TEST_CASE("dense assembly and product agree") {
  std::mt19937_64 rng(7);
  const auto s = random_system(6, 3, rng, 3.0);
  const Eigen::MatrixXd A = s.dense();
  REQUIRE(A.rows() == 9);
  CHECK(A(2, 1) == s.lower[2]);
  CHECK(A(2, 3) == s.upper[2]);
  CHECK(A(0, 2) == 0.0);
  CHECK(A(4, 7) == s.right(4, 1));
  CHECK(A(8, 5) == s.bottom(2, 5));
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(9, -1.0, 2.0);
  CHECK((A * x - s.multiply(x)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(s.inf_norm() == doctest::Approx(A.cwiseAbs().rowwise().sum().maxCoeff()));
}

TEST_CASE("structured solve matches dense LU") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t core = 2 + trial % 40;
    const auto s = random_system(core, 3, rng, 3.0);
    Eigen::VectorXd rhs = Eigen::VectorXd::Random(static_cast<Eigen::Index>(core + 3));
    const Eigen::VectorXd ref = s.dense().partialPivLu().solve(rhs);
    const auto x = s.solve_structured(rhs);
    REQUIRE(x);
    CHECK((*x - ref).cwiseAbs().maxCoeff() < 1e-10 * (1 + ref.cwiseAbs().maxCoeff()));
    CHECK((s.solve(rhs) - ref).cwiseAbs().maxCoeff() < 1e-10 * (1 + ref.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("zero pivot falls back to dense LU") {
  BorderedSystem s(2, 1);
  s.diag = {0.0, 1.0};
  s.upper = {1.0, 0.0};
  s.lower = {0.0, 1.0};
  s.right << 0.0, 0.0;
  s.bottom << 0.0, 0.0;
  s.corner << 2.0;
  CHECK_FALSE(s.solve_structured(Eigen::Vector3d(1, 2, 4)));
  const Eigen::VectorXd x = s.solve(Eigen::Vector3d(1, 2, 4));
  CHECK(x(0) == doctest::Approx(1.0));
  CHECK(x(1) == doctest::Approx(1.0));
  CHECK(x(2) == doctest::Approx(2.0));
}
