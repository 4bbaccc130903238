#include "oxide/bordered_system.hpp"

#include <algorithm>
#include <cmath>

namespace oxide {

namespace {
constexpr double kPivotTolerance = 1e-6;
}

BorderedSystem::BorderedSystem(std::size_t core, std::size_t border)
    : lower(core, 0.0),
      diag(core, 0.0),
      upper(core, 0.0),
      right(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(core), static_cast<Eigen::Index>(border))),
      bottom(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(border), static_cast<Eigen::Index>(core))),
      corner(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(border), static_cast<Eigen::Index>(border))) {}

Eigen::MatrixXd BorderedSystem::dense() const {
  const auto m = static_cast<Eigen::Index>(core());
  const auto k = static_cast<Eigen::Index>(border());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m + k, m + k);
  for (Eigen::Index i = 0; i < m; ++i) {
    M(i, i) = diag[i];
    if (i > 0) M(i, i - 1) = lower[i];
    if (i + 1 < m) M(i, i + 1) = upper[i];
  }
  M.topRightCorner(m, k) = right;
  M.bottomLeftCorner(k, m) = bottom;
  M.bottomRightCorner(k, k) = corner;
  return M;
}

double BorderedSystem::inf_norm() const {
  const auto m = static_cast<Eigen::Index>(core());
  double norm = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double row = std::abs(diag[i]) + right.row(i).cwiseAbs().sum();
    if (i > 0) row += std::abs(lower[i]);
    if (i + 1 < m) row += std::abs(upper[i]);
    norm = std::max(norm, row);
  }
  for (Eigen::Index j = 0; j < corner.rows(); ++j)
    norm = std::max(norm, bottom.row(j).cwiseAbs().sum() + corner.row(j).cwiseAbs().sum());
  return norm;
}

Eigen::VectorXd BorderedSystem::multiply(const Eigen::VectorXd& x) const {
  const auto m = static_cast<Eigen::Index>(core());
  const auto k = static_cast<Eigen::Index>(border());
  Eigen::VectorXd y(m + k);
  const auto xc = x.head(m);
  const auto xb = x.tail(k);
  for (Eigen::Index i = 0; i < m; ++i) {
    double acc = diag[i] * xc[i];
    if (i > 0) acc += lower[i] * xc[i - 1];
    if (i + 1 < m) acc += upper[i] * xc[i + 1];
    y[i] = acc;
  }
  y.head(m) += right * xb;
  y.tail(k) = bottom * xc + corner * xb;
  return y;
}

std::optional<Eigen::VectorXd> BorderedSystem::solve_structured(const Eigen::VectorXd& rhs) const {
  const auto m = static_cast<Eigen::Index>(core());
  const auto k = static_cast<Eigen::Index>(border());

  // Columns: [f_core | B], solved together against A.
  Eigen::MatrixXd cols(m, k + 1);
  cols.col(0) = rhs.head(m);
  cols.rightCols(k) = right;

  // Thomas elimination, forward sweep.
  std::vector<double> pivot(diag.size());
  // A pivot that is tiny against its row signals an indefinite core (the
  // continuation rows can change sign); leave those to the pivoted solver.
  auto weak = [&](Eigen::Index i) {
    const double row = std::abs(diag[i]) + (i > 0 ? std::abs(lower[i]) : 0.0) + (i + 1 < m ? std::abs(upper[i]) : 0.0);
    return !(std::abs(pivot[i]) > kPivotTolerance * row);
  };
  pivot[0] = diag[0];
  if (weak(0)) return std::nullopt;
  for (Eigen::Index i = 1; i < m; ++i) {
    const double factor = lower[i] / pivot[i - 1];
    pivot[i] = diag[i] - factor * upper[i - 1];
    if (weak(i)) return std::nullopt;
    cols.row(i) -= factor * cols.row(i - 1);
  }
  cols.row(m - 1) /= pivot[m - 1];
  for (Eigen::Index i = m - 2; i >= 0; --i) {
    cols.row(i) -= upper[i] * cols.row(i + 1);
    cols.row(i) /= pivot[i];
  }

  const auto Ainv_f = cols.col(0);
  const auto Ainv_B = cols.rightCols(k);
  const Eigen::MatrixXd schur = corner - bottom * Ainv_B;
  const Eigen::VectorXd reduced = rhs.tail(k) - bottom * Ainv_f;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(schur);
  if (!std::isfinite(lu.determinant()) || lu.determinant() == 0.0) return std::nullopt;
  const Eigen::VectorXd yb = lu.solve(reduced);

  Eigen::VectorXd x(m + k);
  x.head(m) = Ainv_f - Ainv_B * yb;
  x.tail(k) = yb;
  if (!x.allFinite()) return std::nullopt;
  return x;
}

Eigen::VectorXd BorderedSystem::solve(const Eigen::VectorXd& rhs) const {
  if (auto x = solve_structured(rhs)) {
    const double defect = (multiply(*x) - rhs).lpNorm<Eigen::Infinity>();
    const double scale = inf_norm() * x->lpNorm<Eigen::Infinity>() + rhs.lpNorm<Eigen::Infinity>();
    if (defect <= 1e-10 * scale) return *x;
  }
  return dense().fullPivLu().solve(rhs);
}

}  // namespace oxide
