#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace oxide {

/// Square matrix [[A, B], [C, D]] with A tridiagonal (core x core) and a
/// narrow dense border of width k.
///
/// Solved by block elimination: one tridiagonal factorization of A applied to
/// the right-hand side and the k border columns, then a k x k Schur complement.
/// A is factored without pivoting, which is safe for the column diagonally
/// dominant cores produced by the scheme; breakdown falls back to dense LU.
class BorderedSystem {
 public:
  BorderedSystem(std::size_t core, std::size_t border);

  std::size_t core() const { return diag.size(); }
  std::size_t border() const { return static_cast<std::size_t>(corner.rows()); }
  std::size_t size() const { return core() + border(); }

  std::vector<double> lower;  // lower[i] = A(i, i-1), lower[0] unused
  std::vector<double> diag;
  std::vector<double> upper;  // upper[i] = A(i, i+1), upper[core-1] unused
  Eigen::MatrixXd right;      // B: core x border
  Eigen::MatrixXd bottom;     // C: border x core
  Eigen::MatrixXd corner;     // D: border x border

  Eigen::MatrixXd dense() const;
  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  /// Max absolute row sum.
  double inf_norm() const;

  /// Block elimination only; nullopt if a pivot vanishes or the result is not finite.
  std::optional<Eigen::VectorXd> solve_structured(const Eigen::VectorXd& rhs) const;

  /// Structured solve, checked against the residual, with dense LU fallback.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
};

}  // namespace oxide
