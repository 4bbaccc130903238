#include "oxide/bernoulli.hpp"

#include <cmath>
#include <stdexcept>

namespace oxide {

namespace {

constexpr double kSeriesThreshold = 1e-5;
// B' loses ~log10(1/|r|) digits in closed form, so its series covers a wider band.
constexpr double kPrimeSeriesThreshold = 0.1;
constexpr double kOverflowThreshold = 700.0;
constexpr double kUnderflowThreshold = -745.0;

void require_finite(double r) {
  if (!std::isfinite(r)) throw std::domain_error("bernoulli: argument must be finite");
}

}  // namespace

double bernoulli(double r) {
  require_finite(r);
  if (std::abs(r) < kSeriesThreshold) {
    const double r2 = r * r;
    return 1.0 - 0.5 * r + r2 / 12.0 - r2 * r2 / 720.0;
  }
  if (r > kOverflowThreshold) return r * std::exp(-r);
  if (r < kUnderflowThreshold) return -r;
  return r / std::expm1(r);
}

double bernoulli_prime(double r) {
  require_finite(r);
  if (std::abs(r) < kPrimeSeriesThreshold) {
    // Taylor coefficients n B_n / n! of the derivative, Horner in r^2.
    const double r2 = r * r;
    const double odd = r * (1.0 / 6.0 + r2 * (-1.0 / 180.0 + r2 * (1.0 / 5040.0 + r2 * (-1.0 / 151200.0))));
    return -0.5 + odd;
  }
  if (r > kOverflowThreshold) return (1.0 - r) * std::exp(-r);
  if (r < kUnderflowThreshold) return -1.0;
  // B'(r) = B(r) (1 - B(-r)) / r and B(-r) = B(r) + r
  const double B = bernoulli(r);
  return B * (1.0 - B - r) / r;
}

BernoulliEval bernoulli_eval(double r) { return {bernoulli(r), bernoulli_prime(r)}; }

}  // namespace oxide
