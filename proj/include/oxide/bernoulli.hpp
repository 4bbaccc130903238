#pragma once

namespace oxide {

/// B(r) = r / (e^r - 1), extended by B(0) = 1.
///
/// Positive, decreasing and 1-Lipschitz. Relative accuracy is ~1e-15 on
/// [-700, 700]; for r beyond the overflow threshold the result is r e^{-r}
/// (which underflows to 0 past r ~ 745) and for very negative r it is -r.
/// Throws std::domain_error for non-finite input.
double bernoulli(double r);

/// B'(r) = (e^r - 1 - r e^r) / (e^r - 1)^2, with B'(0) = -1/2.
double bernoulli_prime(double r);

struct BernoulliEval {
  double value;
  double derivative;
};

BernoulliEval bernoulli_eval(double r);

}  // namespace oxide
