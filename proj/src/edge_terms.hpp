#pragma once

#include "oxide/bernoulli.hpp"

namespace oxide::detail {

/// Scharfetter-Gummel flux across one edge and its partial derivatives.
struct EdgeTerms {
  double flux = 0.0;
  double d_left = 0.0;      // dF/du_left
  double d_right = 0.0;     // dF/du_right
  double d_velocity = 0.0;  // dF/dv
  double d_width = 0.0;     // dF/dL at fixed v
};

inline EdgeTerms linearize_edge(double uL, double uR, double v, double L, double gap) {
  const double w = L * gap * v;
  const BernoulliEval minus = bernoulli_eval(-w);
  const BernoulliEval plus = bernoulli_eval(w);
  const double scale = 1.0 / (L * gap);
  EdgeTerms t;
  t.flux = scale * (minus.value * uL - plus.value * uR);
  t.d_left = scale * minus.value;
  t.d_right = -scale * plus.value;
  t.d_velocity = -minus.derivative * uL - plus.derivative * uR;
  t.d_width = (t.d_velocity * v - t.flux) / L;
  return t;
}

}  // namespace oxide::detail
