#include "oxide/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace oxide {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double interpolate(const TabulatedProfile& t, double x) {
  if (x <= t.x.front()) return t.values.front();
  if (x >= t.x.back()) return t.values.back();
  auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
  const auto k = static_cast<std::size_t>(it - t.x.begin());
  const double w = (x - t.x[k - 1]) / (t.x[k] - t.x[k - 1]);
  return (1.0 - w) * t.values[k - 1] + w * t.values[k];
}

}  // namespace

InitialProfile::InitialProfile(Form form) : form_(std::move(form)) {
  if (const auto* t = std::get_if<TabulatedProfile>(&form_)) {
    if (t->x.size() != t->values.size() || t->x.empty())
      throw std::invalid_argument("tabulated profile: sample and value counts differ or are empty");
    for (std::size_t k = 1; k < t->x.size(); ++k)
      if (!(t->x[k] > t->x[k - 1]))
        throw std::invalid_argument("tabulated profile: abscissae must be strictly increasing");
  }
}

InitialProfile InitialProfile::constant(double value) {
  return InitialProfile(ExponentialProfile{0.0, 0.0, value});
}

InitialProfile InitialProfile::exponential(double scale, double rate, double offset) {
  return InitialProfile(ExponentialProfile{scale, rate, offset});
}

InitialProfile InitialProfile::tabulated(std::vector<double> x, std::vector<double> values) {
  return InitialProfile(TabulatedProfile{std::move(x), std::move(values)});
}

double InitialProfile::operator()(double x) const {
  return std::visit(overloaded{
                        [x](const ExponentialProfile& e) { return e.scale * std::exp(e.rate * x) + e.offset; },
                        [x](const TabulatedProfile& t) { return interpolate(t, x); },
                    },
                    form_);
}

std::optional<double> InitialProfile::exact_integral(double x0, double x1) const {
  const auto* e = std::get_if<ExponentialProfile>(&form_);
  if (e == nullptr) return std::nullopt;
  const double len = x1 - x0;
  double expo = 0.0;
  if (e->rate == 0.0) {
    expo = len;
  } else {
    // int_{x0}^{x1} exp(r x) dx = exp(r x0) * expm1(r (x1 - x0)) / r
    expo = std::exp(e->rate * x0) * std::expm1(e->rate * len) / e->rate;
  }
  return e->scale * expo + e->offset * len;
}

double InitialProfile::infimum(double length) const {
  return std::visit(overloaded{
                        [&](const ExponentialProfile&) { return std::min((*this)(0.0), (*this)(length)); },
                        [&](const TabulatedProfile& t) {
                          double lo = std::min(interpolate(t, 0.0), interpolate(t, length));
                          for (std::size_t k = 0; k < t.x.size(); ++k)
                            if (t.x[k] > 0.0 && t.x[k] < length) lo = std::min(lo, t.values[k]);
                          return lo;
                        },
                    },
                    form_);
}

double InitialProfile::supremum(double length) const {
  return std::visit(overloaded{
                        [&](const ExponentialProfile&) { return std::max((*this)(0.0), (*this)(length)); },
                        [&](const TabulatedProfile& t) {
                          double hi = std::max(interpolate(t, 0.0), interpolate(t, length));
                          for (std::size_t k = 0; k < t.x.size(); ++k)
                            if (t.x[k] > 0.0 && t.x[k] < length) hi = std::max(hi, t.values[k]);
                          return hi;
                        },
                    },
                    form_);
}

void ModelParams::validate() const {
  const std::array<std::pair<const char*, double>, 8> fields{{
      {"a", a},
      {"b", b},
      {"alpha0", alpha0},
      {"beta0", beta0},
      {"alpha1", alpha1},
      {"beta1", beta1},
      {"R", R},
      {"L0", L0},
  }};
  for (const auto& [name, value] : fields) {
    if (!std::isfinite(value) || value <= 0.0)
      throw std::invalid_argument(std::string("parameter '") + name + "' must be finite and strictly positive");
  }
}

Mesh::Mesh(std::vector<double> edges) : edges_(std::move(edges)) {
  if (edges_.size() < 2) throw std::invalid_argument("mesh needs at least one cell");
  if (edges_.front() != 0.0 || edges_.back() != 1.0)
    throw std::invalid_argument("mesh edges must start at 0 and end at 1");
  for (std::size_t i = 1; i < edges_.size(); ++i)
    if (!(edges_[i] > edges_[i - 1])) throw std::invalid_argument("mesh edges must be strictly increasing");

  const std::size_t I = edges_.size() - 1;
  centers_.resize(I + 2);
  sizes_.resize(I);
  gaps_.resize(I + 1);
  centers_[0] = 0.0;
  centers_[I + 1] = 1.0;
  for (std::size_t i = 1; i <= I; ++i) {
    centers_[i] = 0.5 * (edges_[i - 1] + edges_[i]);
    sizes_[i - 1] = edges_[i] - edges_[i - 1];
  }
  for (std::size_t i = 0; i <= I; ++i) gaps_[i] = centers_[i + 1] - centers_[i];
}

double Mesh::max_size() const { return *std::max_element(sizes_.begin(), sizes_.end()); }

Mesh uniform_mesh(std::size_t cells) {
  if (cells == 0) throw std::invalid_argument("uniform_mesh: cell count must be positive");
  std::vector<double> edges(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) edges[i] = static_cast<double>(i) / static_cast<double>(cells);
  return Mesh(std::move(edges));
}

TimeGrid TimeGrid::from_step(double dt, double horizon) {
  if (!(dt > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("time grid: dt and T must be positive");
  const double ratio = horizon / dt;
  const auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (steps == 0) throw std::invalid_argument("time grid: T shorter than one step");
  const double tol = 1e-12 * std::max(1.0, horizon);
  if (std::abs(static_cast<double>(steps) * dt - horizon) > tol)
    throw std::invalid_argument("time grid: T is not an integer multiple of dt");
  return TimeGrid(dt, steps, horizon);
}

TimeGrid TimeGrid::from_count(double horizon, std::size_t steps) {
  if (!(horizon > 0.0) || steps == 0) throw std::invalid_argument("time grid: need T > 0 and N >= 1");
  return TimeGrid(horizon / static_cast<double>(steps), steps, horizon);
}

State discretize_initial(const ModelParams& params, const Mesh& mesh, InitialMode mode) {
  const double L0 = params.L0;
  const auto& profile = params.u_init;
  if (profile.infimum(L0) < 0.0) throw std::invalid_argument("initial profile takes negative values");

  const std::size_t I = mesh.cells();
  State s;
  s.u.resize(I + 2);
  s.X0 = 0.0;
  s.X1 = L0;
  s.L = L0;
  s.u[0] = profile(0.0);
  s.u[I + 1] = profile(L0);

  // 3-point Gauss-Legendre on [-1, 1]
  static const double node = std::sqrt(0.6);
  static const std::array<double, 3> nodes{-node, 0.0, node};
  static const std::array<double, 3> weights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

  for (std::size_t i = 1; i <= I; ++i) {
    const double lo = L0 * mesh.edge(i - 1);
    const double hi = L0 * mesh.edge(i);
    if (mode == InitialMode::CenterSample) {
      s.u[i] = profile(L0 * mesh.center(i));
      continue;
    }
    const double width = L0 * mesh.size(i);
    if (auto exact = profile.exact_integral(lo, hi)) {
      s.u[i] = *exact / width;
    } else {
      const double mid = 0.5 * (lo + hi);
      const double half = 0.5 * (hi - lo);
      double acc = 0.0;
      for (std::size_t q = 0; q < 3; ++q) acc += weights[q] * profile(mid + half * nodes[q]);
      s.u[i] = 0.5 * acc;  // (half * acc) / (2 * half)
    }
  }
  return s;
}

std::string to_string(Termination::Kind kind) {
  switch (kind) {
    case Termination::Kind::Completed:
      return "completed";
    case Termination::Kind::WidthCollapsed:
      return "width-collapsed";
    case Termination::Kind::SolverFailed:
      return "solver-failed";
  }
  return "unknown";
}

}  // namespace oxide
