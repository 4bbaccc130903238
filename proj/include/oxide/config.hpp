#pragma once

// Run configuration: a flat `key = value` document, one entry per line,
// `#` starts a comment. Example:
//
//   preset  = testcase1      # optional; later keys override the preset
//   cells   = 200
//   u_init  = exp 1 -0.5 2   # scale * exp(rate * x) + offset
//   # u_init = const 1.5
//   # u_init = table 0:1 0.5:2 1:1.5
//
// Without a preset the model keys a, b, alpha0, beta0, alpha1, beta1, R,
// L0, u_init and t_final are required.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "oxide/core.hpp"
#include "oxide/scheme.hpp"

namespace oxide {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& message);
  /// 1-based line of the offending entry, 0 when not tied to a line.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct RunConfig {
  std::string preset;  // empty when none was used
  ModelParams params;
  std::size_t cells = 100;
  double dt = 1e-2;
  double t_final = 1.0;
  InitialMode initial_mode = InitialMode::CellAverage;
  SolverOptions solver;
  std::string out = "out";
  std::string experiment = "simulate";  // simulate | tw | energy | converge
  std::string phi = "quadratic";
  std::size_t levels = 3;     // convergence levels k = 0..levels
  std::size_t ref_level = 4;
  double study_t_final = 0.2;

  /// Throws ConfigError (line 0) on an inconsistent combination.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Table 1 rows: "testcase1", "testcase2", "testcase3" (I = 100, dt = 1e-2).
std::optional<RunConfig> preset(std::string_view name);

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Canonical document; parse_config(render_config(c)) == c.
std::string render_config(const RunConfig& config);

std::string_view to_string(InitialMode mode);  // "average" | "sample"
InitialMode parse_initial_mode(std::string_view text);

}  // namespace oxide
