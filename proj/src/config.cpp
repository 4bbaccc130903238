#include "oxide/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <fmt/core.h>

#include "oxide/energy.hpp"

namespace oxide {

ConfigError::ConfigError(std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? fmt::format("line {}: {}", line, message) : message), line_(line) {}

std::string_view to_string(InitialMode mode) {
  return mode == InitialMode::CellAverage ? "average" : "sample";
}

InitialMode parse_initial_mode(std::string_view text) {
  if (text == "average") return InitialMode::CellAverage;
  if (text == "sample") return InitialMode::CenterSample;
  throw std::invalid_argument(fmt::format("initial mode must be 'average' or 'sample', got '{}'", text));
}

namespace {

struct Table1Row {
  const char* name;
  double a, b, alpha0, beta0, alpha1, beta1, R, L0, T;
};

constexpr Table1Row kTable1[] = {
    {"testcase1", 1.0, 1.0, 1.5, 1.0, 0.5, 4.0, 2.0, 1.0, 20.0},
    {"testcase2", 1.75, 1.0, 5.0, 2.0, 5.0, 2.0, 2.0, 1.0, 3.5},
    {"testcase3", 1.0, 1.0, 4.0, 1.0, 3.0, 1.5, 2.0, 1.0, 10.0},
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto start = s.find_first_not_of(" \t", pos);
    if (start == std::string_view::npos) break;
    const auto stop = std::min(s.find_first_of(" \t", start), s.size());
    parts.push_back(s.substr(start, stop - start));
    pos = stop;
  }
  return parts;
}

std::optional<double> to_double(std::string_view s) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

struct Entry {
  std::string value;
  std::size_t line;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  std::size_t line(const std::string& key) const { return entries_.at(key).line; }
  const std::string& raw(const std::string& key) const { return entries_.at(key).value; }

  double number(const std::string& key) const {
    const auto v = to_double(raw(key));
    if (!v) throw ConfigError(line(key), fmt::format("'{}' is not a number: '{}'", key, raw(key)));
    return *v;
  }

  double positive(const std::string& key) const {
    const double v = number(key);
    if (!(v > 0.0)) throw ConfigError(line(key), fmt::format("'{}' must be positive, got {}", key, raw(key)));
    return v;
  }

  std::size_t count(const std::string& key, bool allow_zero = false) const {
    const auto& s = raw(key);
    unsigned long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ConfigError(line(key), fmt::format("'{}' is not a nonnegative integer: '{}'", key, s));
    if (v == 0 && !allow_zero) throw ConfigError(line(key), fmt::format("'{}' must be positive, got 0", key));
    return static_cast<std::size_t>(v);
  }

 private:
  std::map<std::string, Entry> entries_;
};

InitialProfile parse_profile(std::string_view text, std::size_t line) {
  const auto parts = split_ws(text);
  auto bad = [&](const std::string& why) { return ConfigError(line, fmt::format("u_init: {}", why)); };
  if (parts.empty()) throw bad("empty value");
  auto num = [&](std::string_view s) {
    const auto v = to_double(s);
    if (!v) throw bad(fmt::format("'{}' is not a number", s));
    return *v;
  };
  if (parts[0] == "exp") {
    if (parts.size() != 4) throw bad("expected 'exp <scale> <rate> <offset>'");
    return InitialProfile::exponential(num(parts[1]), num(parts[2]), num(parts[3]));
  }
  if (parts[0] == "const") {
    if (parts.size() != 2) throw bad("expected 'const <value>'");
    return InitialProfile::constant(num(parts[1]));
  }
  if (parts[0] == "table") {
    std::vector<double> xs, vs;
    for (std::size_t k = 1; k < parts.size(); ++k) {
      const auto colon = parts[k].find(':');
      if (colon == std::string_view::npos) throw bad(fmt::format("table entry '{}' is not 'x:value'", parts[k]));
      xs.push_back(num(parts[k].substr(0, colon)));
      vs.push_back(num(parts[k].substr(colon + 1)));
    }
    try {
      return InitialProfile::tabulated(std::move(xs), std::move(vs));
    } catch (const std::invalid_argument& e) {
      throw bad(e.what());
    }
  }
  throw bad(fmt::format("unknown form '{}' (expected exp, const or table)", parts[0]));
}

std::string render_profile(const InitialProfile& profile) {
  if (const auto* e = std::get_if<ExponentialProfile>(&profile.form()))
    return fmt::format("exp {:.17g} {:.17g} {:.17g}", e->scale, e->rate, e->offset);
  const auto& t = std::get<TabulatedProfile>(profile.form());
  std::string out = "table";
  for (std::size_t k = 0; k < t.x.size(); ++k) out += fmt::format(" {:.17g}:{:.17g}", t.x[k], t.values[k]);
  return out;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "preset",     "a",          "b",          "alpha0",          "beta0",          "alpha1",
      "beta1",      "R",          "L0",         "u_init",          "cells",          "dt",
      "t_final",    "initial_mode", "newton_tol", "max_newton_iters", "homotopy_steps", "max_homotopy_steps",
      "width_floor", "out",       "experiment", "phi",             "levels",         "ref_level",
      "study_t_final"};
  return keys;
}

const std::vector<std::string> kExperiments = {"simulate", "tw", "energy", "converge"};

constexpr const char* kModelKeys[] = {"a", "b", "alpha0", "beta0", "alpha1", "beta1", "R", "L0", "u_init", "t_final"};

}  // namespace

std::optional<RunConfig> preset(std::string_view name) {
  for (const auto& row : kTable1) {
    if (name != row.name) continue;
    RunConfig c;
    c.preset = row.name;
    auto& p = c.params;
    p.a = row.a;
    p.b = row.b;
    p.alpha0 = row.alpha0;
    p.beta0 = row.beta0;
    p.alpha1 = row.alpha1;
    p.beta1 = row.beta1;
    p.R = row.R;
    p.L0 = row.L0;
    // (a/b) exp(-R c x) + 2 with c = (alpha0 - beta0 a/b) / R
    const double level = p.a / p.b;
    const double c_hat = (p.alpha0 - p.beta0 * level) / p.R;
    p.u_init = InitialProfile::exponential(level, -p.R * c_hat, 2.0);
    c.cells = 100;
    c.dt = 1e-2;
    c.t_final = row.T;
    return c;
  }
  return std::nullopt;
}

void RunConfig::validate() const {
  try {
    params.validate();
    solver.validate();
    (void)TimeGrid::from_step(dt, t_final);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  if (cells == 0) throw ConfigError(0, "cells must be positive");
  if (!(study_t_final > 0.0)) throw ConfigError(0, "study_t_final must be positive");
  if (ref_level <= levels) throw ConfigError(0, "ref_level must exceed levels");
  if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end())
    throw ConfigError(0, fmt::format("unknown experiment '{}'", experiment));
  try {
    (void)densities::by_name(phi);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
}

RunConfig parse_config(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(line_no, "missing key before '='");
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError(line_no, fmt::format("unknown key '{}'", key));
    if (value.empty()) throw ConfigError(line_no, fmt::format("missing value for '{}'", key));
    if (const auto it = entries.find(key); it != entries.end())
      throw ConfigError(line_no, fmt::format("duplicate key '{}' (first set on line {})", key, it->second.line));
    entries.emplace(key, Entry{value, line_no});
  }

  const Reader in(std::move(entries));
  RunConfig c;
  if (in.has("preset")) {
    auto base = preset(in.raw("preset"));
    if (!base) throw ConfigError(in.line("preset"), fmt::format("unknown preset '{}'", in.raw("preset")));
    c = std::move(*base);
  } else {
    std::vector<std::string> missing;
    for (const char* key : kModelKeys)
      if (!in.has(key)) missing.emplace_back(key);
    if (!missing.empty()) {
      std::string list;
      for (const auto& k : missing) list += (list.empty() ? "" : ", ") + k;
      throw ConfigError(0, fmt::format("missing required keys without a preset: {}", list));
    }
  }

  auto& p = c.params;
  if (in.has("a")) p.a = in.positive("a");
  if (in.has("b")) p.b = in.positive("b");
  if (in.has("alpha0")) p.alpha0 = in.positive("alpha0");
  if (in.has("beta0")) p.beta0 = in.positive("beta0");
  if (in.has("alpha1")) p.alpha1 = in.positive("alpha1");
  if (in.has("beta1")) p.beta1 = in.positive("beta1");
  if (in.has("R")) p.R = in.positive("R");
  if (in.has("L0")) p.L0 = in.positive("L0");
  if (in.has("u_init")) {
    p.u_init = parse_profile(in.raw("u_init"), in.line("u_init"));
    if (!(p.u_init.infimum(p.L0) > 0.0)) throw ConfigError(in.line("u_init"), "u_init must be positive on [0, L0]");
  }
  if (in.has("cells")) c.cells = in.count("cells");
  if (in.has("dt")) c.dt = in.positive("dt");
  if (in.has("t_final")) c.t_final = in.positive("t_final");
  if (in.has("initial_mode")) {
    try {
      c.initial_mode = parse_initial_mode(in.raw("initial_mode"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(in.line("initial_mode"), e.what());
    }
  }
  if (in.has("newton_tol")) c.solver.newton_tol = in.positive("newton_tol");
  if (in.has("max_newton_iters")) c.solver.max_newton_iters = static_cast<int>(in.count("max_newton_iters"));
  if (in.has("homotopy_steps")) c.solver.homotopy_steps = static_cast<int>(in.count("homotopy_steps"));
  if (in.has("max_homotopy_steps"))
    c.solver.max_homotopy_steps = static_cast<int>(in.count("max_homotopy_steps"));
  if (in.has("width_floor")) c.solver.width_floor = in.positive("width_floor");
  if (in.has("out")) c.out = in.raw("out");
  if (in.has("experiment")) c.experiment = in.raw("experiment");
  if (in.has("phi")) c.phi = in.raw("phi");
  if (in.has("levels")) c.levels = in.count("levels", true);
  if (in.has("ref_level")) c.ref_level = in.count("ref_level");
  if (in.has("study_t_final")) c.study_t_final = in.positive("study_t_final");

  auto anchored = [&](const char* key, auto&& check) {
    try {
      check();
    } catch (const ConfigError& e) {
      if (in.has(key)) throw ConfigError(in.line(key), e.what());
      throw;
    }
  };
  anchored("dt", [&] {
    try {
      (void)TimeGrid::from_step(c.dt, c.t_final);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(0, e.what());
    }
  });
  anchored("max_homotopy_steps", [&] {
    if (c.solver.max_homotopy_steps < c.solver.homotopy_steps)
      throw ConfigError(0, "max_homotopy_steps must be at least homotopy_steps");
  });
  anchored("ref_level", [&] {
    if (c.ref_level <= c.levels) throw ConfigError(0, "ref_level must exceed levels");
  });
  anchored("experiment", [&] {
    if (std::find(kExperiments.begin(), kExperiments.end(), c.experiment) == kExperiments.end())
      throw ConfigError(0, fmt::format("unknown experiment '{}'", c.experiment));
  });
  anchored("phi", [&] {
    try {
      (void)densities::by_name(c.phi);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(0, e.what());
    }
  });
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, fmt::format("cannot read config file '{}'", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string render_config(const RunConfig& c) {
  const auto& p = c.params;
  std::string out;
  auto put = [&](std::string_view key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
  auto num = [](double v) { return fmt::format("{:.17g}", v); };
  if (!c.preset.empty()) put("preset", c.preset);
  put("a", num(p.a));
  put("b", num(p.b));
  put("alpha0", num(p.alpha0));
  put("beta0", num(p.beta0));
  put("alpha1", num(p.alpha1));
  put("beta1", num(p.beta1));
  put("R", num(p.R));
  put("L0", num(p.L0));
  put("u_init", render_profile(p.u_init));
  put("cells", std::to_string(c.cells));
  put("dt", num(c.dt));
  put("t_final", num(c.t_final));
  put("initial_mode", std::string(to_string(c.initial_mode)));
  put("newton_tol", num(c.solver.newton_tol));
  put("max_newton_iters", std::to_string(c.solver.max_newton_iters));
  put("homotopy_steps", std::to_string(c.solver.homotopy_steps));
  put("max_homotopy_steps", std::to_string(c.solver.max_homotopy_steps));
  if (c.solver.width_floor) put("width_floor", num(*c.solver.width_floor));
  put("out", c.out);
  put("experiment", c.experiment);
  put("phi", c.phi);
  put("levels", std::to_string(c.levels));
  put("ref_level", std::to_string(c.ref_level));
  put("study_t_final", num(c.study_t_final));
  return out;
}

}  // namespace oxide
