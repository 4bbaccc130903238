#include "oxide/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ostream.h>

#include "oxide/analysis.hpp"
#include "oxide/config.hpp"
#include "oxide/energy.hpp"
#include "oxide/scheme.hpp"
#include "oxide/travelling_wave.hpp"

namespace oxide {

namespace {

namespace fs = std::filesystem;

struct Overrides {
  std::string preset;
  std::string config;
  std::optional<std::size_t> cells;
  std::optional<double> dt;
  std::optional<double> t_final;
  std::optional<std::string> out;
  std::optional<std::string> phi;
  std::optional<std::size_t> levels;
  std::optional<std::size_t> ref_level;
  std::optional<std::string> initial_mode;
};

void add_common_options(CLI::App& cmd, Overrides& o) {
  auto* p = cmd.add_option("--preset", o.preset, "Table 1 preset: testcase1, testcase2, testcase3");
  auto* c = cmd.add_option("--config", o.config, "Config file (key = value lines)");
  p->excludes(c);
  cmd.add_option("--cells", o.cells, "Number of cells I");
  cmd.add_option("--dt", o.dt, "Time step");
  cmd.add_option("--t-final", o.t_final, "Final time (the study horizon for `converge`)");
  cmd.add_option("--out", o.out, "Output directory");
  cmd.add_option("--phi", o.phi, "Energy density: quadratic, quartic, ramp, entropy");
  cmd.add_option("--levels", o.levels, "Finest convergence level K (levels 0..K)");
  cmd.add_option("--ref-level", o.ref_level, "Reference level of the convergence study");
  cmd.add_option("--initial-mode", o.initial_mode, "Initial discretization: average or sample")
      ->check(CLI::IsMember({"average", "sample"}));
}

RunConfig resolve(const Overrides& o, const std::string& experiment) {
  RunConfig c;
  if (!o.config.empty()) {
    c = load_config(o.config);
  } else if (!o.preset.empty()) {
    auto p = preset(o.preset);
    if (!p) throw ConfigError(0, fmt::format("unknown preset '{}'", o.preset));
    c = std::move(*p);
  } else {
    throw ConfigError(0, "one of --preset or --config is required");
  }
  c.experiment = experiment;
  if (o.cells) c.cells = *o.cells;
  if (o.dt) c.dt = *o.dt;
  if (o.t_final) (experiment == "converge" ? c.study_t_final : c.t_final) = *o.t_final;
  if (o.out) c.out = *o.out;
  if (o.phi) c.phi = *o.phi;
  if (o.levels) c.levels = *o.levels;
  if (o.ref_level) c.ref_level = *o.ref_level;
  if (o.initial_mode) c.initial_mode = parse_initial_mode(*o.initial_mode);
  c.validate();
  return c;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

class CsvFile {
 public:
  CsvFile(const fs::path& path, std::string_view header) : path_(path), stream_(path) {
    if (!stream_) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    stream_ << header << '\n';
  }
  void row(const std::string& line) { stream_ << line << '\n'; }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  std::ofstream stream_;
};

fs::path prepare_out(const RunConfig& c) {
  const fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error(fmt::format("cannot create output directory '{}': {}", c.out, ec.message()));
  return dir;
}

int exit_for(const Termination& t) {
  switch (t.kind) {
    case Termination::Kind::Completed:
      return kExitOk;
    case Termination::Kind::WidthCollapsed:
      return kExitWidthCollapse;
    case Termination::Kind::SolverFailed:
      return kExitSolverFailure;
  }
  return kExitSolverFailure;
}

void report_termination(const Trajectory& traj, std::ostream& out, std::ostream& err) {
  if (traj.completed()) {
    fmt::print(out, "completed {} steps, t = {}\n", traj.last_step(), num(traj.grid.time(traj.last_step())));
    return;
  }
  fmt::print(err, "{} at step {}: {}\n", to_string(traj.termination.kind), traj.termination.step,
             traj.termination.detail);
  fmt::print(out, "stopped after {} steps, t = {}\n", traj.last_step(), num(traj.grid.time(traj.last_step())));
}

Trajectory simulate(const RunConfig& c, const Mesh& mesh) {
  return run(c.params, mesh, TimeGrid::from_step(c.dt, c.t_final), c.solver, c.initial_mode);
}

int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Mesh mesh = uniform_mesh(c.cells);
  const auto dir = prepare_out(c);
  const auto bounds = linf_bounds(c.params);
  if (const auto horizon = horizon_bound(c.params, bounds.m); horizon && c.t_final >= *horizon)
    fmt::print(out, "note: t_final = {} is beyond the sufficient horizon {}\n", num(c.t_final), num(*horizon));

  const Trajectory traj = simulate(c, mesh);
  const auto rows = diagnostics(traj, mesh, c.params);

  CsvFile steps(dir / "steps.csv", "n,t,X0,X1,L,u0,uI1,d,newton_iters,residual_inf");
  CsvFile diag(dir / "diagnostics.csv", "t,X0,X1,L,u0,uI1,d,mass_balance_defect");
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& r = rows[k];
    const std::size_t n = traj.steps[k];
    const StepReport report = n > 0 ? traj.reports[n - 1] : StepReport{};
    const std::string d = r.d ? num(*r.d) : "";
    steps.row(fmt::format("{},{},{},{},{},{},{},{},{},{}", n, num(r.t), num(r.X0), num(r.X1), num(r.L), num(r.u0),
                          num(r.uI1), d, report.newton_iterations, num(report.residual_inf)));
    diag.row(fmt::format("{},{},{},{},{},{},{},{}", num(r.t), num(r.X0), num(r.X1), num(r.L), num(r.u0), num(r.uI1),
                         d, num(r.mass_balance_defect)));
  }

  CsvFile profile(dir / "profile.csv", "i,xi_center,x_physical,u");
  const State& last = traj.final_state();
  for (std::size_t i = 0; i < last.u.size(); ++i) {
    const double xi = mesh.center(i);
    profile.row(fmt::format("{},{},{},{}", i, num(xi), num(last.X0 + last.L * xi), num(last.u[i])));
  }

  report_termination(traj, out, err);
  return exit_for(traj.termination);
}

int cmd_tw(const RunConfig& c, std::ostream& out) {
  const auto cls = classify(c.params);
  switch (cls.regime) {
    case RegimeClassification::Regime::UniqueWave:
      fmt::print(out, "regime: unique travelling wave\nc_hat = {}\nL_hat = {}\n", num(cls.wave->c_hat),
                 num(cls.wave->L_hat));
      break;
    case RegimeClassification::Regime::EquilibriumContinuum:
      fmt::print(out, "regime: constant equilibria (c_hat = 0, any width)\nc_hat = 0\n");
      break;
    case RegimeClassification::Regime::NoWave:
      fmt::print(out, "regime: none\nno travelling wave\n");
      break;
  }
  return kExitOk;
}

int cmd_energy(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Mesh mesh = uniform_mesh(c.cells);
  const auto dir = prepare_out(c);
  const auto phi = densities::by_name(c.phi);
  const Trajectory traj = simulate(c, mesh);
  const auto ledger = energy_ledger(traj, mesh, c.params, phi);

  CsvFile csv(dir / fmt::format("ledger_{}.csv", phi.name), "n,t,H,H_tot,D_bulk,D_bound");
  for (const auto& e : ledger.entries)
    csv.row(fmt::format("{},{},{},{},{},{}", e.n, num(e.t), num(e.H), num(e.H_tot), num(e.D_bulk), num(e.D_bound)));
  if (ledger.entries.size() > 1)
    fmt::print(out, "max (dH_tot/dt + D) = {}\n", num(max_dissipation_defect(ledger, traj.grid.dt())));
  report_termination(traj, out, err);
  return exit_for(traj.termination);
}

int cmd_converge(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto dir = prepare_out(c);
  StudySettings s;
  s.finest = c.levels;
  s.reference = c.ref_level;
  s.horizon = c.study_t_final;
  s.mode = c.initial_mode;
  ConvergenceReport report;
  try {
    report = convergence_study(c.params, s, c.solver);
  } catch (const LevelFailure& e) {
    fmt::print(err, "{}\n", e.what());
    return e.kind() == Termination::Kind::WidthCollapsed ? kExitWidthCollapse : kExitSolverFailure;
  }
  auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
  CsvFile csv(dir / "convergence.csv", "k,h,dt,err_w,rate_w,err_0,rate_0,err_1,rate_1");
  fmt::print(out, "{:>2} {:>10} {:>10} {:>10} {:>7} {:>10} {:>7} {:>10} {:>7}\n", "k", "h", "dt", "err_w", "rate",
             "err_0", "rate", "err_1", "rate");
  for (const auto& l : report.levels) {
    csv.row(fmt::format("{},{},{},{},{},{},{},{},{}", l.level, num(l.h), num(l.dt), num(l.err_w), opt(l.rate_w),
                        num(l.err_0), opt(l.rate_0), num(l.err_1), opt(l.rate_1)));
    auto rate = [](const std::optional<double>& v) { return v ? fmt::format("{:.2f}", *v) : std::string("--"); };
    fmt::print(out, "{:>2} {:>10.3e} {:>10.3e} {:>10.3e} {:>7} {:>10.3e} {:>7} {:>10.3e} {:>7}\n", l.level, l.h,
               l.dt, l.err_w, rate(l.rate_w), l.err_0, rate(l.rate_0), l.err_1, rate(l.rate_1));
  }
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Oxide layer growth: ALE finite volume solver and diagnostics", "oxide"};
  app.require_subcommand(1);
  Overrides o;
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {{"simulate", "Run the time loop; write steps.csv, diagnostics.csv, profile.csv"},
                      {"tw", "Classify the parameters and print the travelling wave"},
                      {"energy", "Run and write the free energy ledger for --phi"},
                      {"converge", "Nested-mesh convergence study; write convergence.csv"}};
  for (const auto& s : subs) add_common_options(*app.add_subcommand(s.name, s.help), o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    fmt::print(out, "{}", app.help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const RunConfig c = resolve(o, name);
    if (name == "simulate") return cmd_simulate(c, out, err);
    if (name == "tw") return cmd_tw(c, out);
    if (name == "energy") return cmd_energy(c, out, err);
    return cmd_converge(c, out, err);
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitIo;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace oxide
