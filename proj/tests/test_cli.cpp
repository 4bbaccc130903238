#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oxide/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = oxide::cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("oxide_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("tw prints the wave of testcase1") {
  const auto r = call({"tw", "--preset", "testcase1"});
  CHECK(r.code == oxide::kExitOk);
  CHECK(r.out.find("c_hat = 0.25\n") != std::string::npos);
  CHECK(r.out.find("L_hat = 3.347952867") != std::string::npos);
}

TEST_CASE("tw reports the missing wave of testcase2") {
  const auto r = call({"tw", "--preset", "testcase2"});
  CHECK(r.code == oxide::kExitOk);
  CHECK(r.out.find("no travelling wave") != std::string::npos);
}

TEST_CASE("argument and configuration errors exit with 2") {
  CHECK(call({"tw"}).code == oxide::kExitConfig);
  CHECK(call({"tw", "--preset", "nope"}).code == oxide::kExitConfig);
  CHECK(call({"frobnicate"}).code == oxide::kExitConfig);
  CHECK(call({"tw", "--preset", "testcase1", "--config", "x.cfg"}).code == oxide::kExitConfig);
  CHECK(call({"simulate", "--preset", "testcase1", "--initial-mode", "mean"}).code == oxide::kExitConfig);
  CHECK(call({"simulate", "--config", "/nonexistent/oxide.cfg"}).code == oxide::kExitConfig);
  CHECK(call({"converge", "--preset", "testcase1", "--levels", "3", "--ref-level", "2"}).code ==
        oxide::kExitConfig);

  const fs::path dir = scratch("badcfg");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.cfg") << "preset = testcase1\na = -1\n";
  const auto r = call({"tw", "--config", (dir / "bad.cfg").string()});
  CHECK(r.code == oxide::kExitConfig);
  CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("help exits cleanly") { CHECK(call({"--help"}).code == oxide::kExitOk); }

TEST_CASE("simulate writes the step, diagnostics and profile files") {
  const fs::path dir = scratch("simulate");
  const auto r = call({"simulate", "--preset", "testcase1", "--cells", "20", "--t-final", "0.5", "--out", dir.string()});
  REQUIRE(r.code == oxide::kExitOk);
  const auto steps = slurp(dir / "steps.csv");
  CHECK(first_line(steps) == "n,t,X0,X1,L,u0,uI1,d,newton_iters,residual_inf");
  CHECK(line_count(steps) == 52);
  CHECK(first_line(slurp(dir / "diagnostics.csv")) == "t,X0,X1,L,u0,uI1,d,mass_balance_defect");
  const auto profile = slurp(dir / "profile.csv");
  CHECK(first_line(profile) == "i,xi_center,x_physical,u");
  CHECK(line_count(profile) == 23);
}

TEST_CASE("identical configurations give byte-identical output") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::vector<std::string> base{"simulate", "--preset", "testcase1", "--cells", "30", "--t-final", "1"};
  auto with_out = [&](const fs::path& d) {
    auto args = base;
    args.push_back("--out");
    args.push_back(d.string());
    return args;
  };
  REQUIRE(call(with_out(a)).code == 0);
  REQUIRE(call(with_out(b)).code == 0);
  for (const char* f : {"steps.csv", "diagnostics.csv", "profile.csv"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
}

TEST_CASE("width collapse exits with 4 and keeps the partial output") {
  const fs::path dir = scratch("collapse");
  const auto r = call({"simulate", "--preset", "testcase3", "--cells", "40", "--out", dir.string()});
  CHECK(r.code == oxide::kExitWidthCollapse);
  CHECK(r.err.find("width") != std::string::npos);
  const auto steps = slurp(dir / "steps.csv");
  CHECK(line_count(steps) > 10);
  CHECK(line_count(steps) < 1002);
}

TEST_CASE("energy writes the ledger for the requested density") {
  const fs::path dir = scratch("energy");
  const auto r = call({"energy", "--preset", "testcase1", "--cells", "20", "--t-final", "0.3", "--phi", "quartic",
                       "--out", dir.string()});
  REQUIRE(r.code == oxide::kExitOk);
  const auto ledger = slurp(dir / "ledger_quartic.csv");
  CHECK(first_line(ledger) == "n,t,H,H_tot,D_bulk,D_bound");
  CHECK(line_count(ledger) == 32);
  CHECK(call({"energy", "--preset", "testcase1", "--phi", "cubic", "--out", dir.string()}).code ==
        oxide::kExitConfig);
}

TEST_CASE("converge writes the report table") {
  const fs::path dir = scratch("converge");
  const auto r = call({"converge", "--preset", "testcase1", "--levels", "1", "--ref-level", "2", "--t-final", "0.05",
                       "--out", dir.string()});
  REQUIRE(r.code == oxide::kExitOk);
  const auto table = slurp(dir / "convergence.csv");
  CHECK(first_line(table) == "k,h,dt,err_w,rate_w,err_0,rate_0,err_1,rate_1");
  CHECK(line_count(table) == 3);
}
