#include "bcsh/cli.hpp"
#include "bcsh/validation.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bcsh;

namespace {

namespace fs = std::filesystem;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("bcsh_cli_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

std::vector<double> fields(const std::string& line) {
  std::vector<double> out;
  std::istringstream is(line);
  for (std::string cell; std::getline(is, cell, ',');) out.push_back(std::strtod(cell.c_str(), nullptr));
  return out;
}

const char* kSuperconducting = R"(
[model]
mu = 0
h = 0
lambda = 0
gamma = 4
[thermo]
beta = 10
)";

}  // namespace

TEST_CASE("config parsing: defaults, values and sections") {
  const RunConfig d = parse_config("");
  CHECK(d.model.gamma == 0.0);
  CHECK(d.thermo.beta == 1.0);
  CHECK(d.pressure_grid.count == 101);

  const RunConfig c = parse_config(R"(
[model]
mu = 0.25
gamma = 2
[thermo]
beta = inf
[grid]
param1 = h
count1 = 3
[dynamics]
integrator = rk4
convention = up_down
horizon = 4
samples = 9
[state]
preset = approx-gibbs
c_re = 0.1
[converge]
sites = 1, 3,5
observable = n_up
)");
  CHECK(c.model.mu == 0.25);
  CHECK(c.thermo.is_ground_state());
  CHECK(c.axis1.param == "h");
  CHECK(c.axis1.count == 3);
  CHECK(c.dynamics.integrator == Integrator::rk4);
  CHECK(c.dynamics.convention == PairConvention::up_down);
  CHECK(c.dynamics.times.size() == 9);
  CHECK(c.dynamics.times.back() == 4.0);
  CHECK(c.state.preset == "approx-gibbs");
  CHECK(c.sites == std::vector<std::size_t>{1, 3, 5});
}

TEST_CASE("config parsing: errors") {
  CHECK_THROWS_AS(parse_config("[model]\nmuu = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[modle]\nmu = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[model]\nmu = one\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[model]\nmu = inf\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[grid]\ncount = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[grid]\ncount = -3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[dynamics]\nsamples = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[dynamics]\nintegrator = euler\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[converge]\nsites = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[converge]\nobservable = spin\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[converge]\nmax_sites = 12\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[model\nmu = 1\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("initial-state presets") {
  RunConfig cfg = parse_config("[state]\npreset = vacuum-pair-mix\nkappa = 0.09\ntheta = 0.5\n"
                               "d = 1\nm = 0.2\nw = 0.4\n");
  const EquilibriumDensities dens = build_initial_state(cfg).densities();
  CHECK(dens.d == doctest::Approx(1.0));
  CHECK(dens.m == doctest::Approx(0.2));
  CHECK(dens.w == doctest::Approx(0.4));
  CHECK(std::abs(dens.pair - std::polar(0.3, 0.5)) < 1e-15);

  cfg = parse_config(std::string(kSuperconducting) +
                     "[state]\npreset = approx-gibbs\nc_re = 0.5\n");
  CHECK(std::abs(build_initial_state(cfg).densities().pair - 0.5) < 1e-6);

  cfg = parse_config("[state]\npreset = raw\nvalues = 0.4,0.1,0.1,0.4, 0,0, 0,0, 0.3,0, 0,0, 0,0, 0,0\n");
  CHECK(build_initial_state(cfg).densities().pair == cplx(0.3, 0.0));
  const OnSiteOperator raw = raw_density(cfg.state.raw);
  CHECK(raw(3, 0) == cplx(0.3));
  CHECK(raw(0, 3) == cplx(0.3));

  cfg = parse_config("[state]\npreset = raw\nvalues = 0.4,0.1,0.1,0.4, 0.1,0, 0,0, 0.3,0, 0,0, 0,0, 0,0\n");
  CHECK_THROWS_AS(build_initial_state(cfg), InvalidStateError);
  cfg = parse_config("[state]\npreset = raw\nvalues = 1,0,0\n");
  CHECK_THROWS_AS(build_initial_state(cfg), ConfigError);
  cfg = parse_config("[state]\npreset = fancy\n");
  CHECK_THROWS_AS(build_initial_state(cfg), ConfigError);
}

TEST_CASE("number formatting is fixed at 17 significant digits") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(-1.0 / 3.0) == "-0.33333333333333331");
  CHECK(format_number(2.5e-300) == "2.5e-300");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("pressure: single point at gamma = 0 and a 101-point grid") {
  TempDir dir;
  const std::string free =
      dir.write("free.ini", "[model]\nmu = 0.3\ngamma = 0\n[grid]\nc_min = 0.4\ncount = 1\n");
  Run r = run({"pressure", "--config", free});
  REQUIRE(r.code == 0);
  auto rows = lines(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "c_modulus,functional,onsite_pressure");
  const auto v = fields(rows[1]);
  CHECK(v[1] == v[2]);

  const std::string grid = dir.write("grid.ini", std::string(kSuperconducting) +
                                                     "[grid]\nc_min = 0\nc_max = 1\ncount = 101\n");
  r = run({"pressure", "--config", grid});
  REQUIRE(r.code == 0);
  rows = lines(r.out);
  CHECK(rows.size() == 102);
  // Bit-for-bit agreement with direct library calls.
  const RunConfig cfg = load_config(grid);
  for (std::size_t i = 1; i < rows.size(); i += 10) {
    const auto f = fields(rows[i]);
    CHECK(f[1] == variational_functional(cfg.model, cfg.thermo, f[0]));
    CHECK(f[2] == onsite_pressure(cfg.model, cfg.thermo, f[0]));
  }
}

TEST_CASE("gap: JSON output") {
  TempDir dir;
  Run r = run({"gap", "--config", dir.write("sc.ini", kSuperconducting)});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["superconducting"] == true);
  CHECK(j["degenerate"] == false);
  CHECK((j["residual"].get<double>() < 1e-8 || j["at_boundary"].get<bool>()));
  CHECK(j["r_star"].get<double>() == doctest::Approx(0.5).epsilon(1e-7));

  r = run({"gap", "--config", dir.write("free.ini", "[model]\ngamma = 0\n")});
  j = nlohmann::json::parse(r.out);
  CHECK(j["superconducting"] == false);
  CHECK(j["degenerate"] == true);

  r = run({"gap", "--config", dir.file("sc.ini"), "--format", "csv"});
  CHECK(lines(r.out).size() == 2);
}

TEST_CASE("phase-diagram: rows, worker independence and field symmetry") {
  TempDir dir;
  const std::string cfg = dir.write("pd.ini", R"(
[model]
lambda = 0.3
gamma = 2
[thermo]
beta = 8
[grid]
param1 = h
min1 = -0.5
max1 = 0.5
count1 = 3
param2 = mu
min2 = -0.4
max2 = 0.4
count2 = 4
)");
  const Run serial = run({"phase-diagram", "--config", cfg});
  const Run parallel = run({"phase-diagram", "--config", cfg, "--workers", "3"});
  REQUIRE(serial.code == 0);
  CHECK(serial.out == parallel.out);
  const auto rows = lines(serial.out);
  REQUIRE(rows.size() == 13);
  CHECK(rows[0] == "param1,param2,r_star,superconducting,d,m,w");
  for (int j = 0; j < 4; ++j) {
    const auto lo = fields(rows[1 + j]);
    const auto hi = fields(rows[9 + j]);
    CHECK(lo[2] == doctest::Approx(hi[2]).epsilon(1e-12));
    CHECK(lo[5] == doctest::Approx(-hi[5]).epsilon(1e-12));
  }
  const Run json = run({"phase-diagram", "--config", cfg, "--format", "json"});
  const auto j = nlohmann::json::parse(json.out);
  CHECK(j["rows"].size() == 12);
  CHECK(j["columns"][3] == "superconducting");
}

TEST_CASE("dynamics: initial row, conserved columns and fitted frequency") {
  TempDir dir;
  const std::string cfg = dir.write("dyn.ini", R"(
[model]
mu = 0.2
h = 0.1
lambda = 0.6
gamma = 1.8
[dynamics]
horizon = 20
samples = 2001
[state]
preset = vacuum-pair-mix
kappa = 0.04
theta = 0.3
d = 0.7
m = 0.1
w = 0.2
)");
  const Run r = run({"dynamics", "--config", cfg});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 2002);
  CHECK(rows[0] == "t,d,m,w,pair_re,pair_im,Omega1,Omega2,Omega3,nu_fit");
  const auto first = fields(rows[1]);
  CHECK(first[0] == 0.0);
  CHECK(first[1] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(first[2] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(first[3] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(first[4] == doctest::Approx(0.2 * std::cos(0.3)).epsilon(1e-14));
  CHECK(first[5] == doctest::Approx(0.2 * std::sin(0.3)).epsilon(1e-14));
  const double nu = 2 * (0.2 - 0.6) + 1.8 * (1 - 0.7);
  for (std::size_t i = 1; i < rows.size(); i += 50) {
    const auto f = fields(rows[i]);
    CHECK(std::abs(f[1] - first[1]) < 1e-9);
    CHECK(std::abs(f[2] - first[2]) < 1e-9);
    CHECK(std::abs(f[3] - first[3]) < 1e-9);
    CHECK(f[8] == doctest::Approx(nu).epsilon(1e-14));
    CHECK(f[9] == doctest::Approx(nu).epsilon(1e-6));
  }
}

TEST_CASE("converge: gamma = 0 control and the resource cap") {
  TempDir dir;
  const std::string cfg = dir.write("conv.ini", R"(
[model]
mu = 0.5
lambda = 1
gamma = 0
[dynamics]
horizon = 2
samples = 5
[state]
preset = vacuum-pair-mix
kappa = 0.25
d = 1
w = 0.5
[converge]
sites = 1,2,3
)");
  const Run r = run({"converge", "--config", cfg});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 16);
  CHECK(rows[0] == "N,t,exact_re,exact_im,meanfield_re,meanfield_im,abs_error");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(fields(rows[i])[6] < 1e-10);

  const std::string big = dir.write("big.ini", "[converge]\nsites = 2,7\n[state]\nd = 1\nw = 0.5\n");
  CHECK(run({"converge", "--config", big}).code == kExitResource);
}

TEST_CASE("exit codes for configuration and state errors") {
  TempDir dir;
  CHECK(run({}).code == kExitConfig);
  CHECK(run({"frobnicate"}).code == kExitConfig);
  CHECK(run({"gap", "--config", dir.file("missing.ini")}).code == kExitConfig);
  CHECK(run({"gap", "--config", dir.write("bad.ini", "[model]\nlambda = -1\n")}).code == kExitConfig);
  CHECK(run({"gap", "--workers", "0"}).code == kExitConfig);
  CHECK(run({"gap", "--format", "xml"}).code == kExitConfig);
  CHECK(run({"gap", "--out", "/nonexistent/dir/out.json"}).code == kExitConfig);
  const std::string odd = dir.write(
      "odd.ini", "[state]\npreset = raw\nvalues = 0.25,0.25,0.25,0.25, 0.1,0, 0,0, 0,0, 0,0, 0,0, 0,0\n");
  CHECK(run({"dynamics", "--config", odd}).code == kExitInvalidState);
  const std::string negative = dir.write("neg.ini", "[state]\nd = 1\nw = 0.9\n");
  CHECK(run({"dynamics", "--config", negative}).code == kExitInvalidState);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("output is deterministic and honours --out") {
  TempDir dir;
  const std::string cfg = dir.write("sc.ini", kSuperconducting);
  const std::string a = dir.file("a.csv");
  const std::string b = dir.file("b.csv");
  REQUIRE(run({"pressure", "--config", cfg, "--out", a}).code == 0);
  REQUIRE(run({"pressure", "--config", cfg, "--out", b}).code == 0);
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  CHECK(!slurp(a).empty());
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).find('\r') == std::string::npos);
}

TEST_CASE("validate: listing, subsets and the corrupted-formula hook") {
  const Run list = run({"validate", "--list"});
  CHECK(list.code == 0);
  CHECK(lines(list.out) == validation_check_ids());

  const Run car = run({"validate", "--check", "car", "--check", "gap"});
  CHECK(car.code == 0);
  CHECK(car.out.find("[PASS] car") != std::string::npos);
  CHECK(car.out.find("2/2 checks passed") != std::string::npos);

  const Run corrupt = run({"validate", "--corrupt-sector-energy", "--check", "sector-spectrum"});
  CHECK(corrupt.code == kExitFailure);
  CHECK(corrupt.out.find("[FAIL] sector-spectrum") != std::string::npos);

  CHECK(run({"validate", "--check", "nonsense"}).code == kExitConfig);
}

TEST_CASE("the installed binary propagates exit codes") {
  const std::string cmd = std::string(BCSH_CLI_PATH) + " gap --config /nonexistent.ini 2>/dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == kExitConfig);
}
