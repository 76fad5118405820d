#pragma once

// Command-line front end. Configuration is an INI file:
//
//   [model]     mu, h, lambda, gamma
//   [thermo]    beta (a positive number or "inf")
//   [grid]      pressure:       c_min, c_max, count
//               phase-diagram:  param1, min1, max1, count1, param2, min2, max2, count2
//   [gap]       r_max, scan_points
//   [dynamics]  integrator (adaptive | rk4), step, abs_tol, rel_tol, horizon, samples,
//               convention (down_up | up_down)
//   [state]     preset = vacuum-pair-mix   kappa, theta, d, m, w
//               preset = approx-gibbs      c_re, c_im, beta
//               preset = raw               values (16 numbers, see RawState)
//   [converge]  sites (comma list), observable, max_sites
//
// Exit codes: 0 ok, 1 validation failure or runtime error, 2 config error,
// 3 invalid state, 4 resource cap.

#include "bcsh/dynamics.hpp"
#include "bcsh/equilibrium.hpp"
#include "bcsh/model.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bcsh {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitInvalidState = 3,
  kExitResource = 4,
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };

struct StateSpec {
  std::string preset = "vacuum-pair-mix";
  double kappa = 0.0;
  double theta = 0.0;
  double d = 0.0;
  double m = 0.0;
  double w = 0.0;
  cplx c{};
  std::optional<double> beta;       // approx-gibbs; defaults to [thermo] beta
  std::vector<double> raw;          // 16 numbers for preset = raw
};

struct RunConfig {
  std::string subcommand;
  ModelParams model;
  ThermoParams thermo;
  GridAxis pressure_grid{"c_modulus", 0.0, 1.0, 101};
  GridAxis axis1{"mu", -1.0, 1.0, 11};
  GridAxis axis2{"gamma", 0.0, 2.0, 11};
  GapOptions gap;
  DynamicsConfig dynamics;
  double horizon = 20.0;
  std::size_t samples = 201;
  StateSpec state;
  std::vector<std::size_t> sites{1, 2, 3, 4};
  std::string observable = "pair";
  std::size_t max_sites = kDefaultMaxSites;
  std::string out_path;  // empty: standard output
  unsigned workers = 1;
  std::optional<OutputFormat> format;
};

/// Parses INI text into a config with defaults for absent keys. Unknown
/// sections or keys and malformed values raise ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Raw state layout: D00, D11, D22, D33, then real and imaginary parts of
/// D01, D02, D03, D12, D13, D23; the lower triangle is the conjugate.
OnSiteOperator raw_density(const std::vector<double>& values);

/// Builds and validates the initial state; throws InvalidStateError.
OnSiteState build_initial_state(const RunConfig& cfg);

/// On-site observable by name: pair (a_down a_up), n_up, n_down, n,
/// double_occupancy, a_up, a_down.
OnSiteOperator named_observable(const std::string& name);

/// printf("%.17g"); non-finite values print as nan, inf, -inf.
std::string format_number(double x);

void cmd_pressure(const RunConfig& cfg, std::ostream& out);
void cmd_gap(const RunConfig& cfg, std::ostream& out);
void cmd_phase_diagram(const RunConfig& cfg, std::ostream& out);
void cmd_dynamics(const RunConfig& cfg, std::ostream& out);
void cmd_converge(const RunConfig& cfg, std::ostream& out);
/// Runs the validation suite, streaming the report; returns the exit code.
int cmd_validate(std::ostream& out, bool corrupt_sector_energy = false,
                 const std::vector<std::string>& only = {});

/// Full command line entry point. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bcsh
