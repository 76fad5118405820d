#pragma once

// Self-contained acceptance suite: operator algebra, thermodynamics and
// dynamics checks with fixed tolerances, run by `bcsh validate` and by the
// acceptance test binary.

#include "bcsh/dynamics.hpp"
#include "bcsh/model.hpp"
#include "bcsh/onsite_state.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace bcsh {

struct CheckResult {
  std::string id;      // short stable identifier, e.g. "car"
  std::string name;    // human-readable title
  bool passed = false;
  std::string detail;  // measured quantities
  double seconds = 0.0;
};

struct ValidationOptions {
  std::uint64_t seed = 20240611;
  /// Test hook: replace the quasispin sector energy with a wrong formula.
  bool corrupt_sector_energy = false;
  /// Called after each check finishes.
  std::function<void(const CheckResult&)> on_result;
};

/// Identifiers of every check in execution order.
std::vector<std::string> validation_check_ids();

/// Runs one check by identifier; throws std::invalid_argument for unknown ids.
CheckResult run_check(const std::string& id, const ValidationOptions& options = {});

std::vector<CheckResult> run_validation(const ValidationOptions& options = {});

bool all_passed(const std::vector<CheckResult>& results);

/// One line per check: "[PASS] id  name  (detail, 1.23 s)".
std::string format_report(const std::vector<CheckResult>& results);

// Seeded generators shared by the suite and the tests.

/// mu, h in [-1, 1], lambda in [0, 2], gamma in [0, 3].
ModelParams random_params(std::mt19937_64& rng);

/// Random even density matrix: block diagonal on span{|0>, |up down>} and
/// span{|up>, |down>}, full rank almost surely.
OnSiteState random_even_state(std::mt19937_64& rng);

/// Product-state preset with prescribed densities and pair amplitude
/// sqrt(kappa) e^{i theta}. Throws InvalidStateError when the data do not
/// define a positive state.
OnSiteState vacuum_pair_mix(double kappa, double theta, double d, double m, double w);

}  // namespace bcsh
