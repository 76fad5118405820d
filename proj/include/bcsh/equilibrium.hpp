#pragma once

// Thermodynamics of the model: the on-site pressure of h(c), the reduced
// variational problem over the pair amplitude, finite-volume pressures and
// condensate densities by exact diagonalization, approximating Gibbs states
// and two-parameter phase-diagram scans.

#include "bcsh/model.hpp"
#include "bcsh/onsite_state.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace bcsh {

/// Inverse temperature. beta = +inf selects the ground-state limit, where
/// pressures become minus ground energy densities and Gibbs states become
/// equal-weight mixtures over the degenerate ground space.
struct ThermoParams {
  double beta = 1.0;

  static ThermoParams ground_state() { return {std::numeric_limits<double>::infinity()}; }
  bool is_ground_state() const { return std::isinf(beta); }
  /// Throws std::invalid_argument unless beta > 0 (or +inf).
  void validate() const;
};

/// (1/beta) ln Trace exp(-beta h(c)), overflow safe. Depends on c only
/// through |c|.
double onsite_pressure(const ModelParams& p, const ThermoParams& t, OrderParameter c);

/// -gamma |c|^2 + onsite_pressure(p, t, c).
double variational_functional(const ModelParams& p, const ThermoParams& t, OrderParameter c);

/// d/dr of the functional at real r >= 0. At finite beta this is analytic;
/// in the ground-state limit it is the one-sided derivative from the right.
double variational_slope(const ModelParams& p, const ThermoParams& t, double r);

struct GapOptions {
  double r_max = 1.25;
  std::size_t scan_points = 2501;
  double value_tolerance = 1e-12;       // relative, for near-degenerate maxima
  double superconducting_threshold = 1e-8;
};

struct OrderParameterSolution {
  double r_star = 0.0;             // maximizing |c|
  double value = 0.0;              // supremum of the functional
  double residual = 0.0;           // |d/dr functional| at r_star
  bool superconducting = false;    // r_star > threshold
  bool degenerate = false;         // functional independent of c (gamma = 0)
  bool at_boundary = false;        // maximizer sits on the edge of the search interval
  double multistart_spread = 0.0;  // spread of near-optimal maximizer moduli
  std::vector<double> maximizers;  // all near-optimal local maximizers
};

OrderParameterSolution solve_gap(const ModelParams& p, const ThermoParams& t,
                                 const GapOptions& options = {});

/// (1/(beta N)) ln Trace exp(-beta H_N) by exact diagonalization.
double finite_volume_pressure(const ModelParams& p, const ThermoParams& t,
                              std::size_t site_count,
                              std::size_t max_sites = kDefaultMaxSites);

/// Gibbs expectation of c0* c0 divided by N, by exact diagonalization.
double condensate_density_finite(const ModelParams& p, const ThermoParams& t,
                                 std::size_t site_count,
                                 std::size_t max_sites = kDefaultMaxSites);

struct ApproxGibbs {
  OnSiteState state;
  EquilibriumDensities densities;
};

/// exp(-beta h(c)) / Trace, the one-site factor of the approximating Gibbs
/// state.
ApproxGibbs approx_gibbs_onsite(const ModelParams& p, const ThermoParams& t, OrderParameter c);

/// Named scan axis. Recognized parameters: mu, h, lambda, gamma, beta.
struct GridAxis {
  std::string param;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 1;

  std::vector<double> values() const;
};

/// Sets a named parameter; throws std::invalid_argument for unknown names.
void set_parameter(ModelParams& p, ThermoParams& t, const std::string& name, double value);

struct PhaseDiagramRow {
  double param1 = 0.0;
  double param2 = 0.0;
  double r_star = 0.0;
  bool superconducting = false;
  double d = 0.0;
  double m = 0.0;
  double w = 0.0;
};

/// Row-major scan (param1 outer, param2 inner). Points are evaluated on up
/// to `workers` threads; rows are returned in grid order.
std::vector<PhaseDiagramRow> phase_diagram(const ModelParams& base, const ThermoParams& thermo,
                                           const GridAxis& axis1, const GridAxis& axis2,
                                           unsigned workers = 1,
                                           const GapOptions& options = {});

}  // namespace bcsh
