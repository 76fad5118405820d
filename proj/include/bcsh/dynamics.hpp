#pragma once

// Time evolution.
//
// Finite volume: rho_t = rho o tau_t with tau_t(A) = e^{itH} A e^{-itH}, so
// density matrices evolve as D_t = e^{-itH} D e^{itH}.
//
// Infinite volume, product initial states: the one-site state obeys the
// closed nonlinear equation
//
//   D' = -i [h(c(t)), D],   c(t) = Trace(D_t a_down a_up),
//
// which conserves d, m, w and rotates the Cooper field with frequency
// nu = 2(mu - lambda) + gamma(1 - d).

#include "bcsh/equilibrium.hpp"
#include "bcsh/model.hpp"
#include "bcsh/onsite_state.hpp"
#include "bcsh/spectral.hpp"

#include <functional>
#include <vector>

namespace bcsh {

struct ObservableRecord {
  double t = 0.0;
  double d = 0.0;
  double m = 0.0;
  double w = 0.0;
  cplx pair{};
  double kappa = 0.0;  // |pair(0)|^2
  double theta = 0.0;  // arg pair(0), in [-pi, pi)
  double nu = 0.0;     // rotation frequency of the Cooper field
};

struct RotorVector {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double omega3 = 0.0;
};

enum class Integrator { rk4, adaptive };

/// Which on-site pair expectation drives the self-consistent generator.
/// down_up: c = rho(a_down a_up) (default). up_down: c = rho(a_up a_down),
/// which flips the sign of c and of the gamma contribution to nu.
enum class PairConvention { down_up, up_down };

struct DynamicsConfig {
  Integrator integrator = Integrator::adaptive;
  double step = 1e-3;      // fixed step for rk4, initial step for adaptive
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::vector<double> times{0.0};  // ascending sample times, first >= 0
  PairConvention convention = PairConvention::down_up;

  /// Throws std::invalid_argument on non-positive steps/tolerances or
  /// unsorted sample times.
  void validate() const;
  /// `samples` equally spaced times on [0, horizon].
  static std::vector<double> uniform_times(double horizon, std::size_t samples);
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact N-site evolution of the product state (x) rho0 observed through an
/// on-site operator at site 0. H_N is diagonalized once; every sample time
/// then costs one pass over the precomputed spectral terms.
class ExactEvolution {
 public:
  ExactEvolution(const ModelParams& p, std::size_t site_count, const OnSiteState& rho0,
                 const OnSiteOperator& observable, std::size_t max_sites = kDefaultMaxSites);

  cplx expectation(double t) const;
  std::size_t term_count() const { return weights_.size(); }

 private:
  std::vector<cplx> weights_;
  std::vector<double> frequencies_;
};

/// rho_t^{(N)}(A) at each sample time. Rejects non-even initial states.
std::vector<cplx> evolve_exact(const ModelParams& p, std::size_t site_count,
                               const OnSiteState& rho0, const OnSiteOperator& observable,
                               const std::vector<double>& times,
                               std::size_t max_sites = kDefaultMaxSites);

/// One-site evolution D' = -i [h(c), D] for a constant amplitude, computed
/// exactly from the spectrum of h(c).
std::vector<OnSiteState> evolve_approx(const ModelParams& p, OrderParameter c,
                                       const OnSiteState& rho0, const std::vector<double>& times);

/// Same for a time-dependent amplitude c(t), integrated numerically.
std::vector<OnSiteState> evolve_approx(const ModelParams& p,
                                       const std::function<cplx(double)>& c,
                                       const OnSiteState& rho0, const DynamicsConfig& cfg);

/// Heisenberg-picture non-autonomous evolution tau_{t,0}(A) of a lattice
/// operator under H_N(c(u)), u in [0, t]. The propagator is the time-ordered
/// product of exact exponentials over `slices` equal steps with c evaluated
/// at each midpoint.
LatticeOperator evolve_approx_heisenberg(const ModelParams& p,
                                         const std::function<cplx(double)>& c,
                                         const LatticeOperator& observable, double t,
                                         std::size_t slices);

struct SelfConsistentTrajectory {
  std::vector<double> times;
  std::vector<OnSiteState> states;
  std::vector<ObservableRecord> records;
};

SelfConsistentTrajectory evolve_self_consistent(const ModelParams& p, const OnSiteState& rho0,
                                                const DynamicsConfig& cfg);

/// nu = 2(mu - lambda) + gamma(1 - d).
double rotation_frequency(const ModelParams& p, double d);

/// Closed-form observables at time t: d, m, w copied from rho0 and
/// pair(t) = sqrt(kappa) exp(i (t nu + theta)).
ObservableRecord closed_form_observables(const ModelParams& p, const OnSiteState& rho0, double t);

/// Omega1 + i Omega2 = pair expectation, Omega3 = 2(mu - lambda) + gamma(1 - d).
RotorVector rotor_from_state(const ModelParams& p, const OnSiteState& s);

/// Numerical integration of Omega1' = -Omega3 Omega2, Omega2' = Omega3 Omega1,
/// Omega3' = 0, sampled at cfg.times.
std::vector<RotorVector> evolve_rotor(const RotorVector& initial, const DynamicsConfig& cfg);

/// Exact solution: rigid rotation of (Omega1, Omega2) by angle Omega3 t.
RotorVector rotor_exact(const RotorVector& initial, double t);

/// Least-squares slope of the unwrapped phase of `values` against `times`.
/// Throws std::invalid_argument when consecutive samples jump by more than
/// pi/2 after unwrapping or when a sample vanishes.
double fit_phase_slope(const std::vector<double>& times, const std::vector<cplx>& values);

struct ConvergenceRow {
  std::size_t site_count = 0;
  double t = 0.0;
  cplx exact{};
  cplx mean_field{};
  double abs_error = 0.0;
};

/// |rho_t^{(N)}(A) - varpi(t, rho)(A)| for each N and sample time.
std::vector<ConvergenceRow> convergence_study(const ModelParams& p, const OnSiteState& rho0,
                                              const OnSiteOperator& observable,
                                              const std::vector<std::size_t>& site_counts,
                                              const DynamicsConfig& cfg,
                                              std::size_t max_sites = kDefaultMaxSites);

}  // namespace bcsh
