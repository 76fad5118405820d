#pragma once

#include "bcsh/algebra.hpp"

#include <stdexcept>

namespace bcsh {

class InvalidStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Densities of an on-site state.
struct EquilibriumDensities {
  double d = 0.0;   // <n_up + n_down>, in [0, 2]
  double m = 0.0;   // <n_up - n_down>, in [-1, 1]
  double w = 0.0;   // <n_up n_down>, in [0, 1]
  cplx pair{};      // <a_down a_up>, |pair| <= 1
};

/// Density matrix D on the one-site Fock space, so that rho(A) = Trace(D A).
class OnSiteState {
 public:
  /// Validates unit trace (1e-12), Hermiticity and positivity (min
  /// eigenvalue >= -1e-10). Throws InvalidStateError otherwise.
  explicit OnSiteState(const OnSiteOperator& density);

  /// Same as the constructor but additionally rejects non-even states.
  static OnSiteState even(const OnSiteOperator& density);

  /// Builds a state without validation; used inside integrators where the
  /// flow preserves the invariants up to truncation error.
  static OnSiteState unchecked(const OnSiteOperator& density);

  const OnSiteOperator& density() const { return density_; }
  cplx expectation(const OnSiteOperator& A) const;
  EquilibriumDensities densities() const;

  /// Largest matrix element linking even and odd particle-number vectors.
  double odd_component() const;
  bool is_even(double tol = 1e-12) const { return odd_component() < tol; }
  double min_eigenvalue() const;

 private:
  struct NoCheck {};
  OnSiteState(const OnSiteOperator& density, NoCheck) : density_(density) {}

  OnSiteOperator density_;
};

}  // namespace bcsh
