#pragma once

// BCS-Hubbard Hamiltonian with mean-field pairing on an N-site chain
//
//   H_N = sum_x (2 lambda n_up n_down - mu (n_up + n_down) - h (n_up - n_down))
//         - (gamma / N) sum_{x,y} a*_{x,up} a*_{x,down} a_{y,down} a_{y,up}
//
// and its approximating (Bogoliubov) counterpart H_N(c), a sum of copies of
// the on-site operator
//
//   h(c) = 2 lambda n_up n_down - mu (n_up + n_down) - h (n_up - n_down)
//          - gamma (c a*_up a*_down + conj(c) a_down a_up).
//
// The model has no kinetic term, so only the number of sites matters.

#include "bcsh/algebra.hpp"

namespace bcsh {

struct ModelParams {
  double mu = 0.0;      // chemical potential
  double h = 0.0;       // magnetic field
  double lambda = 0.0;  // Hubbard repulsion, >= 0
  double gamma = 0.0;   // BCS coupling, >= 0

  /// Throws std::invalid_argument when lambda or gamma is negative or a
  /// parameter is not finite.
  void validate() const;
};

/// Complex pair amplitude c of the approximating Hamiltonian.
using OrderParameter = cplx;

LatticeOperator build_hamiltonian(const ModelParams& p, std::size_t site_count,
                                  std::size_t max_sites = kDefaultMaxSites);

OnSiteOperator build_onsite_approx(const ModelParams& p, OrderParameter c);

LatticeOperator build_approx_hamiltonian(const ModelParams& p, OrderParameter c,
                                         std::size_t site_count,
                                         std::size_t max_sites = kDefaultMaxSites);

/// Sum over x, y of a*_{x,up} a*_{x,down} a_{y,down} a_{y,up}.
LatticeOperator bcs_pair_interaction(std::size_t site_count);

/// Total particle number of one spin species; the second overload counts both.
LatticeOperator total_number(std::size_t site_count, Spin spin);
LatticeOperator total_number(std::size_t site_count);

struct CooperZeroMode {
  LatticeOperator annihilator;  // N^{-1/2} sum_x a_{x,down} a_{x,up}
  LatticeOperator number;       // annihilator^dagger * annihilator
};

CooperZeroMode cooper_zero_mode(std::size_t site_count,
                                std::size_t max_sites = kDefaultMaxSites);

/// max |sum_{x,y} a*_{x,up} a*_{x,down} a_{y,down} a_{y,up}
///      - sum_{k,q} a~*_{k,up} a~*_{-k,down} a~_{q,down} a~_{-q,up}|
/// on the periodic chain. Both sides are assembled independently.
double verify_bcs_momentum_identity(std::size_t site_count);

}  // namespace bcsh
