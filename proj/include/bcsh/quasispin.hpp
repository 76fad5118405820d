#pragma once

// Exact solution of H_N through its permutation symmetry.
//
// Singly occupied ("blocked") sites are invisible to the pair interaction.
// On the remaining P paired sites the operators S+_x = a*_{x,up} a*_{x,down}
// generate a spin-1/2 algebra per site with S^z_x = (n_x - 1)/2, and the BCS
// term is -(gamma/N) S+ S- = -(gamma/N) (S(S+1) - M^2 + M) for total
// quasi-spin S and projection M. A sector is labeled by (b_up, b_down, S);
// its levels are indexed by M. Spin multiplicities follow the Catalan
// triangle m(P, S) = C(P, P/2 - S) - C(P, P/2 - S - 1).

#include "bcsh/equilibrium.hpp"
#include "bcsh/model.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <utility>
#include <vector>

namespace bcsh {

using BigInt = boost::multiprecision::cpp_int;

/// Default ceiling on N for the closed-form thermodynamic sums.
inline constexpr std::size_t kQuasispinMaxSites = 2000;

struct Sector {
  int b_up = 0;
  int b_down = 0;
  int paired = 0;  // P = N - b_up - b_down
  int two_s = 0;   // 2S, same parity as P
  BigInt occupancy_multiplicity;  // N! / (b_up! b_down! P!)
  BigInt spin_multiplicity;       // m(P, S)

  /// occupancy * spin multiplicity * (2S + 1)
  BigInt dimension() const;
};

/// Every sector of an N-site chain, ordered by (b_up, b_down, 2S).
std::vector<Sector> enumerate_sectors(std::size_t site_count);

/// Catalan triangle multiplicity m(P, S) with S = two_s / 2.
BigInt spin_multiplicity(int paired, int two_s);

/// Sector energy split into its blocked-site part and its paired-site part.
/// The validation suite swaps in a corrupted model to check that the
/// dense-ED certification catches a wrong formula.
struct SectorEnergyModel {
  double (*blocked)(const ModelParams& p, int b_up, int b_down);
  double (*paired)(const ModelParams& p, int paired, int two_s, int two_m, std::size_t site_count);
};

/// -mu (b_up + b_down) - h (b_up - b_down)
double blocked_energy(const ModelParams& p, int b_up, int b_down);
/// (2 lambda - 2 mu)(M + P/2) - (gamma / N)(S(S+1) - M^2 + M)
double paired_energy(const ModelParams& p, int paired, int two_s, int two_m,
                     std::size_t site_count);

inline constexpr SectorEnergyModel kSectorEnergy{&blocked_energy, &paired_energy};

struct SectorSpectrum {
  std::vector<int> two_m;         // -2S, -2S + 2, ..., 2S
  std::vector<double> energies;   // one per M
  BigInt degeneracy;              // of each level: occupancy * spin multiplicity
};

SectorSpectrum sector_energies(const ModelParams& p, const Sector& sector, std::size_t site_count,
                               const SectorEnergyModel& model = kSectorEnergy);

struct Level {
  double energy = 0.0;
  double degeneracy = 0.0;
};

/// Full spectrum of H_N as (energy, degeneracy), ascending; equal energies
/// from different sectors are kept as separate entries.
std::vector<Level> quasispin_spectrum(const ModelParams& p, std::size_t site_count,
                                      const SectorEnergyModel& model = kSectorEnergy);

/// (1/(beta N)) ln Trace exp(-beta H_N), or -E_0/N in the ground-state limit.
double quasispin_pressure(const ModelParams& p, const ThermoParams& t, std::size_t site_count,
                          const SectorEnergyModel& model = kSectorEnergy,
                          std::size_t max_sites = kQuasispinMaxSites);

/// Gibbs expectation of c0* c0 / N = (1/N^2) < S(S+1) - M^2 + M >.
double quasispin_condensate(const ModelParams& p, const ThermoParams& t, std::size_t site_count,
                            const SectorEnergyModel& model = kSectorEnergy,
                            std::size_t max_sites = kQuasispinMaxSites);

/// ln C(n, k): exact below n = 61, lgamma above.
double log_binomial(int n, int k);

}  // namespace bcsh
