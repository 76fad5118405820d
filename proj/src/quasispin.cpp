#include "bcsh/quasispin.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace bcsh {

namespace {

constexpr int kExactBinomialLimit = 60;

const std::array<std::array<std::uint64_t, kExactBinomialLimit + 1>, kExactBinomialLimit + 1>&
pascal_table() {
  static const auto table = [] {
    std::array<std::array<std::uint64_t, kExactBinomialLimit + 1>, kExactBinomialLimit + 1> t{};
    for (int n = 0; n <= kExactBinomialLimit; ++n) {
      t[n][0] = 1;
      for (int k = 1; k <= n; ++k) t[n][k] = t[n - 1][k - 1] + (k < n ? t[n - 1][k] : 0);
    }
    return t;
  }();
  return table;
}

BigInt big_binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (n <= kExactBinomialLimit) return BigInt(pascal_table()[n][k]);
  BigInt out = 1;
  k = std::min(k, n - k);
  for (int i = 1; i <= k; ++i) {
    out *= n - k + i;
    out /= i;
  }
  return out;
}

double log_spin_multiplicity(int paired, int two_s) {
  const int k = (paired - two_s) / 2;
  if (paired <= kExactBinomialLimit) {
    const auto& t = pascal_table();
    const std::uint64_t below = k >= 1 ? t[paired][k - 1] : 0;
    return std::log(static_cast<double>(t[paired][k] - below));
  }
  return log_binomial(paired, k) +
         std::log(static_cast<double>(paired - 2 * k + 1) / static_cast<double>(paired - k + 1));
}

// Log-weight of a level relative to a reference energy. In the ground-state
// limit only levels degenerate with the reference survive.
struct Weigher {
  const ThermoParams& t;
  double operator()(double energy, double log_degeneracy, double reference) const {
    const double excess = energy - reference;
    if (t.is_ground_state()) {
      const double tol = 1e-10 * std::max(1.0, std::abs(reference));
      return excess <= tol ? log_degeneracy : -std::numeric_limits<double>::infinity();
    }
    return log_degeneracy - t.beta * excess;
  }
};

// Running log-sum-exp accumulator.
class LogSum {
 public:
  void add(double x) {
    if (x == -std::numeric_limits<double>::infinity()) return;
    if (x <= top_) {
      sum_ += std::exp(x - top_);
    } else {
      sum_ = sum_ * std::exp(top_ - x) + 1.0;
      top_ = x;
    }
  }
  double value() const {
    return sum_ == 0.0 ? -std::numeric_limits<double>::infinity() : top_ + std::log(sum_);
  }

 private:
  double top_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

struct ThermalSums {
  double ground_energy = 0.0;
  double log_z_shifted = 0.0;  // ln sum exp(-beta (E - E_0)), or ln(ground degeneracy)
  double condensate = 0.0;     // < S(S+1) - M^2 + M >
};

ThermalSums thermal_sums(const ModelParams& p, const ThermoParams& t, std::size_t site_count,
                         const SectorEnergyModel& model, bool want_condensate) {
  const int n = static_cast<int>(site_count);
  const Weigher weigh{t};

  // Blocked-site factor for each B = b_up + b_down.
  std::vector<double> blocked_min(n + 1), blocked_log(n + 1);
  for (int b = 0; b <= n; ++b) {
    double e_min = std::numeric_limits<double>::infinity();
    for (int up = 0; up <= b; ++up) e_min = std::min(e_min, model.blocked(p, up, b - up));
    LogSum acc;
    for (int up = 0; up <= b; ++up) {
      const double log_deg = log_binomial(n, b) + log_binomial(b, up);
      acc.add(weigh(model.blocked(p, up, b - up), log_deg, e_min));
    }
    blocked_min[b] = e_min;
    blocked_log[b] = acc.value();
  }

  // Paired-site factor for each P, with the conditional condensate average.
  std::vector<double> paired_min(n + 1), paired_log(n + 1), paired_cond(n + 1, 0.0);
  for (int P = 0; P <= n; ++P) {
    double e_min = std::numeric_limits<double>::infinity();
    for (int two_s = P % 2; two_s <= P; two_s += 2) {
      for (int two_m = -two_s; two_m <= two_s; two_m += 2) {
        e_min = std::min(e_min, model.paired(p, P, two_s, two_m, site_count));
      }
    }
    LogSum acc;
    for (int two_s = P % 2; two_s <= P; two_s += 2) {
      const double log_mult = log_spin_multiplicity(P, two_s);
      for (int two_m = -two_s; two_m <= two_s; two_m += 2) {
        acc.add(weigh(model.paired(p, P, two_s, two_m, site_count), log_mult, e_min));
      }
    }
    paired_min[P] = e_min;
    paired_log[P] = acc.value();

    if (want_condensate) {
      double cond = 0.0;
      for (int two_s = P % 2; two_s <= P; two_s += 2) {
        const double log_mult = log_spin_multiplicity(P, two_s);
        const double s = 0.5 * two_s;
        for (int two_m = -two_s; two_m <= two_s; two_m += 2) {
          const double m = 0.5 * two_m;
          const double lw =
              weigh(model.paired(p, P, two_s, two_m, site_count), log_mult, e_min) - paired_log[P];
          cond += std::exp(lw) * (s * (s + 1.0) - m * m + m);
        }
      }
      paired_cond[P] = cond;
    }
  }

  ThermalSums out;
  out.ground_energy = std::numeric_limits<double>::infinity();
  for (int b = 0; b <= n; ++b) {
    out.ground_energy = std::min(out.ground_energy, blocked_min[b] + paired_min[n - b]);
  }
  std::vector<double> joint(n + 1);
  LogSum total;
  for (int b = 0; b <= n; ++b) {
    const double e = blocked_min[b] + paired_min[n - b];
    joint[b] = weigh(e, blocked_log[b] + paired_log[n - b], out.ground_energy);
    total.add(joint[b]);
  }
  out.log_z_shifted = total.value();
  if (want_condensate) {
    for (int b = 0; b <= n; ++b) {
      out.condensate += std::exp(joint[b] - out.log_z_shifted) * paired_cond[n - b];
    }
  }
  return out;
}

}  // namespace

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  if (n <= kExactBinomialLimit) return std::log(static_cast<double>(pascal_table()[n][k]));
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

BigInt spin_multiplicity(int paired, int two_s) {
  const int k = (paired - two_s) / 2;
  return big_binomial(paired, k) - big_binomial(paired, k - 1);
}

BigInt Sector::dimension() const {
  return occupancy_multiplicity * spin_multiplicity * (two_s + 1);
}

std::vector<Sector> enumerate_sectors(std::size_t site_count) {
  if (site_count == 0) throw std::invalid_argument("enumerate_sectors: N must be >= 1");
  const int n = static_cast<int>(site_count);
  std::vector<Sector> out;
  for (int up = 0; up <= n; ++up) {
    for (int down = 0; up + down <= n; ++down) {
      const int paired = n - up - down;
      const BigInt occupancy = big_binomial(n, up + down) * big_binomial(up + down, up);
      for (int two_s = paired % 2; two_s <= paired; two_s += 2) {
        out.push_back({up, down, paired, two_s, occupancy, spin_multiplicity(paired, two_s)});
      }
    }
  }
  return out;
}

double blocked_energy(const ModelParams& p, int b_up, int b_down) {
  return -p.mu * (b_up + b_down) - p.h * (b_up - b_down);
}

double paired_energy(const ModelParams& p, int paired, int two_s, int two_m,
                     std::size_t site_count) {
  const double s = 0.5 * two_s;
  const double m = 0.5 * two_m;
  const double pairs = m + 0.5 * paired;  // doubly occupied sites
  return (2.0 * p.lambda - 2.0 * p.mu) * pairs -
         (p.gamma / static_cast<double>(site_count)) * (s * (s + 1.0) - m * m + m);
}

SectorSpectrum sector_energies(const ModelParams& p, const Sector& sector, std::size_t site_count,
                               const SectorEnergyModel& model) {
  SectorSpectrum out;
  out.degeneracy = sector.occupancy_multiplicity * sector.spin_multiplicity;
  const double blocked = model.blocked(p, sector.b_up, sector.b_down);
  for (int two_m = -sector.two_s; two_m <= sector.two_s; two_m += 2) {
    out.two_m.push_back(two_m);
    out.energies.push_back(blocked +
                           model.paired(p, sector.paired, sector.two_s, two_m, site_count));
  }
  return out;
}

std::vector<Level> quasispin_spectrum(const ModelParams& p, std::size_t site_count,
                                      const SectorEnergyModel& model) {
  std::vector<Level> levels;
  for (const Sector& sector : enumerate_sectors(site_count)) {
    const SectorSpectrum spectrum = sector_energies(p, sector, site_count, model);
    const double degeneracy = spectrum.degeneracy.convert_to<double>();
    for (double e : spectrum.energies) levels.push_back({e, degeneracy});
  }
  std::sort(levels.begin(), levels.end(),
            [](const Level& a, const Level& b) { return a.energy < b.energy; });
  return levels;
}

double quasispin_pressure(const ModelParams& p, const ThermoParams& t, std::size_t site_count,
                          const SectorEnergyModel& model, std::size_t max_sites) {
  p.validate();
  t.validate();
  if (site_count == 0) throw std::invalid_argument("quasispin_pressure: N must be >= 1");
  check_site_budget(site_count, max_sites, "quasispin_pressure");
  const ThermalSums sums = thermal_sums(p, t, site_count, model, false);
  const double n = static_cast<double>(site_count);
  if (t.is_ground_state()) return -sums.ground_energy / n;
  return (-t.beta * sums.ground_energy + sums.log_z_shifted) / (t.beta * n);
}

double quasispin_condensate(const ModelParams& p, const ThermoParams& t, std::size_t site_count,
                            const SectorEnergyModel& model, std::size_t max_sites) {
  p.validate();
  t.validate();
  if (site_count == 0) throw std::invalid_argument("quasispin_condensate: N must be >= 1");
  check_site_budget(site_count, max_sites, "quasispin_condensate");
  const ThermalSums sums = thermal_sums(p, t, site_count, model, true);
  const double n = static_cast<double>(site_count);
  return sums.condensate / (n * n);
}

}  // namespace bcsh
