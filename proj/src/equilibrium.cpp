#include "bcsh/equilibrium.hpp"

#include "bcsh/spectral.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <thread>

namespace bcsh {

namespace {

// Boltzmann exponents (times 1/beta) of the four eigenvalues of h(c):
// mu + h, mu - h, mu - lambda + E, mu - lambda - E with
// E = sqrt((lambda - mu)^2 + gamma^2 r^2).
struct OnSiteLevels {
  std::array<double, 4> minus_energy;
  double gap_energy;  // E
};

OnSiteLevels onsite_levels(const ModelParams& p, double r) {
  const double shift = p.lambda - p.mu;
  const double e = std::hypot(shift, p.gamma * r);
  return {{p.mu + p.h, p.mu - p.h, -shift + e, -shift - e}, e};
}

double log_sum_exp(std::span<const double> xs) {
  const double top = *std::max_element(xs.begin(), xs.end());
  if (std::isinf(top)) return top;
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - top);
  return top + std::log(sum);
}

// Per-block Gibbs weights of a spectral decomposition, normalized.
std::vector<Eigen::VectorXd> gibbs_weights(const SpectralDecomposition& spec,
                                           const ThermoParams& t) {
  const double e0 = spec.ground_energy();
  std::vector<Eigen::VectorXd> weights;
  weights.reserve(spec.blocks().size());
  double total = 0.0;
  const double degeneracy_tol = 1e-10 * std::max(1.0, std::abs(e0));
  for (const auto& block : spec.blocks()) {
    Eigen::VectorXd w(block.energies.size());
    for (Eigen::Index k = 0; k < w.size(); ++k) {
      const double excess = block.energies(k) - e0;
      w(k) = t.is_ground_state() ? (excess <= degeneracy_tol ? 1.0 : 0.0)
                                 : std::exp(-t.beta * excess);
    }
    total += w.sum();
    weights.push_back(std::move(w));
  }
  for (auto& w : weights) w /= total;
  return weights;
}

}  // namespace

void ThermoParams::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("ThermoParams: beta must be > 0");
}

double onsite_pressure(const ModelParams& p, const ThermoParams& t, OrderParameter c) {
  t.validate();
  const OnSiteLevels levels = onsite_levels(p, std::abs(c));
  if (t.is_ground_state()) {
    return *std::max_element(levels.minus_energy.begin(), levels.minus_energy.end());
  }
  std::array<double, 4> scaled{};
  for (std::size_t i = 0; i < 4; ++i) scaled[i] = t.beta * levels.minus_energy[i];
  return log_sum_exp(scaled) / t.beta;
}

double variational_functional(const ModelParams& p, const ThermoParams& t, OrderParameter c) {
  return -p.gamma * std::norm(c) + onsite_pressure(p, t, c);
}

double variational_slope(const ModelParams& p, const ThermoParams& t, double r) {
  const OnSiteLevels levels = onsite_levels(p, r);
  const double e = levels.gap_energy;
  const double g2r = p.gamma * p.gamma * r;
  if (t.is_ground_state()) {
    const double blocked = std::max(levels.minus_energy[0], levels.minus_energy[1]);
    // Right derivative of sqrt((lambda - mu)^2 + gamma^2 r^2) at e = 0 is gamma.
    const double branch_slope = e > 0.0 ? g2r / e : p.gamma;
    double pressure_slope = 0.0;
    if (levels.minus_energy[2] > blocked) {
      pressure_slope = branch_slope;
    } else if (levels.minus_energy[2] == blocked) {
      pressure_slope = std::max(0.0, branch_slope);
    }
    return -2.0 * p.gamma * r + pressure_slope;
  }
  std::array<double, 4> scaled{};
  for (std::size_t i = 0; i < 4; ++i) scaled[i] = t.beta * levels.minus_energy[i];
  const double top = *std::max_element(scaled.begin(), scaled.end());
  double z = 0.0;
  for (double s : scaled) z += std::exp(s - top);
  // (e^{a3} - e^{a4}) / E with a3 - a4 = 2 beta E, finite as E -> 0.
  const double ratio = e > 0.0 ? -std::expm1(-2.0 * t.beta * e) / e : 2.0 * t.beta;
  const double pressure_slope = g2r * std::exp(scaled[2] - top) * ratio / z;
  return -2.0 * p.gamma * r + pressure_slope;
}

OrderParameterSolution solve_gap(const ModelParams& p, const ThermoParams& t,
                                 const GapOptions& options) {
  p.validate();
  t.validate();
  OrderParameterSolution out;
  if (p.gamma == 0.0) {
    out.value = variational_functional(p, t, 0.0);
    out.degenerate = true;
    out.at_boundary = true;
    out.maximizers = {0.0};
    return out;
  }

  const std::size_t n = std::max<std::size_t>(options.scan_points, 3);
  const double step = options.r_max / static_cast<double>(n - 1);
  std::vector<double> r(n), f(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = step * static_cast<double>(i);
    f[i] = variational_functional(p, t, r[i]);
  }

  auto slope = [&](double x) { return variational_slope(p, t, x); };
  auto refine = [&](double lo, double hi, double fallback) {
    if (!(slope(lo) > 0.0 && slope(hi) < 0.0)) return fallback;
    boost::math::tools::eps_tolerance<double> tol(52);
    std::uintmax_t iterations = 200;
    const auto bracket = boost::math::tools::toms748_solve(slope, lo, hi, tol, iterations);
    const double a = bracket.first, b = bracket.second;
    return std::abs(slope(a)) <= std::abs(slope(b)) ? a : b;
  };

  std::vector<double> candidates;
  if (f[0] >= f[1]) {
    candidates.push_back(0.0);
  } else {
    // The functional rises away from 0: the maximum may sit below one grid step.
    candidates.push_back(refine(step * 1e-9, step, step));
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (f[i] >= f[i - 1] && f[i] > f[i + 1]) candidates.push_back(refine(r[i - 1], r[i + 1], r[i]));
  }
  if (f[n - 1] > f[n - 2]) candidates.push_back(r[n - 1]);

  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> values;
  for (double c : candidates) {
    values.push_back(variational_functional(p, t, c));
    best = std::max(best, values.back());
  }
  const double cutoff = best - options.value_tolerance * std::max(1.0, std::abs(best));
  double best_seen = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (values[i] < cutoff) continue;
    out.maximizers.push_back(candidates[i]);
    if (values[i] > best_seen) {
      best_seen = values[i];
      out.r_star = candidates[i];
    }
  }
  const auto [lo, hi] = std::minmax_element(out.maximizers.begin(), out.maximizers.end());
  out.multistart_spread = *hi - *lo;
  out.value = variational_functional(p, t, out.r_star);
  out.residual = std::abs(slope(out.r_star));
  out.at_boundary = out.r_star == 0.0 || out.r_star >= options.r_max;
  out.superconducting = out.r_star > options.superconducting_threshold;
  return out;
}

double finite_volume_pressure(const ModelParams& p, const ThermoParams& t, std::size_t n,
                              std::size_t max_sites) {
  t.validate();
  const SpectralDecomposition spec(build_hamiltonian(p, n, max_sites));
  const double e0 = spec.ground_energy();
  const double sites = static_cast<double>(n);
  if (t.is_ground_state()) return -e0 / sites;
  double z = 0.0;
  for (const auto& block : spec.blocks()) {
    z += (-t.beta * (block.energies.array() - e0)).exp().sum();
  }
  return (-t.beta * e0 + std::log(z)) / (t.beta * sites);
}

double condensate_density_finite(const ModelParams& p, const ThermoParams& t, std::size_t n,
                                 std::size_t max_sites) {
  t.validate();
  const SpectralDecomposition spec(build_hamiltonian(p, n, max_sites));
  const auto weights = gibbs_weights(spec, t);
  const LatticeOperator number = cooper_zero_mode(n, max_sites).number;

  // Trace(rho O) only sees entries of O inside a block, as rho is block diagonal.
  std::vector<Eigen::MatrixXcd> rho_blocks;
  rho_blocks.reserve(spec.blocks().size());
  for (std::size_t b = 0; b < spec.blocks().size(); ++b) {
    const auto& v = spec.blocks()[b].vectors;
    rho_blocks.push_back(v * weights[b].asDiagonal() * v.adjoint());
  }
  cplx total{};
  const auto& o = number.sparse();
  for (Eigen::Index col = 0; col < o.outerSize(); ++col) {
    for (LatticeOperator::Sparse::InnerIterator it(o, col); it; ++it) {
      const std::size_t b = spec.block_of(it.row());
      if (b != spec.block_of(col)) continue;
      total += rho_blocks[b](spec.position_of(col), spec.position_of(it.row())) * it.value();
    }
  }
  return total.real() / static_cast<double>(n);
}

ApproxGibbs approx_gibbs_onsite(const ModelParams& p, const ThermoParams& t, OrderParameter c) {
  t.validate();
  Eigen::SelfAdjointEigenSolver<OnSiteOperator> solver(build_onsite_approx(p, c));
  const Eigen::Vector4d e = solver.eigenvalues();
  Eigen::Vector4d w;
  const double degeneracy_tol = 1e-12 * std::max(1.0, std::abs(e(0)));
  for (int k = 0; k < 4; ++k) {
    const double excess = e(k) - e(0);
    w(k) = t.is_ground_state() ? (excess <= degeneracy_tol ? 1.0 : 0.0)
                               : std::exp(-t.beta * excess);
  }
  w /= w.sum();
  const auto& v = solver.eigenvectors();
  OnSiteOperator rho = v * w.asDiagonal() * v.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  OnSiteState state(rho);
  const EquilibriumDensities dens = state.densities();
  return {std::move(state), dens};
}

std::vector<double> GridAxis::values() const {
  if (count == 0) throw std::invalid_argument("GridAxis: count must be >= 1");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = count == 1 ? min
                        : min + (max - min) * static_cast<double>(i) /
                                    static_cast<double>(count - 1);
  }
  return out;
}

void set_parameter(ModelParams& p, ThermoParams& t, const std::string& name, double value) {
  if (name == "mu") p.mu = value;
  else if (name == "h") p.h = value;
  else if (name == "lambda") p.lambda = value;
  else if (name == "gamma") p.gamma = value;
  else if (name == "beta") t.beta = value;
  else throw std::invalid_argument("unknown parameter '" + name + "'");
}

std::vector<PhaseDiagramRow> phase_diagram(const ModelParams& base, const ThermoParams& thermo,
                                           const GridAxis& axis1, const GridAxis& axis2,
                                           unsigned workers, const GapOptions& options) {
  const std::vector<double> v1 = axis1.values();
  const std::vector<double> v2 = axis2.values();
  std::vector<PhaseDiagramRow> rows(v1.size() * v2.size());
  // Validate names up front so worker threads never throw on them.
  {
    ModelParams p = base;
    ThermoParams t = thermo;
    set_parameter(p, t, axis1.param, v1.front());
    set_parameter(p, t, axis2.param, v2.front());
  }

  auto evaluate = [&](std::size_t index) {
    ModelParams p = base;
    ThermoParams t = thermo;
    const double x1 = v1[index / v2.size()];
    const double x2 = v2[index % v2.size()];
    set_parameter(p, t, axis1.param, x1);
    set_parameter(p, t, axis2.param, x2);
    const OrderParameterSolution sol = solve_gap(p, t, options);
    const ApproxGibbs gibbs = approx_gibbs_onsite(p, t, sol.r_star);
    rows[index] = {x1, x2, sol.r_star, sol.superconducting, gibbs.densities.d,
                   gibbs.densities.m, gibbs.densities.w};
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(workers, rows.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) evaluate(i);
    return rows;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < rows.size(); i += threads) evaluate(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

}  // namespace bcsh
