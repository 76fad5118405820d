#include "bcsh/dynamics.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

namespace bcsh {

namespace odeint = boost::numeric::odeint;

namespace {

using DensityState = std::array<double, 32>;  // re/im pairs of a column-major 4x4
using RotorState = std::array<double, 3>;

constexpr std::size_t kMaxStepsPerInterval = 10'000'000;

DensityState pack(const OnSiteOperator& m) {
  DensityState x{};
  for (int k = 0; k < 16; ++k) {
    x[2 * k] = m.data()[k].real();
    x[2 * k + 1] = m.data()[k].imag();
  }
  return x;
}

OnSiteOperator unpack(const DensityState& x) {
  OnSiteOperator m;
  for (int k = 0; k < 16; ++k) m.data()[k] = cplx(x[2 * k], x[2 * k + 1]);
  return m;
}

// D' = -i [h, D]
OnSiteOperator liouville_rhs(const OnSiteOperator& h, const OnSiteOperator& d) {
  return cplx(0.0, -1.0) * (h * d - d * h);
}

// Interaction picture with respect to the constant diagonal part h0 of
// h(c). With Phi(t) = exp(-i h0 t) the lab density is D = Phi D~ Phi* and
// D~' = -i [Phi* (h(c) - h0) Phi, D~]. The fast phases are then exact and
// the integrator only resolves the slow pair dynamics.
class RotatingFrame {
 public:
  explicit RotatingFrame(const ModelParams& p) : h0_(build_onsite_approx(p, 0.0).diagonal().real()) {}

  Eigen::Vector4cd phases(double t) const {
    Eigen::Vector4cd phi;
    for (int k = 0; k < 4; ++k) phi(k) = std::polar(1.0, -h0_(k) * t);
    return phi;
  }
  OnSiteOperator to_lab(const OnSiteOperator& m, double t) const {
    const Eigen::Vector4cd phi = phases(t);
    return phi.asDiagonal() * m * phi.conjugate().asDiagonal();
  }
  OnSiteOperator to_frame(const OnSiteOperator& m, double t) const {
    const Eigen::Vector4cd phi = phases(t);
    return phi.conjugate().asDiagonal() * m * phi.asDiagonal();
  }
  // Interaction-picture right-hand side for the lab-frame generator h.
  OnSiteOperator rhs(OnSiteOperator h, const OnSiteOperator& d_frame, double t) const {
    h.diagonal() -= h0_.cast<cplx>();
    return liouville_rhs(to_frame(h, t), d_frame);
  }

 private:
  Eigen::Vector4d h0_;
};

// Runs `system` through the configured integrator, calling `observe` at
// each sample time.
template <class State, class System, class Observer>
void integrate_samples(const DynamicsConfig& cfg, System system, State& x, Observer user_observe) {
  auto observe = [&](const State& s, double t) {
    if (!std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); })) {
      throw IntegrationError("integrator produced a non-finite state at t = " + std::to_string(t));
    }
    user_observe(s, t);
  };
  try {
    if (cfg.integrator == Integrator::rk4) {
      odeint::integrate_times(odeint::runge_kutta4<State>(), system, x, cfg.times.begin(),
                              cfg.times.end(), cfg.step, observe,
                              odeint::max_step_checker(kMaxStepsPerInterval));
    } else {
      auto stepper = odeint::make_controlled(cfg.abs_tol, cfg.rel_tol,
                                             odeint::runge_kutta_fehlberg78<State>());
      odeint::integrate_times(stepper, system, x, cfg.times.begin(), cfg.times.end(), cfg.step,
                              observe, odeint::max_step_checker(kMaxStepsPerInterval));
    }
  } catch (const odeint::odeint_error& e) {
    throw IntegrationError(std::string("integrator failed: ") + e.what());
  }
}

double wrap_phase(double theta) {
  // std::arg returns (-pi, pi]; records use [-pi, pi).
  return theta >= std::numbers::pi ? theta - 2.0 * std::numbers::pi : theta;
}

cplx driving_amplitude(const OnSiteOperator& d, PairConvention convention) {
  // Trace(D a_down a_up) = D(3, 0); a_up a_down = -a_down a_up.
  return convention == PairConvention::down_up ? d(3, 0) : -d(3, 0);
}

// Density-matrix entry of the product state (x) rho0 between Fock indices.
cplx product_entry(const OnSiteOperator& rho0, Eigen::Index row, Eigen::Index col,
                   std::size_t sites) {
  cplx v = 1.0;
  for (std::size_t x = 0; x < sites && v != cplx{}; ++x) {
    v *= rho0(static_cast<int>((row >> (2 * x)) & 3), static_cast<int>((col >> (2 * x)) & 3));
  }
  return v;
}

}  // namespace

void DynamicsConfig::validate() const {
  if (!(step > 0.0)) throw std::invalid_argument("DynamicsConfig: step must be > 0");
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw std::invalid_argument("DynamicsConfig: tolerances must be > 0");
  }
  if (times.empty()) throw std::invalid_argument("DynamicsConfig: no sample times");
  if (times.front() < 0.0) throw std::invalid_argument("DynamicsConfig: times must be >= 0");
  if (!std::is_sorted(times.begin(), times.end()) ||
      std::adjacent_find(times.begin(), times.end()) != times.end()) {
    throw std::invalid_argument("DynamicsConfig: times must be strictly increasing");
  }
}

std::vector<double> DynamicsConfig::uniform_times(double horizon, std::size_t samples) {
  if (samples < 2) return {0.0};
  std::vector<double> out(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    out[i] = horizon * static_cast<double>(i) / static_cast<double>(samples - 1);
  }
  return out;
}

ExactEvolution::ExactEvolution(const ModelParams& p, std::size_t n, const OnSiteState& rho0,
                               const OnSiteOperator& observable, std::size_t max_sites) {
  if (!rho0.is_even()) throw InvalidStateError("evolve_exact: initial state is not even");
  const SpectralDecomposition spec(build_hamiltonian(p, n, max_sites));
  // Site 0 carries no Jordan-Wigner string, so the embedding is parity blind.
  const LatticeOperator a = embed(observable, 0, n, Parity::even_observable);

  // Collect the nonzero blocks A_{ab} (rows in block a, columns in block b).
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Eigen::Triplet<cplx>>> pieces;
  for (Eigen::Index col = 0; col < a.sparse().outerSize(); ++col) {
    for (LatticeOperator::Sparse::InnerIterator it(a.sparse(), col); it; ++it) {
      pieces[{spec.block_of(it.row()), spec.block_of(col)}].emplace_back(
          spec.position_of(it.row()), spec.position_of(col), it.value());
    }
  }

  const OnSiteOperator& d0 = rho0.density();
  for (const auto& [key, entries] : pieces) {
    const SpectralBlock& ba = spec.blocks()[key.first];
    const SpectralBlock& bb = spec.blocks()[key.second];
    const auto na = static_cast<Eigen::Index>(ba.basis.size());
    const auto nb = static_cast<Eigen::Index>(bb.basis.size());

    Eigen::MatrixXcd a_ab = Eigen::MatrixXcd::Zero(na, nb);
    for (const auto& e : entries) a_ab(e.row(), e.col()) = e.value();
    Eigen::MatrixXcd d_ba(nb, na);
    for (Eigen::Index k = 0; k < nb; ++k) {
      for (Eigen::Index j = 0; j < na; ++j) d_ba(k, j) = product_entry(d0, bb.basis[k], ba.basis[j], n);
    }
    if (d_ba.cwiseAbs().maxCoeff() == 0.0) continue;

    const Eigen::MatrixXcd a_eig = ba.vectors.adjoint() * a_ab * bb.vectors;
    const Eigen::MatrixXcd d_eig = bb.vectors.adjoint() * d_ba * ba.vectors;
    for (Eigen::Index j = 0; j < na; ++j) {
      for (Eigen::Index k = 0; k < nb; ++k) {
        const cplx w = d_eig(k, j) * a_eig(j, k);
        if (w == cplx{}) continue;
        weights_.push_back(w);
        frequencies_.push_back(ba.energies(j) - bb.energies(k));
      }
    }
  }
}

cplx ExactEvolution::expectation(double t) const {
  cplx sum{};
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    sum += weights_[i] * std::polar(1.0, t * frequencies_[i]);
  }
  return sum;
}

std::vector<cplx> evolve_exact(const ModelParams& p, std::size_t n, const OnSiteState& rho0,
                               const OnSiteOperator& observable, const std::vector<double>& times,
                               std::size_t max_sites) {
  const ExactEvolution evolution(p, n, rho0, observable, max_sites);
  std::vector<cplx> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(evolution.expectation(t));
  return out;
}

std::vector<OnSiteState> evolve_approx(const ModelParams& p, OrderParameter c,
                                       const OnSiteState& rho0, const std::vector<double>& times) {
  Eigen::SelfAdjointEigenSolver<OnSiteOperator> solver(build_onsite_approx(p, c));
  const auto& v = solver.eigenvectors();
  const OnSiteOperator d_eig = v.adjoint() * rho0.density() * v;
  std::vector<OnSiteState> out;
  out.reserve(times.size());
  for (double t : times) {
    Eigen::Vector4cd phase;
    for (int k = 0; k < 4; ++k) phase(k) = std::polar(1.0, -t * solver.eigenvalues()(k));
    const OnSiteOperator evolved = phase.asDiagonal() * d_eig * phase.conjugate().asDiagonal();
    out.push_back(OnSiteState::unchecked(v * evolved * v.adjoint()));
  }
  return out;
}

std::vector<OnSiteState> evolve_approx(const ModelParams& p, const std::function<cplx(double)>& c,
                                       const OnSiteState& rho0, const DynamicsConfig& cfg) {
  cfg.validate();
  const RotatingFrame frame(p);
  auto system = [&](const DensityState& x, DensityState& dxdt, double t) {
    dxdt = pack(frame.rhs(build_onsite_approx(p, c(t)), unpack(x), t));
  };
  DensityState x = pack(rho0.density());
  std::vector<OnSiteState> out;
  integrate_samples(cfg, system, x, [&](const DensityState& s, double t) {
    out.push_back(OnSiteState::unchecked(frame.to_lab(unpack(s), t)));
  });
  return out;
}

LatticeOperator evolve_approx_heisenberg(const ModelParams& p, const std::function<cplx(double)>& c,
                                         const LatticeOperator& observable, double t,
                                         std::size_t slices) {
  const std::size_t n = observable.site_count();
  check_site_budget(n, 4, "evolve_approx_heisenberg");
  if (slices == 0) throw std::invalid_argument("evolve_approx_heisenberg: slices must be >= 1");
  const Eigen::Index dim = observable.dimension();
  const double dt = t / static_cast<double>(slices);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (std::size_t s = 0; s < slices; ++s) {
    const double mid = (static_cast<double>(s) + 0.5) * dt;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        build_approx_hamiltonian(p, c(mid), n).dense());
    const Eigen::VectorXcd phase =
        (cplx(0.0, -dt) * solver.eigenvalues().cast<cplx>()).array().exp();
    u = (solver.eigenvectors() * phase.asDiagonal() * solver.eigenvectors().adjoint() * u).eval();
  }
  const Eigen::MatrixXcd evolved = u.adjoint() * observable.dense() * u;
  return LatticeOperator(n, evolved.sparseView(0.0, 0.0));
}

double rotation_frequency(const ModelParams& p, double d) {
  return 2.0 * (p.mu - p.lambda) + p.gamma * (1.0 - d);
}

ObservableRecord closed_form_observables(const ModelParams& p, const OnSiteState& rho0, double t) {
  if (!rho0.is_even()) throw InvalidStateError("closed_form_observables: state is not even");
  const EquilibriumDensities dens = rho0.densities();
  ObservableRecord r;
  r.t = t;
  r.d = dens.d;
  r.m = dens.m;
  r.w = dens.w;
  r.kappa = std::norm(dens.pair);
  r.theta = wrap_phase(std::arg(dens.pair));
  r.nu = rotation_frequency(p, dens.d);
  r.pair = std::sqrt(r.kappa) * std::polar(1.0, t * r.nu + r.theta);
  return r;
}

SelfConsistentTrajectory evolve_self_consistent(const ModelParams& p, const OnSiteState& rho0,
                                                const DynamicsConfig& cfg) {
  cfg.validate();
  if (!rho0.is_even()) throw InvalidStateError("evolve_self_consistent: initial state is not even");
  const RotatingFrame frame(p);
  auto system = [&](const DensityState& x, DensityState& dxdt, double t) {
    const OnSiteOperator d_frame = unpack(x);
    const cplx c = driving_amplitude(frame.to_lab(d_frame, t), cfg.convention);
    dxdt = pack(frame.rhs(build_onsite_approx(p, c), d_frame, t));
  };

  const EquilibriumDensities initial = rho0.densities();
  SelfConsistentTrajectory out;
  DensityState x = pack(rho0.density());
  integrate_samples(cfg, system, x, [&](const DensityState& s, double t) {
    const OnSiteState state = OnSiteState::unchecked(frame.to_lab(unpack(s), t));
    const EquilibriumDensities dens = state.densities();
    ObservableRecord r;
    r.t = t;
    r.d = dens.d;
    r.m = dens.m;
    r.w = dens.w;
    r.pair = dens.pair;
    r.kappa = std::norm(initial.pair);
    r.theta = wrap_phase(std::arg(initial.pair));
    r.nu = cfg.convention == PairConvention::down_up
               ? rotation_frequency(p, initial.d)
               : 2.0 * (p.mu - p.lambda) - p.gamma * (1.0 - initial.d);
    out.times.push_back(t);
    out.states.push_back(state);
    out.records.push_back(r);
  });
  return out;
}

RotorVector rotor_from_state(const ModelParams& p, const OnSiteState& s) {
  const EquilibriumDensities dens = s.densities();
  return {dens.pair.real(), dens.pair.imag(), rotation_frequency(p, dens.d)};
}

std::vector<RotorVector> evolve_rotor(const RotorVector& initial, const DynamicsConfig& cfg) {
  cfg.validate();
  auto system = [](const RotorState& x, RotorState& dxdt, double) {
    dxdt = {-x[2] * x[1], x[2] * x[0], 0.0};
  };
  RotorState x{initial.omega1, initial.omega2, initial.omega3};
  std::vector<RotorVector> out;
  integrate_samples(cfg, system, x, [&](const RotorState& s, double) {
    out.push_back({s[0], s[1], s[2]});
  });
  return out;
}

RotorVector rotor_exact(const RotorVector& initial, double t) {
  const double angle = initial.omega3 * t;
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * initial.omega1 - s * initial.omega2, s * initial.omega1 + c * initial.omega2,
          initial.omega3};
}

double fit_phase_slope(const std::vector<double>& times, const std::vector<cplx>& values) {
  if (times.size() != values.size() || times.size() < 2) {
    throw std::invalid_argument("fit_phase_slope: need at least two matching samples");
  }
  std::vector<double> phase(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == cplx{}) throw std::invalid_argument("fit_phase_slope: vanishing sample");
    double a = std::arg(values[i]);
    if (i > 0) {
      a += 2.0 * std::numbers::pi * std::round((phase[i - 1] - a) / (2.0 * std::numbers::pi));
      if (std::abs(a - phase[i - 1]) > 0.5 * std::numbers::pi) {
        throw std::invalid_argument("fit_phase_slope: sampling too coarse to unwrap the phase");
      }
    }
    phase[i] = a;
  }
  const double n = static_cast<double>(times.size());
  double tm = 0.0, pm = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    tm += times[i];
    pm += phase[i];
  }
  tm /= n;
  pm /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    num += (times[i] - tm) * (phase[i] - pm);
    den += (times[i] - tm) * (times[i] - tm);
  }
  return num / den;
}

std::vector<ConvergenceRow> convergence_study(const ModelParams& p, const OnSiteState& rho0,
                                              const OnSiteOperator& observable,
                                              const std::vector<std::size_t>& site_counts,
                                              const DynamicsConfig& cfg, std::size_t max_sites) {
  for (std::size_t n : site_counts) {
    if (n == 0) throw std::invalid_argument("convergence_study: N must be >= 1");
    check_site_budget(n, max_sites, "convergence_study");
  }
  const SelfConsistentTrajectory mf = evolve_self_consistent(p, rho0, cfg);
  std::vector<ConvergenceRow> rows;
  for (std::size_t n : site_counts) {
    const ExactEvolution exact(p, n, rho0, observable, max_sites);
    for (std::size_t i = 0; i < mf.times.size(); ++i) {
      ConvergenceRow row;
      row.site_count = n;
      row.t = mf.times[i];
      row.exact = exact.expectation(row.t);
      row.mean_field = mf.states[i].expectation(observable);
      row.abs_error = std::abs(row.exact - row.mean_field);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace bcsh
