#include "bcsh/model.hpp"

#include <cmath>
#include <vector>

namespace bcsh {

namespace {

OnSiteOperator onsite_diagonal_part(const ModelParams& p) {
  OnSiteOperator d = OnSiteOperator::Zero();
  // |0>, |up>, |down>, |up down>
  d.diagonal() << 0.0, -p.mu - p.h, -p.mu + p.h, 2.0 * p.lambda - 2.0 * p.mu;
  return d;
}

LatticeOperator onsite_pair_creator_at(std::size_t x, std::size_t n) {
  return embed(onsite_pair_annihilator().adjoint(), x, n, Parity::even_observable);
}

}  // namespace

void ModelParams::validate() const {
  if (!std::isfinite(mu) || !std::isfinite(h) || !std::isfinite(lambda) ||
      !std::isfinite(gamma)) {
    throw std::invalid_argument("ModelParams: parameters must be finite");
  }
  if (lambda < 0.0) throw std::invalid_argument("ModelParams: lambda must be >= 0");
  if (gamma < 0.0) throw std::invalid_argument("ModelParams: gamma must be >= 0");
}

OnSiteOperator build_onsite_approx(const ModelParams& p, OrderParameter c) {
  const OnSiteOperator pair = onsite_pair_annihilator();
  return onsite_diagonal_part(p) - p.gamma * (c * pair.adjoint() + std::conj(c) * pair);
}

LatticeOperator bcs_pair_interaction(std::size_t n) {
  LatticeOperator creator(n);
  for (std::size_t x = 0; x < n; ++x) creator += onsite_pair_creator_at(x, n);
  return creator * creator.adjoint();
}

LatticeOperator total_number(std::size_t n, Spin spin) {
  LatticeOperator out(n);
  for (std::size_t x = 0; x < n; ++x) out += lattice_op(OpKind::number, spin, x, n);
  return out;
}

LatticeOperator total_number(std::size_t n) {
  return total_number(n, Spin::up) + total_number(n, Spin::down);
}

LatticeOperator build_hamiltonian(const ModelParams& p, std::size_t n, std::size_t max_sites) {
  p.validate();
  check_site_budget(n, max_sites, "build_hamiltonian");
  LatticeOperator H(n);
  const OnSiteOperator local = onsite_diagonal_part(p);
  for (std::size_t x = 0; x < n; ++x) H += embed(local, x, n, Parity::even_observable);
  if (p.gamma != 0.0) H -= (p.gamma / static_cast<double>(n)) * bcs_pair_interaction(n);
  return H;
}

LatticeOperator build_approx_hamiltonian(const ModelParams& p, OrderParameter c, std::size_t n,
                                         std::size_t max_sites) {
  p.validate();
  check_site_budget(n, max_sites, "build_approx_hamiltonian");
  const OnSiteOperator local = build_onsite_approx(p, c);
  LatticeOperator H(n);
  for (std::size_t x = 0; x < n; ++x) H += embed(local, x, n, Parity::even_observable);
  return H;
}

CooperZeroMode cooper_zero_mode(std::size_t n, std::size_t max_sites) {
  check_site_budget(n, max_sites, "cooper_zero_mode");
  LatticeOperator c0(n);
  for (std::size_t x = 0; x < n; ++x) {
    c0 += embed(onsite_pair_annihilator(), x, n, Parity::even_observable);
  }
  c0 *= 1.0 / std::sqrt(static_cast<double>(n));
  LatticeOperator number = c0.adjoint() * c0;
  return {std::move(c0), std::move(number)};
}

double verify_bcs_momentum_identity(std::size_t n) {
  // Position side, built from products of single fermion operators rather
  // than the on-site pair matrices.
  LatticeOperator position(n);
  for (std::size_t x = 0; x < n; ++x) {
    const LatticeOperator creators = lattice_op(OpKind::create, Spin::up, x, n) *
                                     lattice_op(OpKind::create, Spin::down, x, n);
    for (std::size_t y = 0; y < n; ++y) {
      const LatticeOperator annihilators = lattice_op(OpKind::annihilate, Spin::down, y, n) *
                                           lattice_op(OpKind::annihilate, Spin::up, y, n);
      position += creators * annihilators;
    }
  }

  const long modes = static_cast<long>(n);
  std::vector<LatticeOperator> up, down;
  for (long k = 0; k < modes; ++k) {
    up.push_back(momentum_annihilator(k, Spin::up, n));
    down.push_back(momentum_annihilator(k, Spin::down, n));
  }
  auto neg = [modes](long k) { return (modes - k) % modes; };

  LatticeOperator momentum(n);
  for (long k = 0; k < modes; ++k) {
    const LatticeOperator creators = up[k].adjoint() * down[neg(k)].adjoint();
    for (long q = 0; q < modes; ++q) {
      momentum += creators * (down[q] * up[neg(q)]);
    }
  }
  return (position - momentum).max_abs();
}

}  // namespace bcsh
