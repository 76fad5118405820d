#include "bcsh/algebra.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <vector>

namespace bcsh {

void check_site_budget(std::size_t sites, std::size_t max_sites, const std::string& what) {
  if (sites > max_sites) {
    throw ResourceLimitError(what + ": " + std::to_string(sites) +
                             " sites exceeds the configured limit of " +
                             std::to_string(max_sites));
  }
}

OnSiteOperator onsite_op(OpKind kind, Spin spin) {
  OnSiteOperator a = OnSiteOperator::Zero();
  if (spin == Spin::up) {
    // a_up |up> = |0>, a_up |up down> = |down>
    a(0, 1) = 1.0;
    a(2, 3) = 1.0;
  } else {
    // a_down |down> = |0>, a_down |up down> = -|up>
    a(0, 2) = 1.0;
    a(1, 3) = -1.0;
  }
  switch (kind) {
    case OpKind::annihilate:
      return a;
    case OpKind::create:
      return a.adjoint();
    case OpKind::number:
      return a.adjoint() * a;
  }
  return a;
}

OnSiteOperator onsite_identity() { return OnSiteOperator::Identity(); }

OnSiteOperator onsite_parity() {
  OnSiteOperator p = OnSiteOperator::Zero();
  p.diagonal() << 1.0, -1.0, -1.0, 1.0;
  return p;
}

OnSiteOperator onsite_pair_annihilator() {
  return onsite_op(OpKind::annihilate, Spin::down) * onsite_op(OpKind::annihilate, Spin::up);
}

bool is_even(const OnSiteOperator& A, double tol) {
  const OnSiteOperator P = onsite_parity();
  return (P * A - A * P).cwiseAbs().maxCoeff() <= tol;
}

LatticeOperator::LatticeOperator(std::size_t site_count)
    : sites_(site_count) {
  const Eigen::Index dim = Eigen::Index{1} << (2 * site_count);
  matrix_.resize(dim, dim);
}

LatticeOperator::LatticeOperator(std::size_t site_count, Sparse matrix)
    : sites_(site_count), matrix_(std::move(matrix)) {
  const Eigen::Index dim = Eigen::Index{1} << (2 * site_count);
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    throw std::invalid_argument("LatticeOperator: matrix dimension does not match 4^N");
  }
  matrix_.makeCompressed();
}

LatticeOperator LatticeOperator::identity(std::size_t site_count) {
  LatticeOperator out(site_count);
  out.matrix_.setIdentity();
  return out;
}

LatticeOperator LatticeOperator::adjoint() const {
  return LatticeOperator(sites_, Sparse(matrix_.adjoint()));
}

double LatticeOperator::max_abs() const {
  double best = 0.0;
  for (Eigen::Index k = 0; k < matrix_.outerSize(); ++k) {
    for (Sparse::InnerIterator it(matrix_, k); it; ++it) {
      best = std::max(best, std::abs(it.value()));
    }
  }
  return best;
}

void LatticeOperator::require_same_sites(const LatticeOperator& other) const {
  if (sites_ != other.sites_) {
    throw std::invalid_argument("LatticeOperator: site counts differ (" +
                                std::to_string(sites_) + " vs " +
                                std::to_string(other.sites_) + ")");
  }
}

LatticeOperator& LatticeOperator::operator+=(const LatticeOperator& other) {
  require_same_sites(other);
  matrix_ += other.matrix_;
  return *this;
}

LatticeOperator& LatticeOperator::operator-=(const LatticeOperator& other) {
  require_same_sites(other);
  matrix_ -= other.matrix_;
  return *this;
}

LatticeOperator& LatticeOperator::operator*=(cplx scale) {
  matrix_ *= scale;
  return *this;
}

LatticeOperator operator*(const LatticeOperator& a, const LatticeOperator& b) {
  a.require_same_sites(b);
  LatticeOperator::Sparse product = a.matrix_ * b.matrix_;
  return LatticeOperator(a.sites_, std::move(product));
}

LatticeOperator commutator(const LatticeOperator& a, const LatticeOperator& b) {
  return a * b - b * a;
}

LatticeOperator anticommutator(const LatticeOperator& a, const LatticeOperator& b) {
  return a * b + b * a;
}

LatticeOperator embed(const OnSiteOperator& A, std::size_t x, std::size_t site_count,
                      Parity parity) {
  if (x >= site_count) {
    throw std::out_of_range("embed: site " + std::to_string(x) + " outside chain of " +
                            std::to_string(site_count) + " sites");
  }
  const std::uint64_t dim = std::uint64_t{1} << (2 * site_count);
  const unsigned shift = static_cast<unsigned>(2 * x);
  const std::uint64_t below_mask = (std::uint64_t{1} << shift) - 1;

  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(dim * 2);
  for (std::uint64_t col = 0; col < dim; ++col) {
    const int local = static_cast<int>((col >> shift) & 3u);
    const bool negate = parity == Parity::single_fermion && (std::popcount(col & below_mask) & 1);
    for (int r = 0; r < 4; ++r) {
      const cplx v = A(r, local);
      if (v == cplx{}) continue;
      const std::uint64_t row = (col & ~(std::uint64_t{3} << shift)) |
                                (static_cast<std::uint64_t>(r) << shift);
      triplets.emplace_back(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col),
                            negate ? -v : v);
    }
  }
  LatticeOperator::Sparse m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return LatticeOperator(site_count, std::move(m));
}

LatticeOperator extend(const LatticeOperator& A, std::size_t site_count) {
  if (site_count < A.site_count()) {
    throw std::invalid_argument("extend: target chain is shorter than the operator's chain");
  }
  const Eigen::Index inner = A.dimension();
  const Eigen::Index copies = Eigen::Index{1} << (2 * (site_count - A.site_count()));
  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(static_cast<std::size_t>(A.sparse().nonZeros() * copies));
  for (Eigen::Index block = 0; block < copies; ++block) {
    const Eigen::Index offset = block * inner;
    for (Eigen::Index col = 0; col < A.sparse().outerSize(); ++col) {
      for (LatticeOperator::Sparse::InnerIterator it(A.sparse(), col); it; ++it) {
        triplets.emplace_back(offset + it.row(), offset + col, it.value());
      }
    }
  }
  LatticeOperator::Sparse m(inner * copies, inner * copies);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return LatticeOperator(site_count, std::move(m));
}

LatticeOperator lattice_op(OpKind kind, Spin spin, std::size_t x, std::size_t site_count) {
  const Parity parity = kind == OpKind::number ? Parity::even_observable : Parity::single_fermion;
  return embed(onsite_op(kind, spin), x, site_count, parity);
}

double verify_car(std::size_t site_count) {
  std::vector<LatticeOperator> modes;
  for (std::size_t x = 0; x < site_count; ++x) {
    for (Spin s : {Spin::up, Spin::down}) {
      modes.push_back(lattice_op(OpKind::annihilate, s, x, site_count));
    }
  }
  const LatticeOperator one = LatticeOperator::identity(site_count);
  double residual = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = 0; j < modes.size(); ++j) {
      LatticeOperator mixed = anticommutator(modes[i], modes[j].adjoint());
      if (i == j) mixed -= one;
      residual = std::max(residual, mixed.max_abs());
      residual = std::max(residual, anticommutator(modes[i], modes[j]).max_abs());
    }
  }
  return residual;
}

LatticeOperator momentum_annihilator(long k_index, Spin spin, std::size_t site_count) {
  const long n = static_cast<long>(site_count);
  const long j = ((k_index % n) + n) % n;
  const double k = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  LatticeOperator out(site_count);
  for (std::size_t x = 0; x < site_count; ++x) {
    const cplx phase = std::polar(norm, -k * static_cast<double>(x));
    out += phase * lattice_op(OpKind::annihilate, spin, x, site_count);
  }
  return out;
}

}  // namespace bcsh
