#pragma once

// Fermionic operator algebra on the one-site Fock space C^4 and on N-site
// chains (dimension 4^N).
//
// One-site basis order: |0>, |up>, |down>, |up down>. Basis index bit 0 is
// the up occupation, bit 1 the down occupation. Creation operators follow
// a*_up a*_down |0> = +|up down>.
//
// Multi-site basis index: sum_x local_x * 4^x. Jordan-Wigner mode order is
// (0 up, 0 down, 1 up, 1 down, ...), so a single fermion operator at site x
// carries the parity string of all sites y < x.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace bcsh {

using cplx = std::complex<double>;
using OnSiteOperator = Eigen::Matrix<cplx, 4, 4>;

enum class Spin { up, down };
enum class OpKind { create, annihilate, number };
enum class Parity { even_observable, single_fermion };

/// Largest chain handled by the dense/sparse exact paths unless overridden.
inline constexpr std::size_t kDefaultMaxSites = 6;

class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ResourceLimitError when `sites` exceeds `max_sites`.
void check_site_budget(std::size_t sites, std::size_t max_sites, const std::string& what);

OnSiteOperator onsite_op(OpKind kind, Spin spin);
OnSiteOperator onsite_identity();
/// (-1)^(n_up + n_down)
OnSiteOperator onsite_parity();
/// a_down a_up, the on-site Cooper pair annihilator.
OnSiteOperator onsite_pair_annihilator();

/// True when A commutes with the on-site parity (an even element).
bool is_even(const OnSiteOperator& A, double tol = 1e-14);

class LatticeOperator {
 public:
  using Sparse = Eigen::SparseMatrix<cplx>;

  explicit LatticeOperator(std::size_t site_count);
  LatticeOperator(std::size_t site_count, Sparse matrix);

  static LatticeOperator identity(std::size_t site_count);

  std::size_t site_count() const { return sites_; }
  Eigen::Index dimension() const { return matrix_.rows(); }
  const Sparse& sparse() const { return matrix_; }
  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix_); }

  LatticeOperator adjoint() const;
  /// Largest entry modulus; zero for the zero operator.
  double max_abs() const;

  LatticeOperator& operator+=(const LatticeOperator& other);
  LatticeOperator& operator-=(const LatticeOperator& other);
  LatticeOperator& operator*=(cplx scale);

  friend LatticeOperator operator+(LatticeOperator a, const LatticeOperator& b) { return a += b; }
  friend LatticeOperator operator-(LatticeOperator a, const LatticeOperator& b) { return a -= b; }
  friend LatticeOperator operator*(LatticeOperator a, cplx s) { return a *= s; }
  friend LatticeOperator operator*(cplx s, LatticeOperator a) { return a *= s; }
  friend LatticeOperator operator*(const LatticeOperator& a, const LatticeOperator& b);

 private:
  void require_same_sites(const LatticeOperator& other) const;

  std::size_t sites_;
  Sparse matrix_;
};

LatticeOperator commutator(const LatticeOperator& a, const LatticeOperator& b);
LatticeOperator anticommutator(const LatticeOperator& a, const LatticeOperator& b);

/// Copy of A acting at site x of an N-site chain. Single fermion operators
/// receive the Jordan-Wigner parity string of the sites before x.
LatticeOperator embed(const OnSiteOperator& A, std::size_t x, std::size_t site_count,
                      Parity parity);

/// A operator on the first A.site_count() sites of a longer chain. Sites
/// beyond the original chain come last in the Jordan-Wigner order, so no
/// parity strings are needed.
LatticeOperator extend(const LatticeOperator& A, std::size_t site_count);

/// a_{x,s}, a*_{x,s} or n_{x,s} on the chain.
LatticeOperator lattice_op(OpKind kind, Spin spin, std::size_t x, std::size_t site_count);

/// Maximum entrywise residual of {a_i, a*_j} = delta_ij and {a_i, a_j} = 0
/// over all modes of an N-site chain.
double verify_car(std::size_t site_count);

/// Momentum mode annihilator on the periodic chain of N sites:
///   a~_{k,s} = N^{-1/2} sum_x exp(-i k x) a_{x,s},  k = 2 pi j / N.
/// `k_index` is j, taken modulo N.
LatticeOperator momentum_annihilator(long k_index, Spin spin, std::size_t site_count);

}  // namespace bcsh
