#pragma once

// Eigendecomposition of sparse Hermitian lattice operators. The matrix is
// split into the connected components of its sparsity graph and each block
// is diagonalized densely, so conserved quantum numbers are exploited
// without naming them.

#include "bcsh/algebra.hpp"

#include <vector>

namespace bcsh {

struct SpectralBlock {
  std::vector<Eigen::Index> basis;  // Fock indices spanned by this block, ascending
  Eigen::VectorXd energies;         // ascending
  Eigen::MatrixXcd vectors;         // columns are eigenvectors in `basis` coordinates
};

class SpectralDecomposition {
 public:
  explicit SpectralDecomposition(const LatticeOperator& hermitian);

  const std::vector<SpectralBlock>& blocks() const { return blocks_; }
  std::size_t block_of(Eigen::Index fock_index) const { return block_of_[fock_index]; }
  /// Position of a Fock index inside its block's basis.
  Eigen::Index position_of(Eigen::Index fock_index) const { return position_[fock_index]; }
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(block_of_.size()); }

  /// All eigenvalues, ascending.
  std::vector<double> eigenvalues() const;
  double ground_energy() const;

 private:
  std::vector<SpectralBlock> blocks_;
  std::vector<std::size_t> block_of_;
  std::vector<Eigen::Index> position_;
};

/// Sorted spectrum of a Hermitian lattice operator.
std::vector<double> eigenvalues(const LatticeOperator& hermitian);

/// max |H - H^dagger| entrywise.
double hermiticity_residual(const LatticeOperator& op);

}  // namespace bcsh
