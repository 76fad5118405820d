#include "bcsh/spectral.hpp"

#include <algorithm>
#include <numeric>

namespace bcsh {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

SpectralDecomposition::SpectralDecomposition(const LatticeOperator& hermitian) {
  const auto& m = hermitian.sparse();
  const auto dim = static_cast<std::size_t>(m.rows());
  DisjointSets sets(dim);
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (LatticeOperator::Sparse::InnerIterator it(m, k); it; ++it) {
      if (it.value() != cplx{}) sets.unite(static_cast<std::size_t>(it.row()),
                                           static_cast<std::size_t>(it.col()));
    }
  }

  // Blocks are numbered by their smallest Fock index, which keeps the
  // ordering deterministic.
  std::vector<std::size_t> root_to_block(dim, dim);
  block_of_.assign(dim, 0);
  position_.assign(dim, 0);
  for (std::size_t i = 0; i < dim; ++i) {
    const std::size_t root = sets.find(i);
    if (root_to_block[root] == dim) {
      root_to_block[root] = blocks_.size();
      blocks_.emplace_back();
    }
    auto& block = blocks_[root_to_block[root]];
    block_of_[i] = root_to_block[root];
    position_[i] = static_cast<Eigen::Index>(block.basis.size());
    block.basis.push_back(static_cast<Eigen::Index>(i));
  }

  for (auto& block : blocks_) {
    const auto n = static_cast<Eigen::Index>(block.basis.size());
    Eigen::MatrixXcd local = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      for (LatticeOperator::Sparse::InnerIterator it(m, block.basis[c]); it; ++it) {
        local(position_[it.row()], c) = it.value();
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(local);
    block.energies = solver.eigenvalues();
    block.vectors = solver.eigenvectors();
  }
}

std::vector<double> SpectralDecomposition::eigenvalues() const {
  std::vector<double> out;
  out.reserve(block_of_.size());
  for (const auto& block : blocks_) {
    out.insert(out.end(), block.energies.data(), block.energies.data() + block.energies.size());
  }
  std::sort(out.begin(), out.end());
  return out;
}

double SpectralDecomposition::ground_energy() const {
  double e = std::numeric_limits<double>::infinity();
  for (const auto& block : blocks_) e = std::min(e, block.energies(0));
  return e;
}

std::vector<double> eigenvalues(const LatticeOperator& hermitian) {
  return SpectralDecomposition(hermitian).eigenvalues();
}

double hermiticity_residual(const LatticeOperator& op) {
  return (op - op.adjoint()).max_abs();
}

}  // namespace bcsh
