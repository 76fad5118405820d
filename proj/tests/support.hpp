#pragma once

// Oracles and generators for the tests. Nothing here calls the code under
// test for the quantity being checked.

#include "bcsh/algebra.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <random>

namespace bcsh::test {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline cplx random_complex(std::mt19937_64& rng, double radius = 1.0) {
  return std::polar(uniform(rng, 0.0, radius), uniform(rng, -std::numbers::pi, std::numbers::pi));
}

// (1/beta) log Trace expm(-beta H) by a Pade matrix exponential.
inline double log_trace_exp(const Eigen::MatrixXcd& h, double beta) {
  const double shift = h.diagonal().real().minCoeff();
  Eigen::MatrixXcd shifted = h;
  shifted.diagonal().array() -= shift;
  const Eigen::MatrixXcd e = (-beta * shifted).exp();
  return -shift + std::log(e.trace().real()) / beta;
}

inline Eigen::MatrixXcd expm(const Eigen::MatrixXcd& m) { return m.exp(); }

// exp(-i t H) by the Pade exponential.
inline Eigen::MatrixXcd propagator(const Eigen::MatrixXcd& h, double t) {
  return (cplx(0.0, -t) * h).exp();
}

// Kronecker product in the library's site order: A acts on the low index.
inline Eigen::MatrixXcd kron_high_low(const Eigen::MatrixXcd& high, const Eigen::MatrixXcd& low) {
  Eigen::MatrixXcd out(high.rows() * low.rows(), high.cols() * low.cols());
  for (Eigen::Index i = 0; i < high.rows(); ++i) {
    for (Eigen::Index j = 0; j < high.cols(); ++j) {
      out.block(i * low.rows(), j * low.cols(), low.rows(), low.cols()) = high(i, j) * low;
    }
  }
  return out;
}

inline double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace bcsh::test
