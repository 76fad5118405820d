#include "bcsh/model.hpp"
#include "bcsh/spectral.hpp"

#include "support.hpp"

#include <doctest.h>

#include <limits>

using namespace bcsh;

namespace {

ModelParams draw_params(std::mt19937_64& rng) {
  return {test::uniform(rng, -1, 1), test::uniform(rng, -1, 1), test::uniform(rng, 0, 2),
          test::uniform(rng, 0, 3)};
}

// sum_x I (x) ... (x) A_x (x) ... (x) I for an even on-site A.
Eigen::MatrixXcd onsite_sum(const Eigen::MatrixXcd& a, std::size_t n) {
  const Eigen::Index dim = Eigen::Index{1} << (2 * n);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t x = 0; x < n; ++x) {
    Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(1, 1);
    for (std::size_t y = 0; y < n; ++y) {
      term = test::kron_high_low(y == x ? a : Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(4, 4)),
                                 term);
    }
    out += term;
  }
  return out;
}

}  // namespace

TEST_CASE("single-site Hamiltonian written out by hand") {
  const ModelParams p{0.3, 0.2, 0.7, 1.5};
  Eigen::Matrix4cd expected = Eigen::Matrix4cd::Zero();
  expected.diagonal() << 0.0, -0.3 - 0.2, -0.3 + 0.2, 2 * 0.7 - 2 * 0.3 - 1.5;
  CHECK(test::max_abs(build_hamiltonian(p, 1).dense() - expected) < 1e-15);
}

TEST_CASE("on-site approximating Hamiltonian entries") {
  const ModelParams p{0.3, -0.4, 0.9, 2.0};
  const cplx c{0.2, -0.35};
  const OnSiteOperator h = build_onsite_approx(p, c);
  CHECK(std::abs(h(3, 0) - (-p.gamma * c)) < 1e-15);
  CHECK(std::abs(h(0, 3) - (-p.gamma * std::conj(c))) < 1e-15);
  CHECK(std::abs(h(1, 1) - (-p.mu - p.h)) < 1e-15);
  CHECK(std::abs(h(2, 2) - (-p.mu + p.h)) < 1e-15);
  CHECK(std::abs(h(3, 3) - (2 * p.lambda - 2 * p.mu)) < 1e-15);
  CHECK(test::max_abs(h - h.adjoint()) == 0.0);
  CHECK(is_even(h));
}

TEST_CASE("approximating Hamiltonian is a sum of on-site copies") {
  std::mt19937_64 rng(21);
  for (std::size_t n = 1; n <= 3; ++n) {
    const ModelParams p = draw_params(rng);
    const cplx c = test::random_complex(rng);
    const Eigen::MatrixXcd oracle = onsite_sum(build_onsite_approx(p, c), n);
    CHECK(test::max_abs(build_approx_hamiltonian(p, c, n).dense() - oracle) < 1e-14);
  }
}

TEST_CASE("BCS interaction equals the double sum of embedded pair operators") {
  for (std::size_t n = 1; n <= 3; ++n) {
    LatticeOperator b(n);
    for (std::size_t x = 0; x < n; ++x) {
      b += embed(onsite_pair_annihilator(), x, n, Parity::even_observable);
    }
    CHECK((bcs_pair_interaction(n) - b.adjoint() * b).max_abs() < 1e-15);
  }
}

TEST_CASE("momentum-space form of the BCS interaction, N = 1..5") {
  for (std::size_t n = 1; n <= 5; ++n) {
    CAPTURE(n);
    CHECK(verify_bcs_momentum_identity(n) < 1e-12);
  }
}

TEST_CASE("H_N is Hermitian and conserves both spin populations") {
  std::mt19937_64 rng(22);
  for (std::size_t n = 1; n <= 4; ++n) {
    const LatticeOperator h = build_hamiltonian(draw_params(rng), n);
    CHECK(hermiticity_residual(h) < 1e-15);
    CHECK(commutator(h, total_number(n, Spin::up)).max_abs() < 1e-13);
    CHECK(commutator(h, total_number(n, Spin::down)).max_abs() < 1e-13);
  }
}

TEST_CASE("H_N decomposes through the Cooper zero mode") {
  const ModelParams p{0.1, 0.5, 1.2, 2.5};
  const std::size_t n = 3;
  const CooperZeroMode zero = cooper_zero_mode(n);
  const LatticeOperator local = build_approx_hamiltonian(p, 0.0, n);
  CHECK((build_hamiltonian(p, n) - (local - p.gamma * zero.number)).max_abs() < 1e-14);
  CHECK((zero.number - zero.annihilator.adjoint() * zero.annihilator).max_abs() == 0.0);
}

TEST_CASE("property: gamma N |c|^2 + H_N(c) - H_N is a positive square") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = 2 + trial % 2;
    const ModelParams p = draw_params(rng);
    const cplx c = test::random_complex(rng);
    const LatticeOperator diff =
        p.gamma * static_cast<double>(n) * std::norm(c) * LatticeOperator::identity(n) +
        build_approx_hamiltonian(p, c, n) - build_hamiltonian(p, n);
    // Dense Hermitian eigensolver as an independent oracle.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff.dense());
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  }
}

TEST_CASE("property: gauge covariance of the approximating Hamiltonian") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const ModelParams p = draw_params(rng);
    const cplx c = test::random_complex(rng);
    const double phi = test::uniform(rng, -3.0, 3.0);
    const Eigen::MatrixXcd number = total_number(n).dense();
    const Eigen::MatrixXcd u = test::expm(cplx(0.0, 0.5 * phi) * number);
    const Eigen::MatrixXcd lhs = u * build_approx_hamiltonian(p, c, n).dense() * u.adjoint();
    const Eigen::MatrixXcd rhs = build_approx_hamiltonian(p, std::polar(1.0, phi) * c, n).dense();
    CHECK(test::max_abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("property: flipping the field sign leaves the spectrum unchanged") {
  std::mt19937_64 rng(25);
  for (std::size_t n = 1; n <= 3; ++n) {
    ModelParams p = draw_params(rng);
    const std::vector<double> a = eigenvalues(build_hamiltonian(p, n));
    p.h = -p.h;
    const std::vector<double> b = eigenvalues(build_hamiltonian(p, n));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
  }
}

TEST_CASE("errors: parameter validation and the site budget") {
  CHECK_THROWS_AS(ModelParams({0.0, 0.0, -0.1, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams({0.0, 0.0, 0.1, -1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams({std::numeric_limits<double>::quiet_NaN(), 0.0, 0.1, 1.0}).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_hamiltonian({0.0, 0.0, 0.0, 1.0}, 7), ResourceLimitError);
  CHECK_THROWS_AS(build_hamiltonian({0.0, 0.0, 0.0, 1.0}, 3, 2), ResourceLimitError);
  CHECK_THROWS_AS(build_hamiltonian({0.0, 0.0, -1.0, 1.0}, 2), std::invalid_argument);
}
