#include "bcsh/algebra.hpp"

#include "support.hpp"

#include <doctest.h>

#include <vector>

using namespace bcsh;

namespace {

// Jordan-Wigner annihilator of mode j among `modes` qubits, assembled from
// 2x2 factors: Z on lower modes, |0><1| on mode j, identity above.
Eigen::MatrixXcd qubit_annihilator(int j, int modes) {
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  Eigen::MatrixXcd lower = Eigen::MatrixXcd::Zero(2, 2);
  lower(0, 1) = 1.0;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int i = 0; i < modes; ++i) {
    const Eigen::MatrixXcd& f = i < j ? z : (i == j ? lower : id);
    out = test::kron_high_low(f, out);
  }
  return out;
}

}  // namespace

TEST_CASE("on-site operators follow the documented convention") {
  const OnSiteOperator up_dag = onsite_op(OpKind::create, Spin::up);
  const OnSiteOperator down_dag = onsite_op(OpKind::create, Spin::down);
  Eigen::Matrix<cplx, 4, 1> vac = Eigen::Matrix<cplx, 4, 1>::Zero();
  vac(0) = 1.0;
  const Eigen::Matrix<cplx, 4, 1> pair = up_dag * (down_dag * vac);
  CHECK(pair(3) == cplx(1.0));
  CHECK(pair.head<3>().norm() == 0.0);

  const OnSiteOperator x = onsite_pair_annihilator();
  CHECK(x(0, 3) == cplx(1.0));
  CHECK(x.cwiseAbs().sum() == doctest::Approx(1.0));

  CHECK(onsite_op(OpKind::number, Spin::up).diagonal().real() == Eigen::Vector4d(0, 1, 0, 1));
  CHECK(onsite_op(OpKind::number, Spin::down).diagonal().real() == Eigen::Vector4d(0, 0, 1, 1));
  CHECK(onsite_parity().diagonal().real() == Eigen::Vector4d(1, -1, -1, 1));
}

TEST_CASE("evenness of on-site elements") {
  CHECK(is_even(onsite_pair_annihilator()));
  CHECK(is_even(onsite_op(OpKind::number, Spin::down)));
  CHECK_FALSE(is_even(onsite_op(OpKind::annihilate, Spin::up)));
  CHECK_FALSE(is_even(onsite_op(OpKind::create, Spin::down)));
}

TEST_CASE("lattice operators match the qubit Jordan-Wigner construction") {
  for (std::size_t n = 1; n <= 3; ++n) {
    const int modes = static_cast<int>(2 * n);
    for (std::size_t x = 0; x < n; ++x) {
      for (Spin s : {Spin::up, Spin::down}) {
        const int j = static_cast<int>(2 * x + (s == Spin::down ? 1 : 0));
        const Eigen::MatrixXcd a = qubit_annihilator(j, modes);
        CHECK(test::max_abs(lattice_op(OpKind::annihilate, s, x, n).dense() - a) == 0.0);
        CHECK(test::max_abs(lattice_op(OpKind::create, s, x, n).dense() - a.adjoint()) == 0.0);
        CHECK(test::max_abs(lattice_op(OpKind::number, s, x, n).dense() - a.adjoint() * a) ==
              0.0);
      }
    }
  }
}

TEST_CASE("canonical anticommutation relations hold for N = 1..4") {
  for (std::size_t n = 1; n <= 4; ++n) {
    CAPTURE(n);
    CHECK(verify_car(n) < 1e-12);
  }
}

TEST_CASE("property: random linear combinations obey {A, B*} = sum f_i conj(g_i)") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 3;
    std::vector<cplx> f(2 * n), g(2 * n);
    LatticeOperator a(n), b(n);
    cplx expected{};
    for (std::size_t k = 0; k < 2 * n; ++k) {
      f[k] = test::random_complex(rng);
      g[k] = test::random_complex(rng);
      const Spin s = k % 2 ? Spin::down : Spin::up;
      a += f[k] * lattice_op(OpKind::annihilate, s, k / 2, n);
      b += g[k] * lattice_op(OpKind::annihilate, s, k / 2, n);
      expected += f[k] * std::conj(g[k]);
    }
    const LatticeOperator lhs = anticommutator(a, b.adjoint());
    CHECK((lhs - expected * LatticeOperator::identity(n)).max_abs() < 1e-12);
    CHECK(anticommutator(a, b).max_abs() < 1e-12);
  }
}

TEST_CASE("property: adjoint is an involution and commutators are antisymmetric") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + trial % 3;
    LatticeOperator a(n), b(n);
    for (std::size_t x = 0; x < n; ++x) {
      a += test::random_complex(rng) * lattice_op(OpKind::create, Spin::up, x, n);
      b += test::random_complex(rng) * lattice_op(OpKind::number, Spin::down, x, n);
    }
    CHECK((a.adjoint().adjoint() - a).max_abs() == 0.0);
    CHECK((commutator(a, b) + commutator(b, a)).max_abs() < 1e-14);
  }
}

TEST_CASE("errors: out-of-range sites, mismatched chains and bad dimensions") {
  CHECK_THROWS_AS(embed(onsite_identity(), 2, 2, Parity::even_observable), std::out_of_range);
  CHECK_THROWS_AS(lattice_op(OpKind::annihilate, Spin::up, 0, 1) +
                      lattice_op(OpKind::annihilate, Spin::up, 0, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(LatticeOperator(2, LatticeOperator::Sparse(4, 4)), std::invalid_argument);
  CHECK_THROWS_AS(extend(LatticeOperator::identity(3), 2), std::invalid_argument);
  CHECK_THROWS_AS(check_site_budget(7, 6, "test"), ResourceLimitError);
  CHECK_NOTHROW(check_site_budget(6, 6, "test"));
}

TEST_CASE("extension to longer chains is a homomorphism and matches direct embedding") {
  for (Spin s : {Spin::up, Spin::down}) {
    for (OpKind k : {OpKind::create, OpKind::annihilate, OpKind::number}) {
      CHECK((extend(lattice_op(k, s, 0, 1), 3) - lattice_op(k, s, 0, 3)).max_abs() == 0.0);
      CHECK((extend(lattice_op(k, s, 1, 2), 3) - lattice_op(k, s, 1, 3)).max_abs() == 0.0);
    }
  }
  std::mt19937_64 rng(13);
  LatticeOperator a(2), b(2);
  for (std::size_t x = 0; x < 2; ++x) {
    a += test::random_complex(rng) * lattice_op(OpKind::annihilate, Spin::down, x, 2);
    b += test::random_complex(rng) * lattice_op(OpKind::create, Spin::up, x, 2);
  }
  CHECK((extend(a * b, 3) - extend(a, 3) * extend(b, 3)).max_abs() < 1e-15);
}

TEST_CASE("momentum modes are canonical and periodic in k") {
  const std::size_t n = 3;
  std::vector<LatticeOperator> modes;
  for (long k = 0; k < 3; ++k) {
    for (Spin s : {Spin::up, Spin::down}) modes.push_back(momentum_annihilator(k, s, n));
  }
  const LatticeOperator one = LatticeOperator::identity(n);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = 0; j < modes.size(); ++j) {
      LatticeOperator m = anticommutator(modes[i], modes[j].adjoint());
      if (i == j) m -= one;
      CHECK(m.max_abs() < 1e-14);
    }
  }
  CHECK((momentum_annihilator(-1, Spin::up, n) - momentum_annihilator(2, Spin::up, n)).max_abs() ==
        0.0);
  CHECK((momentum_annihilator(4, Spin::down, n) - momentum_annihilator(1, Spin::down, n))
            .max_abs() == 0.0);
}
