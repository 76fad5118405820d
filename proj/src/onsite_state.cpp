#include "bcsh/onsite_state.hpp"

#include <cmath>
#include <string>

namespace bcsh {

OnSiteState::OnSiteState(const OnSiteOperator& density) : density_(density) {
  const double trace_defect = std::abs(density_.trace() - 1.0);
  if (trace_defect > 1e-12) {
    throw InvalidStateError("on-site state: trace differs from 1 by " +
                            std::to_string(trace_defect));
  }
  if ((density_ - density_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidStateError("on-site state: density matrix is not Hermitian");
  }
  const double lowest = min_eigenvalue();
  if (lowest < -1e-10) {
    throw InvalidStateError("on-site state: negative eigenvalue " + std::to_string(lowest));
  }
}

OnSiteState OnSiteState::even(const OnSiteOperator& density) {
  OnSiteState s(density);
  if (!s.is_even()) {
    throw InvalidStateError("on-site state: not even (odd component " +
                            std::to_string(s.odd_component()) + ")");
  }
  return s;
}

OnSiteState OnSiteState::unchecked(const OnSiteOperator& density) {
  return OnSiteState(density, NoCheck{});
}

cplx OnSiteState::expectation(const OnSiteOperator& A) const {
  return (density_ * A).trace();
}

EquilibriumDensities OnSiteState::densities() const {
  // Diagonal entries are the occupation probabilities of |0>, |up>, |down>,
  // |up down>; the pair expectation Trace(D a_down a_up) is D(3, 0).
  const double p_up = density_(1, 1).real();
  const double p_down = density_(2, 2).real();
  const double p_pair = density_(3, 3).real();
  return {p_up + p_down + 2.0 * p_pair, p_up - p_down, p_pair, density_(3, 0)};
}

double OnSiteState::odd_component() const {
  // Even vectors: |0>, |up down> (indices 0, 3). Odd: |up>, |down>.
  double worst = 0.0;
  for (int even : {0, 3}) {
    for (int odd : {1, 2}) {
      worst = std::max({worst, std::abs(density_(even, odd)), std::abs(density_(odd, even))});
    }
  }
  return worst;
}

double OnSiteState::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<OnSiteOperator> solver(density_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

}  // namespace bcsh
