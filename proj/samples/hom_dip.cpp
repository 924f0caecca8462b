// Two-photon coincidence probability on a beam splitter versus delay.
#include <cstdio>

#include <photonsim/photonsim.hpp>

using namespace photonsim;

int main() {
  const CMatrix u = beamsplitter();
  std::printf("%8s %12s %12s\n", "tau", "boson", "fermion");
  for (int k = -8; k <= 8; ++k) {
    const double tau = 0.5 * k;
    const auto basis = InternalBasis::temporal({{0.0, 1.0, 0.0}, {tau, 1.0, 0.0}});
    const std::vector<InternalState> st{InternalState::of(basis, 0, PolarizationState::H()),
                                        InternalState::of(basis, 1, PolarizationState::H())};
    std::printf("%8.2f %12.6f %12.6f\n", tau, event_probability(u, st, {1, 1}, {1, 1}),
                event_probability(u, st, {1, 1}, {1, 1}, Statistics::fermion));
  }
}
