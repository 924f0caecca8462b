// Three-fold tritter coincidences while the triad phase is swept at fixed pairwise overlaps.
#include <cstdio>

#include <photonsim/photonsim.hpp>

using namespace photonsim;

int main() {
  std::vector<double> thetas;
  for (int k = 0; k <= 8; ++k) thetas.push_back(pi / 2 * k / 8);
  std::printf("%8s %10s %10s %10s\n", "theta", "phase", "P111", "P110");
  for (const auto& p : triad_sweep(thetas))
    std::printf("%8.4f %10.4f %10.6f %10.6f\n", p.theta, p.triad_phase, p.p111, p.p110);
  const auto basis = InternalBasis::generic(3);
  const auto s = InternalState::basis_vector(basis, 0);
  std::printf("identical photons: P111 = %.6f (formula %.6f)\n", event_probability(tritter(), {s, s, s}, {1, 1, 1}, {1, 1, 1}),
              tritter_formulas::p111(1, 1, 1, 0));
}
