// Kekule vortex in a graphene waveguide lattice: locate and characterize its zero mode.
#include <cstdio>

#include <photonsim/photonsim.hpp>

using namespace photonsim;
using namespace photonsim::lattice;

int main() {
  const auto v = vortex_preset(graphene_disk(150.0));
  const int site = bright_site(v.base, Vec2::Zero());
  const std::vector<VortexCore> cores{{v.base.sites[site], 1}};
  const auto sp = spectrum(v.hamiltonian(cores));
  const auto mode = localized_zero_mode(sp, v.base, cores[0].center, 2 * v.l0, v.zero_threshold);
  std::printf("sites %zu\n", v.base.size());
  std::printf("zero-mode energy %.3e, gap edge %.3f\n", mode.energy, gap_edge(sp.values, v.zero_threshold));
  const double ratio = sublattice_ratio(mode.mode, v.base);
  std::printf("weight on supporting sublattice %.6f\n", ratio / (1.0 + ratio));
  std::printf("centre to hexagon intensity %.2f\n", center_hexagon_ratio(mode.mode, v.base, site));
  const CVector out = propagate(v.hamiltonian(cores), 9.0, mode.mode.cast<cplx>());
  std::printf("overlap after 9 cm %.4f\n", std::norm(mode.mode.cast<cplx>().dot(out)));
}
