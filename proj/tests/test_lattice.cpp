#include <gtest/gtest.h>

#include <photonsim/lattice.hpp>

using namespace photonsim;
using namespace photonsim::lattice;

TEST(Geometry, GrapheneCoordination) {
  const auto g = graphene_crop(200, 160);
  require_valid(g);
  const auto deg = coordination(g, 1.1 * g.a0);
  int interior = 0, boundary = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_LE(deg[k], 3);
    EXPECT_GE(deg[k], 2);
    (deg[k] == 3 ? interior : boundary)++;
  }
  EXPECT_GT(interior, boundary);
  EXPECT_NEAR(min_site_distance(g), 10.0, 1e-9);
  const long diff = static_cast<long>(g.count(Sublattice::A)) - static_cast<long>(g.count(Sublattice::B));
  EXPECT_LE(std::abs(diff), boundary);
}

TEST(Geometry, Disk1192Preset) {
  const auto g = disk1192_lattice();
  EXPECT_EQ(g.size(), 1192u);
  EXPECT_EQ(g.count(Sublattice::A), 596u);
  EXPECT_EQ(g.count(Sublattice::B), 596u);
}

TEST(Geometry, Validation) {
  LatticeGeometry g;
  g.sites = {Vec2(0, 0), Vec2(1, 0)};
  g.sublattice = {Sublattice::A, Sublattice::B};
  EXPECT_THROW(require_valid(g), parameter_error);
  g.sublattice.pop_back();
  EXPECT_THROW(require_valid(g), dimension_error);
  EXPECT_THROW(graphene_crop(-1, 10), parameter_error);
}

TEST(VortexTexture, AmplitudeAndWinding) {
  const auto f = VortexField::single(3.0, 20.0, 1, pi / 2, Vec2(5, -3));
  EXPECT_NEAR(std::abs(vortex_delta(Vec2(5, -3), f)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(vortex_delta(Vec2(500, 200), f)), 3.0, 1e-9);
  for (int n : {1, -1, 2}) {
    const auto fn = VortexField::single(3.0, 20.0, n, 0.3, Vec2(5, -3));
    double total = 0.0;
    const int steps = 400;
    for (int k = 0; k < steps; ++k) {
      const double a0 = 2 * pi * k / steps, a1 = 2 * pi * (k + 1) / steps;
      const cplx z0 = vortex_delta(Vec2(5, -3) + 50.0 * Vec2(std::cos(a0), std::sin(a0)), fn);
      const cplx z1 = vortex_delta(Vec2(5, -3) + 50.0 * Vec2(std::cos(a1), std::sin(a1)), fn);
      total += std::arg(z1 / z0);
    }
    EXPECT_NEAR(total / (2 * pi), n, 1e-9);
  }
}

TEST(Kekule, ZeroAmplitudeLeavesGeometry) {
  const auto g = graphene_crop(100, 100);
  const auto d = kekule_displace(g, VortexField::single(0.0, 20.0, 1, pi / 2, Vec2::Zero()), 0.1);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(d.geometry.sites[k], g.sites[k]);
  EXPECT_EQ(d.max_shift, 0.0);
}

TEST(Kekule, DisplacementScale) {
  const auto v = vortex_preset(graphene_crop(400, 300));
  const auto d = kekule_displace(v.base, v.field({{Vec2::Zero(), 1}}), v.xi());
  EXPECT_NEAR(d.max_shift, 0.8, 0.02);
  EXPECT_FALSE(d.exceeds_validity);
}

TEST(Kekule, ThreeFoldPeriodicity) {
  const auto g = graphene_crop(200, 200);
  VortexField uniform{3.0, 20.0, 0.4, {}};
  const auto d = kekule_displace(g, uniform, 0.1);
  const Vec2 a1(std::sqrt(3.0) * g.a0, 0.0);
  auto shift_at = [&](const Vec2& p) {
    const int k = nearest_site(g, p);
    EXPECT_LT((g.sites[k] - p).norm(), 1e-9);
    return Vec2(d.geometry.sites[k] - g.sites[k]);
  };
  const Vec2 r = g.sites[nearest_site(g, Vec2::Zero())];
  EXPECT_LT((shift_at(r) - shift_at(r + 3.0 * a1)).norm(), 1e-12);
  EXPECT_GT((shift_at(r) - shift_at(r + a1)).norm(), 1e-3);
}

TEST(Coupling, ExponentialLaw) {
  const CouplingModel m;
  LatticeGeometry two;
  two.sites = {Vec2(0, 0), Vec2(11.0, 0)};
  two.sublattice = {Sublattice::A, Sublattice::B};
  const RMatrix h = coupling_hamiltonian(two, m);
  EXPECT_NEAR(h(0, 1), -m.coupling * std::exp(-m.gamma * 1.0), 1e-14);
  EXPECT_EQ(h(0, 0), 0.0);
  EXPECT_NEAR(m.beat_length(11.0), 2 * pi / (m.coupling * std::exp(-m.gamma)), 1e-12);
  EXPECT_NEAR(m.at(10.0) / m.at(20.0), std::exp(m.gamma * 10.0), 1e-9);
  EXPECT_NEAR(m.nnn_ratio(10.0), std::exp(-m.gamma * (std::sqrt(3.0) - 1.0) * 10.0), 1e-15);
  EXPECT_NEAR(m.beat_length(10.0), 2 * pi / 5.0, 1e-12);  // cm, sub-cm bulk beating
  CouplingModel bad;
  bad.gamma = 0.0;
  EXPECT_THROW(bad.validate(), parameter_error);
}

TEST(Coupling, HamiltonianIsHermitianAndChiral) {
  const auto g = graphene_crop(200, 200);
  const RMatrix h = coupling_hamiltonian(g, CouplingModel{});
  EXPECT_EQ((h - h.transpose()).cwiseAbs().maxCoeff(), 0.0);
  const auto sp = spectrum(h);
  EXPECT_LT((sp.values + sp.values.reverse()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Spectrum, DensityOfStatesDipsAtZero) {
  const auto g = graphene_disk(150.0);
  const auto sp = spectrum(coupling_hamiltonian(g, CouplingModel{}));
  const auto dos = density_of_states(sp.values, 30, -15.0, 15.0);
  int total = 0;
  for (int c : dos.counts) total += c;
  EXPECT_EQ(total, static_cast<int>(g.size()));
  const int centre = dos.counts[14] + dos.counts[15];
  const int shoulder = dos.counts[8] + dos.counts[9];
  EXPECT_LT(centre, shoulder);
}

class Disk1192Vortex : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    v_ = new VortexLattice(vortex_preset(disk1192_lattice()));
    site_ = bright_site(v_->base, Vec2::Zero());
    cores_ = {{v_->base.sites[site_], 1}};
    sp_ = new Spectrum(spectrum(v_->hamiltonian(cores_)));
  }
  static void TearDownTestSuite() {
    delete v_;
    delete sp_;
  }
  static VortexLattice* v_;
  static Spectrum* sp_;
  static int site_;
  static std::vector<VortexCore> cores_;
};

VortexLattice* Disk1192Vortex::v_ = nullptr;
Spectrum* Disk1192Vortex::sp_ = nullptr;
int Disk1192Vortex::site_ = 0;
std::vector<VortexCore> Disk1192Vortex::cores_;

TEST_F(Disk1192Vortex, SingleInteriorZeroMode) {
  EXPECT_EQ(interior_zero_mode_count(*sp_, v_->base, v_->zero_threshold, 30.0), 1);
  const auto lm = localized_zero_mode(*sp_, v_->base, cores_[0].center, 2 * v_->l0, v_->zero_threshold);
  EXPECT_LT(std::abs(lm.energy), gap_edge(sp_->values, v_->zero_threshold) / 100.0);
  EXPECT_GT(sublattice_ratio(lm.mode, v_->base), 10.0);
  EXPECT_GE(weight_within(lm.mode, v_->base, cores_[0].center, 2 * v_->l0), 0.7);
  EXPECT_NEAR(center_hexagon_ratio(lm.mode, v_->base, site_), 3.0, 0.9);
}

TEST_F(Disk1192Vortex, AnalyticModeMatchesNumeric) {
  const RVector a = analytic_zero_mode(v_->base, v_->field(cores_), v_->model);
  EXPECT_TRUE(std::isinf(sublattice_ratio(a, v_->base)));
  const auto lm = localized_zero_mode(*sp_, v_->base, cores_[0].center, 2 * v_->l0, v_->zero_threshold);
  EXPECT_GE(std::abs(a.dot(lm.mode)), 0.9);
  const int peak = [&] {
    Eigen::Index k;
    lm.mode.cwiseAbs().maxCoeff(&k);
    return static_cast<int>(k);
  }();
  EXPECT_LT((v_->base.sites[peak] - cores_[0].center).norm(), 1e-9);
}

TEST_F(Disk1192Vortex, ZeroModeIsStaticOverChipLength) {
  const auto lm = localized_zero_mode(*sp_, v_->base, cores_[0].center, 2 * v_->l0, v_->zero_threshold);
  const CVector in = lm.mode.cast<cplx>();
  const CVector out = propagate(v_->hamiltonian(cores_), 9.0, in);
  EXPECT_NEAR(out.norm(), 1.0, 1e-9);
  EXPECT_GT(std::norm(in.dot(out)), 0.999);
}

TEST_F(Disk1192Vortex, NegativeWindingLivesOnA) {
  const std::vector<VortexCore> anti{{v_->base.sites[nearest_site(v_->base, Vec2::Zero(), Sublattice::A)], -1}};
  const RVector a = analytic_zero_mode(v_->base, v_->field(anti), v_->model);
  EXPECT_EQ(sublattice_ratio(a, v_->base, Sublattice::A), std::numeric_limits<double>::infinity());
  EXPECT_THROW(analytic_zero_mode(v_->base, v_->field({{Vec2::Zero(), 2}}), v_->model), unsupported_error);
}

TEST(Propagation, BulkModeOscillatesOnSubMillimetre) {
  const auto g = graphene_crop(100, 100);
  const RMatrix h = coupling_hamiltonian(g, CouplingModel{});
  CVector in = CVector::Zero(static_cast<Eigen::Index>(g.size()));
  in[nearest_site(g, Vec2::Zero())] = 1.0;
  const CVector out = propagate(h, 0.1, in);  // 1 mm
  EXPECT_LT(std::norm(out[nearest_site(g, Vec2::Zero())]), 0.5);
  EXPECT_NEAR(out.norm(), 1.0, 1e-9);
}

TEST(Propagation, UniformRandomFieldIsBalanced) {
  const auto g = graphene_crop(300, 300);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  CVector psi(static_cast<Eigen::Index>(g.size()));
  for (auto& x : psi) x = cplx(n(rng), n(rng));
  EXPECT_NEAR(sublattice_ratio(psi, g), 1.0, 0.15);
}

TEST(Adiabatic, StaticPathEqualsPropagate) {
  const auto g = graphene_crop(100, 80);
  const auto path = keyframe_path({g, g});
  CVector in = CVector::Zero(static_cast<Eigen::Index>(g.size()));
  in[3] = 1.0;
  const auto r = adiabatic_evolution(path, CouplingModel{}, 1.5, 7, in, true);
  EXPECT_LT((r.field - propagate(coupling_hamiltonian(g, CouplingModel{}), 1.5, in)).norm(), 1e-10);
  EXPECT_TRUE(r.converged);
}

TEST(Adiabatic, EvolutionIsUnitary) {
  const auto g = graphene_crop(60, 60);
  const auto v = vortex_preset(g);
  const auto path = v.path([](double s) { return std::vector<VortexCore>{{Vec2(-10 + 20 * s, 0), 1}}; });
  const CMatrix u = adiabatic_unitary(path, v.model, 2.0, 19);
  EXPECT_LT(unitarity_residual(u), 1e-8);
  EXPECT_THROW(adiabatic_unitary(path, v.model, 2.0, 0), parameter_error);
}

TEST(Adiabatic, KeyframesInterpolateLinearly) {
  auto g0 = graphene_crop(40, 40), g1 = g0;
  for (auto& p : g1.sites) p += Vec2(1.0, 0.0);
  const auto path = keyframe_path({g0, g1});
  EXPECT_NEAR((path(0.25).sites[0] - g0.sites[0]).x(), 0.25, 1e-12);
  EXPECT_THROW(keyframe_path({g0}), parameter_error);
}

TEST(Adiabatic, TranslationNeedsLength) {
  const auto v = vortex_preset(graphene_crop(400, 300));
  const auto slow = translate_vortex(v, Vec2(-50, -10), Vec2(50, -10), 4.0, 40);
  const auto fast = translate_vortex(v, Vec2(-50, -10), Vec2(50, -10), 2.0, 40);
  EXPECT_LT(slow.initial_overlap, 0.1);
  EXPECT_GE(slow.fidelity, 0.8);
  EXPECT_LT(fast.fidelity, slow.fidelity - 0.1);
}

TEST(Braiding, ExchangeBookkeeping) {
  Eigen::Vector4cd s = Eigen::Vector4cd::Constant(0.5);
  const Eigen::Vector4cd once = exchange_modes(s);
  const Eigen::Vector4cd twice = exchange_modes(once);
  // double exchange: b_L -> -b_L, b_R -> -b_R
  EXPECT_NEAR(std::abs(twice[0] - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(twice[1] + 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(twice[2] + 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(twice[3] - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s.dot(twice)), 0.0, 1e-15);
}

TEST(Braiding, RelativePhaseOfExchange) {
  const auto v = vortex_preset(disk1192_lattice());
  const auto swap = braid(v, Vec2(-50, -10), Vec2(50, -10), 6.0, 160, true, true);
  const auto hold = braid(v, Vec2(-50, -10), Vec2(50, -10), 6.0, 160, false);
  EXPECT_NEAR(std::abs(swap.relative_phase), pi, 0.1);
  EXPECT_NEAR(std::abs(swap.phase_right), 0.0, 0.1);
  EXPECT_NEAR(hold.relative_phase, 0.0, 0.1);
  EXPECT_NEAR(hold.phase_left, 0.0, 0.1);
  EXPECT_TRUE(swap.converged);
}

TEST(Disorder, SamplingProperties) {
  const auto g = graphene_crop(200, 200);
  const auto same = apply_disorder(g, 0.0, 5);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(same.sites[k], g.sites[k]);
  double mean = 0.0;
  int n = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = apply_disorder(g, 0.6, seed);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double s = (d.sites[k] - g.sites[k]).norm();
      EXPECT_LE(s, 0.6 + 1e-12);
      mean += s, ++n;
    }
  }
  EXPECT_NEAR(mean / n, 0.4, 0.005);
  const auto a = apply_disorder(g, 0.4, 9), b = apply_disorder(g, 0.4, 9);
  EXPECT_EQ(a.sites, b.sites);
  EXPECT_THROW(apply_disorder(g, -0.1, 1), parameter_error);
}

TEST(Disorder, ZeroModeSurvivesWithDecreasingContrast) {
  const auto v = vortex_preset(disk1192_lattice());
  const Vec2 c = v.base.sites[bright_site(v.base, Vec2::Zero())];
  double prev = std::numeric_limits<double>::infinity();
  for (double rd : {0.0, 0.2, 0.4, 0.6}) {
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) mean += disorder_sublattice_ratio(v, c, rd, 100 + seed, 9.0) / 20.0;
    EXPECT_LE(mean, prev);
    EXPECT_GT(mean, 2.0);
    prev = mean;
  }
}

TEST(Excitation, StationaryClusterIsImmediatelyOptimal) {
  // isolated dimer: any input on it stays on it
  RMatrix h = RMatrix::Zero(6, 6);
  h(0, 1) = h(1, 0) = -1.0;
  h(2, 3) = h(3, 2) = h(3, 4) = h(4, 3) = h(4, 5) = h(5, 4) = -1.0;
  const auto r = excitation_optimize(h, {0, 1}, {0, 1}, 3.0, 2, 1);
  EXPECT_NEAR(r.objective, 1.0, 1e-12);
  EXPECT_TRUE(r.success);
  EXPECT_THROW(excitation_optimize(h, {}, {0}, 1.0, 1, 1), parameter_error);
}

TEST(Excitation, VortexRegionIsExcitable) {
  const auto v = vortex_preset(disk1192_lattice());
  const Vec2 c = v.base.sites[bright_site(v.base, Vec2::Zero())];
  const RVector d = site_distances(v.base, c);
  std::vector<int> order(v.base.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });
  std::vector<int> input, target;
  for (int k : order) {
    if (v.base.sublattice[k] == Sublattice::B && input.size() < 13) input.push_back(k);
    if (d[k] < 2 * v.l0) target.push_back(k);
  }
  const auto with = excitation_optimize(v.hamiltonian({{c, 1}}), input, target, 9.0, 3, 7);
  EXPECT_TRUE(with.success);
  EXPECT_GT(sublattice_ratio(with.output, v.base), 3.0);
  const auto without = excitation_optimize(coupling_hamiltonian(v.base, v.model), input, target, 9.0, 3, 7);
  EXPECT_FALSE(without.success);
  EXPECT_NEAR(sublattice_ratio(without.output, v.base), 1.0, 0.5);
}
