#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include <photonsim/experiments.hpp>

using namespace photonsim;

namespace {

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> x;
  for (int k = 0; k < n; ++k) x.push_back(lo + (hi - lo) * k / (n - 1));
  return x;
}

int interior_minima(const std::vector<double>& y) {
  int count = 0;
  for (std::size_t k = 1; k + 1 < y.size(); ++k)
    if (y[k] < y[k - 1] && y[k] < y[k + 1]) ++count;
  return count;
}

}  // namespace

TEST(ThreePhoton, WShape) {
  const auto taus = grid(-6, 6, 241);
  const auto w = w_shape_scan(taus);
  EXPECT_NEAR(w[120], 1.0 / 3.0, 1e-12);
  EXPECT_EQ(interior_minima(w), 2);
  const auto far = w_shape_scan({-60.0, 60.0});
  EXPECT_NEAR(far[0], 2.0 / 9.0, 1e-12);
  EXPECT_NEAR(far[1], 2.0 / 9.0, 1e-12);
}

TEST(ThreePhoton, MercedesDip) {
  const auto taus = grid(0, 8, 161);
  const auto m = mercedes_scan(taus);
  EXPECT_NEAR(m.front(), 1.0 / 12.0, 1e-12);
  EXPECT_NEAR(mercedes_scan({60.0})[0], 2.0 / 9.0, 1e-12);
  for (std::size_t k = 1; k < m.size(); ++k) EXPECT_GE(m[k], m[k - 1] - 1e-15);
}

TEST(ThreePhoton, FormulasMatchEngineForRandomStates) {
  std::mt19937_64 rng(42);
  const auto basis = InternalBasis::generic(3);
  const CMatrix u = tritter();
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = InternalState::random(basis, rng), b = InternalState::random(basis, rng),
               c = InternalState::random(basis, rng);
    const double rab = std::abs(overlap(a, b)), rbc = std::abs(overlap(b, c)), rca = std::abs(overlap(c, a));
    const double phi = triad_phase(a, b, c);
    const std::vector<InternalState> st{a, b, c};
    EXPECT_NEAR(event_probability(u, st, {1, 1, 1}, {1, 1, 1}), tritter_formulas::p111(rab, rbc, rca, phi), 1e-12);
    EXPECT_NEAR(event_probability(u, st, {1, 1, 1}, {3, 0, 0}), tritter_formulas::p300(rab, rbc, rca, phi), 1e-12);
    EXPECT_NEAR(event_probability(u.conjugate(), st, {1, 1, 1}, {1, 2, 0}), tritter_formulas::p120(rab, rbc, rca, phi),
                1e-12);
    EXPECT_NEAR(event_probability(u.conjugate(), st, {1, 1, 1}, {0, 2, 1}), tritter_formulas::p021(rab, rbc, rca, phi),
                1e-12);
    EXPECT_NEAR(event_probability(u, st, {0, 1, 1}, {0, 1, 1}), tritter_formulas::p011(rbc), 1e-12);
  }
}

TEST(ThreePhoton, TritterLabelsSwapUnderConjugation) {
  std::mt19937_64 rng(5);
  const auto basis = InternalBasis::generic(3);
  const std::vector<InternalState> st{InternalState::random(basis, rng), InternalState::random(basis, rng),
                                      InternalState::random(basis, rng)};
  EXPECT_NEAR(event_probability(tritter(), st, {1, 1, 1}, {1, 2, 0}),
              event_probability(tritter().conjugate(), st, {1, 1, 1}, {0, 2, 1}), 1e-12);
}

TEST(TriadSweep, DelayLaw) {
  EXPECT_NEAR(triad_sweep_delay(pi / 4, 1.0), 0.0, 1e-7);
  EXPECT_NEAR(triad_sweep_delay(0.0, 1.0), std::sqrt(2.0 * std::log(3.0)), 1e-15);
  EXPECT_NEAR(triad_sweep_delay(0.0, 1.0), 1.4823, 1e-4);
  EXPECT_NEAR(triad_sweep_phase(0.0), 0.0, 1e-15);
  EXPECT_NEAR(triad_sweep_phase(pi / 4), pi, 1e-12);
}

TEST(TriadSweep, TwoFoldConstantAndThreeFoldCosine) {
  const auto pts = triad_sweep(grid(0, pi / 2, 33));
  for (const auto& p : pts) {
    EXPECT_NEAR(p.p011, pts.front().p011, 1e-12);
    EXPECT_NEAR(p.p101, pts.front().p101, 1e-12);
    EXPECT_NEAR(p.p110, pts.front().p110, 1e-12);
    EXPECT_NEAR(p.p110, 1.75 / 9.0, 1e-12);
    EXPECT_NEAR(p.triad_phase, triad_sweep_phase(p.theta), 1e-9);
    EXPECT_NEAR(p.p111, tritter_formulas::p111(0.5, 0.5, 0.5, p.triad_phase), 1e-12);
  }
  EXPECT_NEAR(pts[8].p111, 1.0 / 6.0, 1e-12);   // theta = pi/8
  EXPECT_NEAR(pts[16].p111, 1.0 / 12.0, 1e-12);  // theta = pi/4
  EXPECT_THROW(triad_sweep({2.0}), parameter_error);
}

TEST(CircleDance, FormulaSpotValues) {
  EXPECT_NEAR(p5678_formula({0, 0, 0, 0}, pi / 2, 0.0), 3.0 / 32.0, 1e-15);
  EXPECT_NEAR(p5678_formula({0.5, 0.5, 0.5, 0.5}, pi / 2, 0.0), 1.75 / 32.0, 1e-15);
}

TEST(CircleDance, FormulaMatchesEngineWhenDiagonalsVanish) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u01(0.1, 0.6), ph(0, 2 * pi);
  const auto basis = InternalBasis::generic(4);
  for (int trial = 0; trial < 10; ++trial) {
    const double ab = u01(rng), bc = u01(rng), cd = u01(rng), da = u01(rng), theta = ph(rng), chi = ph(rng);
    CVector a = CVector::Zero(4), b = CVector::Zero(4), c = CVector::Zero(4), d = CVector::Zero(4);
    a[0] = 1.0;
    c[1] = 1.0;
    b[0] = ab, b[1] = bc, b[2] = std::sqrt(1 - ab * ab - bc * bc);
    d[0] = da, d[1] = cd * std::exp(I * theta);
    d[2] = -(ab * da + bc * cd * std::exp(I * theta)) / b[2];
    d[3] = std::sqrt(1.0 - d.squaredNorm());
    const InternalState sa(basis, a), sb(basis, b), sc(basis, c), sd(basis, d);
    ASSERT_NEAR(std::abs(overlap(sb, sd)), 0.0, 1e-14);
    const double phase = std::arg(overlap(sa, sb) * overlap(sb, sc) * overlap(sc, sd) * overlap(sd, sa));
    const double engine = event_probability(quitter(chi), {sd, sb, sc, sa}, {1, 1, 1, 1}, {1, 1, 1, 1});
    EXPECT_NEAR(engine, p5678_formula({ab, bc, cd, da}, chi, phase), 1e-12);
  }
}

TEST(CircleDance, LowerOrderCoincidencesFlat) {
  // photon subsets of fewer than four see no cycle carrying theta
  const CircleOverlaps r{0.5, 0.5, 0.5, 0.5};
  const CMatrix u = quitter(pi / 2);
  std::vector<double> ref;
  double pmax = 0.0, pmin = 1.0;
  for (int k = 0; k < 12; ++k) {
    const double theta = 2 * pi * k / 12;
    const auto st = circle_dance_ideal_states(r, theta);
    std::size_t j = 0;
    for (int mask = 1; mask < 15; ++mask) {
      std::vector<int> in(4, 0);
      for (int m = 0; m < 4; ++m) in[m] = mask >> m & 1;
      const int n = std::accumulate(in.begin(), in.end(), 0);
      for (const auto& s : all_patterns(4, n)) {
        const double p = event_probability(u, st, OccupationPattern(in), s);
        if (k == 0)
          ref.push_back(p);
        else
          EXPECT_NEAR(p, ref[j], 1e-12);
        ++j;
      }
    }
    const double p4 = event_probability(u, st, {1, 1, 1, 1}, {1, 1, 1, 1});
    EXPECT_NEAR(p4, p5678_formula(r, pi / 2, theta), 1e-12);
    pmax = std::max(pmax, p4), pmin = std::min(pmin, p4);
  }
  EXPECT_NEAR(fringe_visibility(pmax, pmin), 0.3, 1e-12);
  EXPECT_THROW(circle_dance_ideal_states({0.9, 0.9, 0.1, 0.1}, 0.0), parameter_error);
}

TEST(CircleDance, ResidualOverlapLowersVisibility) {
  const auto f = circle_dance_fringe(optimized_circle_dance(0.1));
  EXPECT_GT(fringe_visibility(f.max, f.min), 0.2);
  EXPECT_LT(fringe_visibility(f.max, f.min), 0.305);
}

TEST(CircleDance, OptimizedWalkOff) {
  const auto sc = optimized_circle_dance(0.1, 1.0, 2.2);
  EXPECT_NEAR(std::abs(unequal_width_overlap({sc.t2, 1.0, 0}, {sc.t3, 1.0, 0})), 0.1, 1e-12);
  EXPECT_NEAR(sc.t2, -sc.t3, 1e-6);
  const auto r = circle_overlaps(sc);
  EXPECT_NEAR(r.rab, r.rcd, 1e-7);
  EXPECT_NEAR(r.rab, 0.50395, 1e-4);
  double vmax = 0, vmin = 1;
  for (int k = 0; k < 72; ++k) {
    const double p = p5678_formula(r, sc.chi, 2 * pi * k / 72);
    vmax = std::max(vmax, p), vmin = std::min(vmin, p);
  }
  EXPECT_NEAR(fringe_visibility(vmax, vmin), 0.310, 5e-3);
}

TEST(Locking, FormulaAndEngine) {
  EXPECT_NEAR(locking_signal(0.0, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(locking_signal(pi / 2, 1.0), 0.125, 1e-15);
  EXPECT_NEAR(locking_signal(pi, 1.0), 0.25, 1e-15);
  EXPECT_THROW(locking_signal(0.0, 1.2), parameter_error);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u01(0, 1), ph(0, 2 * pi);
  const auto basis = InternalBasis::generic(2);
  for (int k = 0; k < 10; ++k) {
    const double r = u01(rng), chi = ph(rng);
    CVector b(2);
    b << r, std::sqrt(1 - r * r);
    const InternalState a = InternalState::basis_vector(basis, 0), c(basis, b);
    const double p = event_probability(quitter(chi), {a, a, c, a}, {1, 0, 1, 0}, {1, 0, 0, 1});
    EXPECT_NEAR(p, locking_signal(chi, r), 1e-12);
  }
}

TEST(Visibility, IdealReferenceValues) {
  const auto basis = InternalBasis::temporal({{0, 1, 0}, {50, 1, 0}});
  const auto h0 = InternalState::of(basis, 0, PolarizationState::H()), h1 = InternalState::of(basis, 1, PolarizationState::H());
  const double dip = event_probability(tritter(), {h0, h0, h0}, {1, 1, 0}, {1, 1, 0});
  const double base = event_probability(tritter(), {h0, h1, h0}, {1, 1, 0}, {1, 1, 0});
  EXPECT_NEAR(visibility({dip}, base), 0.5, 1e-12);
  const auto m = mercedes_polarizations();
  const auto m0 = InternalState::of(basis, 0, m[0]), m1 = InternalState::of(basis, 0, m[1]);
  const double mdip = event_probability(tritter(), {m0, m1, h0}, {1, 1, 0}, {1, 1, 0});
  EXPECT_NEAR(visibility({mdip}, 2.0 / 9.0), 0.125, 1e-12);
  EXPECT_NEAR(visibility({1.0, 3.0}, 2.0, FeatureKind::peak), 0.5, 1e-15);
  EXPECT_THROW(visibility({1.0}, 0.0), parameter_error);
}

TEST(SourceModel, EmissionDensity) {
  SourceModel vac;
  vac.lambda = 0.0, vac.p_idler_noise = 0.0, vac.p_signal_noise = 0.0;
  const auto v = source_emission_density(vac);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NEAR(v[0].weight, 1.0, 1e-15);

  const auto d = source_emission_density(SourceModel{});
  double total = 0.0, one = 0.0, two = 0.0;
  for (const auto& t : d) {
    total += t.weight;
    if (t.noise() == 0 && t.pairs == 1) one = t.weight;
    if (t.noise() == 0 && t.pairs == 2) two = t.weight;
  }
  EXPECT_NEAR(total, 1.0, 1e-14);
  EXPECT_NEAR(two / one, 0.0256, 1e-14);
  SourceModel bad;
  bad.purity = 0.3;
  EXPECT_THROW(source_emission_density(bad), parameter_error);
}

TEST(SourceModel, MixedFactorWeight) {
  EXPECT_NEAR(mixed_factor_weight(1.0), 1.0, 1e-15);
  EXPECT_NEAR(mixed_factor_weight(0.5), 0.5, 1e-15);
  const double q = mixed_factor_weight(0.9);
  EXPECT_NEAR(q * q + (1 - q) * (1 - q), 0.9, 1e-14);
}

TEST(Detection, CascadeClickProbabilities) {
  EXPECT_NEAR(cascade_click_probability(1, 2, 1), 1.0, 1e-15);
  EXPECT_NEAR(cascade_click_probability(2, 2, 2), 0.5, 1e-15);
  EXPECT_NEAR(cascade_click_probability(2, 2, 1), 0.5, 1e-15);
  EXPECT_NEAR(cascade_click_probability(3, 3, 3), 6.0 / 27.0, 1e-15);
  for (int q = 0; q <= 6; ++q)
    for (int c = 1; c <= 3; ++c) {
      double s = 0.0;
      for (int x = 0; x <= c; ++x) s += cascade_click_probability(q, c, x);
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
}

TEST(NoiseModel, IdealLimitRecoversPerfectInterference) {
  SourceModel ideal;
  ideal.lambda = 1e-3, ideal.purity = 1.0, ideal.p_idler_noise = 0.0, ideal.p_signal_noise = 0.0;
  auto slot = [](int mode, double t) { return SourceSlot{mode, {t, 1.0, 0.0}, PolarizationState::H()}; };
  const HeraldedEvent e{{0, 1, 2}, {2, 1, 0}};
  const double v = model_dip_visibility(ideal, {slot(0, 0), slot(1, 0), slot(2, 0)}, {slot(0, -40), slot(1, 0), slot(2, 40)},
                                        tritter(), DetectorConfig::config_b(), e);
  EXPECT_NEAR(v, 1.0, 1e-3);
  const auto r = simulate_counts(ideal, {slot(0, -40), slot(1, 0), slot(2, 40)}, tritter(), DetectorConfig::plain(3),
                                 {{0, 1, 2}, {1, 1, 1}});
  EXPECT_NEAR(r.rate / std::pow(ideal.lambda, 6), 2.0 / 9.0, 2e-3);
}

TEST(NoiseModel, ImpurityAloneLimitsVisibility) {
  SourceModel pure_noise_free;
  pure_noise_free.lambda = 1e-3, pure_noise_free.p_idler_noise = 0.0, pure_noise_free.p_signal_noise = 0.0;
  auto slot = [](int mode, double t) { return SourceSlot{mode, {t, 1.0, 0.0}, PolarizationState::H()}; };
  const double v = model_dip_visibility(pure_noise_free, {slot(0, 0), slot(1, 0), slot(2, -40)},
                                        {slot(0, 0), slot(1, 40), slot(2, -40)}, tritter(), DetectorConfig::plain(3),
                                        {{0, 1}, {1, 1, -1}});
  // two-photon dip scales with Tr(rho1 rho2) = purity
  EXPECT_NEAR(v, 0.5 * 0.9, 2e-3);
}

TEST(NoiseModel, ReferenceParameters) {
  const auto v = noise_model_visibilities(SourceModel{});
  EXPECT_NEAR(v.hom, 0.36, 0.03);
  EXPECT_NEAR(v.mercedes, 0.10, 0.03);
  EXPECT_NEAR(v.triad_dip, 0.43, 0.03);
  EXPECT_GT(v.suppressed_210, v.hom);
  EXPECT_LT(v.suppressed_210, 1.0);
}

TEST(NoiseModel, Errors) {
  EXPECT_THROW(simulate_counts(SourceModel{}, {}, tritter(), DetectorConfig::plain(3), {{}, {1, 1, 1}}), unsupported_error);
  EXPECT_THROW(simulate_counts(SourceModel{}, {SourceSlot{}}, tritter(), DetectorConfig::plain(2), {{0}, {1, 1, 1}}),
               unsupported_error);
}
