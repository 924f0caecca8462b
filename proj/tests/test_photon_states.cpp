#include <gtest/gtest.h>

#include <random>

#include <photonsim/experiments.hpp>

using namespace photonsim;

namespace {

// Trapezoid overlap of amplitudes exp(-(t - t0)^2 / (2 sigma^2)) normalized on a grid.
double integrated_overlap(double ta, double sa, double tb, double sb) {
  const double lo = std::min(ta - 12 * sa, tb - 12 * sb), hi = std::max(ta + 12 * sa, tb + 12 * sb);
  const int n = 200000;
  const double h = (hi - lo) / n;
  double ab = 0, aa = 0, bb = 0;
  for (int k = 0; k <= n; ++k) {
    const double t = lo + k * h, w = (k == 0 || k == n) ? 0.5 : 1.0;
    const double a = std::exp(-(t - ta) * (t - ta) / (2 * sa * sa)), b = std::exp(-(t - tb) * (t - tb) / (2 * sb * sb));
    ab += w * a * b, aa += w * a * a, bb += w * b * b;
  }
  return ab / std::sqrt(aa * bb);
}

}  // namespace

TEST(GaussianOverlap, Values) {
  EXPECT_NEAR(std::abs(gaussian_overlap({0.3, 1.0, 0.0}, {0.3, 1.0, 0.0}) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(gaussian_overlap({0.0, 1.5, 0.0}, {3.0, 1.5, 0.0})), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(std::abs(gaussian_overlap({0.0, 1.5, 2.0}, {3.0, 1.5, 2.0})), std::exp(-1.0), 1e-15);
  EXPECT_THROW(gaussian_overlap({0.0, 1.0, 0.0}, {0.0, 2.0, 0.0}), parameter_error);
  EXPECT_THROW(gaussian_overlap({0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}), parameter_error);
}

TEST(GaussianOverlap, TriadProductIsRealPositive) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> t(-3, 3);
  for (int k = 0; k < 50; ++k) {
    const GaussianWavepacket a{t(rng), 1.0, 1.7}, b{t(rng), 1.0, 1.7}, c{t(rng), 1.0, 1.7};
    const cplx prod = gaussian_overlap(a, b) * gaussian_overlap(b, c) * gaussian_overlap(c, a);
    EXPECT_NEAR(prod.imag(), 0.0, 1e-15);
    EXPECT_GT(prod.real(), 0.0);
  }
}

TEST(UnequalWidthOverlap, MatchesQuadrature) {
  EXPECT_NEAR(std::abs(unequal_width_overlap({0, 1, 0}, {0, 2.2, 0})), std::sqrt(4.4 / 5.84), 1e-14);
  EXPECT_NEAR(std::abs(unequal_width_overlap({0, 1, 0}, {0, 2.2, 0})), integrated_overlap(0, 1, 0, 2.2), 1e-9);
  EXPECT_NEAR(std::abs(unequal_width_overlap({0.4, 1, 0}, {-1.1, 2.2, 0})), integrated_overlap(0.4, 1, -1.1, 2.2), 1e-9);
  EXPECT_NEAR(std::abs(unequal_width_overlap({0, 1, 0}, {0, 1, 0}) - 1.0), 0.0, 1e-15);
  EXPECT_LE(std::abs(unequal_width_overlap({0, 1, 0}, {3.04, 1, 0})), 0.1);
}

TEST(InternalBasis, TemporalModesReproduceOverlaps) {
  const std::vector<GaussianWavepacket> p{{0, 1, 0}, {0.7, 1, 0}, {-1.2, 2.2, 0}, {0.7, 1, 0}};
  const auto basis = InternalBasis::temporal(p, 2);
  EXPECT_EQ(basis->temporal_dim(), 3);  // duplicate packet adds no mode
  EXPECT_EQ(basis->dim(), 8);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const auto a = InternalState::of(basis, i, PolarizationState::H());
      const auto b = InternalState::of(basis, j, PolarizationState::H());
      EXPECT_NEAR(std::abs(overlap(a, b) - unequal_width_overlap(p[i], p[j])), 0.0, 1e-12);
    }
  EXPECT_NEAR(std::abs(overlap(InternalState::aux(basis, 1), InternalState::of(basis, 0, PolarizationState::H()))), 0.0,
              1e-15);
  EXPECT_THROW(InternalState::aux(basis, 2), parameter_error);
}

TEST(InternalState, NormalizesAndRejectsZero) {
  const auto basis = InternalBasis::generic(3);
  CVector v(3);
  v << 3.0, 0.0, 4.0;
  EXPECT_NEAR(InternalState(basis, v).amplitudes().norm(), 1.0, 1e-15);
  EXPECT_THROW(InternalState(basis, CVector::Zero(3)), parameter_error);
  EXPECT_THROW(InternalState(basis, CVector::Ones(2)), dimension_error);
  EXPECT_THROW(overlap(InternalState::basis_vector(basis, 0), InternalState::basis_vector(InternalBasis::generic(3), 0)),
               dimension_error);
}

TEST(DistinguishabilityMatrix, PolarizationCases) {
  const auto basis = InternalBasis::temporal({{0, 1, 0}});
  const auto h = InternalState::of(basis, 0, PolarizationState::H());
  const auto v = InternalState::of(basis, 0, PolarizationState::V());
  const CMatrix s = distinguishability_matrix({h, v});
  EXPECT_NEAR(std::abs(s(0, 1)), 0.0, 1e-15);

  const auto m = mercedes_polarizations();
  const std::vector<InternalState> star{InternalState::of(basis, 0, m[0]), InternalState::of(basis, 0, m[1]),
                                        InternalState::of(basis, 0, m[2])};
  const CMatrix sm = distinguishability_matrix(star);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) EXPECT_NEAR(std::abs(sm(i, j)), 0.5, 1e-14);
  EXPECT_NEAR(std::abs(std::arg(sm(0, 1) * sm(1, 2) * sm(2, 0))), pi, 1e-14);
}

TEST(DistinguishabilityMatrix, RandomStatesGiveValidGram) {
  std::mt19937_64 rng(4);
  const auto basis = InternalBasis::generic(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<InternalState> st;
    for (int k = 0; k < 4; ++k) st.push_back(InternalState::random(basis, rng));
    EXPECT_TRUE(is_valid_distinguishability(distinguishability_matrix(st)));
  }
  CMatrix bad = CMatrix::Ones(2, 2);
  bad(0, 1) = 1.5;
  bad(1, 0) = 1.5;
  EXPECT_FALSE(is_valid_distinguishability(bad));
}

TEST(GramSchmidt, Parameterization) {
  const RMatrix zero = RMatrix::Zero(3, 3);
  const auto same = gram_schmidt_states(zero, zero);
  EXPECT_TRUE(distinguishability_matrix(same).isApprox(CMatrix::Ones(3, 3)));
  RMatrix s = RMatrix::Zero(3, 3);
  s(1, 1) = 1.0;
  const auto orth = gram_schmidt_states(s, zero);
  EXPECT_NEAR(std::abs(overlap(orth[0], orth[1])), 0.0, 1e-15);
  RMatrix big = RMatrix::Zero(3, 3);
  big(2, 1) = 0.9, big(2, 2) = 0.9;
  EXPECT_THROW(gram_schmidt_states(big, zero), parameter_error);
}

TEST(GramSchmidt, ParameterCountAndRank) {
  EXPECT_EQ(gram_schmidt_parameter_count(2), 2);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> s(0.1, 0.4), g(-pi, pi);
  for (int n = 2; n <= 4; ++n) {
    RVector base(gram_schmidt_parameter_count(n));
    for (Eigen::Index k = 0; k < base.size(); k += 2) base[k] = s(rng), base[k + 1] = g(rng);
    EXPECT_EQ(independent_parameter_rank(n, base), (n - 1) * (n - 1)) << "N = " << n;
  }
}

TEST(TriadPhase, Values) {
  const auto basis = InternalBasis::temporal({{0, 1, 0}});
  const auto h = InternalState::of(basis, 0, PolarizationState::H());
  EXPECT_NEAR(triad_phase(h, h, h), 0.0, 1e-15);
  const auto m = mercedes_polarizations();
  EXPECT_NEAR(triad_phase(InternalState::of(basis, 0, m[0]), InternalState::of(basis, 0, m[1]),
                          InternalState::of(basis, 0, m[2])),
              pi, 1e-12);
  const auto st = triad_sweep_states(pi / 8.0, 1.0);
  EXPECT_NEAR(triad_phase(st[0], st[1], st[2]), wrap_2pi(2.0 * std::arg(cplx(std::sqrt(3.0) * std::cos(pi / 4), -std::sin(pi / 4)))),
              1e-12);
  EXPECT_NEAR(triad_phase(st[0], st[1], st[2]), 5.23599, 1e-5);
  EXPECT_THROW(triad_phase(h, InternalState::of(basis, 0, PolarizationState::V()), h), undefined_phase_error);
}

TEST(TriadPhase, GaugeInvariant) {
  std::mt19937_64 rng(12);
  const auto basis = InternalBasis::generic(3);
  const auto a = InternalState::random(basis, rng), b = InternalState::random(basis, rng),
             c = InternalState::random(basis, rng);
  EXPECT_NEAR(triad_phase(a, b, c), triad_phase(a.with_phase(0.4), b.with_phase(-2.0), c.with_phase(1.1)), 1e-12);
}

TEST(CyclicTrace, PureStateReductions) {
  std::mt19937_64 rng(2);
  const auto basis = InternalBasis::generic(3);
  const auto a = InternalState::random(basis, rng), b = InternalState::random(basis, rng),
             c = InternalState::random(basis, rng);
  const auto ra = MixedState::pure(a), rb = MixedState::pure(b), rc = MixedState::pure(c);
  EXPECT_NEAR(std::abs(cyclic_trace({ra}) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(cyclic_trace({ra, rb}) - std::norm(overlap(a, b))), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(cyclic_trace({ra, rb, rc}) - overlap(a, b) * overlap(b, c) * overlap(c, a)), 0.0, 1e-14);
}

TEST(MixedState, ImpurityModel) {
  const auto basis = InternalBasis::temporal({{0, 1, 0}}, 2);
  const auto h = InternalState::of(basis, 0, PolarizationState::H());
  EXPECT_TRUE(impure_state(h, 1.0, 0).matrix().isApprox(MixedState::pure(h).matrix()));
  const auto r1 = impure_state(h, 0.9, 0);
  EXPECT_NEAR(r1.purity(), 0.82, 1e-14);
  EXPECT_NEAR(std::abs(cyclic_trace({r1, impure_state(h, 0.9, 0)}) - 0.82), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(cyclic_trace({r1, impure_state(h, 0.9, 1)}) - 0.81), 0.0, 1e-14);
  EXPECT_THROW(impure_state(h, 0.0, 0), parameter_error);
  EXPECT_THROW(impure_state(h, 1.2, 0), parameter_error);
}

TEST(MixedState, RejectsInvalidDensityMatrices) {
  EXPECT_THROW(MixedState(CMatrix::Identity(2, 2)), parameter_error);
  CMatrix nh = CMatrix::Zero(2, 2);
  nh(0, 0) = 1.0;
  nh(0, 1) = 0.3;
  EXPECT_THROW(MixedState{nh}, symmetry_error);
  CMatrix neg = CMatrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  EXPECT_THROW(MixedState{neg}, parameter_error);
}
