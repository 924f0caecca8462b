#pragma once

#include <array>
#include <limits>
#include <optional>

#include "interferometers.hpp"

namespace photonsim {

// ---------------------------------------------------------------------------
// Three-photon tritter scenarios
// ---------------------------------------------------------------------------

using PolarizationTriple = std::array<PolarizationState, 3>;

inline PolarizationTriple identical_polarizations() {
  return {PolarizationState::H(), PolarizationState::H(), PolarizationState::H()};
}

// Three linear polarizations 120 degrees apart on the Bloch sphere.
inline PolarizationTriple mercedes_polarizations() {
  const double h = std::sqrt(3.0) / 2.0;
  return {PolarizationState::H(), PolarizationState::make(0.5, h), PolarizationState::make(0.5, -h)};
}

// Photons 1 and 3 delayed symmetrically about photon 2: t1 = -tau/2, t3 = tau/2.
struct ThreePhotonScenario {
  PolarizationTriple pol = identical_polarizations();
  double sigma{1.0};

  std::vector<InternalState> states(double tau) const {
    const auto basis = InternalBasis::temporal({{-tau / 2.0, sigma, 0.0}, {0.0, sigma, 0.0}, {tau / 2.0, sigma, 0.0}});
    return {InternalState::of(basis, 0, pol[0]), InternalState::of(basis, 1, pol[1]),
            InternalState::of(basis, 2, pol[2])};
  }
};

inline std::vector<double> p111_scan(const ThreePhotonScenario& sc, const std::vector<double>& taus) {
  const CMatrix u = tritter();
  std::vector<double> out;
  for (double tau : taus) out.push_back(event_probability(u, sc.states(tau), {1, 1, 1}, {1, 1, 1}));
  return out;
}

inline std::vector<double> w_shape_scan(const std::vector<double>& taus, double sigma = 1.0) {
  return p111_scan({identical_polarizations(), sigma}, taus);
}

inline std::vector<double> mercedes_scan(const std::vector<double>& taus, double sigma = 1.0) {
  return p111_scan({mercedes_polarizations(), sigma}, taus);
}

// Closed forms for photons a, b, c in tritter inputs 1, 2, 3 with pairwise
// overlap moduli r and triad phase phi.
namespace tritter_formulas {

inline double p111(double rab, double rbc, double rca, double phi) {
  return (2.0 + 4.0 * rab * rbc * rca * std::cos(phi) - rab * rab - rbc * rbc - rca * rca) / 9.0;
}

inline double p300(double rab, double rbc, double rca, double phi) {
  return (1.0 + rab * rab + rbc * rbc + rca * rca + 2.0 * rab * rbc * rca * std::cos(phi)) / 27.0;
}

inline double p120(double rab, double rbc, double rca, double phi) {
  return (1.0 - 2.0 * rab * rbc * rca * std::cos(phi + pi / 3.0)) / 9.0;
}

inline double p021(double rab, double rbc, double rca, double phi) {
  return (1.0 - 2.0 * rab * rbc * rca * std::cos(phi - pi / 3.0)) / 9.0;
}

inline double p011(double rij) { return (2.0 - rij * rij) / 9.0; }

}  // namespace tritter_formulas

// ---------------------------------------------------------------------------
// Triad-phase sweep
// ---------------------------------------------------------------------------

// Delay between photon a and photons b, c that keeps |<a|b>|^2 = 1/4.
inline double triad_sweep_delay(double theta, double sigma) {
  return sigma * std::sqrt(2.0 * std::log(2.0 + std::cos(4.0 * theta)));
}

inline double triad_sweep_phase(double theta) {
  return wrap_2pi(2.0 * std::arg(cplx(std::sqrt(3.0) * std::cos(2.0 * theta), -std::sin(2.0 * theta))));
}

struct TriadSweepPoint {
  double theta{0.0};
  double delay{0.0};
  double triad_phase{0.0};
  double p111{0.0};
  double p011{0.0};  // photons b, c only
  double p101{0.0};  // photons a, c only
  double p110{0.0};  // photons a, b only
};

inline std::vector<InternalState> triad_sweep_states(double theta, double sigma) {
  const double ta = triad_sweep_delay(theta, sigma);
  const auto basis = InternalBasis::temporal({{ta, sigma, 0.0}, {0.0, sigma, 0.0}});
  const double h = std::sqrt(3.0) / 2.0;
  return {InternalState::of(basis, 0, PolarizationState::make(std::cos(2.0 * theta), I * std::sin(2.0 * theta))),
          InternalState::of(basis, 1, PolarizationState::make(h, 0.5)),
          InternalState::of(basis, 1, PolarizationState::make(h, -0.5))};
}

inline std::vector<TriadSweepPoint> triad_sweep(const std::vector<double>& thetas, double sigma = 1.0) {
  const CMatrix u = tritter();
  std::vector<TriadSweepPoint> out;
  for (double theta : thetas) {
    if (theta < -1e-12 || theta > pi / 2.0 + 1e-12) throw parameter_error("triad_sweep: theta outside [0, pi/2]");
    const auto st = triad_sweep_states(theta, sigma);
    TriadSweepPoint p;
    p.theta = theta;
    p.delay = triad_sweep_delay(theta, sigma);
    p.triad_phase = triad_phase(st[0], st[1], st[2]);
    p.p111 = event_probability(u, st, {1, 1, 1}, {1, 1, 1});
    p.p011 = event_probability(u, st, {0, 1, 1}, {0, 1, 1});
    p.p101 = event_probability(u, st, {1, 0, 1}, {1, 0, 1});
    p.p110 = event_probability(u, st, {1, 1, 0}, {1, 1, 0});
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Four-photon circle dance on the quitter
// ---------------------------------------------------------------------------

// a = |H,t1>, b = |+,t2>, c = |V,t1>, d = (|H,t3> + e^{i theta}|V,t3>)/sqrt2;
// a and c broad (sigma_b), b and d narrow (sigma_n).
struct CircleDanceScenario {
  double theta{0.0};
  double chi{pi / 2.0};
  double sigma_n{1.0};
  double width_ratio{2.2};
  double t1{0.0};
  double t2{0.0};
  double t3{0.0};

  double sigma_b() const { return width_ratio * sigma_n; }

  // States in the order a, b, c, d.
  std::vector<InternalState> states() const {
    const auto basis = InternalBasis::temporal({{t1, sigma_b(), 0.0}, {t2, sigma_n, 0.0}, {t3, sigma_n, 0.0}});
    return {InternalState::of(basis, 0, PolarizationState::H()),
            InternalState::of(basis, 1, PolarizationState::diagonal()),
            InternalState::of(basis, 0, PolarizationState::V()),
            InternalState::of(basis, 2, PolarizationState::make(1.0, std::exp(I * theta)))};
  }

  // Per input mode: d -> 1, b -> 2, c -> 3, a -> 4.
  std::vector<InternalState> injected() const {
    const auto s = states();
    return {s[3], s[1], s[2], s[0]};
  }
};

struct CircleOverlaps {
  double rab, rbc, rcd, rad;
};

inline CircleOverlaps circle_overlaps(const CircleDanceScenario& sc) {
  const auto s = sc.states();
  return {std::abs(overlap(s[0], s[1])), std::abs(overlap(s[1], s[2])), std::abs(overlap(s[2], s[3])),
          std::abs(overlap(s[0], s[3]))};
}

// Injected states (d, b, c, a) in a four-dimensional internal space with the
// given adjacent overlap moduli, <a|c> = <b|d> = 0 and cyclic phase theta.
inline std::vector<InternalState> circle_dance_ideal_states(const CircleOverlaps& r, double theta) {
  const double b2 = 1.0 - r.rab * r.rab - r.rbc * r.rbc;
  if (b2 <= 0.0) throw parameter_error("circle_dance_ideal_states: overlaps of b too large");
  CVector a = CVector::Zero(4), b = CVector::Zero(4), c = CVector::Zero(4), d = CVector::Zero(4);
  a[0] = 1.0;
  c[1] = 1.0;
  b[0] = r.rab, b[1] = r.rbc, b[2] = std::sqrt(b2);
  d[0] = r.rad, d[1] = r.rcd * std::exp(I * theta);
  d[2] = -(r.rab * r.rad + r.rbc * r.rcd * std::exp(I * theta)) / b[2];
  const double rest = 1.0 - d.squaredNorm();
  if (rest < 0.0) throw parameter_error("circle_dance_ideal_states: overlaps of d too large");
  d[3] = std::sqrt(rest);
  const auto basis = InternalBasis::generic(4);
  return {InternalState(basis, d), InternalState(basis, b), InternalState(basis, c), InternalState(basis, a)};
}

inline double p5678_formula(const CircleOverlaps& r, double chi, double theta) {
  const double c2 = std::cos(2.0 * chi);
  return (3.0 - r.rab * r.rab - r.rbc * r.rbc - r.rcd * r.rcd - r.rad * r.rad +
          (2.0 + c2) * (r.rab * r.rab * r.rcd * r.rcd + r.rad * r.rad * r.rbc * r.rbc) +
          2.0 * (c2 - 2.0) * r.rab * r.rbc * r.rcd * r.rad * std::cos(theta)) /
         32.0;
}

inline double circle_dance_probability(const CircleDanceScenario& sc) {
  return event_probability(quitter(sc.chi), sc.injected(), {1, 1, 1, 1}, {1, 1, 1, 1});
}

// Walk-off for b and d about t1 = 0 such that |<t2|t3>| equals the residual
// bound, with the split chosen by golden-section search to maximize the
// four-cycle overlap product.
inline CircleDanceScenario optimized_circle_dance(double residual = 0.1, double sigma_n = 1.0, double ratio = 2.2) {
  CircleDanceScenario sc;
  sc.sigma_n = sigma_n;
  sc.width_ratio = ratio;
  const double sep = 2.0 * sigma_n * std::sqrt(std::log(1.0 / residual));
  auto product = [&](double u) {
    CircleDanceScenario s = sc;
    s.t2 = -u;
    s.t3 = sep - u;
    const auto r = circle_overlaps(s);
    return r.rab * r.rbc * r.rcd * r.rad;
  };
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = sep;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = product(x1), f2 = product(x2);
  while (hi - lo > 1e-10 * sep) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = product(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = product(x1);
    }
  }
  const double u = 0.5 * (lo + hi);
  sc.t2 = -u;
  sc.t3 = sep - u;
  return sc;
}

struct FringeExtrema {
  double max{0.0}, min{0.0};
  double theta_max{0.0}, theta_min{0.0};
};

inline FringeExtrema circle_dance_fringe(CircleDanceScenario sc, int samples = 72) {
  FringeExtrema f{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (int k = 0; k < samples; ++k) {
    sc.theta = 2.0 * pi * k / samples;
    const double p = circle_dance_probability(sc);
    if (p > f.max) f.max = p, f.theta_max = sc.theta;
    if (p < f.min) f.min = p, f.theta_min = sc.theta;
  }
  return f;
}

// Peak-to-trough contrast relative to the fringe maximum.
inline double fringe_visibility(double max, double min) {
  if (!(max > 0.0)) throw parameter_error("fringe_visibility: maximum must be positive");
  return (max - min) / max;
}

// Two-fold signal for photons in quitter() inputs 1 and 3 detected at outputs 5 and 8.
inline double locking_signal(double chi, double r) {
  if (r < 0.0 || r > 1.0) throw parameter_error("locking_signal: r outside [0, 1]");
  return (1.0 - r * r * std::cos(chi)) / 8.0;
}

// ---------------------------------------------------------------------------
// Visibility
// ---------------------------------------------------------------------------

enum class FeatureKind { dip, peak };

inline double visibility(const std::vector<double>& curve, double baseline, FeatureKind kind = FeatureKind::dip) {
  if (!(baseline > 0.0)) throw parameter_error("visibility: baseline must be positive");
  if (curve.empty()) throw parameter_error("visibility: empty curve");
  if (kind == FeatureKind::dip) return (baseline - *std::min_element(curve.begin(), curve.end())) / baseline;
  return (*std::max_element(curve.begin(), curve.end()) - baseline) / baseline;
}

// ---------------------------------------------------------------------------
// Heralded source model with higher-order emission, noise and impurity
// ---------------------------------------------------------------------------

// Weight q of the dominant level of a two-level mixed factor with Tr(rho^2) = purity.
inline double mixed_factor_weight(double purity) {
  if (purity < 0.5 || purity > 1.0) throw parameter_error("purity outside [1/2, 1] for a two-level mixed factor");
  return 0.5 * (1.0 + std::sqrt(2.0 * purity - 1.0));
}

// Pair source whose signal photon enters the interferometer and whose idler
// fires a threshold herald. Noise photons are fully distinguishable.
struct SourceModel {
  double lambda{0.16};
  double purity{0.9};
  double p_idler_noise{0.035};
  double p_signal_noise{0.009};
  int max_photons{8};
  int max_noise{3};

  void validate() const {
    if (!(lambda >= 0.0 && lambda < 1.0)) throw parameter_error("source model: lambda outside [0, 1)");
    if (!(p_idler_noise >= 0.0 && p_idler_noise < 1.0) || !(p_signal_noise >= 0.0 && p_signal_noise < 1.0))
      throw parameter_error("source model: noise probability outside [0, 1)");
    mixed_factor_weight(purity);
    if (max_photons < 0 || max_noise < 0) throw parameter_error("source model: negative truncation");
  }
};

// Emission of one source: n pairs, k signal-noise and l idler-noise photons.
struct EmissionTerm {
  int pairs{0};
  int signal_noise{0};
  int idler_noise{0};
  double weight{0.0};

  int photons() const { return 2 * pairs + signal_noise + idler_noise; }
  int noise() const { return signal_noise + idler_noise; }
};

// Single-source mixture truncated at the model bounds and renormalized.
inline std::vector<EmissionTerm> source_emission_density(const SourceModel& model) {
  model.validate();
  const double l2 = model.lambda * model.lambda;
  const double base = (1.0 - l2) * (1.0 - model.p_idler_noise) * (1.0 - model.p_signal_noise);
  std::vector<EmissionTerm> terms;
  double total = 0.0;
  for (int n = 0; 2 * n <= model.max_photons; ++n)
    for (int k = 0; k <= model.max_noise; ++k)
      for (int l = 0; k + l <= model.max_noise; ++l) {
        EmissionTerm t{n, k, l, 0.0};
        if (t.photons() > model.max_photons) continue;
        t.weight = base * std::pow(l2, n) * std::pow(model.p_signal_noise, k) * std::pow(model.p_idler_noise, l);
        if (t.weight <= 0.0 && !(n == 0 && k == 0 && l == 0)) continue;
        terms.push_back(t);
        total += t.weight;
      }
  for (auto& t : terms) t.weight /= total;
  return terms;
}

// Detector arrangement behind the interferometer outputs; cascade[o] is the
// number of threshold detectors fed by an ideal uniform splitter on output o.
struct DetectorConfig {
  std::vector<int> cascade;

  // Tritter splitter on output 1: resolves (1,1,1), (3,0,0), (2,1,0), (2,0,1).
  static DetectorConfig config_a() { return {{3, 1, 1}}; }
  // 50:50 splitters on outputs 1 and 3: resolves (1,1,1), (2,1,0), (2,0,1), (1,0,2), (0,1,2).
  static DetectorConfig config_b() { return {{2, 1, 2}}; }
  static DetectorConfig plain(int modes) { return {std::vector<int>(modes, 1)}; }
};

// Probability that exactly x of c detectors fire when q photons are split
// uniformly among them.
inline double cascade_click_probability(int q, int c, int x) {
  if (x < 0 || x > c || x > q) return 0.0;
  if (q == 0) return x == 0 ? 1.0 : 0.0;
  // inclusion-exclusion for surjections onto x chosen detectors
  double surj = 0.0;
  for (int j = 0; j <= x; ++j) {
    const double binom_xj = factorial(x) / (factorial(j) * factorial(x - j));
    surj += ((j % 2) ? -1.0 : 1.0) * binom_xj * std::pow(static_cast<double>(x - j), q);
  }
  const double binom_cx = factorial(c) / (factorial(x) * factorial(c - x));
  return binom_cx * surj / std::pow(static_cast<double>(c), q);
}

// A heralded detection event: heralds of the listed sources fire and each
// output shows the given number of clicking detectors (-1: not monitored).
struct HeraldedEvent {
  std::vector<int> sources;
  std::vector<int> clicks;
};

// Signal photon of each active source: input mode, temporal packet and polarization.
struct SourceSlot {
  int mode{0};
  GaussianWavepacket packet;
  PolarizationState pol;
};

struct CountResult {
  double rate{0.0};
  double weight_used{0.0};
  int terms{0};
};

namespace detail {

struct PhotonSpec {
  int mode;
  int packet;   // -1 for noise
  int source;
};

}  // namespace detail

// Expected heralded event rate per pump pulse.
inline CountResult simulate_counts(const SourceModel& model, const std::vector<SourceSlot>& slots,
                                   const CMatrix& u, const DetectorConfig& det, const HeraldedEvent& event,
                                   double min_weight = 1e-12) {
  model.validate();
  const int m = static_cast<int>(u.rows());
  if (static_cast<int>(det.cascade.size()) != m || static_cast<int>(event.clicks.size()) != m)
    throw unsupported_error("simulate_counts: detector configuration does not match the interferometer");
  if (slots.empty()) throw unsupported_error("simulate_counts: no active sources");
  for (const auto& s : slots)
    if (s.mode < 0 || s.mode >= m) throw unsupported_error("simulate_counts: source mode out of range");
  const auto single = source_emission_density(model);
  const int ns = static_cast<int>(slots.size());

  std::vector<GaussianWavepacket> packets;
  for (const auto& s : slots) packets.push_back(s.packet);
  const auto temporal = InternalBasis::temporal(packets);
  const int d = temporal->dim();
  // physical state (x) two-level mixed factor, then one slot per noise photon
  const auto basis = InternalBasis::generic(2 * d + model.max_noise);
  std::array<std::vector<InternalState>, 2> pure;
  for (int f = 0; f < 2; ++f)
    for (int j = 0; j < ns; ++j) {
      CVector amps = CVector::Zero(basis->dim());
      amps.segment(f * d, d) = InternalState::of(temporal, j, slots[j].pol).amplitudes();
      pure[f].push_back(InternalState(basis, amps));
    }
  const double q = mixed_factor_weight(model.purity);

  std::vector<char> heralded(ns, 0);
  for (int s : event.sources) {
    if (s < 0 || s >= ns) throw unsupported_error("simulate_counts: heralded source out of range");
    heralded[s] = 1;
  }

  struct Admissible {
    std::vector<std::size_t> pick;
    double weight;
  };
  std::vector<Admissible> admissible;
  double wmax = 0.0;
  std::vector<std::size_t> pick(ns, 0);
  while (true) {
    double w = 1.0;
    int photons = 0, noise = 0;
    bool herald_ok = true;
    for (int j = 0; j < ns; ++j) {
      const auto& t = single[pick[j]];
      w *= t.weight;
      photons += t.photons();
      noise += t.noise();
      if (heralded[j] && t.pairs + t.idler_noise == 0) herald_ok = false;
    }
    if (herald_ok && photons <= model.max_photons && noise <= model.max_noise && w > 0.0) {
      admissible.push_back({pick, w});
      wmax = std::max(wmax, w);
    }
    int j = 0;
    while (j < ns) {
      if (++pick[j] < single.size()) break;
      pick[j] = 0;
      ++j;
    }
    if (j == ns) break;
  }

  CountResult result;
  int required = 0;
  for (int c : event.clicks) required += std::max(c, 0);
  for (const auto& adm : admissible) {
    const double w = adm.weight;
    if (w < min_weight * wmax) continue;
    {
      std::vector<detail::PhotonSpec> specs;
      for (int j = 0; j < ns; ++j) {
        const auto& t = single[adm.pick[j]];
        for (int p = 0; p < t.pairs; ++p) specs.push_back({slots[j].mode, j, j});
        for (int p = 0; p < t.signal_noise; ++p) specs.push_back({slots[j].mode, -1, j});
      }
      const int nph = static_cast<int>(specs.size());
      if (nph >= required && nph > 0) {
        std::vector<int> signal_idx;
        for (int i = 0; i < nph; ++i)
          if (specs[i].packet >= 0) signal_idx.push_back(i);
        const int nsig = static_cast<int>(signal_idx.size());
        double term_prob = 0.0;
        for (std::uint32_t mask = 0; mask < (1u << nsig); ++mask) {
          double pw = 1.0;
          std::vector<Photon> photons_in;
          int aux = 0, bit = 0;
          for (int i = 0; i < nph; ++i) {
            const auto& sp = specs[i];
            if (sp.packet < 0) {
              photons_in.push_back({sp.mode, InternalState::basis_vector(basis, 2 * d + aux++)});
              continue;
            }
            const int f = (mask >> bit++) & 1u;
            pw *= f ? (1.0 - q) : q;
            photons_in.push_back({sp.mode, pure[f][sp.packet]});
          }
          if (pw <= 0.0) continue;
          double p_event = 0.0;
          for (const auto& s : all_patterns(m, nph)) {
            double pc = 1.0;
            for (int o = 0; o < m && pc > 0.0; ++o)
              if (event.clicks[o] >= 0) pc *= cascade_click_probability(s[o], det.cascade[o], event.clicks[o]);
            if (pc <= 0.0) continue;
            p_event += pc * event_probability(u, photons_in, s);
          }
          term_prob += pw * p_event;
        }
        result.rate += w * term_prob;
        result.weight_used += w;
        ++result.terms;
      }
    }
  }
  return result;
}

// Baseline-relative dip visibility of a heralded event between a delay setting
// and the fully distinguishable (large-delay) setting.
inline double model_dip_visibility(const SourceModel& model, const std::vector<SourceSlot>& at_overlap,
                                   const std::vector<SourceSlot>& distinguishable, const CMatrix& u,
                                   const DetectorConfig& det, const HeraldedEvent& event) {
  const double dip = simulate_counts(model, at_overlap, u, det, event).rate;
  const double base = simulate_counts(model, distinguishable, u, det, event).rate;
  return visibility({dip}, base, FeatureKind::dip);
}

struct NoiseModelVisibilities {
  double hom{0.0};             // identical polarizations, inputs 1 and 2, outputs 1 and 2
  double mercedes{0.0};        // same pair with polarizations 120 degrees apart
  double suppressed_210{0.0};  // (2,1,0) with identical photons, config b
  double triad_dip{0.0};       // three-fold minimum over the triad-phase sweep, config a
};

// All three sources are pumped; the delay that separates photons in the
// distinguishable setting is `far` wavepacket widths.
inline NoiseModelVisibilities noise_model_visibilities(const SourceModel& model, const CMatrix& u = tritter(),
                                                       int sweep_points = 9, double far = 40.0) {
  const auto H = PolarizationState::H();
  const auto mercedes = mercedes_polarizations();
  auto slot = [](int mode, double t, const PolarizationState& pol) { return SourceSlot{mode, {t, 1.0, 0.0}, pol}; };
  NoiseModelVisibilities v;

  const HeraldedEvent pair_event{{0, 1}, {1, 1, -1}};
  const auto plain = DetectorConfig::plain(3);
  v.hom = model_dip_visibility(model, {slot(0, 0, H), slot(1, 0, H), slot(2, -far, H)},
                               {slot(0, 0, H), slot(1, far, H), slot(2, -far, H)}, u, plain, pair_event);
  v.mercedes = model_dip_visibility(model, {slot(0, 0, mercedes[0]), slot(1, 0, mercedes[1]), slot(2, -far, H)},
                                    {slot(0, 0, mercedes[0]), slot(1, far, mercedes[1]), slot(2, -far, H)}, u,
                                    plain, pair_event);

  const std::vector<SourceSlot> apart{slot(0, -far, H), slot(1, 0, H), slot(2, far, H)};
  v.suppressed_210 = model_dip_visibility(model, {slot(0, 0, H), slot(1, 0, H), slot(2, 0, H)}, apart, u,
                                          DetectorConfig::config_b(), {{0, 1, 2}, {2, 1, 0}});

  const HeraldedEvent triple{{0, 1, 2}, {1, 1, 1}};
  const auto det_a = DetectorConfig::config_a();
  const double h = std::sqrt(3.0) / 2.0;
  std::vector<double> rates;
  for (int k = 0; k < sweep_points; ++k) {
    const double theta = (pi / 2.0) * k / std::max(1, sweep_points - 1);
    const auto pa = PolarizationState::make(std::cos(2.0 * theta), I * std::sin(2.0 * theta));
    rates.push_back(simulate_counts(model,
                                    {slot(0, triad_sweep_delay(theta, 1.0), pa),
                                     slot(1, 0, PolarizationState::make(h, 0.5)),
                                     slot(2, 0, PolarizationState::make(h, -0.5))},
                                    u, det_a, triple)
                        .rate);
  }
  v.triad_dip = visibility(rates, simulate_counts(model, apart, u, det_a, triple).rate, FeatureKind::dip);
  return v;
}

}  // namespace photonsim
