#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <random>

#include "numerics.hpp"

namespace photonsim::lattice {

using Vec2 = Eigen::Vector2d;

enum class Sublattice { A = 0, B = 1 };

// Site positions in micrometres.
struct LatticeGeometry {
  std::vector<Vec2> sites;
  std::vector<Sublattice> sublattice;
  double a0{10.0};

  std::size_t size() const { return sites.size(); }
  std::size_t count(Sublattice s) const { return std::count(sublattice.begin(), sublattice.end(), s); }
};

inline double min_site_distance(const LatticeGeometry& g) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j) best = std::min(best, (g.sites[i] - g.sites[j]).norm());
  return best;
}

inline void require_valid(const LatticeGeometry& g) {
  if (g.sites.size() != g.sublattice.size()) throw dimension_error("geometry: sublattice labels do not match sites");
  if (!(g.a0 > 0.0)) throw parameter_error("geometry: lattice constant must be positive");
  if (g.size() > 1 && min_site_distance(g) < 0.2 * g.a0) throw parameter_error("geometry: sites closer than 0.2 a0");
}

inline std::vector<int> coordination(const LatticeGeometry& g, double radius) {
  std::vector<int> deg(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j)
      if ((g.sites[i] - g.sites[j]).norm() < radius) ++deg[i], ++deg[j];
  return deg;
}

// Removes sites with fewer than two neighbours until none remain.
inline LatticeGeometry prune_dangling(LatticeGeometry g) {
  while (true) {
    const auto deg = coordination(g, 1.1 * g.a0);
    LatticeGeometry kept;
    kept.a0 = g.a0;
    for (std::size_t k = 0; k < g.size(); ++k)
      if (deg[k] >= 2) kept.sites.push_back(g.sites[k]), kept.sublattice.push_back(g.sublattice[k]);
    if (kept.size() == g.size()) return g;
    g = std::move(kept);
  }
}

// Honeycomb with A at (sqrt3 a0 (i + j/2), 1.5 a0 j) and B = A - (0, a0),
// cropped to a width x height box around `center`; sites left with fewer than
// two neighbours are pruned repeatedly.
inline LatticeGeometry graphene_crop(double width, double height, double a0 = 10.0, Vec2 center = Vec2::Zero()) {
  if (!(width > 0.0 && height > 0.0 && a0 > 0.0)) throw parameter_error("graphene_crop: dimensions must be positive");
  LatticeGeometry g;
  g.a0 = a0;
  const double s3 = std::sqrt(3.0);
  const int n = static_cast<int>((std::max(width, height) + 2.0 * center.norm()) / a0) + 4;
  const double eps = 1e-9 * a0;
  for (int i = -2 * n; i < 2 * n; ++i)
    for (int j = -2 * n; j < 2 * n; ++j) {
      const Vec2 a(s3 * a0 * (i + 0.5 * j), 1.5 * a0 * j);
      for (const auto& [p, s] : {std::pair{a, Sublattice::A}, std::pair{Vec2(a - Vec2(0.0, a0)), Sublattice::B}})
        if (std::abs(p.x() - center.x()) <= width / 2 + eps && std::abs(p.y() - center.y()) <= height / 2 + eps) {
          g.sites.push_back(p);
          g.sublattice.push_back(s);
        }
    }
  return prune_dangling(std::move(g));
}

// rows x cols honeycomb cells in a rectangular crop.
inline LatticeGeometry graphene_lattice(int rows, int cols, double a0 = 10.0) {
  if (rows < 1 || cols < 1) throw parameter_error("graphene_lattice: dimensions must be positive");
  return graphene_crop(std::sqrt(3.0) * a0 * cols, 1.5 * a0 * rows, a0);
}

// Sites of an enclosing rectangular crop within `radius` of `center`.
inline LatticeGeometry graphene_disk(double radius, double a0 = 10.0, Vec2 center = Vec2::Zero()) {
  if (!(radius > 0.0)) throw parameter_error("graphene_disk: radius must be positive");
  const LatticeGeometry box = graphene_crop(2.0 * radius + 4.0 * a0, 2.0 * radius + 4.0 * a0, a0, center);
  LatticeGeometry g;
  g.a0 = a0;
  for (std::size_t k = 0; k < box.size(); ++k)
    if ((box.sites[k] - center).norm() <= radius) g.sites.push_back(box.sites[k]), g.sublattice.push_back(box.sublattice[k]);
  return prune_dangling(std::move(g));
}

// 1192-site build, 596 sites per sublattice.
inline LatticeGeometry disk1192_lattice() { return graphene_disk(224.14, 10.0, Vec2(0.481, 1.3)); }

// Alternating A/B chain along x.
inline LatticeGeometry ssh_chain(int n, double spacing = 10.0) {
  if (n < 1 || !(spacing > 0.0)) throw parameter_error("ssh_chain: dimensions must be positive");
  LatticeGeometry g;
  g.a0 = spacing;
  for (int k = 0; k < n; ++k) {
    g.sites.emplace_back(k * spacing, 0.0);
    g.sublattice.push_back(k % 2 ? Sublattice::B : Sublattice::A);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Kekule vortex texture
// ---------------------------------------------------------------------------

struct VortexCore {
  Vec2 center{0.0, 0.0};
  int winding{1};
};

// Delta(r) = delta0 * prod_k tanh(|r - R_k| / l0) * exp(i (alpha + sum_k n_k theta_k)).
struct VortexField {
  double delta0{3.0};
  double l0{20.0};
  double alpha{pi / 2.0};
  std::vector<VortexCore> cores{VortexCore{}};

  static VortexField single(double delta0, double l0, int n, double alpha, Vec2 center) {
    return {delta0, l0, alpha, {VortexCore{center, n}}};
  }

  void validate() const {
    if (!(l0 > 0.0)) throw parameter_error("vortex field: width must be positive");
    if (delta0 < 0.0) throw parameter_error("vortex field: amplitude must be nonnegative");
  }
};

inline cplx vortex_delta(const Vec2& pos, const VortexField& f) {
  double amp = f.delta0;
  double phase = f.alpha;
  for (const auto& c : f.cores) {
    const Vec2 d = pos - c.center;
    amp *= std::tanh(d.norm() / f.l0);
    phase += c.winding * std::atan2(d.y(), d.x());
  }
  return amp * std::exp(I * phase);
}

inline Vec2 dirac_point(double a0) { return {4.0 * pi / (3.0 * std::sqrt(3.0) * a0), 0.0}; }

// Displacement scale for a target peak shift: |u| peaks at 2 xi delta0.
inline double xi_for_displacement(double max_shift, double delta0) { return max_shift / (2.0 * delta0); }

struct Displacement {
  LatticeGeometry geometry;
  double max_shift{0.0};
  bool exceeds_validity{false};  // shift above 0.3 a0
};

// w = i xi Delta(r) e^{iG.r}, G = 2K; A shifts by (2 Re w, 2 Re(i w)), B by (2 Re w, 2 Re(-i w)).
inline Displacement kekule_displace(const LatticeGeometry& g, const VortexField& f, double xi) {
  f.validate();
  const Vec2 G = 2.0 * dirac_point(g.a0);
  Displacement out{g, 0.0, false};
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec2& r = g.sites[k];
    const cplx w = I * xi * vortex_delta(r, f) * std::exp(I * G.dot(r));
    const cplx v = g.sublattice[k] == Sublattice::A ? I : -I;
    const Vec2 u(2.0 * w.real(), 2.0 * (w * v).real());
    out.geometry.sites[k] = r + u;
    out.max_shift = std::max(out.max_shift, u.norm());
  }
  out.exceeds_validity = out.max_shift > 0.3 * g.a0;
  return out;
}

// ---------------------------------------------------------------------------
// Coupled-mode Hamiltonian
// ---------------------------------------------------------------------------

// k(d) = coupling * exp(-gamma (d - reference)) within the cutoff radius.
// Couplings in 1/cm, distances in micrometres.
struct CouplingModel {
  double coupling{5.0};
  double gamma{0.25};
  double reference{10.0};
  double cutoff{13.0};

  void validate() const {
    if (!(gamma > 0.0)) throw parameter_error("coupling model: decay constant must be positive");
    if (!(coupling > 0.0)) throw parameter_error("coupling model: coupling must be positive");
    if (!(cutoff > 0.0)) throw parameter_error("coupling model: cutoff must be positive");
  }

  double at(double d) const { return coupling * std::exp(-gamma * (d - reference)); }
  double beat_length(double d) const { return 2.0 * pi / at(d); }
  // Ratio of next-nearest to nearest coupling on an ideal honeycomb.
  double nnn_ratio(double a0) const { return std::exp(-gamma * (std::sqrt(3.0) - 1.0) * a0); }
  double fermi_velocity(double a0) const { return 1.5 * coupling * a0; }
};

inline RMatrix coupling_hamiltonian(const LatticeGeometry& g, const CouplingModel& m) {
  m.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  RMatrix h = RMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (g.sites[i] - g.sites[j]).norm();
      if (d < m.cutoff) h(i, j) = h(j, i) = -m.at(d);
    }
  return h;
}

// ---------------------------------------------------------------------------
// Spectra and modes
// ---------------------------------------------------------------------------

struct Spectrum {
  RVector values;   // ascending
  RMatrix vectors;  // columns
};

inline Spectrum spectrum(const RMatrix& h) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(h);
  if (es.info() != Eigen::Success) throw consistency_error("spectrum: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

struct Histogram {
  std::vector<double> edges;
  std::vector<int> counts;
};

inline Histogram density_of_states(const RVector& values, int bins, double lo, double hi) {
  if (bins < 1 || !(hi > lo)) throw parameter_error("density_of_states: invalid binning");
  Histogram hgm;
  for (int b = 0; b <= bins; ++b) hgm.edges.push_back(lo + (hi - lo) * b / bins);
  hgm.counts.assign(bins, 0);
  for (double e : values) {
    if (e < lo || e > hi) continue;
    const int b = std::min(bins - 1, static_cast<int>((e - lo) / (hi - lo) * bins));
    ++hgm.counts[b];
  }
  return hgm;
}

inline Histogram density_of_states(const RVector& values, int bins) {
  const double m = values.cwiseAbs().maxCoeff() * (1.0 + 1e-12) + 1e-300;
  return density_of_states(values, bins, -m, m);
}

inline RVector site_distances(const LatticeGeometry& g, const Vec2& center) {
  RVector r(static_cast<Eigen::Index>(g.size()));
  for (std::size_t k = 0; k < g.size(); ++k) r[k] = (g.sites[k] - center).norm();
  return r;
}

inline int nearest_site(const LatticeGeometry& g, const Vec2& p, std::optional<Sublattice> only = std::nullopt) {
  int best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (only && g.sublattice[k] != *only) continue;
    const double d = (g.sites[k] - p).norm();
    if (d < bd) bd = d, best = static_cast<int>(k);
  }
  if (best < 0) throw parameter_error("nearest_site: no candidate site");
  return best;
}

// Sublattice B site near p whose Dirac-point phase cos(K.r) is +-1.
inline int bright_site(const LatticeGeometry& g, const Vec2& p) {
  const Vec2 K = dirac_point(g.a0);
  int best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.sublattice[k] != Sublattice::B || std::abs(std::cos(K.dot(g.sites[k]))) < 0.99) continue;
    const double d = (g.sites[k] - p).norm();
    if (d < bd) bd = d, best = static_cast<int>(k);
  }
  if (best < 0) throw parameter_error("bright_site: no candidate site");
  return best;
}

inline Sublattice supporting_sublattice(int winding) {
  if (winding == 1) return Sublattice::B;
  if (winding == -1) return Sublattice::A;
  throw unsupported_error("zero mode: only windings +-1 are supported");
}

// Real continuum zero mode of core `index`, evaluated on the undistorted
// positions; the phase seen at the core includes the other cores' windings.
inline RVector analytic_zero_mode(const LatticeGeometry& g, const VortexField& f, const CouplingModel& m,
                                  std::size_t index = 0) {
  f.validate();
  if (index >= f.cores.size()) throw parameter_error("analytic_zero_mode: core index out of range");
  const auto& core = f.cores[index];
  const Sublattice support = supporting_sublattice(core.winding);
  double alpha = f.alpha;
  for (std::size_t k = 0; k < f.cores.size(); ++k) {
    if (k == index) continue;
    const Vec2 d = core.center - f.cores[k].center;
    alpha += f.cores[k].winding * std::atan2(d.y(), d.x());
  }
  const Vec2 K = dirac_point(g.a0);
  const double decay = f.delta0 * f.l0 / m.fermi_velocity(g.a0);
  const double s = core.winding;
  RVector psi = RVector::Zero(static_cast<Eigen::Index>(g.size()));
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.sublattice[k] != support) continue;
    const double r = (g.sites[k] - core.center).norm();
    // log cosh without overflow
    const double x = r / f.l0;
    const double lc = x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
    const cplx carrier = std::exp(I * (s * (alpha / 2.0 - pi / 4.0) + K.dot(g.sites[k])));
    psi[k] = carrier.real() * std::exp(-decay * lc);
  }
  const double n = psi.norm();
  if (n < 1e-300) throw consistency_error("analytic_zero_mode: vanishing mode");
  return psi / n;
}

// Combination of near-zero eigenvectors with the largest weight inside the
// given radius of `center`.
struct LocalizedMode {
  RVector mode;
  double weight_inside{0.0};
  double energy{0.0};
  int subspace{0};
};

inline LocalizedMode localized_zero_mode(const Spectrum& sp, const LatticeGeometry& g, const Vec2& center,
                                         double radius, double threshold) {
  std::vector<Eigen::Index> sel;
  for (Eigen::Index k = 0; k < sp.values.size(); ++k)
    if (std::abs(sp.values[k]) < threshold) sel.push_back(k);
  if (sel.empty()) throw consistency_error("localized_zero_mode: no eigenvalue below threshold");
  RMatrix w(sp.vectors.rows(), static_cast<Eigen::Index>(sel.size()));
  for (std::size_t c = 0; c < sel.size(); ++c) w.col(c) = sp.vectors.col(sel[c]);
  const RVector r = site_distances(g, center);
  RMatrix loc = RMatrix::Zero(w.cols(), w.cols());
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    if (r[i] < radius) loc += w.row(i).transpose() * w.row(i);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(loc);
  const RVector c = es.eigenvectors().col(w.cols() - 1);
  LocalizedMode out;
  out.mode = w * c;
  out.mode.normalize();
  out.weight_inside = es.eigenvalues()[w.cols() - 1];
  for (std::size_t k = 0; k < sel.size(); ++k) out.energy += c[k] * c[k] * sp.values[sel[k]];
  out.subspace = static_cast<int>(sel.size());
  return out;
}

template <typename Vector>
double sublattice_ratio(const Vector& psi, const LatticeGeometry& g, Sublattice support = Sublattice::B) {
  if (static_cast<std::size_t>(psi.size()) != g.size()) throw dimension_error("sublattice_ratio: size mismatch");
  double on = 0.0, off = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) (g.sublattice[k] == support ? on : off) += std::norm(psi[k]);
  if (off == 0.0) return std::numeric_limits<double>::infinity();
  return on / off;
}

template <typename Vector>
double weight_within(const Vector& psi, const LatticeGeometry& g, const Vec2& center, double radius) {
  double in = 0.0, total = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double p = std::norm(psi[k]);
    total += p;
    if ((g.sites[k] - center).norm() < radius) in += p;
  }
  return in / total;
}

// Intensity at the centre site over the mean over same-sublattice sites at 3 a0.
template <typename Vector>
double center_hexagon_ratio(const Vector& psi, const LatticeGeometry& g, int center_site) {
  const Vec2 c = g.sites[center_site];
  const Sublattice s = g.sublattice[center_site];
  double sum = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g.sublattice[k] == s && std::abs((g.sites[k] - c).norm() - 3.0 * g.a0) < 0.15 * g.a0)
      sum += std::norm(psi[k]), ++n;
  if (n == 0 || sum == 0.0) throw consistency_error("center_hexagon_ratio: empty hexagon");
  return std::norm(psi[center_site]) / (sum / n);
}

// Near-zero modes carrying more than half their weight on sites farther than
// `margin` from any under-coordinated (edge) site.
inline int interior_zero_mode_count(const Spectrum& sp, const LatticeGeometry& g, double threshold, double margin) {
  const auto deg = coordination(g, 1.1 * g.a0);
  std::vector<Vec2> edge;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (deg[k] < 3) edge.push_back(g.sites[k]);
  std::vector<char> interior(g.size(), 1);
  for (std::size_t k = 0; k < g.size(); ++k)
    for (const auto& e : edge)
      if ((g.sites[k] - e).norm() < margin) {
        interior[k] = 0;
        break;
      }
  std::vector<Eigen::Index> sel;
  for (Eigen::Index k = 0; k < sp.values.size(); ++k)
    if (std::abs(sp.values[k]) < threshold) sel.push_back(k);
  if (sel.empty()) return 0;
  RMatrix w(sp.vectors.rows(), static_cast<Eigen::Index>(sel.size()));
  for (std::size_t c = 0; c < sel.size(); ++c) w.col(c) = sp.vectors.col(sel[c]);
  RMatrix loc = RMatrix::Zero(w.cols(), w.cols());
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    if (interior[i]) loc += w.row(i).transpose() * w.row(i);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(loc);
  return static_cast<int>((es.eigenvalues().array() > 0.5).count());
}

// Smallest |E| outside the near-zero window.
inline double gap_edge(const RVector& values, double threshold) {
  double best = std::numeric_limits<double>::infinity();
  for (double e : values)
    if (std::abs(e) >= threshold) best = std::min(best, std::abs(e));
  return best;
}

// ---------------------------------------------------------------------------
// Propagation
// ---------------------------------------------------------------------------

inline CVector propagate(const RMatrix& h, double z, const CVector& psi) { return hermitian_evolve(h, z, psi); }

using GeometryPath = std::function<LatticeGeometry(double)>;  // s in [0, 1]

// Linear interpolation of site positions between equally spaced keyframes.
inline GeometryPath keyframe_path(std::vector<LatticeGeometry> frames) {
  if (frames.size() < 2) throw parameter_error("keyframe_path: need at least two keyframes");
  for (const auto& f : frames)
    if (f.size() != frames.front().size()) throw dimension_error("keyframe_path: keyframes differ in size");
  return [frames = std::move(frames)](double s) {
    const double x = std::clamp(s, 0.0, 1.0) * static_cast<double>(frames.size() - 1);
    const std::size_t k = std::min(frames.size() - 2, static_cast<std::size_t>(x));
    const double f = x - static_cast<double>(k);
    LatticeGeometry g = frames[k];
    for (std::size_t i = 0; i < g.size(); ++i) g.sites[i] = (1.0 - f) * frames[k].sites[i] + f * frames[k + 1].sites[i];
    return g;
  };
}

struct AdiabaticResult {
  CVector field;
  bool converged{true};
  double step_change{0.0};  // norm change when the step count is doubled
};

namespace detail {

template <typename Field>
Field evolve_path(const GeometryPath& path, const CouplingModel& m, double length, int steps, Field psi) {
  const double dl = length / steps;
  for (int n = 0; n < steps; ++n) {
    const Eigen::SparseMatrix<double> h = coupling_hamiltonian(path((n + 0.5) / steps), m).sparseView();
    psi = taylor_evolve(h, dl, psi);
  }
  return psi;
}

}  // namespace detail

// Ordered product of midpoint step propagators over a path of given length (cm).
inline AdiabaticResult adiabatic_evolution(const GeometryPath& path, const CouplingModel& m, double length, int steps,
                                           const CVector& input, bool check_convergence = false,
                                           double tolerance = 1e-3) {
  if (steps < 1) throw parameter_error("adiabatic_evolution: steps must be positive");
  AdiabaticResult out;
  out.field = detail::evolve_path(path, m, length, steps, input);
  if (check_convergence) {
    const CVector fine = detail::evolve_path(path, m, length, 2 * steps, input);
    out.step_change = (fine - out.field).norm();
    out.converged = out.step_change < tolerance;
    out.field = fine;
  }
  return out;
}

// Full evolution operator; intended for small systems.
inline CMatrix adiabatic_unitary(const GeometryPath& path, const CouplingModel& m, double length, int steps) {
  if (steps < 1) throw parameter_error("adiabatic_unitary: steps must be positive");
  const Eigen::Index n = static_cast<Eigen::Index>(path(0.0).size());
  CMatrix u = CMatrix::Identity(n, n);
  const double dl = length / steps;
  for (int k = 0; k < steps; ++k) {
    const Eigen::SparseMatrix<double> h = coupling_hamiltonian(path((k + 0.5) / steps), m).sparseView();
    u = taylor_evolve(h, dl, u);
  }
  return u;
}

// ---------------------------------------------------------------------------
// Vortex experiments
// ---------------------------------------------------------------------------

struct VortexLattice {
  LatticeGeometry base;
  CouplingModel model;
  double delta0{3.0};
  double l0{20.0};
  double alpha{pi / 2.0};
  double max_shift{0.8};
  double zero_threshold{0.05};  // 1/cm

  double xi() const { return xi_for_displacement(max_shift, delta0); }

  VortexField field(std::vector<VortexCore> cores) const { return {delta0, l0, alpha, std::move(cores)}; }

  LatticeGeometry distorted(const std::vector<VortexCore>& cores) const {
    return kekule_displace(base, field(cores), xi()).geometry;
  }

  RMatrix hamiltonian(const std::vector<VortexCore>& cores) const {
    return coupling_hamiltonian(distorted(cores), model);
  }

  LocalizedMode zero_mode(const std::vector<VortexCore>& cores, std::size_t index = 0) const {
    const auto sp = spectrum(hamiltonian(cores));
    return localized_zero_mode(sp, base, cores.at(index).center, 2.0 * l0, zero_threshold);
  }

  GeometryPath path(std::function<std::vector<VortexCore>(double)> cores_at) const {
    return [this, cores_at = std::move(cores_at)](double s) { return distorted(cores_at(s)); };
  }
};

// Calibrated single-vortex preset on a given base lattice.
inline VortexLattice vortex_preset(LatticeGeometry base) {
  VortexLattice v;
  v.base = std::move(base);
  return v;
}

struct TranslationResult {
  double fidelity{0.0};
  double initial_overlap{0.0};  // |<start|target>|^2
  AdiabaticResult evolution;
};

inline TranslationResult translate_vortex(const VortexLattice& v, const Vec2& from, const Vec2& to, double length,
                                          int steps, bool check_convergence = false) {
  auto cores_at = [from, to](double s) { return std::vector<VortexCore>{{from + s * (to - from), 1}}; };
  const RVector start = v.zero_mode(cores_at(0.0)).mode;
  const RVector target = v.zero_mode(cores_at(1.0)).mode;
  TranslationResult out;
  out.initial_overlap = std::pow(start.dot(target), 2);
  out.evolution = adiabatic_evolution(v.path(cores_at), v.model, length, steps, start.cast<cplx>(), check_convergence);
  out.fidelity = std::norm(target.cast<cplx>().dot(out.evolution.field));
  return out;
}

struct BraidResult {
  double phase_left{0.0};   // arg of the overlap of the evolved left mode with its target
  double phase_right{0.0};
  double fidelity_left{0.0};
  double fidelity_right{0.0};
  double relative_phase{0.0};  // wrapped to (-pi, pi]
  bool converged{true};
  double step_change{0.0};
};

namespace detail {

inline double wrap_pi(double x) {
  x = std::fmod(x + pi, 2.0 * pi);
  if (x <= 0.0) x += 2.0 * pi;
  return x - pi;
}

// Two zero modes localized at the cores, separated inside the near-zero
// subspace and sign-fixed against the continuum modes.
inline std::array<RVector, 2> vortex_pair_modes(const VortexLattice& v, const std::vector<VortexCore>& cores) {
  const auto sp = spectrum(v.hamiltonian(cores));
  std::vector<Eigen::Index> sel;
  for (Eigen::Index k = 0; k < sp.values.size(); ++k)
    if (std::abs(sp.values[k]) < v.zero_threshold) sel.push_back(k);
  if (sel.size() < 2) throw consistency_error("braid: fewer than two near-zero modes");
  RMatrix w(sp.vectors.rows(), static_cast<Eigen::Index>(sel.size()));
  for (std::size_t c = 0; c < sel.size(); ++c) w.col(c) = sp.vectors.col(sel[c]);
  const RVector r0 = site_distances(v.base, cores[0].center), r1 = site_distances(v.base, cores[1].center);
  const double rad = 2.0 * v.l0;
  RMatrix p0 = RMatrix::Zero(w.cols(), w.cols()), p1 = p0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    if (r0[i] < rad) p0 += w.row(i).transpose() * w.row(i);
    if (r1[i] < rad) p1 += w.row(i).transpose() * w.row(i);
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> joint(p0 + p1);
  const RMatrix span = joint.eigenvectors().rightCols(2);
  const RMatrix split = span.transpose() * (p0 - p1) * span;
  const Eigen::Matrix2d split2 = split;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(split2);
  const VortexField f = v.field(cores);
  std::array<RVector, 2> modes;
  for (int k = 0; k < 2; ++k) {
    RVector m = w * (span * es.eigenvectors().col(k == 0 ? 1 : 0));
    m.normalize();
    const RVector ref = analytic_zero_mode(v.base, f, v.model, static_cast<std::size_t>(k));
    if (m.dot(ref) < 0.0) m = -m;
    modes[k] = m;
  }
  return modes;
}

}  // namespace detail

// Both cores rotate by pi about their midpoint when `exchange` is set; the
// control keeps them fixed over the same length.
inline BraidResult braid(const VortexLattice& v, const Vec2& left, const Vec2& right, double length, int steps,
                         bool exchange = true, bool check_convergence = false) {
  const Vec2 mid = 0.5 * (left + right);
  auto cores_at = [=](double s) {
    const double a = exchange ? pi * s : 0.0;
    const Eigen::Rotation2Dd rot(a);
    return std::vector<VortexCore>{{mid + rot * (left - mid), 1}, {mid + rot * (right - mid), 1}};
  };
  const auto start = detail::vortex_pair_modes(v, cores_at(0.0));
  const auto end = detail::vortex_pair_modes(v, cores_at(1.0));
  CMatrix in(static_cast<Eigen::Index>(v.base.size()), 2);
  in.col(0) = start[0].cast<cplx>();
  in.col(1) = start[1].cast<cplx>();
  CMatrix evolved;
  BraidResult out;
  if (exchange) {
    const auto path = v.path(cores_at);
    evolved = detail::evolve_path(path, v.model, length, steps, in);
    if (check_convergence) {
      const CMatrix fine = detail::evolve_path(path, v.model, length, 2 * steps, in);
      out.step_change = (fine - evolved).norm();
      out.converged = out.step_change < 1e-3;
      evolved = fine;
    }
  } else {
    evolved = HermitianPropagator<RMatrix>(v.hamiltonian(cores_at(0.0)))(length, in);
  }
  std::array<cplx, 2> c;
  for (int k = 0; k < 2; ++k) c[k] = end[k].cast<cplx>().dot(evolved.col(k));
  out.phase_left = std::arg(c[0]);
  out.phase_right = std::arg(c[1]);
  out.fidelity_left = std::norm(c[0]);
  out.fidelity_right = std::norm(c[1]);
  out.relative_phase = detail::wrap_pi(out.phase_left - out.phase_right);
  if (std::min(out.fidelity_left, out.fidelity_right) < 0.5) throw consistency_error("braid failed: mode fidelity below 0.5");
  return out;
}

// Mode-label bookkeeping of an exchange: b_L -> b_R, b_R -> -b_L, acting on
// amplitudes over occupations (n_L, n_R) in {0,1}^2 indexed n_L + 2 n_R.
inline Eigen::Vector4cd exchange_modes(const Eigen::Vector4cd& a) {
  Eigen::Vector4cd out = Eigen::Vector4cd::Zero();
  out[0] = a[0];
  out[2] += a[1];   // b_L^dag|0> -> b_R^dag|0>
  out[1] += -a[2];  // b_R^dag|0> -> -b_L^dag|0>
  out[3] += -a[3];  // b_L b_R -> -b_L b_R
  return out;
}

// ---------------------------------------------------------------------------
// Disorder and excitation
// ---------------------------------------------------------------------------

// Each site shifted by a sample uniform in a disk of radius rd.
inline LatticeGeometry apply_disorder(const LatticeGeometry& g, double rd, std::uint64_t seed) {
  if (rd < 0.0) throw parameter_error("apply_disorder: radius must be nonnegative");
  LatticeGeometry out = g;
  if (rd == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& p : out.sites) {
    const double r = rd * std::sqrt(u(rng));
    const double th = 2.0 * pi * u(rng);
    p += Vec2(r * std::cos(th), r * std::sin(th));
  }
  return out;
}

// Output sublattice ratio after injecting the continuum zero mode into a
// disordered vortex lattice and propagating over `length` cm.
inline double disorder_sublattice_ratio(const VortexLattice& v, const Vec2& center, double rd, std::uint64_t seed,
                                        double length) {
  const std::vector<VortexCore> cores{{center, 1}};
  const LatticeGeometry g = apply_disorder(v.distorted(cores), rd, seed);
  const RVector input = analytic_zero_mode(v.base, v.field(cores), v.model);
  const Eigen::SparseMatrix<double> h = coupling_hamiltonian(g, v.model).sparseView();
  const CVector out = taylor_evolve(h, length, CVector(input.cast<cplx>()));
  return sublattice_ratio(out, v.base);
}

struct ExcitationResult {
  RVector amplitudes;
  RVector phases;
  double objective{std::numeric_limits<double>::infinity()};  // total / target intensity
  bool success{false};
  CVector output;
  std::vector<double> restart_objectives;
};

namespace detail {

inline CVector excitation_input(std::size_t n, const std::vector<int>& sites, const RVector& amp, const RVector& ph) {
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(n));
  const double norm = amp.norm();
  for (std::size_t k = 0; k < sites.size(); ++k) psi[sites[k]] = amp[k] / norm * std::exp(I * ph[k]);
  return psi;
}

}  // namespace detail

// Finite-difference gradient descent with step halving over input amplitudes
// and phases; success when the best objective is below `threshold`.
inline ExcitationResult excitation_optimize(const RMatrix& h, const std::vector<int>& input_sites,
                                            const std::vector<int>& target_sites, double z, int restarts,
                                            std::uint64_t seed, double threshold = 2.0, int iterations = 200) {
  if (input_sites.empty() || input_sites.size() > 13) throw parameter_error("excitation_optimize: 1 to 13 input sites");
  if (target_sites.empty()) throw parameter_error("excitation_optimize: empty target region");
  const std::size_t n = static_cast<std::size_t>(h.rows());
  // columns of the propagator restricted to the input sites
  HermitianPropagator<RMatrix> prop(h);
  CMatrix cols(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(input_sites.size()));
  for (std::size_t k = 0; k < input_sites.size(); ++k) {
    CVector e = CVector::Zero(static_cast<Eigen::Index>(n));
    e[input_sites[k]] = 1.0;
    cols.col(k) = prop(z, e);
  }
  CMatrix target_rows(static_cast<Eigen::Index>(target_sites.size()), cols.cols());
  for (std::size_t k = 0; k < target_sites.size(); ++k) target_rows.row(k) = cols.row(target_sites[k]);
  const int p = static_cast<int>(input_sites.size());
  auto objective = [&](const RVector& x) {
    CVector c(p);
    for (int k = 0; k < p; ++k) c[k] = x[k] * std::exp(I * x[p + k]);
    const double total = c.squaredNorm();  // unitary propagation
    const double in = (target_rows * c).squaredNorm();
    return in > 0.0 ? total / in : std::numeric_limits<double>::infinity();
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  ExcitationResult best;
  for (int r = 0; r < std::max(1, restarts); ++r) {
    RVector x(2 * p);
    for (int k = 0; k < p; ++k) x[k] = 0.5 + u01(rng), x[p + k] = 2.0 * pi * u01(rng);
    double f = objective(x), step = 0.5;
    for (int it = 0; it < iterations && step > 1e-8; ++it) {
      RVector grad(2 * p);
      const double hfd = 1e-6;
      for (int k = 0; k < 2 * p; ++k) {
        RVector xp = x;
        xp[k] += hfd;
        grad[k] = (objective(xp) - f) / hfd;
      }
      const double gn = grad.norm();
      if (!(gn > 1e-12)) break;
      while (step > 1e-8) {
        RVector trial = x - step * grad / gn;
        for (int k = 0; k < p; ++k) trial[k] = std::abs(trial[k]);
        const double ft = objective(trial);
        if (ft < f) {
          x = trial;
          f = ft;
          step *= 1.5;
          break;
        }
        step *= 0.5;
      }
    }
    best.restart_objectives.push_back(f);
    if (f < best.objective) {
      best.objective = f;
      best.amplitudes = x.head(p) / x.head(p).norm();
      best.phases = x.tail(p).unaryExpr([](double a) { return std::fmod(std::fmod(a, 2.0 * pi) + 2.0 * pi, 2.0 * pi); });
    }
  }
  if (!std::isfinite(best.objective)) throw optimization_error("excitation_optimize: no convergent restart");
  best.success = best.objective < threshold;
  CVector c(p);
  for (int k = 0; k < p; ++k) c[k] = best.amplitudes[k] * std::exp(I * best.phases[k]);
  best.output = cols * c;
  return best;
}

// ---------------------------------------------------------------------------
// SSH chain and one-dimensional topology
// ---------------------------------------------------------------------------

// H(k) = (tR + tL cos k) sx + tL sin k sy.
inline Eigen::Matrix2cd ssh_bloch(double k, double t_l, double t_r) {
  Eigen::Matrix2cd h;
  const cplx q(t_r + t_l * std::cos(k), -t_l * std::sin(k));
  h << 0.0, q, std::conj(q), 0.0;
  return h;
}

inline double ssh_energy(double k, double t_l, double t_r) {
  return std::sqrt(std::max(0.0, t_r * t_r + t_l * t_l + 2.0 * t_r * t_l * std::cos(k)));
}

// Off-diagonal element q(k) = tR + tL e^{ik} sampled on n points.
inline std::vector<cplx> ssh_loop(double t_l, double t_r, int n = 256) {
  std::vector<cplx> q;
  for (int k = 0; k < n; ++k) q.push_back(t_r + t_l * std::exp(I * (2.0 * pi * k / n)));
  return q;
}

struct IntegerInvariant {
  int value{0};
  double raw{0.0};
  double residue{0.0};
};

// Counterclockwise winding of a sampled closed loop around the origin.
inline IntegerInvariant winding_number(const std::vector<cplx>& q) {
  if (q.size() < 3) throw parameter_error("winding_number: loop needs at least three samples");
  for (const auto& z : q)
    if (std::abs(z) < 1e-8) throw gap_closed_error("winding_number: loop passes through the origin");
  double total = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) total += std::arg(q[(k + 1) % q.size()] / q[k]);
  IntegerInvariant w;
  w.raw = total / (2.0 * pi);
  w.value = static_cast<int>(std::lround(w.raw));
  w.residue = std::abs(w.raw - w.value);
  if (w.residue >= 0.01) throw consistency_error("winding_number: non-integer result, refine the sampling");
  return w;
}

// Real-space chain: intra-cell hopping t_r, inter-cell t_l; the two swap
// beyond cell `wall` when wall >= 0.
inline RMatrix ssh_hamiltonian(int cells, double t_l, double t_r, int wall = -1) {
  if (cells < 1) throw parameter_error("ssh_hamiltonian: need at least one cell");
  const int n = 2 * cells;
  RMatrix h = RMatrix::Zero(n, n);
  for (int s = 0; s + 1 < n; ++s) {
    const int cell = s / 2;
    const bool intra = (s % 2 == 0);
    const bool flipped = wall >= 0 && cell >= wall;
    const double t = intra != flipped ? t_r : t_l;
    h(s, s + 1) = h(s + 1, s) = -t;
  }
  return h;
}

// Zero-mode profile exp(-(1/tL) int_0^r m) on a uniform grid, normalized.
inline RVector jackiw_rebbi_mode(const std::vector<double>& mass, double t_l, double dr) {
  if (mass.size() < 2) throw parameter_error("jackiw_rebbi_mode: grid too small");
  int changes = 0;
  std::size_t origin = 0;
  for (std::size_t k = 0; k + 1 < mass.size(); ++k)
    if ((mass[k] < 0.0) != (mass[k + 1] < 0.0)) ++changes, origin = k + 1;
  if (changes != 1) throw consistency_error("jackiw_rebbi_mode: mass must change sign exactly once");
  RVector integral(static_cast<Eigen::Index>(mass.size()));
  integral[origin] = 0.0;
  for (std::size_t k = origin + 1; k < mass.size(); ++k) integral[k] = integral[k - 1] + 0.5 * (mass[k] + mass[k - 1]) * dr;
  for (std::size_t k = origin; k-- > 0;) integral[k] = integral[k + 1] - 0.5 * (mass[k] + mass[k + 1]) * dr;
  RVector psi = (-integral / t_l).array().exp();
  const double n = psi.norm();
  if (!std::isfinite(n) || n == 0.0) throw consistency_error("jackiw_rebbi_mode: profile not normalizable");
  return psi / n;
}

// ---------------------------------------------------------------------------
// Berry phase and Chern number
// ---------------------------------------------------------------------------

// arg prod <psi_i|psi_{i+1}> around a closed loop.
inline double berry_phase(const std::vector<CVector>& states) {
  if (states.size() < 2) throw parameter_error("berry_phase: loop needs at least two states");
  cplx prod = 1.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const cplx o = states[k].dot(states[(k + 1) % states.size()]);
    if (std::abs(o) < 1e-12) throw consistency_error("berry_phase: consecutive states orthogonal");
    prod *= o / std::abs(o);
  }
  return std::arg(prod);
}

using BlochHamiltonian = std::function<CMatrix(double, double)>;

// Plaquette Berry-flux sum over an n x n Brillouin-zone grid.
inline IntegerInvariant chern_number(const BlochHamiltonian& h, int band, int n = 48, double gap_tol = 1e-8) {
  if (n < 4) throw parameter_error("chern_number: grid too coarse");
  std::vector<CVector> u(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const CMatrix hk = h(2.0 * pi * i / n, 2.0 * pi * j / n);
      Eigen::SelfAdjointEigenSolver<CMatrix> es(hk);
      const auto& e = es.eigenvalues();
      if (band < 0 || band >= e.size()) throw parameter_error("chern_number: band index out of range");
      if ((band > 0 && e[band] - e[band - 1] < gap_tol) || (band + 1 < e.size() && e[band + 1] - e[band] < gap_tol))
        throw gap_closed_error("chern_number: band touches a neighbour on the grid");
      u[static_cast<std::size_t>(i * n + j)] = es.eigenvectors().col(band);
    }
  auto at = [&](int i, int j) -> const CVector& { return u[static_cast<std::size_t>(((i % n) * n) + (j % n))]; };
  double flux = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx w = at(i, j).dot(at(i + 1, j)) * at(i + 1, j).dot(at(i + 1, j + 1)) *
                     at(i + 1, j + 1).dot(at(i, j + 1)) * at(i, j + 1).dot(at(i, j));
      flux += std::arg(w);
    }
  IntegerInvariant c;
  c.raw = flux / (2.0 * pi);
  c.value = static_cast<int>(std::lround(c.raw));
  c.residue = std::abs(c.raw - c.value);
  if (c.residue >= 0.01) throw consistency_error("chern_number: non-integer result, refine the grid");
  return c;
}

// d(k) = (sin kx, sin ky, m + cos kx + cos ky) . sigma
inline BlochHamiltonian two_band_model(double m) {
  return [m](double kx, double ky) {
    CMatrix h(2, 2);
    const double dx = std::sin(kx), dy = std::sin(ky), dz = m + std::cos(kx) + std::cos(ky);
    h << dz, cplx(dx, -dy), cplx(dx, dy), -dz;
    return h;
  };
}

// ---------------------------------------------------------------------------
// Graphene band structure
// ---------------------------------------------------------------------------

inline std::array<Vec2, 3> neighbour_vectors(double a0) {
  const double s3 = std::sqrt(3.0);
  return {Vec2(0.0, -a0), Vec2(s3 * a0 / 2.0, a0 / 2.0), Vec2(-s3 * a0 / 2.0, a0 / 2.0)};
}

inline cplx graphene_phi(const Vec2& k, double t, double a0) {
  cplx phi = 0.0;
  for (const auto& s : neighbour_vectors(a0)) phi += std::exp(I * k.dot(s));
  return -t * phi;
}

// Upper band +|Phi(k)|; the lower band is its negative.
inline double graphene_dispersion(const Vec2& k, double t, double a0) { return std::abs(graphene_phi(k, t, a0)); }

}  // namespace photonsim::lattice
