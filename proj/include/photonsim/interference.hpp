#pragma once

#include <functional>
#include <map>

#include "photon_states.hpp"

namespace photonsim {

// Photons per mode, for an input pattern r or output pattern s.
struct OccupationPattern {
  std::vector<int> n;

  OccupationPattern() = default;
  OccupationPattern(std::initializer_list<int> il) : n(il) { validate(); }
  explicit OccupationPattern(std::vector<int> v) : n(std::move(v)) { validate(); }

  void validate() const {
    if (n.empty()) throw parameter_error("occupation pattern needs at least one mode");
    for (int k : n)
      if (k < 0) throw parameter_error("negative occupation");
  }

  int modes() const { return static_cast<int>(n.size()); }
  int photons() const { return std::accumulate(n.begin(), n.end(), 0); }
  int operator[](int i) const { return n[i]; }
  bool operator==(const OccupationPattern&) const = default;
  auto operator<=>(const OccupationPattern&) const = default;
};

inline std::string to_string(const OccupationPattern& p) {
  std::string out = "(";
  for (int i = 0; i < p.modes(); ++i) out += (i ? "," : "") + std::to_string(p[i]);
  return out + ")";
}

// Zero-based mode indices, mode i repeated n_i times.
inline std::vector<int> mode_assignment(const OccupationPattern& p) {
  std::vector<int> d;
  for (int i = 0; i < p.modes(); ++i) d.insert(d.end(), p[i], i);
  return d;
}

// Every pattern of `photons` over `modes`, in lexicographically descending order.
inline std::vector<OccupationPattern> all_patterns(int modes, int photons) {
  std::vector<OccupationPattern> out;
  std::vector<int> cur(modes, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == modes - 1) {
      cur[i] = left;
      out.emplace_back(cur);
      return;
    }
    for (int k = left; k >= 0; --k) {
      cur[i] = k;
      rec(i + 1, left - k);
    }
  };
  if (modes >= 1) rec(0, photons);
  return out;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

inline CMatrix build_G(const CMatrix& s, const OccupationPattern& r) {
  if (s.rows() != s.cols() || s.rows() != r.modes()) throw dimension_error("build_G: S must be m x m");
  const auto d = mode_assignment(r);
  const int n = static_cast<int>(d.size());
  CMatrix g(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) g(k, l) = s(d[k], d[l]);
  return g;
}

inline CMatrix build_M(const CMatrix& u, const OccupationPattern& r, const OccupationPattern& s) {
  if (u.rows() != r.modes() || u.cols() != s.modes()) throw dimension_error("build_M: mode count mismatch");
  if (r.photons() != s.photons()) throw parameter_error("build_M: photon-number mismatch");
  const auto dr = mode_assignment(r), ds = mode_assignment(s);
  CMatrix m(dr.size(), ds.size());
  for (std::size_t k = 0; k < dr.size(); ++k)
    for (std::size_t l = 0; l < ds.size(); ++l) m(k, l) = u(dr[k], ds[l]);
  return m;
}

enum class Statistics { boson, fermion, classical };

inline const char* to_string(Statistics s) {
  switch (s) {
    case Statistics::boson: return "boson";
    case Statistics::fermion: return "fermion";
    default: return "classical";
  }
}

inline constexpr double unitary_tolerance = 1e-8;
inline constexpr double imaginary_tolerance = 1e-9;
inline constexpr int max_engine_photons = 8;

inline void require_unitary(const CMatrix& u, double tol = unitary_tolerance) {
  require_square(u, "interferometer");
  if (unitarity_residual(u) > tol) throw parameter_error("interferometer is not unitary");
}

namespace detail {

inline void check_event(const CMatrix& u, const OccupationPattern& r, const OccupationPattern& s) {
  require_unitary(u);
  if (r.modes() != u.rows() || s.modes() != u.rows()) throw dimension_error("pattern length differs from mode count");
  if (r.photons() != s.photons()) throw parameter_error("photon-number mismatch between r and s");
  if (r.photons() > max_engine_photons) throw dimension_error("more than 8 photons");
}

inline double output_factorials(const OccupationPattern& s) {
  double f = 1.0;
  for (int k : s.n) f *= factorial(k);
  return f;
}

inline double real_part_checked(cplx z) {
  if (std::abs(z.imag()) > imaginary_tolerance)
    throw consistency_error("event probability carries an imaginary residue");
  return z.real();
}

// Sum over sigma of w(sigma) * weight(sigma) * perm(M .* conj(M)_sigma), where
// weight is the internal-state factor prod_j <phi_sigma(j)|phi_j>.
template <typename Weight, typename Sink>
void exchange_sum(const CMatrix& m, Statistics stats, Weight&& weight, Sink&& sink) {
  const int n = static_cast<int>(m.rows());
  const CMatrix mc = m.conjugate();
  for_each_permutation(n, [&](const Permutation& sigma) {
    if (stats == Statistics::classical && !sigma.is_identity()) return;
    const cplx w = weight(sigma);
    if (std::abs(w) < 1e-15) return;
    const double sg = (stats == Statistics::fermion) ? sign(sigma) : 1.0;
    sink(sigma, sg * w * permanent(hadamard(m, permute_rows(mc, sigma))));
  });
}

inline cplx gram_weight(const CMatrix& g, const Permutation& sigma) {
  cplx w = 1.0;
  for (int j = 0; j < sigma.size(); ++j) w *= g(sigma(j), j);
  return w;
}

}  // namespace detail

// Distinguishable-particle statistics: perm(|M|^2) / prod s_j!.
inline double classical_probability(const CMatrix& u, const OccupationPattern& r, const OccupationPattern& s) {
  detail::check_event(u, r, s);
  const CMatrix m = build_M(u, r, s);
  return permanent(m.cwiseAbs2().cast<cplx>()).real() / detail::output_factorials(s);
}

// s_modes: m x m distinguishability matrix indexed by input mode.
inline double event_probability(const CMatrix& u, const CMatrix& s_modes, const OccupationPattern& r,
                                 const OccupationPattern& s, Statistics stats = Statistics::boson) {
  detail::check_event(u, r, s);
  if (stats == Statistics::classical) return classical_probability(u, r, s);
  if (stats == Statistics::fermion)
    for (int k : r.n)
      if (k > 1) return 0.0;  // identical fermions sharing a mode
  const CMatrix g = build_G(s_modes, r);
  const CMatrix m = build_M(u, r, s);
  cplx total = 0.0;
  detail::exchange_sum(
      m, stats, [&](const Permutation& sg) { return detail::gram_weight(g, sg); },
      [&](const Permutation&, cplx term) { total += term; });
  double norm = detail::output_factorials(s);
  for (int k : r.n) norm *= factorial(k);
  return detail::real_part_checked(total) / norm;
}

// One internal state per input mode (entries for empty modes are ignored).
inline double event_probability(const CMatrix& u, const std::vector<InternalState>& states,
                                const OccupationPattern& r, const OccupationPattern& s,
                                Statistics stats = Statistics::boson) {
  if (static_cast<int>(states.size()) != r.modes()) throw dimension_error("need one state per input mode");
  return event_probability(u, distinguishability_matrix(states), r, s, stats);
}

// A photon with its own input mode and internal state; several photons may
// share a mode with different states.
struct Photon {
  int mode;
  InternalState state;
};

inline OccupationPattern input_pattern(const std::vector<Photon>& photons, int modes) {
  std::vector<int> n(modes, 0);
  for (const auto& p : photons) {
    if (p.mode < 0 || p.mode >= modes) throw dimension_error("photon mode out of range");
    ++n[p.mode];
  }
  return OccupationPattern(n);
}

// Probability for photons with arbitrary per-photon states, normalized by the
// norm of the (anti)symmetrized input.
inline double event_probability(const CMatrix& u, const std::vector<Photon>& photons, const OccupationPattern& s,
                                Statistics stats = Statistics::boson) {
  const int n = static_cast<int>(photons.size());
  const OccupationPattern r = input_pattern(photons, static_cast<int>(u.rows()));
  detail::check_event(u, r, s);
  if (stats == Statistics::classical) return classical_probability(u, r, s);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return photons[a].mode < photons[b].mode; });
  CMatrix g(n, n), same(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      g(i, j) = overlap(photons[order[i]].state, photons[order[j]].state);
      same(i, j) = (photons[order[i]].mode == photons[order[j]].mode) ? g(i, j) : cplx(0.0);
    }
  double norm = 0.0;
  if (stats == Statistics::boson) {
    norm = permanent(same).real();
  } else {
    norm = same.determinant().real();
    if (norm < 1e-12) return 0.0;  // Pauli exclusion
  }
  const CMatrix m = build_M(u, r, s);
  cplx total = 0.0;
  detail::exchange_sum(
      m, stats, [&](const Permutation& sg) { return detail::gram_weight(g, sg); },
      [&](const Permutation&, cplx term) { total += term; });
  return detail::real_part_checked(total) / (norm * detail::output_factorials(s));
}

// Mixed inputs, one photon per occupied mode; rhos indexed by input mode.
inline double event_probability_mixed(const CMatrix& u, const std::vector<MixedState>& rhos,
                                      const OccupationPattern& r, const OccupationPattern& s,
                                      Statistics stats = Statistics::boson) {
  detail::check_event(u, r, s);
  if (static_cast<int>(rhos.size()) != r.modes()) throw dimension_error("need one density matrix per input mode");
  for (int k : r.n)
    if (k > 1) throw unsupported_error("mixed states require at most one photon per input mode");
  if (stats == Statistics::classical) return classical_probability(u, r, s);
  const auto d = mode_assignment(r);
  const CMatrix m = build_M(u, r, s);
  auto weight = [&](const Permutation& sigma) {
    cplx w = 1.0;
    for (const auto& cyc : cycle_decomposition(sigma)) {
      if (cyc.size() == 1) continue;
      // prod <phi_sigma(j)|phi_j> around the cycle is Tr(rho_c0 rho_c(k-1) ... rho_c1)
      std::vector<const MixedState*> chain{&rhos[d[cyc[0]]]};
      for (std::size_t k = cyc.size() - 1; k >= 1; --k) chain.push_back(&rhos[d[cyc[k]]]);
      w *= cyclic_trace(chain);
    }
    return w;
  };
  cplx total = 0.0;
  detail::exchange_sum(m, stats, weight, [&](const Permutation&, cplx term) { total += term; });
  return detail::real_part_checked(total) / detail::output_factorials(s);
}

using Ensemble = std::vector<std::pair<double, InternalState>>;

// Average of pure-state probabilities over all joint realizations.
inline double event_probability_ensemble(const CMatrix& u, const std::vector<Ensemble>& ensembles,
                                         const OccupationPattern& r, const OccupationPattern& s,
                                         Statistics stats = Statistics::boson) {
  if (static_cast<int>(ensembles.size()) != r.modes()) throw dimension_error("need one ensemble per input mode");
  for (const auto& e : ensembles) {
    if (e.empty()) throw parameter_error("empty ensemble");
    double sum = 0.0;
    for (const auto& [p, st] : e) {
      if (p < 0.0) throw parameter_error("negative ensemble probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-10) throw parameter_error("ensemble probabilities do not sum to 1");
  }
  const int m = r.modes();
  std::vector<std::size_t> pick(m, 0);
  double total = 0.0;
  while (true) {
    double p = 1.0;
    std::vector<InternalState> states;
    for (int i = 0; i < m; ++i) {
      if (r[i] > 0) p *= ensembles[i][pick[i]].first;
      states.push_back(ensembles[i][pick[i]].second);
    }
    if (p > 0.0) total += p * event_probability(u, states, r, s, stats);
    int i = 0;
    // unoccupied modes contribute a single realization
    while (i < m) {
      if (r[i] > 0 && ++pick[i] < ensembles[i].size()) break;
      pick[i] = 0;
      ++i;
    }
    if (i == m) break;
  }
  return total;
}

struct EventProbabilityBreakdown {
  double total{0.0};
  std::map<std::vector<int>, double> terms;  // cycle type -> contribution
};

inline EventProbabilityBreakdown decompose_terms(const CMatrix& u, const CMatrix& s_modes, const OccupationPattern& r,
                                                 const OccupationPattern& s, Statistics stats = Statistics::boson) {
  detail::check_event(u, r, s);
  const CMatrix g = build_G(s_modes, r);
  const CMatrix m = build_M(u, r, s);
  std::map<std::vector<int>, cplx> sums;
  detail::exchange_sum(
      m, stats, [&](const Permutation& sg) { return detail::gram_weight(g, sg); },
      [&](const Permutation& sg, cplx term) { sums[cycle_type(sg)] += term; });
  double norm = detail::output_factorials(s);
  for (int k : r.n) norm *= factorial(k);
  EventProbabilityBreakdown out;
  for (const auto& [type, z] : sums) {
    const double v = detail::real_part_checked(z) / norm;
    out.terms[type] = v;
    out.total += v;
  }
  return out;
}

inline EventProbabilityBreakdown decompose_terms(const CMatrix& u, const std::vector<InternalState>& states,
                                                 const OccupationPattern& r, const OccupationPattern& s,
                                                 Statistics stats = Statistics::boson) {
  return decompose_terms(u, distinguishability_matrix(states), r, s, stats);
}

// Directed overlap graph; edge i -> j carries <phi_i|phi_j>.
struct OverlapGraph {
  int vertices{0};
  CMatrix weights;
  std::vector<std::vector<char>> edge;

  bool has_edge(int i, int j) const { return edge[i][j] != 0; }
};

inline OverlapGraph overlap_graph(const CMatrix& s, double threshold = 1e-9) {
  if (s.rows() != s.cols()) throw dimension_error("overlap_graph: S must be square");
  OverlapGraph g;
  g.vertices = static_cast<int>(s.rows());
  g.weights = s;
  g.edge.assign(g.vertices, std::vector<char>(g.vertices, 0));
  for (int i = 0; i < g.vertices; ++i)
    for (int j = 0; j < g.vertices; ++j) g.edge[i][j] = (i != j && std::abs(s(i, j)) >= threshold);
  return g;
}

// True when a directed cycle visits every vertex once.
inline bool has_n_photon_interference(const OverlapGraph& g) {
  const int n = g.vertices;
  if (n < 2) return false;
  if (n > 10) throw dimension_error("Hamiltonian-cycle search limited to 10 vertices");
  std::vector<char> used(n, 0);
  used[0] = 1;
  std::function<bool(int, int)> dfs = [&](int v, int depth) {
    if (depth == n) return g.has_edge(v, 0);
    for (int w = 1; w < n; ++w) {
      if (used[w] || !g.has_edge(v, w)) continue;
      used[w] = 1;
      if (dfs(w, depth + 1)) return true;
      used[w] = 0;
    }
    return false;
  };
  return dfs(0, 1);
}

}  // namespace photonsim
