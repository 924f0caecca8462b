#pragma once

#include "interference.hpp"

namespace photonsim::oracle {

// Dense N-photon wavefunction over (spatial mode x internal basis)^N.
// Factor 0 is the most significant index.
struct FirstQuantizedState {
  int photons{0};
  int modes{0};
  int internal{0};
  std::vector<cplx> amp;

  int single_dim() const { return modes * internal; }
};

inline constexpr int max_photons = 5;
inline constexpr int max_single_dim = 12;

namespace detail {

inline std::vector<int> digits(std::size_t index, int n, int base) {
  std::vector<int> d(n);
  for (int k = n - 1; k >= 0; --k) {
    d[k] = static_cast<int>(index % base);
    index /= base;
  }
  return d;
}

inline std::size_t undigits(const std::vector<int>& d, int base) {
  std::size_t idx = 0;
  for (int v : d) idx = idx * base + v;
  return idx;
}

inline std::size_t ipow(int base, int n) {
  std::size_t p = 1;
  for (int k = 0; k < n; ++k) p *= base;
  return p;
}

}  // namespace detail

inline FirstQuantizedState product_state(const std::vector<Photon>& photons, int modes) {
  FirstQuantizedState st;
  st.photons = static_cast<int>(photons.size());
  st.modes = modes;
  st.internal = photons.empty() ? 1 : photons.front().state.dim();
  const int dsp = st.single_dim();
  if (st.photons > max_photons || dsp > max_single_dim) throw dimension_error("oracle size limits exceeded");
  std::vector<CVector> single;
  for (const auto& p : photons) {
    if (p.state.dim() != st.internal) throw dimension_error("oracle: internal dimensions differ");
    if (p.mode < 0 || p.mode >= modes) throw dimension_error("oracle: photon mode out of range");
    CVector v = CVector::Zero(dsp);
    v.segment(p.mode * st.internal, st.internal) = p.state.amplitudes();
    single.push_back(v);
  }
  const std::size_t total = detail::ipow(dsp, st.photons);
  st.amp.assign(total, 0.0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto d = detail::digits(idx, st.photons, dsp);
    cplx a = 1.0;
    for (int k = 0; k < st.photons && a != cplx(0.0); ++k) a *= single[k][d[k]];
    st.amp[idx] = a;
  }
  return st;
}

// Average over factor permutations, signed for fermions.
inline FirstQuantizedState project(const FirstQuantizedState& in, Statistics stats) {
  if (stats == Statistics::classical) return in;
  FirstQuantizedState out = in;
  std::fill(out.amp.begin(), out.amp.end(), cplx(0.0));
  const int dsp = in.single_dim();
  const double inv = 1.0 / factorial(in.photons);
  for_each_permutation(in.photons, [&](const Permutation& pi) {
    const double sg = (stats == Statistics::fermion) ? sign(pi) : 1.0;
    for (std::size_t idx = 0; idx < in.amp.size(); ++idx) {
      if (in.amp[idx] == cplx(0.0)) continue;
      const auto d = detail::digits(idx, in.photons, dsp);
      std::vector<int> e(in.photons);
      for (int k = 0; k < in.photons; ++k) e[pi(k)] = d[k];
      out.amp[detail::undigits(e, dsp)] += sg * inv * in.amp[idx];
    }
  });
  return out;
}

inline double norm2(const FirstQuantizedState& st) {
  double n = 0.0;
  for (const auto& a : st.amp) n += std::norm(a);
  return n;
}

// Each factor evolves as |i, x> -> sum_k U(i, k) |k, x>.
inline FirstQuantizedState apply_unitary(const FirstQuantizedState& in, const CMatrix& u) {
  const int dsp = in.single_dim();
  CMatrix w = CMatrix::Zero(dsp, dsp);  // new = w * old per factor
  for (int i = 0; i < in.modes; ++i)
    for (int k = 0; k < in.modes; ++k)
      for (int x = 0; x < in.internal; ++x) w(k * in.internal + x, i * in.internal + x) = u(i, k);
  FirstQuantizedState cur = in;
  for (int axis = 0; axis < in.photons; ++axis) {
    const std::size_t stride = detail::ipow(dsp, in.photons - 1 - axis);
    const std::size_t block = stride * dsp;
    std::vector<cplx> next(cur.amp.size(), 0.0);
    for (std::size_t outer = 0; outer < cur.amp.size(); outer += block)
      for (std::size_t inner = 0; inner < stride; ++inner)
        for (int a = 0; a < dsp; ++a) {
          const cplx v = cur.amp[outer + a * stride + inner];
          if (v == cplx(0.0)) continue;
          for (int b = 0; b < dsp; ++b) next[outer + b * stride + inner] += w(b, a) * v;
        }
    cur.amp = std::move(next);
  }
  return cur;
}

inline double brute_force_probability(const CMatrix& u, const std::vector<Photon>& photons,
                                      const OccupationPattern& s, Statistics stats = Statistics::boson) {
  const int m = static_cast<int>(u.rows());
  if (s.modes() != m) throw dimension_error("oracle: pattern length differs from mode count");
  if (s.photons() != static_cast<int>(photons.size())) throw parameter_error("oracle: photon-number mismatch");
  FirstQuantizedState st = project(product_state(photons, m), stats);
  const double n2 = norm2(st);
  if (n2 < 1e-12) return 0.0;  // Pauli exclusion
  st = apply_unitary(st, u);
  const int dsp = st.single_dim();
  double p = 0.0;
  for (std::size_t idx = 0; idx < st.amp.size(); ++idx) {
    if (st.amp[idx] == cplx(0.0)) continue;
    const auto d = detail::digits(idx, st.photons, dsp);
    std::vector<int> occ(m, 0);
    for (int v : d) ++occ[v / st.internal];
    if (occ == s.n) p += std::norm(st.amp[idx]);
  }
  return p / n2;
}

// One state per input mode, as for the permanent engine.
inline double brute_force_probability(const CMatrix& u, const std::vector<InternalState>& states,
                                      const OccupationPattern& r, const OccupationPattern& s,
                                      Statistics stats = Statistics::boson) {
  if (static_cast<int>(states.size()) != r.modes()) throw dimension_error("oracle: need one state per input mode");
  std::vector<Photon> photons;
  for (int i = 0; i < r.modes(); ++i)
    for (int k = 0; k < r[i]; ++k) photons.push_back({i, states[i]});
  return brute_force_probability(u, photons, s, stats);
}

}  // namespace photonsim::oracle
