#pragma once

#include <atomic>
#include <memory>
#include <random>
#include <utility>

#include "numerics.hpp"

namespace photonsim {

// Temporal mode of a photon: Gaussian envelope centred at t with width sigma
// and carrier frequency omega.
struct GaussianWavepacket {
  double t{0.0};
  double sigma{1.0};
  double omega{0.0};
};

inline void require_width(const GaussianWavepacket& p) {
  if (!(p.sigma > 0.0)) throw parameter_error("wavepacket width must be positive");
}

inline cplx gaussian_overlap(const GaussianWavepacket& a, const GaussianWavepacket& b) {
  require_width(a);
  require_width(b);
  if (a.sigma != b.sigma || a.omega != b.omega)
    throw parameter_error("gaussian_overlap: widths and carriers must match");
  const double dt = a.t - b.t;
  return std::exp(cplx(-dt * dt / (4.0 * a.sigma * a.sigma), -a.omega * dt));
}

// Inner product of two normalized Gaussian amplitudes with different widths.
inline cplx unequal_width_overlap(const GaussianWavepacket& a, const GaussianWavepacket& b) {
  require_width(a);
  require_width(b);
  if (a.omega != b.omega) throw parameter_error("unequal_width_overlap: carriers must match");
  const double s2 = a.sigma * a.sigma + b.sigma * b.sigma;
  const double dt = a.t - b.t;
  const double norm = std::sqrt(2.0 * a.sigma * b.sigma / s2);
  return norm * std::exp(cplx(-dt * dt / (2.0 * s2), -a.omega * dt));
}

struct PolarizationState {
  cplx h{1.0};
  cplx v{0.0};

  static PolarizationState make(cplx h, cplx v) {
    const double n = std::sqrt(std::norm(h) + std::norm(v));
    if (n < 1e-15) throw parameter_error("polarization state has zero norm");
    return {h / n, v / n};
  }
  static PolarizationState H() { return {1.0, 0.0}; }
  static PolarizationState V() { return {0.0, 1.0}; }
  static PolarizationState diagonal() { return make(1.0, 1.0); }
};

// Orthonormal internal basis: Gram-Schmidt temporal modes (x) polarization,
// followed by auxiliary slots orthogonal to every physical state.
class InternalBasis {
 public:
  static std::shared_ptr<const InternalBasis> temporal(std::vector<GaussianWavepacket> packets,
                                                       int aux_slots = 0) {
    auto b = std::shared_ptr<InternalBasis>(new InternalBasis());
    b->packets_ = std::move(packets);
    b->aux_ = aux_slots;
    b->orthonormalize();
    b->generic_ = false;
    return b;
  }

  // Plain d-dimensional basis without temporal metadata.
  static std::shared_ptr<const InternalBasis> generic(int dim) {
    if (dim < 1) throw parameter_error("basis dimension must be positive");
    auto b = std::shared_ptr<InternalBasis>(new InternalBasis());
    b->generic_dim_ = dim;
    return b;
  }

  int dim() const { return generic_ ? generic_dim_ : 2 * temporal_dim() + aux_; }
  int temporal_dim() const { return static_cast<int>(coeffs_.rows()); }
  int aux_slots() const { return aux_; }
  bool generic() const { return generic_; }
  std::uint64_t id() const { return id_; }
  const std::vector<GaussianWavepacket>& packets() const { return packets_; }

  // Coefficients of packet k on the orthonormal temporal modes.
  CVector packet_coefficients(int k) const { return coeffs_.col(k); }

  int aux_index(int slot) const {
    if (slot < 0 || slot >= aux_) throw parameter_error("auxiliary slot out of range");
    return 2 * temporal_dim() + slot;
  }

 private:
  InternalBasis() : id_(next_id()) {}

  static std::uint64_t next_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter++;
  }

  void orthonormalize() {
    const int n = static_cast<int>(packets_.size());
    CMatrix gram(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) gram(i, j) = unequal_width_overlap(packets_[i], packets_[j]);
    // e_m = sum_l B(l, m) t_l
    CMatrix b = CMatrix::Zero(n, 0);
    std::vector<CVector> cols;
    for (int k = 0; k < n; ++k) {
      CVector w = CVector::Zero(n);
      w[k] = 1.0;
      CVector c = CVector::Zero(b.cols());
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index m = 0; m < b.cols(); ++m) {
          const cplx proj = b.col(m).dot(gram * w);
          c[m] += proj;
          w -= proj * b.col(m);
        }
      }
      const double norm = std::sqrt(std::max(0.0, (w.dot(gram * w)).real()));
      if (norm >= 1e-10) {
        b.conservativeResize(n, b.cols() + 1);
        b.col(b.cols() - 1) = w / norm;
        c.conservativeResize(c.size() + 1);
        c[c.size() - 1] = norm;
      }
      cols.push_back(c);
    }
    coeffs_ = CMatrix::Zero(b.cols(), n);
    for (int k = 0; k < n; ++k) coeffs_.col(k).head(cols[k].size()) = cols[k];
  }

  std::uint64_t id_;
  bool generic_{true};
  int generic_dim_{0};
  int aux_{0};
  std::vector<GaussianWavepacket> packets_;
  CMatrix coeffs_;
};

using BasisPtr = std::shared_ptr<const InternalBasis>;

class InternalState {
 public:
  InternalState(BasisPtr basis, CVector amps) : basis_(std::move(basis)), amps_(std::move(amps)) {
    if (!basis_) throw parameter_error("internal state needs a basis");
    if (amps_.size() != basis_->dim()) throw dimension_error("amplitude count differs from basis dimension");
    const double n = amps_.norm();
    if (std::abs(n - 1.0) > 1e-12) {
      if (n < 1e-15) throw parameter_error("internal state has zero norm");
      amps_ /= n;
    }
  }

  // Packet k of a temporal basis in polarization pol.
  static InternalState of(const BasisPtr& basis, int packet, const PolarizationState& pol) {
    if (basis->generic()) throw parameter_error("basis carries no temporal modes");
    if (packet < 0 || packet >= static_cast<int>(basis->packets().size()))
      throw parameter_error("packet index out of range");
    CVector amps = CVector::Zero(basis->dim());
    const CVector c = basis->packet_coefficients(packet);
    for (Eigen::Index m = 0; m < c.size(); ++m) {
      amps[2 * m] = c[m] * pol.h;
      amps[2 * m + 1] = c[m] * pol.v;
    }
    return InternalState(basis, amps);
  }

  static InternalState aux(const BasisPtr& basis, int slot) {
    CVector amps = CVector::Zero(basis->dim());
    amps[basis->aux_index(slot)] = 1.0;
    return InternalState(basis, amps);
  }

  static InternalState basis_vector(const BasisPtr& basis, int k) {
    CVector amps = CVector::Zero(basis->dim());
    amps[k] = 1.0;
    return InternalState(basis, amps);
  }

  template <typename Rng>
  static InternalState random(const BasisPtr& basis, Rng& rng) {
    std::normal_distribution<double> g;
    CVector amps(basis->dim());
    for (auto& a : amps) a = cplx(g(rng), g(rng));
    return InternalState(basis, amps);
  }

  const BasisPtr& basis() const { return basis_; }
  const CVector& amplitudes() const { return amps_; }
  int dim() const { return static_cast<int>(amps_.size()); }

  InternalState with_phase(double alpha) const { return InternalState(basis_, amps_ * std::exp(I * alpha)); }

 private:
  BasisPtr basis_;
  CVector amps_;
};

inline void require_same_basis(const InternalState& a, const InternalState& b) {
  if (a.basis()->id() != b.basis()->id()) throw dimension_error("states live in different bases");
}

// <a|b>
inline cplx overlap(const InternalState& a, const InternalState& b) {
  require_same_basis(a, b);
  return a.amplitudes().dot(b.amplitudes());
}

inline CMatrix distinguishability_matrix(const std::vector<InternalState>& states) {
  const int n = static_cast<int>(states.size());
  CMatrix s(n, n);
  for (int i = 0; i < n; ++i) {
    s(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      s(i, j) = overlap(states[i], states[j]);
      s(j, i) = std::conj(s(i, j));
    }
  }
  return s;
}

// Hermitian, unit diagonal, |S_ij| <= 1, PSD.
inline bool is_valid_distinguishability(const CMatrix& s, double tol = 1e-10) {
  if (s.rows() != s.cols()) return false;
  if (hermiticity_residual(s) > tol) return false;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    if (std::abs(s(i, i) - 1.0) > tol) return false;
    for (Eigen::Index j = 0; j < s.cols(); ++j)
      if (std::abs(s(i, j)) > 1.0 + tol) return false;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

// Gram-Schmidt parameterization over an abstract orthonormal set alpha_1..alpha_N.
// moduli(i, k) and phases(i, k) for 1 <= k <= i are the coefficients of state i
// on alpha_{k+1}; entries outside that triangle are ignored.
inline std::vector<InternalState> gram_schmidt_states(const RMatrix& moduli, const RMatrix& phases,
                                                      const BasisPtr& basis = nullptr) {
  const int n = static_cast<int>(moduli.rows());
  if (moduli.cols() != n || phases.rows() != n || phases.cols() != n)
    throw dimension_error("gram_schmidt_states: parameter matrices must be N x N");
  BasisPtr b = basis ? basis : InternalBasis::generic(std::max(n, 1));
  if (b->dim() < n) throw dimension_error("gram_schmidt_states: basis too small");
  std::vector<InternalState> out;
  for (int i = 0; i < n; ++i) {
    CVector amps = CVector::Zero(b->dim());
    double used = 0.0;
    for (int k = 1; k <= i; ++k) {
      const double s = moduli(i, k);
      if (s < 0.0) throw parameter_error("gram_schmidt_states: moduli must be nonnegative");
      used += s * s;
      amps[k] = s * std::exp(I * phases(i, k));
    }
    if (used > 1.0 + 1e-12) throw parameter_error("gram_schmidt_states: parameters outside the unit disk");
    amps[0] = std::sqrt(std::max(0.0, 1.0 - used));
    out.emplace_back(b, amps);
  }
  return out;
}

// Stacked real/imaginary parts of the upper-triangular overlaps.
inline RVector overlap_vector(const std::vector<InternalState>& states) {
  const int n = static_cast<int>(states.size());
  std::vector<double> v;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const cplx o = overlap(states[i], states[j]);
      v.push_back(o.real());
      v.push_back(o.imag());
    }
  return Eigen::Map<RVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Number of free parameters (N(N-1) of them) of the Gram-Schmidt form.
inline int gram_schmidt_parameter_count(int n) { return n * (n - 1); }

// Numeric rank of the Jacobian of the overlap vector with respect to the
// Gram-Schmidt parameters at the given base point (flattened s, gamma pairs).
inline int independent_parameter_rank(int n, const RVector& base, double h = 1e-6, double cutoff = 1e-8) {
  if (base.size() != gram_schmidt_parameter_count(n))
    throw dimension_error("independent_parameter_rank: wrong parameter count");
  const BasisPtr basis = InternalBasis::generic(std::max(n, 1));
  auto eval = [&](const RVector& p) {
    RMatrix s = RMatrix::Zero(n, n), g = RMatrix::Zero(n, n);
    int idx = 0;
    for (int i = 1; i < n; ++i)
      for (int k = 1; k <= i; ++k) {
        s(i, k) = p[idx++];
        g(i, k) = p[idx++];
      }
    return overlap_vector(gram_schmidt_states(s, g, basis));
  };
  const RVector f0 = eval(base);
  RMatrix jac(f0.size(), base.size());
  for (Eigen::Index c = 0; c < base.size(); ++c) {
    RVector up = base, dn = base;
    up[c] += h;
    dn[c] -= h;
    jac.col(c) = (eval(up) - eval(dn)) / (2.0 * h);
  }
  if (jac.size() == 0) return 0;
  Eigen::JacobiSVD<RMatrix> svd(jac);
  int rank = 0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()[k] > cutoff) ++rank;
  return rank;
}

inline double wrap_2pi(double phi) {
  phi = std::fmod(phi, 2.0 * pi);
  if (phi < 0.0) phi += 2.0 * pi;
  if (phi >= 2.0 * pi) phi -= 2.0 * pi;
  return phi;
}

inline constexpr double zero_overlap_tolerance = 1e-12;

// arg(<a|b><b|c><c|a>) in [0, 2 pi).
inline double triad_phase(const InternalState& a, const InternalState& b, const InternalState& c) {
  const cplx ab = overlap(a, b), bc = overlap(b, c), ca = overlap(c, a);
  if (std::abs(ab) < zero_overlap_tolerance || std::abs(bc) < zero_overlap_tolerance ||
      std::abs(ca) < zero_overlap_tolerance)
    throw undefined_phase_error("triad phase undefined: a pairwise overlap vanishes");
  return wrap_2pi(std::arg(ab * bc * ca));
}

class MixedState {
 public:
  explicit MixedState(CMatrix rho, BasisPtr basis = nullptr) : rho_(std::move(rho)), basis_(std::move(basis)) {
    if (rho_.rows() != rho_.cols()) throw dimension_error("density matrix is not square");
    if (basis_ && basis_->dim() != rho_.rows()) throw dimension_error("density matrix differs from basis dimension");
    if (hermiticity_residual(rho_) > 1e-10) throw symmetry_error("density matrix is not Hermitian");
    if (std::abs(rho_.trace() - 1.0) > 1e-10) throw parameter_error("density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) throw parameter_error("density matrix is not positive semidefinite");
  }

  static MixedState pure(const InternalState& s) {
    return MixedState(s.amplitudes() * s.amplitudes().adjoint(), s.basis());
  }

  static MixedState mixture(const std::vector<std::pair<double, InternalState>>& ensemble) {
    if (ensemble.empty()) throw parameter_error("empty ensemble");
    const auto& b = ensemble.front().second.basis();
    CMatrix rho = CMatrix::Zero(b->dim(), b->dim());
    for (const auto& [p, s] : ensemble) {
      require_same_basis(ensemble.front().second, s);
      rho += p * s.amplitudes() * s.amplitudes().adjoint();
    }
    return MixedState(rho, b);
  }

  const CMatrix& matrix() const { return rho_; }
  const BasisPtr& basis() const { return basis_; }
  int dim() const { return static_cast<int>(rho_.rows()); }
  double purity() const { return (rho_ * rho_).trace().real(); }

 private:
  CMatrix rho_;
  BasisPtr basis_;
};

// Tr(rho_1 rho_2 ... rho_n)
inline cplx cyclic_trace(const std::vector<const MixedState*>& rhos) {
  if (rhos.empty()) throw dimension_error("cyclic_trace: empty list");
  CMatrix prod = rhos.front()->matrix();
  for (std::size_t k = 1; k < rhos.size(); ++k) {
    if (rhos[k]->dim() != prod.rows()) throw dimension_error("cyclic_trace: dimension mismatch");
    prod = prod * rhos[k]->matrix();
  }
  return prod.trace();
}

inline cplx cyclic_trace(const std::vector<MixedState>& rhos) {
  std::vector<const MixedState*> ptrs;
  for (const auto& r : rhos) ptrs.push_back(&r);
  return cyclic_trace(ptrs);
}

inline void require_purity(double purity) {
  if (!(purity > 0.0 && purity <= 1.0)) throw parameter_error("purity must lie in (0, 1]");
}

// purity * |psi><psi| + (1 - purity) * |aux><aux|
inline MixedState impure_state(const InternalState& pure, double purity, int aux_slot) {
  require_purity(purity);
  const InternalState perp = InternalState::aux(pure.basis(), aux_slot);
  if (std::abs(overlap(perp, pure)) > 1e-12) throw parameter_error("auxiliary slot overlaps the physical state");
  return MixedState::mixture({{purity, pure}, {1.0 - purity, perp}});
}

}  // namespace photonsim
