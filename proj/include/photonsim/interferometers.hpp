#pragma once

#include <random>

#include "interference.hpp"

namespace photonsim {

// A matrix with a label; relaxed matrices are measured and only nearly unitary.
struct Interferometer {
  CMatrix matrix;
  std::string label;
  bool relaxed{false};
};

inline CMatrix beamsplitter() {
  CMatrix u(2, 2);
  u << 1.0, 1.0, 1.0, -1.0;
  return u / std::sqrt(2.0);
}

inline CMatrix tritter() {
  const cplx z = std::exp(I * (2.0 * pi / 3.0));
  CMatrix u(3, 3);
  u << 1.0, 1.0, 1.0, 1.0, z * z, z, 1.0, z, z * z;
  return u / std::sqrt(3.0);
}

inline CMatrix quitter(double chi) {
  const cplx e = std::exp(I * chi);
  CMatrix u(4, 4);
  u << 1.0, 1.0, 1.0, 1.0,
       1.0, 1.0, -1.0, -1.0,
       1.0, -1.0, e, -e,
       1.0, -1.0, -e, e;
  return u / 2.0;
}

inline Interferometer measured_tritter() {
  CMatrix u(3, 3);
  u << 0.6, 0.6, 0.53,
       0.6, cplx(-0.28, 0.48), cplx(-0.27, -0.48),
       0.6, cplx(-0.28, -0.5), cplx(-0.27, 0.48);
  return {u, "measured tritter", true};
}

// Closest unitary in Frobenius norm (polar factor).
inline CMatrix nearest_unitary(const CMatrix& a) {
  require_square(a, "nearest_unitary");
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

namespace detail {

// max over diagonal phases |Tr(A^dag D1 B D2)| by alternating updates.
inline double gauge_overlap(const CMatrix& a, const CMatrix& b, const CVector& d2_start) {
  const Eigen::Index m = a.rows();
  CMatrix w = a.conjugate().cwiseProduct(b);  // T = sum_ij d1_i w_ij d2_j
  CVector d1 = CVector::Ones(m), d2 = d2_start;
  double best = 0.0;
  for (int it = 0; it < 200; ++it) {
    CVector c1 = w * d2;
    for (Eigen::Index i = 0; i < m; ++i) d1[i] = std::abs(c1[i]) > 0 ? std::conj(c1[i]) / std::abs(c1[i]) : 1.0;
    CVector c2 = w.transpose() * d1;
    for (Eigen::Index j = 0; j < m; ++j) d2[j] = std::abs(c2[j]) > 0 ? std::conj(c2[j]) / std::abs(c2[j]) : 1.0;
    const double t = std::abs(d1.dot(w.conjugate() * d2.conjugate()));
    if (t - best < 1e-15) {
      best = std::max(best, t);
      break;
    }
    best = t;
  }
  return best;
}

}  // namespace detail

// |Tr(A^dag B)| / m maximized over left and right diagonal phases, for B and conj(B).
inline double gauge_fidelity(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw dimension_error("gauge_fidelity: shape mismatch");
  const Eigen::Index m = a.rows();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * pi);
  double best = 0.0;
  for (const CMatrix& cand : {b, CMatrix(b.conjugate())}) {
    for (int start = 0; start < 8; ++start) {
      CVector d2 = CVector::Ones(m);
      if (start > 0)
        for (auto& x : d2) x = std::exp(I * ph(rng));
      best = std::max(best, detail::gauge_overlap(a, cand, d2));
    }
  }
  return best / static_cast<double>(m);
}

// First row and column made real and nonnegative by diagonal phases.
inline CMatrix unit_bordered(const CMatrix& u) {
  CMatrix out = u;
  for (Eigen::Index j = 0; j < u.cols(); ++j)
    if (std::abs(out(0, j)) > 0) out.col(j) *= std::conj(out(0, j)) / std::abs(out(0, j));
  for (Eigen::Index i = 1; i < u.rows(); ++i)
    if (std::abs(out(i, 0)) > 0) out.row(i) *= std::conj(out(i, 0)) / std::abs(out(i, 0));
  return out;
}

namespace detail {

inline CMatrix assemble_bordered(const RMatrix& mod, const RVector& theta) {
  const Eigen::Index m = mod.rows();
  CMatrix u = mod.cast<cplx>();
  Eigen::Index k = 0;
  for (Eigen::Index i = 1; i < m; ++i)
    for (Eigen::Index j = 1; j < m; ++j) u(i, j) *= std::exp(I * theta[k++]);
  return u;
}

inline double unitarity_cost(const RMatrix& mod, const RVector& theta) {
  const CMatrix u = assemble_bordered(mod, theta);
  return (u.adjoint() * u - CMatrix::Identity(mod.rows(), mod.cols())).squaredNorm();
}

}  // namespace detail

// Phases for measured moduli by minimizing ||U^dag U - I||_F in the unit-bordered gauge.
inline Interferometer phases_from_amplitudes(const RMatrix& moduli, std::uint64_t seed = 7, int restarts = 24) {
  if (moduli.rows() != moduli.cols() || moduli.rows() < 2) throw dimension_error("phases_from_amplitudes: need square m >= 2");
  const Eigen::Index m = moduli.rows();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::abs(moduli.row(i).squaredNorm() - 1.0) > 0.05 || std::abs(moduli.col(i).squaredNorm() - 1.0) > 0.05)
      throw parameter_error("phases_from_amplitudes: row or column power differs from 1 by more than 5%");
  }
  if ((moduli.array() < 0.0).any()) throw parameter_error("phases_from_amplitudes: negative modulus");
  const Eigen::Index np = (m - 1) * (m - 1);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ph(-pi, pi);
  RVector best_theta = RVector::Zero(np);
  double best = std::numeric_limits<double>::infinity();
  for (int start = 0; start < restarts; ++start) {
    RVector theta(np);
    for (auto& x : theta) x = ph(rng);
    double cost = detail::unitarity_cost(moduli, theta);
    double step = 0.5;
    for (int it = 0; it < 4000 && step > 1e-13 && cost > 1e-26; ++it) {
      RVector grad(np);
      for (Eigen::Index k = 0; k < np; ++k) {
        RVector up = theta, dn = theta;
        up[k] += 1e-7;
        dn[k] -= 1e-7;
        grad[k] = (detail::unitarity_cost(moduli, up) - detail::unitarity_cost(moduli, dn)) / 2e-7;
      }
      while (step > 1e-13) {
        const RVector trial = theta - step * grad;
        const double c = detail::unitarity_cost(moduli, trial);
        if (c < cost) {
          theta = trial;
          cost = c;
          step *= 1.5;
          break;
        }
        step *= 0.5;
      }
    }
    if (cost < best) {
      best = cost;
      best_theta = theta;
    }
  }
  if (std::sqrt(best) > 0.1) throw fit_error("phases_from_amplitudes: no unitary completion within residual 0.1");
  return {detail::assemble_bordered(moduli, best_theta), "reconstructed", std::sqrt(best) > 1e-6};
}

// Intensity fringes for a reference beam in port 0 and a probe beam in port j
// with relative phase phi: I_k(phi) = I |U(0,k) + e^{i phi} U(j,k)|^2.
struct FringeData {
  RMatrix singles;                 // singles(i, k): input i alone, output k
  std::vector<double> phis;        // sampled phases
  std::vector<RMatrix> fringes;    // fringes[j](k, n) for probe j >= 1
};

template <typename Rng>
FringeData synthesize_fringes(const CMatrix& u, int samples, double intensity, double noise, Rng& rng) {
  require_square(u, "synthesize_fringes");
  if (samples < 8) throw parameter_error("synthesize_fringes: need at least 8 phase samples");
  const Eigen::Index m = u.rows();
  std::normal_distribution<double> g;
  auto noisy = [&](double v) { return noise > 0.0 ? v * (1.0 + noise * g(rng)) : v; };
  FringeData d;
  d.singles.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index k = 0; k < m; ++k) d.singles(i, k) = noisy(intensity * std::norm(u(i, k)));
  for (int n = 0; n < samples; ++n) d.phis.push_back(2.0 * pi * n / samples);
  d.fringes.assign(m, RMatrix());
  for (Eigen::Index j = 1; j < m; ++j) {
    RMatrix f(m, samples);
    for (Eigen::Index k = 0; k < m; ++k)
      for (int n = 0; n < samples; ++n)
        f(k, n) = noisy(intensity * std::norm(u(0, k) + std::exp(I * d.phis[n]) * u(j, k)));
    d.fringes[j] = f;
  }
  return d;
}

inline FringeData synthesize_fringes(const CMatrix& u, int samples = 16) {
  std::mt19937_64 rng(0);
  return synthesize_fringes(u, samples, 1.0, 0.0, rng);
}

struct CosineFit {
  double a{0.0}, b{0.0}, c{0.0};  // a + b cos(phi) + c sin(phi)
};

// Least squares by normal equations.
inline CosineFit fit_cosine(const std::vector<double>& phis, const Eigen::Ref<const RVector>& y) {
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d aty = Eigen::Vector3d::Zero();
  for (std::size_t n = 0; n < phis.size(); ++n) {
    const Eigen::Vector3d row(1.0, std::cos(phis[n]), std::sin(phis[n]));
    ata += row * row.transpose();
    aty += row * y[static_cast<Eigen::Index>(n)];
  }
  const Eigen::Vector3d x = ata.ldlt().solve(aty);
  return {x[0], x[1], x[2]};
}

struct Characterization {
  Interferometer unitary;
  RMatrix moduli;
  RMatrix phases;
};

// Unit-bordered U from singles and fringes with the reference at port 0.
inline Characterization characterize_from_fringes(const FringeData& d) {
  const Eigen::Index m = d.singles.rows();
  if (d.singles.cols() != m || static_cast<Eigen::Index>(d.fringes.size()) != m)
    throw dimension_error("characterize_from_fringes: inconsistent data");
  if (d.phis.size() < 8) throw parameter_error("characterize_from_fringes: need at least 8 phase samples");
  Characterization out;
  out.moduli.resize(m, m);
  out.phases = RMatrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double total = d.singles.row(i).sum();
    if (total <= 0.0) throw fit_error("characterize_from_fringes: input port without light");
    for (Eigen::Index k = 0; k < m; ++k) out.moduli(i, k) = std::sqrt(std::max(0.0, d.singles(i, k)) / total);
  }
  for (Eigen::Index j = 1; j < m; ++j) {
    for (Eigen::Index k = 0; k < m; ++k) {
      if (out.moduli(0, k) < 1e-9 || out.moduli(j, k) < 1e-9) continue;
      const CosineFit f = fit_cosine(d.phis, d.fringes[j].row(k).transpose());
      if (std::hypot(f.b, f.c) < 1e-6) throw fit_error("characterize_from_fringes: degenerate fringe");
      // b cos(phi) + c sin(phi) = R cos(phi + theta)
      out.phases(j, k) = std::atan2(-f.c, f.b);
    }
    const double ref = out.phases(j, 0);
    for (Eigen::Index k = 0; k < m; ++k)
      if (out.moduli(j, k) >= 1e-9) out.phases(j, k) = std::remainder(out.phases(j, k) - ref, 2.0 * pi);
  }
  CMatrix u(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index k = 0; k < m; ++k) u(i, k) = out.moduli(i, k) * std::exp(I * out.phases(i, k));
  out.unitary = {u, "characterized", true};
  return out;
}

template <typename Rng>
CMatrix random_unitary(int m, Rng& rng) {
  std::normal_distribution<double> g;
  CMatrix z(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) z(i, j) = cplx(g(rng), g(rng)) / std::sqrt(2.0);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < m; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
  return q;
}

// n-photon GHZ interferometer; j photons counted in group A and k in group B.
inline double ghz_probability(int n, int j, int k, double phase, bool full) {
  if (n <= 0 || n % 2 != 0) throw unsupported_error("ghz_probability: n must be even and positive");
  if (j < 0 || k < 0 || j + k > n) throw parameter_error("ghz_probability: invalid photon counts");
  if (full) {
    if (j + k != n) throw parameter_error("ghz_probability: full event needs j + k = n");
    const double parity = ((k + n / 2) % 2 == 0) ? 1.0 : -1.0;
    return std::pow(0.5, 2 * n - 1) * (1.0 + parity * std::cos(phase));
  }
  if (j + k >= n) throw parameter_error("ghz_probability: partial event needs j + k < n");
  return std::pow(0.5, j + k);
}

}  // namespace photonsim
