#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"

namespace photonsim {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

// Permutation on {0..N-1}; sigma(j) = image[j].
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<int> image) : image_(std::move(image)) {
    std::vector<char> seen(image_.size(), 0);
    for (int v : image_) {
      if (v < 0 || v >= static_cast<int>(image_.size()) || seen[v]) {
        throw parameter_error("permutation image is not a bijection");
      }
      seen[v] = 1;
    }
  }

  static Permutation identity(int n) {
    std::vector<int> img(n);
    std::iota(img.begin(), img.end(), 0);
    return Permutation(std::move(img));
  }

  int size() const { return static_cast<int>(image_.size()); }
  int operator()(int j) const { return image_[j]; }
  const std::vector<int>& image() const { return image_; }

  Permutation inverse() const {
    std::vector<int> inv(image_.size());
    for (int j = 0; j < size(); ++j) inv[image_[j]] = j;
    return Permutation(std::move(inv));
  }

  bool is_identity() const {
    for (int j = 0; j < size(); ++j)
      if (image_[j] != j) return false;
    return true;
  }

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<int> image_;
};

// Disjoint cycles; each starts at its smallest element, sorted by first element.
inline std::vector<std::vector<int>> cycle_decomposition(const Permutation& sigma) {
  const int n = sigma.size();
  std::vector<char> seen(n, 0);
  std::vector<std::vector<int>> cycles;
  for (int start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::vector<int> cycle;
    for (int j = start; !seen[j]; j = sigma(j)) {
      seen[j] = 1;
      cycle.push_back(j);
    }
    cycles.push_back(std::move(cycle));
  }
  return cycles;
}

// Cycle type as a descending partition of N.
inline std::vector<int> cycle_type(const Permutation& sigma) {
  std::vector<int> lengths;
  for (const auto& c : cycle_decomposition(sigma)) lengths.push_back(static_cast<int>(c.size()));
  std::sort(lengths.rbegin(), lengths.rend());
  return lengths;
}

inline int sign(const Permutation& sigma) {
  const auto cycles = cycle_decomposition(sigma);
  return ((sigma.size() - static_cast<int>(cycles.size())) % 2 == 0) ? 1 : -1;
}

// Visits all permutations of n in lexicographic order of their images.
template <typename F>
void for_each_permutation(int n, F&& f) {
  std::vector<int> img(n);
  std::iota(img.begin(), img.end(), 0);
  do {
    f(Permutation(img));
  } while (std::next_permutation(img.begin(), img.end()));
}

inline void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) throw dimension_error(std::string(what) + ": matrix is not square");
}

// Ryser formula with Gray-code subset updates, O(2^N N).
inline cplx permanent(const CMatrix& m) {
  require_square(m, "permanent");
  const int n = static_cast<int>(m.rows());
  if (n == 0) return 1.0;
  if (n > 20) throw dimension_error("permanent: dimension above 20");
  std::vector<cplx> rowsum(n, 0.0);
  cplx total = 0.0;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  std::uint64_t gray = 0;
  for (std::uint64_t k = 1; k < subsets; ++k) {
    const int j = std::countr_zero(k);
    const std::uint64_t bit = std::uint64_t{1} << j;
    gray ^= bit;
    const double dir = (gray & bit) ? 1.0 : -1.0;
    cplx prod = 1.0;
    for (int i = 0; i < n; ++i) {
      rowsum[i] += dir * m(i, j);
      prod *= rowsum[i];
    }
    total += (std::popcount(gray) % 2 == 0) ? prod : -prod;
  }
  return (n % 2 == 0) ? total : -total;
}

// Direct N!-term sum; reference path for small matrices.
inline cplx permanent_naive(const CMatrix& m) {
  require_square(m, "permanent_naive");
  const int n = static_cast<int>(m.rows());
  if (n > 10) throw dimension_error("permanent_naive: dimension above 10");
  cplx total = 0.0;
  for_each_permutation(n, [&](const Permutation& s) {
    cplx prod = 1.0;
    for (int j = 0; j < n; ++j) prod *= m(j, s(j));
    total += prod;
  });
  return total;
}

// Row i of the result is row sigma(i) of m.
inline CMatrix permute_rows(const CMatrix& m, const Permutation& sigma) {
  if (sigma.size() != m.rows()) throw dimension_error("permute_rows: size mismatch");
  CMatrix out(m.rows(), m.cols());
  for (int i = 0; i < sigma.size(); ++i) out.row(i) = m.row(sigma(i));
  return out;
}

inline CMatrix hadamard(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw dimension_error("hadamard: shape mismatch");
  return a.cwiseProduct(b);
}

template <typename Derived>
double hermiticity_residual(const Eigen::MatrixBase<Derived>& h) {
  if (h.rows() != h.cols()) throw dimension_error("hermiticity check: matrix is not square");
  if (h.size() == 0) return 0.0;
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

inline double unitarity_residual(const CMatrix& u) {
  require_square(u, "unitarity check");
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

inline constexpr double hermitian_tolerance = 1e-10;

// Cached eigendecomposition of a Hermitian matrix for repeated exp(-iHz) application.
template <typename Matrix>
class HermitianPropagator {
 public:
  explicit HermitianPropagator(const Matrix& h) {
    if (h.rows() != h.cols()) throw dimension_error("hermitian_evolve: matrix is not square");
    if (hermiticity_residual(h) > hermitian_tolerance)
      throw symmetry_error("hermitian_evolve: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    values_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
  }

  CVector operator()(double z, const CVector& v) const {
    if (v.size() != vectors_.rows()) throw dimension_error("hermitian_evolve: vector size mismatch");
    CVector c = vectors_.adjoint() * v;
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::exp(-I * values_[k] * z);
    return vectors_ * c;
  }

  CMatrix operator()(double z, const CMatrix& v) const {
    if (v.rows() != vectors_.rows()) throw dimension_error("hermitian_evolve: matrix size mismatch");
    CMatrix c = vectors_.adjoint() * v;
    for (Eigen::Index k = 0; k < c.rows(); ++k) c.row(k) *= std::exp(-I * values_[k] * z);
    return vectors_ * c;
  }

  const RVector& eigenvalues() const { return values_; }
  const Matrix& eigenvectors() const { return vectors_; }

 private:
  RVector values_;
  Matrix vectors_;
};

// exp(-iHz) v via eigendecomposition.
// exp(-i h z) v by scaled Taylor series; cheap for sparse-pattern h and few columns.
template <typename Matrix, typename Field>
Field taylor_evolve(const Matrix& h, double z, Field v) {
  if (h.rows() != h.cols() || h.cols() != v.rows()) throw dimension_error("taylor_evolve: size mismatch");
  const double norm1 = (Eigen::RowVectorXd::Ones(h.rows()) * h.cwiseAbs()).maxCoeff();
  const int substeps = std::max(1, static_cast<int>(std::ceil(std::abs(z) * norm1)));
  const double dz = z / substeps;
  for (int s = 0; s < substeps; ++s) {
    Field term = v;
    for (int k = 1; k <= 60; ++k) {
      term = (h * term).eval() * cplx(0.0, -dz / k);
      v += term;
      if (term.norm() < 1e-16 * v.norm()) break;
    }
  }
  return v;
}

inline CVector hermitian_evolve(const CMatrix& h, double z, const CVector& v) {
  return HermitianPropagator<CMatrix>(h)(z, v);
}

inline CVector hermitian_evolve(const RMatrix& h, double z, const CVector& v) {
  return HermitianPropagator<RMatrix>(h)(z, v);
}

}  // namespace photonsim
