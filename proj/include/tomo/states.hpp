#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "tomo/basis.hpp"
#include "tomo/matrix.hpp"
#include "tomo/rng.hpp"

namespace tomo {

/// Hermitian, unit-trace, positive-semidefinite matrix. Construction
/// validates all three properties and throws on violation.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) { validate(); }

  const ComplexMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  static DensityMatrix maximally_mixed(Eigen::Index d) {
    return DensityMatrix(ComplexMatrix::Identity(d, d) / double(d));
  }

 private:
  void validate() const {
    if (m_.rows() != m_.cols()) {
      throw ShapeMismatch("DensityMatrix: matrix must be square");
    }
    if (hermiticity_defect(m_) > 1e-10) {
      throw NotHermitian("DensityMatrix: not Hermitian within 1e-10");
    }
    const Complex tr = m_.trace();
    if (std::abs(tr.real() - 1.0) > 1e-10 || std::abs(tr.imag()) > 1e-10) {
      throw NotUnitTrace("DensityMatrix: trace must be 1 within 1e-10");
    }
    const auto eig = herm_eig(m_);
    if (eig.eigenvalues.minCoeff() < -1e-10) {
      throw NotPositiveSemidefinite(
          "DensityMatrix: smallest eigenvalue below -1e-10");
    }
  }

  ComplexMatrix m_;
};

/// Two-qubit Werner state q |psi-><psi-| + (1-q) I/4 with the singlet
/// |psi-> = (|01> - |10>)/sqrt(2).
inline DensityMatrix werner(double q) {
  if (q < 0.0 || q > 1.0) throw OutOfRange("werner: q must lie in [0,1]");
  ComplexVector singlet = ComplexVector::Zero(4);
  singlet(1) = 1.0 / std::sqrt(2.0);
  singlet(2) = -1.0 / std::sqrt(2.0);
  ComplexMatrix m = q * (singlet * singlet.adjoint()) +
                    (1.0 - q) * ComplexMatrix::Identity(4, 4) / 4.0;
  return DensityMatrix(std::move(m));
}

/// Haar-random pure state mixed with the identity:
/// alpha |psi><psi| + (1-alpha) I/d. Deterministic in (n_qubits, alpha, seed).
inline DensityMatrix random_mixed_pure(int n_qubits, double alpha,
                                       std::uint64_t seed) {
  if (n_qubits < 1) throw OutOfRange("random_mixed_pure: need at least one qubit");
  if (n_qubits > kMaxQubits) {
    throw DimensionTooLarge("random_mixed_pure: supported up to 6 qubits");
  }
  if (alpha < 0.0 || alpha > 1.0) {
    throw OutOfRange("random_mixed_pure: alpha must lie in [0,1]");
  }
  const Eigen::Index d = Eigen::Index(1) << n_qubits;
  Rng rng(seed);
  ComplexVector psi(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double re = rng.gaussian();
    const double im = rng.gaussian();
    psi(i) = Complex(re, im);
  }
  psi /= psi.norm();
  ComplexMatrix m = alpha * (psi * psi.adjoint()) +
                    (1.0 - alpha) * ComplexMatrix::Identity(d, d) / double(d);
  // Exact Hermitian symmetry; the outer product is symmetric only up to
  // rounding in the off-diagonal conjugate pairs.
  m = (m + m.adjoint().eval()) / 2.0;
  return DensityMatrix(std::move(m));
}

/// Squared Hilbert-Schmidt distance Tr((estimate - truth)^2).
inline double mse(const ComplexMatrix& estimate, const DensityMatrix& truth) {
  if (estimate.rows() != truth.dim() || estimate.cols() != truth.dim()) {
    throw ShapeMismatch("mse: dimension mismatch");
  }
  if (hermiticity_defect(estimate) > 1e-8) {
    throw NotHermitian("mse: estimate is not Hermitian");
  }
  return (estimate - truth.matrix()).squaredNorm();
}

inline double mse(const DensityMatrix& estimate, const DensityMatrix& truth) {
  return mse(estimate.matrix(), truth);
}

}  // namespace tomo
