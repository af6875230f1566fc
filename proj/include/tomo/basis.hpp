#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "tomo/matrix.hpp"

namespace tomo {

inline constexpr int kMaxQubits = 6;

// Real coordinates of a unit-trace Hermitian matrix in the traceless part of
// an orthonormal operator basis; theta[i] is the coefficient of operator i+1.
using BlochVector = RealVector;

/// Orthonormal Hermitian operator basis for an n-qubit system.
///
/// operators[0] = I/sqrt(d); the rest are traceless. Index i encodes the
/// Pauli word of i's base-4 digits, first qubit most significant, so for
/// two qubits i = 4l + m names (sigma_l x sigma_m)/2.
struct OperatorBasis {
  int n_qubits = 0;
  int dim = 0;  // d = 2^n_qubits
  std::vector<ComplexMatrix> operators;
};

inline OperatorBasis pauli_basis(int n_qubits) {
  if (n_qubits < 1) throw OutOfRange("pauli_basis: need at least one qubit");
  if (n_qubits > kMaxQubits) {
    throw DimensionTooLarge("pauli_basis: supported up to 6 qubits");
  }
  OperatorBasis basis;
  basis.n_qubits = n_qubits;
  basis.dim = 1 << n_qubits;
  const std::size_t count = std::size_t(1) << (2 * n_qubits);  // 4^n
  basis.operators.reserve(count);
  const double factor = 1.0 / std::sqrt(2.0);  // per qubit
  for (std::size_t index = 0; index < count; ++index) {
    ComplexMatrix op = ComplexMatrix::Identity(1, 1);
    for (int q = 0; q < n_qubits; ++q) {
      const int digit =
          static_cast<int>(index >> (2 * (n_qubits - 1 - q))) & 3;
      op = kron(op, factor * pauli(digit));
    }
    basis.operators.push_back(std::move(op));
  }
  return basis;
}

/// Shared per-dimension basis cache; construction is idempotent and the
/// returned reference stays valid for the program lifetime.
inline const OperatorBasis& cached_pauli_basis(int n_qubits) {
  static std::mutex mutex;
  static std::map<int, OperatorBasis> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n_qubits);
  if (it == cache.end()) {
    it = cache.emplace(n_qubits, pauli_basis(n_qubits)).first;
  }
  return it->second;
}

inline int qubits_for_dim(Eigen::Index dim) {
  int n = 0;
  Eigen::Index d = 1;
  while (d < dim) {
    d <<= 1;
    ++n;
  }
  if (d != dim) throw Unsupported("dimension must be a power of two");
  if (n < 1) throw OutOfRange("dimension must be at least 2");
  if (n > kMaxQubits) throw DimensionTooLarge("supported up to 6 qubits");
  return n;
}

/// Coordinates of a unit-trace Hermitian matrix: theta[i-1] = Tr(rho Omega_i).
inline BlochVector state_to_bloch(const ComplexMatrix& rho,
                                  const OperatorBasis& basis) {
  if (rho.rows() != basis.dim || rho.cols() != basis.dim) {
    throw ShapeMismatch("state_to_bloch: matrix does not match basis dimension");
  }
  if (hermiticity_defect(rho) > 1e-8) {
    throw NotHermitian("state_to_bloch: input is not Hermitian");
  }
  if (std::abs(rho.trace().real() - 1.0) > 1e-8 ||
      std::abs(rho.trace().imag()) > 1e-8) {
    throw NotUnitTrace("state_to_bloch: trace must be 1");
  }
  const std::size_t count = basis.operators.size();
  BlochVector theta(static_cast<Eigen::Index>(count - 1));
  for (std::size_t i = 1; i < count; ++i) {
    // Basis operators are Hermitian, so Tr(rho Omega) = <Omega, rho>.
    theta(static_cast<Eigen::Index>(i - 1)) =
        hs_inner(basis.operators[i], rho).real();
  }
  return theta;
}

/// Inverse of state_to_bloch: I/d + sum_i theta[i-1] Omega_i. Hermitian and
/// unit trace by construction, not necessarily positive semidefinite.
inline ComplexMatrix bloch_to_matrix(const BlochVector& theta,
                                     const OperatorBasis& basis) {
  const auto expected =
      static_cast<Eigen::Index>(basis.operators.size()) - 1;
  if (theta.size() != expected) {
    throw ShapeMismatch("bloch_to_matrix: coordinate count does not match basis");
  }
  ComplexMatrix out =
      ComplexMatrix::Identity(basis.dim, basis.dim) / double(basis.dim);
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    out.noalias() += theta(i) * basis.operators[static_cast<std::size_t>(i) + 1];
  }
  return out;
}

}  // namespace tomo
