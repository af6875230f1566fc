#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

#include "tomo/errors.hpp"

namespace tomo {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Single-qubit Pauli matrices, index 0..3 = I, sigma_x, sigma_y, sigma_z.
inline const ComplexMatrix& pauli(int k) {
  static const std::array<ComplexMatrix, 4> sigma = [] {
    std::array<ComplexMatrix, 4> s;
    s[0] = ComplexMatrix::Identity(2, 2);
    s[1] = (ComplexMatrix(2, 2) << 0, 1, 1, 0).finished();
    s[2] = (ComplexMatrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
    s[3] = (ComplexMatrix(2, 2) << 1, 0, 0, -1).finished();
    return s;
  }();
  if (k < 0 || k > 3) {
    throw OutOfRange("pauli: index must be in 0..3");
  }
  return sigma[static_cast<std::size_t>(k)];
}

/// Kronecker product with block layout a(i,j)*b.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline RealVector kron(const RealVector& a, const RealVector& b) {
  RealVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

/// Hilbert-Schmidt inner product Tr(a^dagger b).
inline Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeMismatch("hs_inner: operands must have identical shape");
  }
  return a.conjugate().cwiseProduct(b).sum();
}

/// Largest entrywise deviation from Hermitian symmetry.
inline double hermiticity_defect(const ComplexMatrix& h) {
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

struct HermitianEigenSystem {
  RealVector eigenvalues;      // sorted non-increasing
  ComplexMatrix eigenvectors;  // columns match eigenvalues
};

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted non-increasing.
inline HermitianEigenSystem herm_eig(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) {
    throw ShapeMismatch("herm_eig: matrix must be square");
  }
  if (hermiticity_defect(h) > 1e-8) {
    throw NotHermitian("herm_eig: input deviates from Hermitian symmetry by more than 1e-8");
  }
  // Symmetrize so last-ulp asymmetry cannot leak into the solver.
  const ComplexMatrix sym = (h + h.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw TomoError("herm_eig: eigendecomposition did not converge");
  }
  HermitianEigenSystem out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

}  // namespace tomo
