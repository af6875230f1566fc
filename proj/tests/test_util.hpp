#pragma once

#include <gtest/gtest.h>

#include "tomo/tomo.hpp"

namespace tomo_test {

inline ::testing::AssertionResult close(double a, double b, double tol) {
  if (std::abs(a - b) <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure()
         << a << " vs " << b << " differ by " << std::abs(a - b)
         << " (tol " << tol << ")";
}

inline ::testing::AssertionResult matrices_close(const tomo::ComplexMatrix& a,
                                                 const tomo::ComplexMatrix& b,
                                                 double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return ::testing::AssertionFailure() << "shape mismatch";
  }
  const double diff = (a - b).cwiseAbs().maxCoeff();
  if (diff <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure()
         << "max entry difference " << diff << " exceeds " << tol;
}

inline ::testing::AssertionResult vectors_close(const tomo::RealVector& a,
                                                const tomo::RealVector& b,
                                                double tol) {
  if (a.size() != b.size()) {
    return ::testing::AssertionFailure() << "size mismatch";
  }
  const double diff = (a - b).cwiseAbs().maxCoeff();
  if (diff <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure()
         << "max component difference " << diff << " exceeds " << tol;
}

/// Random matrix with entries uniform in the unit square of the complex plane.
inline tomo::ComplexMatrix random_matrix(tomo::Rng& rng, int rows, int cols) {
  tomo::ComplexMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      m(r, c) = tomo::Complex(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
    }
  }
  return m;
}

inline tomo::ComplexMatrix random_hermitian(tomo::Rng& rng, int d) {
  const tomo::ComplexMatrix m = random_matrix(rng, d, d);
  return ((m + m.adjoint()) / 2.0).eval();
}

/// Full-rank random density matrix via a random pure-state mixture.
inline tomo::DensityMatrix random_density(tomo::Rng& rng, int n_qubits) {
  const double alpha = 0.95 * rng.uniform();
  return tomo::random_mixed_pure(n_qubits, alpha, rng.next_u64());
}

}  // namespace tomo_test
