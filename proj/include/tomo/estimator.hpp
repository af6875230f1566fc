#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <vector>

#include "tomo/basis.hpp"
#include "tomo/measurement.hpp"
#include "tomo/sampling.hpp"
#include "tomo/states.hpp"

namespace tomo {

/// Least-squares solution theta = (X^T X)^-1 X^T y with y_n = f_n - 1/d,
/// using the Gram inverse cached in the measurement set.
inline BlochVector ls_estimate(const MeasurementRecord& record,
                               const MeasurementSet& set) {
  if (record.count != set.count() ||
      static_cast<int>(record.frequencies.size()) != set.count()) {
    throw ShapeMismatch("ls_estimate: record and set base counts differ");
  }
  const double inv_d = 1.0 / static_cast<double>(set.dim());
  RealVector y(set.count());
  for (int n = 0; n < set.count(); ++n) {
    y(n) = record.frequencies[static_cast<std::size_t>(n)] - inv_d;
  }
  return set.gram_inverse() * (set.design().transpose() * y);
}

/// Reconstruction I/d + sum theta_i Omega_i from the regression coordinates:
/// Hermitian, unit trace, possibly indefinite.
inline ComplexMatrix plre(const BlochVector& theta_hat,
                          const OperatorBasis& basis) {
  return bloch_to_matrix(theta_hat, basis);
}

/// Euclidean projection onto the probability simplex {w >= 0, sum w = 1},
/// by sort and scan: w = max(v - tau, 0) with tau the unique water level.
inline RealVector simplex_project(const RealVector& v) {
  const Eigen::Index n = v.size();
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double running = 0.0;
  double tau = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    running += sorted[static_cast<std::size_t>(i)];
    const double level = (running - 1.0) / static_cast<double>(i + 1);
    if (sorted[static_cast<std::size_t>(i)] > level) tau = level;
  }
  RealVector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = std::max(v(i) - tau, 0.0);
  return w;
}

struct ProjectionDetail {
  DensityMatrix rho;
  RealVector spectrum_pre;   // eigenvalues of the input, non-increasing
  RealVector spectrum_post;  // eigenvalues after simplex projection
};

/// Closest density matrix to a Hermitian unit-trace matrix in the
/// Hilbert-Schmidt norm: project the eigenvalues onto the simplex and keep
/// the eigenvectors. O(d^3) via one Hermitian eigendecomposition.
inline ProjectionDetail project_physical_detail(const ComplexMatrix& mu_hat) {
  if (mu_hat.rows() != mu_hat.cols()) {
    throw ShapeMismatch("project_physical: matrix must be square");
  }
  if (hermiticity_defect(mu_hat) > 1e-8) {
    throw NotHermitian("project_physical: input is not Hermitian within 1e-8");
  }
  const Complex tr = mu_hat.trace();
  if (std::abs(tr.real() - 1.0) > 1e-8 || std::abs(tr.imag()) > 1e-8) {
    throw NotUnitTrace("project_physical: trace must be 1 within 1e-8");
  }
  // Remove float drift in the trace before projecting.
  const ComplexMatrix scaled = mu_hat / tr.real();
  const auto eig = herm_eig(scaled);
  RealVector projected = simplex_project(eig.eigenvalues);
  ComplexMatrix rho = eig.eigenvectors *
                      projected.cast<Complex>().asDiagonal() *
                      eig.eigenvectors.adjoint();
  rho = ((rho + rho.adjoint().eval()) / 2.0).eval();
  return ProjectionDetail{DensityMatrix(std::move(rho)), eig.eigenvalues,
                          std::move(projected)};
}

inline DensityMatrix project_physical(const ComplexMatrix& mu_hat) {
  return project_physical_detail(mu_hat).rho;
}

struct EstimateReport {
  BlochVector theta_hat;
  ComplexMatrix mu_hat;   // unconstrained reconstruction, may be indefinite
  DensityMatrix rho_hat;  // physical estimate
  RealVector spectrum_pre;
  RealVector spectrum_post;
  std::chrono::nanoseconds elapsed_ls{0};
  std::chrono::nanoseconds elapsed_projection{0};
  std::optional<double> mse_vs_truth;
};

/// Full pipeline: least squares, reconstruction, physical projection.
/// elapsed_ls covers solving and assembling mu_hat; elapsed_projection covers
/// the eigenvalue projection. Set construction is excluded by design.
inline EstimateReport lre_estimate(const MeasurementRecord& record,
                                   const MeasurementSet& set,
                                   const OperatorBasis& basis,
                                   const DensityMatrix* truth = nullptr) {
  if (basis.dim != set.dim()) {
    throw ShapeMismatch("lre_estimate: basis and set dimensions differ");
  }
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  BlochVector theta = ls_estimate(record, set);
  ComplexMatrix mu = plre(theta, basis);
  const auto t1 = clock::now();
  ProjectionDetail projection = project_physical_detail(mu);
  const auto t2 = clock::now();

  EstimateReport report{std::move(theta),
                        std::move(mu),
                        std::move(projection.rho),
                        std::move(projection.spectrum_pre),
                        std::move(projection.spectrum_post),
                        std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0),
                        std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t1),
                        std::nullopt};
  if (truth != nullptr) {
    report.mse_vs_truth = mse(report.rho_hat, *truth);
  }
  return report;
}

}  // namespace tomo
