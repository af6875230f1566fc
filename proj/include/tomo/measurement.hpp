#pragma once

#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "tomo/basis.hpp"
#include "tomo/matrix.hpp"

namespace tomo {

namespace detail {

/// Feature rows Tr(P_n Omega_i), i >= 1, computed by plain traces. This is
/// the canonical route used for validation, JSON round-trips and checksums;
/// product sets use a faster factorized route at construction.
inline RealMatrix design_from_projectors(
    const std::vector<ComplexMatrix>& projectors, const OperatorBasis& basis) {
  const auto m = static_cast<Eigen::Index>(projectors.size());
  const auto k = static_cast<Eigen::Index>(basis.operators.size()) - 1;
  RealMatrix design(m, k);
  for (Eigen::Index n = 0; n < m; ++n) {
    for (Eigen::Index i = 0; i < k; ++i) {
      design(n, i) =
          hs_inner(basis.operators[static_cast<std::size_t>(i) + 1],
                   projectors[static_cast<std::size_t>(n)])
              .real();
    }
  }
  return design;
}

inline ComplexMatrix bloch_projector(const Eigen::Vector3d& r) {
  ComplexMatrix p = ComplexMatrix::Identity(2, 2);
  for (int k = 0; k < 3; ++k) p += r(k) * pauli(k + 1);
  return p / 2.0;
}

}  // namespace detail

/// A set of M rank-1 projective measurement bases with the precomputed
/// regression machinery: feature vectors psi(n), design matrix X (rows
/// psi(n)^T), Gram matrix X^T X and its inverse. The inverse is computed once
/// at construction; estimation never solves a linear system.
class MeasurementSet {
 public:
  /// Builds from explicit projectors, validating each (Hermitian, idempotent,
  /// trace 1) and deriving features by the trace route.
  static MeasurementSet from_projectors(std::string label,
                                        std::vector<ComplexMatrix> projectors) {
    if (projectors.empty()) {
      throw OutOfRange("MeasurementSet: need at least one projector");
    }
    const Eigen::Index d = projectors.front().rows();
    const int n_qubits = qubits_for_dim(d);
    for (const auto& p : projectors) {
      if (p.rows() != d || p.cols() != d) {
        throw ShapeMismatch("MeasurementSet: projectors differ in dimension");
      }
      if (hermiticity_defect(p) > 1e-10) {
        throw NotHermitian("MeasurementSet: projector not Hermitian");
      }
      if ((p * p - p).cwiseAbs().maxCoeff() > 1e-10) {
        throw Unsupported("MeasurementSet: projector not idempotent (rank-1 required)");
      }
      if (std::abs(p.trace().real() - 1.0) > 1e-10 ||
          std::abs(p.trace().imag()) > 1e-10) {
        throw Unsupported("MeasurementSet: projector trace must be 1");
      }
    }
    const auto& basis = cached_pauli_basis(n_qubits);
    RealMatrix design = detail::design_from_projectors(projectors, basis);
    return MeasurementSet(std::move(label), static_cast<int>(d),
                          std::move(projectors), std::move(design));
  }

  const std::string& label() const { return label_; }
  int dim() const { return dim_; }
  int count() const { return static_cast<int>(projectors_.size()); }
  const std::vector<ComplexMatrix>& projectors() const { return projectors_; }
  const ComplexMatrix& projector(int n) const {
    return projectors_[static_cast<std::size_t>(n)];
  }
  /// M x (d^2 - 1) design matrix; row n is psi(n)^T.
  const RealMatrix& design() const { return design_; }
  RealVector psi(int n) const { return design_.row(n).transpose(); }
  const RealMatrix& gram() const { return gram_; }
  const RealMatrix& gram_inverse() const { return gram_inverse_; }
  /// Gram eigenvalues, sorted non-increasing.
  const RealVector& gram_eigenvalues() const { return gram_eigenvalues_; }
  double smallest_gram_eigenvalue() const {
    return gram_eigenvalues_(gram_eigenvalues_.size() - 1);
  }
  double trace_gram_inverse() const { return trace_gram_inverse_; }

  /// All tensor products of one fixed list of single-qubit Bloch directions;
  /// projector index is the base-|directions| expansion, first qubit most
  /// significant. Features come from the factorized per-qubit route.
  static MeasurementSet product_set(std::string label, int n_qubits,
                                    const std::vector<Eigen::Vector3d>& directions) {
    if (n_qubits < 1) throw OutOfRange("product_set: need at least one qubit");
    if (n_qubits > kMaxQubits) {
      throw DimensionTooLarge("product_set: supported up to 6 qubits");
    }
    if (directions.empty()) {
      throw OutOfRange("product_set: need at least one direction");
    }
    const int d = 1 << n_qubits;
    const std::size_t n_dirs = directions.size();
    std::vector<ComplexMatrix> single(n_dirs);
    std::vector<RealVector> feature(n_dirs);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t k = 0; k < n_dirs; ++k) {
      single[k] = detail::bloch_projector(directions[k]);
      RealVector f(4);
      f << inv_sqrt2, directions[k](0) * inv_sqrt2,
          directions[k](1) * inv_sqrt2, directions[k](2) * inv_sqrt2;
      feature[k] = f;
    }
    std::size_t m = 1;
    for (int q = 0; q < n_qubits; ++q) m *= n_dirs;
    std::vector<ComplexMatrix> projectors;
    projectors.reserve(m);
    RealMatrix design(static_cast<Eigen::Index>(m), Eigen::Index(d) * d - 1);
    for (std::size_t index = 0; index < m; ++index) {
      std::size_t digits = index;
      std::vector<std::size_t> word(static_cast<std::size_t>(n_qubits));
      for (int q = n_qubits - 1; q >= 0; --q) {
        word[static_cast<std::size_t>(q)] = digits % n_dirs;
        digits /= n_dirs;
      }
      ComplexMatrix p = ComplexMatrix::Identity(1, 1);
      RealVector full = RealVector::Ones(1);
      for (int q = 0; q < n_qubits; ++q) {
        p = kron(p, single[word[static_cast<std::size_t>(q)]]);
        full = kron(full, feature[word[static_cast<std::size_t>(q)]]);
      }
      design.row(static_cast<Eigen::Index>(index)) =
          full.tail(Eigen::Index(d) * d - 1).transpose();
      projectors.push_back(std::move(p));
    }
    return MeasurementSet(std::move(label), d, std::move(projectors),
                          std::move(design));
  }

 private:
  MeasurementSet(std::string label, int dim,
                 std::vector<ComplexMatrix> projectors, RealMatrix design)
      : label_(std::move(label)),
        dim_(dim),
        projectors_(std::move(projectors)),
        design_(std::move(design)) {
    gram_ = design_.transpose() * design_;
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(gram_);
    if (solver.info() != Eigen::Success) {
      throw TomoError("MeasurementSet: Gram eigendecomposition failed");
    }
    gram_eigenvalues_ = solver.eigenvalues().reverse();
    const double m = static_cast<double>(projectors_.size());
    if (gram_eigenvalues_(gram_eigenvalues_.size() - 1) < 1e-10 * m) {
      throw SingularGram(
          "MeasurementSet: set is not informationally complete "
          "(smallest Gram eigenvalue below 1e-10*M)");
    }
    const RealMatrix& u = solver.eigenvectors();
    gram_inverse_ =
        u * solver.eigenvalues().cwiseInverse().asDiagonal() * u.transpose();
    gram_inverse_ = ((gram_inverse_ + gram_inverse_.transpose()) / 2.0).eval();
    trace_gram_inverse_ = gram_eigenvalues_.cwiseInverse().sum();
  }

  std::string label_;
  int dim_ = 0;
  std::vector<ComplexMatrix> projectors_;
  RealMatrix design_;
  RealMatrix gram_;
  RealMatrix gram_inverse_;
  RealVector gram_eigenvalues_;
  double trace_gram_inverse_ = 0.0;
};

/// 6^n tensor products of the +-x, +-y, +-z projectors,
/// per-qubit order (+x, -x, +y, -y, +z, -z).
inline MeasurementSet cube_set(int n_qubits) {
  static const std::vector<Eigen::Vector3d> dirs = {
      {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  return MeasurementSet::product_set("cube" + std::to_string(n_qubits),
                                     n_qubits, dirs);
}

/// 4^n tensor products of projectors at the tetrahedral Bloch directions.
inline MeasurementSet tetrahedron_set(int n_qubits) {
  const double s = 1.0 / std::sqrt(3.0);
  static const std::vector<Eigen::Vector3d> dirs = {
      {s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  return MeasurementSet::product_set("tetra" + std::to_string(n_qubits),
                                     n_qubits, dirs);
}

namespace detail {

// The 15 nontrivial two-qubit Pauli words split into five commuting triples;
// the common eigenbasis of each triple is one measurement basis and the five
// bases are pairwise unbiased. Within a triple the third word is the product
// of the first two up to sign, so A + 2B weighted 4:2:1 has four distinct
// eigenvalues and pins the basis uniquely (up to phase).
inline std::vector<ComplexMatrix> mub2_projectors() {
  static const int classes[5][3][2] = {
      {{3, 0}, {0, 3}, {3, 3}},  // computational
      {{1, 0}, {0, 1}, {1, 1}},
      {{2, 0}, {0, 2}, {2, 2}},
      {{1, 2}, {2, 3}, {3, 1}},
      {{2, 1}, {3, 2}, {1, 3}},
  };
  std::vector<ComplexMatrix> projectors;
  projectors.reserve(20);
  for (const auto& cls : classes) {
    ComplexMatrix h = ComplexMatrix::Zero(4, 4);
    const double weights[3] = {4.0, 2.0, 1.0};
    for (int j = 0; j < 3; ++j) {
      h += weights[j] * kron(pauli(cls[j][0]), pauli(cls[j][1]));
    }
    const auto eig = herm_eig(h);
    for (int v = 0; v < 4; ++v) {
      const ComplexVector vec = eig.eigenvectors.col(v);
      projectors.push_back(vec * vec.adjoint());
    }
  }
  return projectors;
}

}  // namespace detail

/// Mutually unbiased bases: for one qubit the six Pauli eigenstates, for two
/// qubits the standard five-basis set (M = 20).
inline MeasurementSet mub_set(int n_qubits) {
  if (n_qubits == 1) {
    static const std::vector<Eigen::Vector3d> dirs = {
        {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    return MeasurementSet::product_set("mub1", 1, dirs);
  }
  if (n_qubits == 2) {
    return MeasurementSet::from_projectors("mub2", detail::mub2_projectors());
  }
  throw Unsupported("mub_set: only 1 and 2 qubits are supported");
}

/// Worst-case asymptotic mean squared error of the least-squares estimate for
/// N total copies split evenly over the M bases: (M / 4N) Tr((X^T X)^-1).
inline double mse_upper_bound(const MeasurementSet& set,
                              std::int64_t total_copies) {
  if (total_copies < 1) throw OutOfRange("mse_upper_bound: need N >= 1");
  const double m = set.count();
  if (set.smallest_gram_eigenvalue() < 1e-10 * m) {
    throw SingularGram("mse_upper_bound: Gram matrix is numerically singular");
  }
  if (total_copies % set.count() != 0) {
    std::cerr << "mse_upper_bound: N=" << total_copies
              << " is not divisible by M=" << set.count()
              << "; using real-valued N/M\n";
  }
  return m / (4.0 * static_cast<double>(total_copies)) *
         set.trace_gram_inverse();
}

/// Minimum of the bound over all measurement sets with unit-norm feature
/// constraint: d(d+1)(d^2-1) / 4N. Attained by mutually unbiased bases.
inline double optimal_bound_global(int dim, std::int64_t total_copies) {
  if (dim < 2) throw OutOfRange("optimal_bound_global: need dim >= 2");
  if (total_copies < 1) throw OutOfRange("optimal_bound_global: need N >= 1");
  const double d = dim;
  return d * (d + 1.0) * (d * d - 1.0) / (4.0 * static_cast<double>(total_copies));
}

/// Minimum of the bound over two-qubit product (local) measurement sets:
/// 99/N, attained by the cube and tetrahedron sets.
inline double optimal_bound_local_2qubit(std::int64_t total_copies) {
  if (total_copies < 1) throw OutOfRange("optimal_bound_local_2qubit: need N >= 1");
  return 99.0 / static_cast<double>(total_copies);
}

struct SpectrumCheck {
  bool ok = false;
  RealVector eigenvalues;         // measured, non-increasing
  std::vector<double> residuals;  // per-eigenvalue |measured - expected|
};

/// Compares the Gram spectrum against expected (value, multiplicity) pairs
/// within 1e-9. A mismatch is reported, not thrown.
inline SpectrumCheck verify_spectrum(
    const MeasurementSet& set,
    const std::vector<std::pair<double, int>>& expected) {
  SpectrumCheck out;
  out.eigenvalues = set.gram_eigenvalues();
  std::vector<double> target;
  for (const auto& [value, multiplicity] : expected) {
    for (int i = 0; i < multiplicity; ++i) target.push_back(value);
  }
  std::sort(target.begin(), target.end(), std::greater<>());
  if (static_cast<Eigen::Index>(target.size()) != out.eigenvalues.size()) {
    out.ok = false;
    return out;
  }
  out.ok = true;
  out.residuals.resize(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    out.residuals[i] =
        std::abs(out.eigenvalues(static_cast<Eigen::Index>(i)) - target[i]);
    if (out.residuals[i] > 1e-9) out.ok = false;
  }
  return out;
}

}  // namespace tomo
