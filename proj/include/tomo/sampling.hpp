#pragma once

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tomo/measurement.hpp"
#include "tomo/rng.hpp"
#include "tomo/states.hpp"

namespace tomo {

/// Empirical outcome frequencies, one per measurement base. seed is absent
/// for records imported from real data.
struct MeasurementRecord {
  std::string set_label;
  int count = 0;
  double trials_per_base = 0.0;
  std::vector<double> frequencies;
  std::optional<std::uint64_t> seed;
};

struct OutcomeProbabilities {
  std::vector<double> values;
  // Bases with p = 1: a deterministic outcome means the state is already
  // known to be that base's projector. Diagnostic, not an error.
  std::vector<int> saturated;
};

/// Exact outcome probabilities p_n = Tr(P_n rho) = 1/d + theta . psi(n).
/// Both routes are evaluated and must agree to 1e-10.
inline OutcomeProbabilities true_probabilities(const DensityMatrix& rho,
                                               const MeasurementSet& set) {
  if (rho.dim() != set.dim()) {
    throw ShapeMismatch("true_probabilities: state and set dimensions differ");
  }
  const int m = set.count();
  const double inv_d = 1.0 / static_cast<double>(set.dim());
  const auto& basis = cached_pauli_basis(qubits_for_dim(rho.dim()));
  const BlochVector theta = state_to_bloch(rho.matrix(), basis);
  const RealVector affine =
      (set.design() * theta).array() + inv_d;

  OutcomeProbabilities out;
  out.values.resize(static_cast<std::size_t>(m));
  for (int n = 0; n < m; ++n) {
    const double traced = hs_inner(set.projector(n), rho.matrix()).real();
    if (std::abs(traced - affine(n)) > 1e-10) {
      throw TomoError("true_probabilities: trace and affine routes disagree");
    }
    out.values[static_cast<std::size_t>(n)] =
        std::clamp(traced, 0.0, 1.0);
    if (out.values[static_cast<std::size_t>(n)] >= 1.0 - 1e-12) {
      out.saturated.push_back(n);
    }
  }
  return out;
}

/// Simulated finite-sample record: each base receives floor(N/M) copies and
/// its frequency is an exact binomial draw divided by the trial count.
/// Deterministic given (rho, set, total_copies, seed).
inline MeasurementRecord simulate_record(const DensityMatrix& rho,
                                         const MeasurementSet& set,
                                         std::int64_t total_copies,
                                         std::uint64_t seed) {
  const int m = set.count();
  if (total_copies < m) {
    throw InsufficientCopies("simulate_record: need at least one copy per base");
  }
  if (total_copies % m != 0) {
    std::cerr << "simulate_record: N=" << total_copies
              << " not divisible by M=" << m
              << "; using floor(N/M) trials per base\n";
  }
  const std::int64_t trials = total_copies / m;
  const auto probs = true_probabilities(rho, set);
  MeasurementRecord record;
  record.set_label = set.label();
  record.count = m;
  record.trials_per_base = static_cast<double>(trials);
  record.frequencies.resize(static_cast<std::size_t>(m));
  record.seed = seed;
  Rng rng(seed);
  for (int n = 0; n < m; ++n) {
    const std::int64_t hits =
        rng.binomial(trials, probs.values[static_cast<std::size_t>(n)]);
    record.frequencies[static_cast<std::size_t>(n)] =
        static_cast<double>(hits) / static_cast<double>(trials);
  }
  return record;
}

/// Record whose frequencies equal the exact probabilities (zero noise).
inline MeasurementRecord noiseless_record(const DensityMatrix& rho,
                                          const MeasurementSet& set,
                                          double trials_per_base = 1.0) {
  MeasurementRecord record;
  record.set_label = set.label();
  record.count = set.count();
  record.trials_per_base = trials_per_base;
  record.frequencies = true_probabilities(rho, set).values;
  return record;
}

}  // namespace tomo
