// Minimal end-to-end usage: simulate a finite-sample measurement of a Werner
// state with the two-qubit cube set and reconstruct it.

#include <iostream>

#include "tomo/tomo.hpp"

int main() {
  const tomo::DensityMatrix truth = tomo::werner(0.3);
  const tomo::MeasurementSet set = tomo::cube_set(2);
  const auto& basis = tomo::cached_pauli_basis(2);

  const std::int64_t copies = 36000;
  const tomo::MeasurementRecord record =
      tomo::simulate_record(truth, set, copies, /*seed=*/42);

  const tomo::EstimateReport report =
      tomo::lre_estimate(record, set, basis, &truth);

  std::cout << "bound for this set:  " << tomo::mse_upper_bound(set, copies)
            << "\n"
            << "mse (unconstrained): " << tomo::mse(report.mu_hat, truth) << "\n"
            << "mse (physical):      " << *report.mse_vs_truth << "\n"
            << "smallest eigenvalue before/after projection: "
            << report.spectrum_pre(report.spectrum_pre.size() - 1) << " / "
            << report.spectrum_post(report.spectrum_post.size() - 1) << "\n";
  return 0;
}
