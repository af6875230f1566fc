#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "tomo/measurement.hpp"
#include "tomo/sampling.hpp"
#include "tomo/states.hpp"

namespace tomo {

struct MleOptions {
  int max_iterations = 2000;
  double relative_likelihood_tolerance = 1e-10;
  double probability_floor = 1e-12;

  void validate() const {
    if (max_iterations < 1 || relative_likelihood_tolerance <= 0.0 ||
        probability_floor <= 0.0) {
      throw OutOfRange("MleOptions: all fields must be positive");
    }
  }
};

namespace detail {

// Binomial log-likelihood from precomputed outcome probabilities. Extended
// precision keeps the rounding jitter of the sum far below the 1e-9
// monotonicity slack even when |L| ~ 1e6.
inline double binomial_log_likelihood(const std::vector<double>& frequencies,
                                      const std::vector<double>& probabilities,
                                      double trials_per_base, double floor) {
  long double total = 0.0L;
  for (std::size_t n = 0; n < frequencies.size(); ++n) {
    const double f = frequencies[n];
    const double p =
        std::clamp(probabilities[n], floor, 1.0 - floor);
    long double term = 0.0L;
    if (f > 0.0) term += static_cast<long double>(f) * std::log(p);
    if (f < 1.0) term += static_cast<long double>(1.0 - f) * std::log1p(-p);
    total += static_cast<long double>(trials_per_base) * term;
  }
  return static_cast<double>(total);
}

}  // namespace detail

/// Binomial log-likelihood of a state given a frequency record:
/// sum_n (N/M) [f_n log p_n + (1 - f_n) log(1 - p_n)], p_n clipped away
/// from {0, 1} by the probability floor.
inline double log_likelihood(const MeasurementRecord& record,
                             const MeasurementSet& set,
                             const DensityMatrix& rho,
                             double probability_floor = 1e-12) {
  if (record.count != set.count() ||
      static_cast<int>(record.frequencies.size()) != set.count()) {
    throw ShapeMismatch("log_likelihood: record and set base counts differ");
  }
  const auto probs = true_probabilities(rho, set);
  return detail::binomial_log_likelihood(record.frequencies, probs.values,
                                         record.trials_per_base,
                                         probability_floor);
}

struct MleResult {
  DensityMatrix rho;
  int iterations = 0;
  std::vector<double> likelihood_trace;
  bool converged = false;  // false = NonConvergence (iteration cap reached)
};

namespace detail {

struct MleWorkspace {
  Eigen::Index d = 0;
  int m = 0;
  // Row n holds conj(vec(P_n)), so probabilities are one matrix-vector
  // product: p = Re(rows * vec(rho)).
  ComplexMatrix projector_rows_conj;
  ComplexMatrix projector_cols;  // column n holds vec(P_n)
};

inline MleWorkspace make_mle_workspace(const MeasurementSet& set) {
  MleWorkspace ws;
  ws.d = set.dim();
  ws.m = set.count();
  ws.projector_rows_conj.resize(ws.m, ws.d * ws.d);
  ws.projector_cols.resize(ws.d * ws.d, ws.m);
  for (int n = 0; n < ws.m; ++n) {
    const ComplexMatrix& p = set.projector(n);
    const Eigen::Map<const ComplexVector> flat(p.data(), ws.d * ws.d);
    ws.projector_rows_conj.row(n) = flat.conjugate().transpose();
    ws.projector_cols.col(n) = flat;
  }
  return ws;
}

inline std::vector<double> outcome_probabilities(const MleWorkspace& ws,
                                                 const ComplexMatrix& rho) {
  const Eigen::Map<const ComplexVector> flat(rho.data(), ws.d * ws.d);
  const ComplexVector raw = ws.projector_rows_conj * flat;
  std::vector<double> p(static_cast<std::size_t>(ws.m));
  for (int n = 0; n < ws.m; ++n) {
    p[static_cast<std::size_t>(n)] = std::clamp(raw(n).real(), 0.0, 1.0);
  }
  return p;
}

// One fixed-point update rho <- normalize(R rho R) with
// R = (1/M) sum_n [ (f_n/p_n) P_n + ((1-f_n)/(1-p_n)) (I - P_n) ].
// At exact frequencies R = I, so the true state is a fixed point.
inline ComplexMatrix mle_update(const MleWorkspace& ws,
                                const MeasurementRecord& record,
                                const ComplexMatrix& rho, double floor,
                                const std::vector<double>& probabilities) {
  RealVector difference(ws.m);
  double complement_total = 0.0;
  for (int n = 0; n < ws.m; ++n) {
    const double f = record.frequencies[static_cast<std::size_t>(n)];
    const double p =
        std::clamp(probabilities[static_cast<std::size_t>(n)], floor, 1.0 - floor);
    const double direct = f / p;
    const double complement = (1.0 - f) / (1.0 - p);
    difference(n) = direct - complement;
    complement_total += complement;
  }
  const ComplexVector r_flat =
      ws.projector_cols * difference.cast<Complex>();
  ComplexMatrix r =
      Eigen::Map<const ComplexMatrix>(r_flat.data(), ws.d, ws.d);
  r += complement_total * ComplexMatrix::Identity(ws.d, ws.d);
  r /= static_cast<double>(ws.m);
  ComplexMatrix next = r * rho * r;
  next /= next.trace().real();
  next = ((next + next.adjoint().eval()) / 2.0).eval();
  return next;
}

}  // namespace detail

/// One RrhoR update starting from an arbitrary state; exposed so the
/// per-iterate behaviour can be inspected directly.
inline ComplexMatrix mle_step(const MeasurementRecord& record,
                              const MeasurementSet& set,
                              const ComplexMatrix& rho,
                              double probability_floor = 1e-12) {
  auto ws = detail::make_mle_workspace(set);
  const auto p = detail::outcome_probabilities(ws, rho);
  return detail::mle_update(ws, record, rho, probability_floor, p);
}

/// Iterative maximum-likelihood reconstruction from I/d, stopping when the
/// relative likelihood improvement drops below tolerance or the iteration
/// cap is reached (reported via converged = false).
inline MleResult mle_estimate(const MeasurementRecord& record,
                              const MeasurementSet& set,
                              const MleOptions& options = {}) {
  options.validate();
  if (record.count != set.count() ||
      static_cast<int>(record.frequencies.size()) != set.count()) {
    throw ShapeMismatch("mle_estimate: record and set base counts differ");
  }
  const auto ws = detail::make_mle_workspace(set);
  const double floor = options.probability_floor;

  ComplexMatrix rho =
      ComplexMatrix::Identity(ws.d, ws.d) / static_cast<double>(ws.d);
  std::vector<double> p = detail::outcome_probabilities(ws, rho);
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(options.max_iterations) + 1);
  trace.push_back(detail::binomial_log_likelihood(
      record.frequencies, p, record.trials_per_base, floor));

  int iterations = 0;
  bool converged = false;
  while (iterations < options.max_iterations) {
    rho = detail::mle_update(ws, record, rho, floor, p);
    ++iterations;
    p = detail::outcome_probabilities(ws, rho);
    const double likelihood = detail::binomial_log_likelihood(
        record.frequencies, p, record.trials_per_base, floor);
    const double previous = trace.back();
    trace.push_back(likelihood);
    const double scale = std::max(std::abs(previous), 1e-12);
    if (likelihood - previous < options.relative_likelihood_tolerance * scale) {
      converged = true;
      break;
    }
  }
  return MleResult{DensityMatrix(std::move(rho)), iterations, std::move(trace),
                   converged};
}

}  // namespace tomo
