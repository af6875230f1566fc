#include <gtest/gtest.h>

#include <sstream>

#include "test_util.hpp"
#include "tomo/tomo.hpp"

using namespace tomo;
using tomo_test::close;

TEST(TrueProbabilities, MaximallyMixedIsUniform) {
  const auto probs =
      true_probabilities(DensityMatrix::maximally_mixed(4), cube_set(2));
  for (double p : probs.values) EXPECT_TRUE(close(p, 0.25, 1e-12));
  EXPECT_TRUE(probs.saturated.empty());
}

TEST(TrueProbabilities, GroundStateOnCubeAxes) {
  ComplexMatrix ground = ComplexMatrix::Zero(2, 2);
  ground(0, 0) = 1.0;
  const auto probs = true_probabilities(DensityMatrix(ground), cube_set(1));
  const std::vector<double> expected = {0.5, 0.5, 0.5, 0.5, 1.0, 0.0};
  ASSERT_EQ(probs.values.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_TRUE(close(probs.values[i], expected[i], 1e-12)) << "base " << i;
  }
  ASSERT_EQ(probs.saturated.size(), 1u);
  EXPECT_EQ(probs.saturated.front(), 4);
}

TEST(TrueProbabilities, SingletSeesNoParallelUpUp) {
  const auto probs = true_probabilities(werner(1.0), cube_set(2));
  // (+z, +z) base sits at index 4*6 + 4
  EXPECT_TRUE(close(probs.values[28], 0.0, 1e-12));
}

TEST(TrueProbabilities, TraceAndAffineRoutesAgree) {
  Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform() * 2);
    const DensityMatrix rho = tomo_test::random_density(rng, n);
    const MeasurementSet set = (trial % 2 == 0) ? cube_set(n) : tetrahedron_set(n);
    const auto probs = true_probabilities(rho, set);
    const auto& basis = cached_pauli_basis(n);
    const BlochVector theta = state_to_bloch(rho.matrix(), basis);
    for (int b = 0; b < set.count(); ++b) {
      const double affine = 1.0 / set.dim() + set.psi(b).dot(theta);
      EXPECT_TRUE(close(probs.values[static_cast<std::size_t>(b)], affine, 1e-10));
      EXPECT_GE(probs.values[static_cast<std::size_t>(b)], 0.0);
      EXPECT_LE(probs.values[static_cast<std::size_t>(b)], 1.0);
    }
  }
}

TEST(TrueProbabilities, ShapeMismatchThrows) {
  EXPECT_THROW(
      true_probabilities(DensityMatrix::maximally_mixed(2), cube_set(2)),
      ShapeMismatch);
}

TEST(SimulateRecord, DeterministicInSeed) {
  const DensityMatrix rho = werner(0.4);
  const MeasurementSet set = cube_set(2);
  const MeasurementRecord a = simulate_record(rho, set, 3600, 77);
  const MeasurementRecord b = simulate_record(rho, set, 3600, 77);
  EXPECT_EQ(a.frequencies, b.frequencies);
  EXPECT_EQ(a.trials_per_base, 100.0);
  EXPECT_EQ(a.set_label, "cube2");
  ASSERT_TRUE(a.seed.has_value());
  EXPECT_EQ(*a.seed, 77u);
  const MeasurementRecord c = simulate_record(rho, set, 3600, 78);
  EXPECT_NE(a.frequencies, c.frequencies);
}

TEST(SimulateRecord, DegenerateProbabilities) {
  ComplexMatrix ground = ComplexMatrix::Zero(2, 2);
  ground(0, 0) = 1.0;
  const MeasurementRecord record =
      simulate_record(DensityMatrix(ground), cube_set(1), 600, 3);
  EXPECT_EQ(record.frequencies[4], 1.0);
  EXPECT_EQ(record.frequencies[5], 0.0);
}

TEST(SimulateRecord, InsufficientCopiesThrows) {
  EXPECT_THROW(simulate_record(werner(0.2), cube_set(2), 35, 1),
               InsufficientCopies);
}

TEST(SimulateRecord, NonDivisibleRoundsDown) {
  const MeasurementRecord record =
      simulate_record(werner(0.2), cube_set(2), 3605, 1);
  EXPECT_EQ(record.trials_per_base, 100.0);
}

TEST(SimulateRecord, BinomialMeanAndVariance) {
  const int seeds = 10000;
  const std::int64_t copies = 600;  // 100 trials per base
  const DensityMatrix rho = random_mixed_pure(1, 0.6, 424242);
  const MeasurementSet set = cube_set(1);
  const auto probs = true_probabilities(rho, set);
  const double trials = 100.0;

  std::vector<double> sum(6, 0.0), sum_sq(6, 0.0);
  for (int s = 0; s < seeds; ++s) {
    const MeasurementRecord record =
        simulate_record(rho, set, copies, 1000 + static_cast<std::uint64_t>(s));
    for (int b = 0; b < 6; ++b) {
      sum[b] += record.frequencies[static_cast<std::size_t>(b)];
      sum_sq[b] += record.frequencies[static_cast<std::size_t>(b)] *
                   record.frequencies[static_cast<std::size_t>(b)];
    }
  }
  for (int b = 0; b < 6; ++b) {
    const double p = probs.values[static_cast<std::size_t>(b)];
    const double mean = sum[b] / seeds;
    const double variance = sum_sq[b] / seeds - mean * mean;
    const double expected_variance = p * (1.0 - p) / trials;
    // Monte-Carlo mean within 4 standard errors
    EXPECT_LE(std::abs(mean - p),
              4.0 * std::sqrt(expected_variance / seeds) + 1e-12)
        << "base " << b;
    if (p >= 0.1 && p <= 0.9) {
      EXPECT_LE(std::abs(variance - expected_variance), 0.1 * expected_variance)
          << "base " << b;
    }
    // worst-case enlargement dominates the exact binomial variance
    EXPECT_LE(expected_variance,
              set.count() / (4.0 * static_cast<double>(copies)) + 1e-15);
  }
}

TEST(Record, JsonRoundTrip) {
  const MeasurementRecord record = simulate_record(werner(0.6), cube_set(2), 3600, 5);
  const MeasurementRecord loaded = record_from_json(record_to_json(record));
  EXPECT_EQ(loaded.set_label, record.set_label);
  EXPECT_EQ(loaded.count, record.count);
  EXPECT_EQ(loaded.trials_per_base, record.trials_per_base);
  EXPECT_EQ(loaded.frequencies, record.frequencies);
  ASSERT_TRUE(loaded.seed.has_value());
  EXPECT_EQ(*loaded.seed, 5u);
}

TEST(Record, JsonValidation) {
  json j = record_to_json(simulate_record(werner(0.6), cube_set(2), 3600, 5));
  json missing = j;
  missing.erase("frequencies");
  EXPECT_THROW(record_from_json(missing), ParseError);
  json out_of_range = j;
  out_of_range["frequencies"][0] = 1.25;
  EXPECT_THROW(record_from_json(out_of_range), ParseError);
}

TEST(Record, CsvImport) {
  std::istringstream in("# comment\n0.5\n0.25\n\n0.75\n");
  const MeasurementRecord record = record_from_csv(in, "custom", 100.0);
  EXPECT_EQ(record.count, 3);
  EXPECT_EQ(record.frequencies, (std::vector<double>{0.5, 0.25, 0.75}));
  EXPECT_FALSE(record.seed.has_value());

  std::istringstream bad("0.5\nnot-a-number\n");
  EXPECT_THROW(record_from_csv(bad, "custom", 100.0), ParseError);
}

TEST(NoiselessRecord, MatchesTrueProbabilities) {
  const DensityMatrix rho = werner(0.8);
  const MeasurementSet set = tetrahedron_set(2);
  const MeasurementRecord record = noiseless_record(rho, set);
  const auto probs = true_probabilities(rho, set);
  EXPECT_EQ(record.frequencies, probs.values);
  EXPECT_FALSE(record.seed.has_value());
}
