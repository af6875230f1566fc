#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "test_util.hpp"
#include "tomo/tomo.hpp"

using namespace tomo;
using tomo_test::close;
using tomo_test::matrices_close;

namespace {

Eigen::Vector3d random_direction(Rng& rng) {
  Eigen::Vector3d r;
  do {
    r << rng.gaussian(), rng.gaussian(), rng.gaussian();
  } while (r.norm() < 1e-6);
  return r / r.norm();
}

void expect_projector_invariants(const MeasurementSet& set) {
  const double d = set.dim();
  for (int n = 0; n < set.count(); ++n) {
    const ComplexMatrix& p = set.projector(n);
    EXPECT_LE(hermiticity_defect(p), 1e-10);
    EXPECT_LE((p * p - p).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(std::abs(p.trace() - 1.0), 1e-10);
    EXPECT_TRUE(close(set.psi(n).squaredNorm(), (d - 1.0) / d, 1e-10));
  }
}

}  // namespace

TEST(CubeSet, SingleQubit) {
  const MeasurementSet set = cube_set(1);
  EXPECT_EQ(set.count(), 6);
  EXPECT_EQ(set.dim(), 2);
  EXPECT_TRUE(matrices_close(set.gram().cast<Complex>(),
                             ComplexMatrix::Identity(3, 3), 1e-12));
  // pinned per-qubit order: +x, -x, +y, -y, +z, -z
  EXPECT_TRUE(matrices_close(set.projector(0),
                             (pauli(0) + pauli(1)) / 2.0, 1e-15));
  EXPECT_TRUE(matrices_close(set.projector(3),
                             (pauli(0) - pauli(2)) / 2.0, 1e-15));
  EXPECT_TRUE(matrices_close(set.projector(4),
                             (pauli(0) + pauli(3)) / 2.0, 1e-15));
  expect_projector_invariants(set);
}

TEST(CubeSet, TwoQubitGramSpectrum) {
  const MeasurementSet set = cube_set(2);
  EXPECT_EQ(set.count(), 36);
  const auto check = verify_spectrum(set, {{3.0, 6}, {1.0, 9}});
  EXPECT_TRUE(check.ok);
  // diagonal Gram
  RealMatrix off = set.gram();
  off.diagonal().setZero();
  EXPECT_LE(off.cwiseAbs().maxCoeff(), 1e-10);
  expect_projector_invariants(set);
}

TEST(TetrahedronSet, SingleQubitGram) {
  const MeasurementSet set = tetrahedron_set(1);
  EXPECT_EQ(set.count(), 4);
  EXPECT_TRUE(matrices_close(set.gram().cast<Complex>(),
                             (2.0 / 3.0) * ComplexMatrix::Identity(3, 3), 1e-12));
  expect_projector_invariants(set);
}

TEST(TetrahedronSet, TwoQubitGramSpectrum) {
  const MeasurementSet set = tetrahedron_set(2);
  EXPECT_EQ(set.count(), 16);
  const auto check = verify_spectrum(set, {{4.0 / 3.0, 6}, {4.0 / 9.0, 9}});
  EXPECT_TRUE(check.ok);
  expect_projector_invariants(set);
}

TEST(MubSet, TwoQubitGramIsIdentity) {
  const MeasurementSet set = mub_set(2);
  EXPECT_EQ(set.count(), 20);
  EXPECT_TRUE(matrices_close(set.gram().cast<Complex>(),
                             ComplexMatrix::Identity(15, 15), 1e-10));
  EXPECT_TRUE(verify_spectrum(set, {{1.0, 15}}).ok);
  expect_projector_invariants(set);
}

TEST(MubSet, UnbiasednessAcrossBases) {
  const MeasurementSet set = mub_set(2);
  // 5 bases of 4 projectors each: orthogonal within a basis, overlap 1/4 across
  for (int a = 0; a < set.count(); ++a) {
    for (int b = 0; b < a; ++b) {
      const double overlap =
          hs_inner(set.projector(a), set.projector(b)).real();
      if (a / 4 == b / 4) {
        EXPECT_LE(std::abs(overlap), 1e-10);
      } else {
        EXPECT_TRUE(close(overlap, 0.25, 1e-10));
      }
    }
  }
}

TEST(MubSet, UnsupportedSizes) {
  EXPECT_THROW(mub_set(3), Unsupported);
  EXPECT_THROW(mub_set(0), Unsupported);
}

TEST(Bounds, PinnedCoefficients) {
  const std::int64_t n = 36000;
  EXPECT_TRUE(close(mse_upper_bound(cube_set(2), n) * n, 99.0, 1e-9));
  EXPECT_TRUE(close(mse_upper_bound(tetrahedron_set(2), n) * n, 99.0, 1e-9));
  EXPECT_TRUE(close(mse_upper_bound(mub_set(2), n) * n, 75.0, 1e-9));
  EXPECT_TRUE(close(mse_upper_bound(cube_set(1), n) * n, 4.5, 1e-9));
  EXPECT_TRUE(close(mse_upper_bound(mub_set(1), n) * n, 4.5, 1e-9));
}

TEST(Bounds, OptimalValues) {
  const std::int64_t n = 1000;
  EXPECT_TRUE(close(optimal_bound_global(4, n) * n, 75.0, 1e-12));
  EXPECT_TRUE(close(optimal_bound_global(2, n) * n, 4.5, 1e-12));
  EXPECT_TRUE(close(optimal_bound_local_2qubit(n) * n, 99.0, 1e-12));
  EXPECT_TRUE(close(optimal_bound_local_2qubit(n),
                    mse_upper_bound(cube_set(2), n), 1e-12 / n));
  EXPECT_TRUE(close(optimal_bound_local_2qubit(n),
                    mse_upper_bound(tetrahedron_set(2), n), 1e-12 / n));
  // global optimum lower-bounds every constructed two-qubit set
  for (const auto& set : {cube_set(2), tetrahedron_set(2), mub_set(2)}) {
    EXPECT_LE(optimal_bound_global(4, n), mse_upper_bound(set, n) + 1e-15);
  }
}

TEST(Bounds, RandomLocalSetsDominateLocalOptimum) {
  Rng rng(41);
  const std::int64_t n = 10000;
  const double local = optimal_bound_local_2qubit(n);
  const double global = optimal_bound_global(4, n);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 16 + static_cast<int>(rng.uniform() * 17);
    std::vector<ComplexMatrix> projectors;
    projectors.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      const ComplexMatrix p1 = detail::bloch_projector(random_direction(rng));
      const ComplexMatrix p2 = detail::bloch_projector(random_direction(rng));
      projectors.push_back(kron(p1, p2));
    }
    const MeasurementSet set =
        MeasurementSet::from_projectors("random_local", std::move(projectors));
    const double bound = mse_upper_bound(set, n);
    EXPECT_GE(bound, local - 1e-9);
    EXPECT_GE(bound, global - 1e-9);
  }
}

TEST(Bounds, SingularGramRejected) {
  // three directions span only two Bloch axes: not informationally complete
  std::vector<ComplexMatrix> projectors = {
      (pauli(0) + pauli(3)) / 2.0, (pauli(0) - pauli(3)) / 2.0,
      (pauli(0) + pauli(1)) / 2.0};
  EXPECT_THROW(MeasurementSet::from_projectors("incomplete", projectors),
               SingularGram);
}

TEST(VerifySpectrum, ReportsResiduals) {
  const auto good = verify_spectrum(cube_set(1), {{1.0, 3}});
  EXPECT_TRUE(good.ok);
  for (double r : good.residuals) EXPECT_LE(r, 1e-9);

  const auto bad = verify_spectrum(cube_set(1), {{2.0, 3}});
  EXPECT_FALSE(bad.ok);
  EXPECT_TRUE(close(bad.residuals.front(), 1.0, 1e-9));

  const auto wrong_size = verify_spectrum(cube_set(1), {{1.0, 2}});
  EXPECT_FALSE(wrong_size.ok);
}

TEST(MeasurementSet, GramMatchesFeatureOuterProducts) {
  for (const auto& set : {cube_set(2), tetrahedron_set(2), mub_set(2)}) {
    RealMatrix recomputed = RealMatrix::Zero(set.gram().rows(), set.gram().cols());
    for (int n = 0; n < set.count(); ++n) {
      const RealVector psi = set.psi(n);
      recomputed += psi * psi.transpose();
    }
    EXPECT_LE((recomputed - set.gram()).cwiseAbs().maxCoeff(), 1e-10);
    const double d = set.dim();
    EXPECT_TRUE(close(set.gram().trace(), set.count() * (d - 1.0) / d, 1e-9));
    EXPECT_GT(set.smallest_gram_eigenvalue(), 0.0);
    EXPECT_TRUE(matrices_close(
        (set.gram() * set.gram_inverse()).cast<Complex>(),
        ComplexMatrix::Identity(set.gram().rows(), set.gram().cols()), 1e-8));
  }
}

TEST(MeasurementSet, FactorizedFeaturesMatchTraceRoute) {
  for (const auto& set : {cube_set(1), cube_set(2), tetrahedron_set(2)}) {
    const MeasurementSet rebuilt =
        MeasurementSet::from_projectors(set.label(), set.projectors());
    EXPECT_LE((rebuilt.design() - set.design()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(MeasurementSet, JsonRoundTripWithChecksum) {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "tomo_set_roundtrip.json";
  for (const auto& set : {cube_set(2), mub_set(2)}) {
    write_text_file(path.string(), set_to_json(set).dump());
    const MeasurementSet loaded = set_from_json(load_json_file(path.string()));
    EXPECT_EQ(loaded.label(), set.label());
    EXPECT_EQ(loaded.count(), set.count());
    EXPECT_LE((loaded.design() - set.design()).cwiseAbs().maxCoeff(), 1e-10);
  }
  fs::remove(path);
}

TEST(MeasurementSet, CorruptedJsonRejected) {
  json j = set_to_json(cube_set(1));
  json tampered = j;
  tampered["projectors"][0]["re"][0][0] = 0.51;
  EXPECT_THROW(set_from_json(tampered), ChecksumMismatch);

  json bad_checksum = j;
  bad_checksum["checksum"] = "0000000000000000";
  EXPECT_THROW(set_from_json(bad_checksum), ChecksumMismatch);

  json missing = j;
  missing.erase("projectors");
  EXPECT_THROW(set_from_json(missing), ParseError);
}

TEST(MeasurementSet, DimensionLimit) {
  EXPECT_THROW(cube_set(7), DimensionTooLarge);
  EXPECT_THROW(tetrahedron_set(0), OutOfRange);
}
