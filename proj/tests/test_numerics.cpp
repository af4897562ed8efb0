#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "fixtures.hpp"
#include "sasadmm/numerics.hpp"

using namespace sasadmm;

TEST(WeightedNorm, IdentityMetric) {
  Vector x(2);
  x << 1, 2;
  EXPECT_DOUBLE_EQ(weighted_norm_sq(x, DenseMatrix::Identity(2, 2)), 5.0);
}

TEST(WeightedNorm, SingularMetricAnnihilatesOnes) {
  Vector x(2);
  x << 1, 1;
  DenseMatrix G(2, 2);
  G << 1, -1, -1, 1;
  EXPECT_DOUBLE_EQ(weighted_norm_sq(x, G), 0.0);
}

TEST(WeightedNorm, ZeroVector) {
  Rng rng(3);
  const DenseMatrix G = fixtures::random_matrix(4, 4, rng);
  EXPECT_EQ(weighted_norm_sq(Vector::Zero(4), G), 0.0);
}

TEST(WeightedNorm, IndefiniteMetricGoesNegative) {
  Vector x(2);
  x << 0, 1;
  DenseMatrix G(2, 2);
  G << 1, 0, 0, -1;
  EXPECT_DOUBLE_EQ(weighted_norm_sq(x, G), -1.0);
}

TEST(WeightedNorm, DimensionMismatchThrows) {
  EXPECT_THROW(weighted_norm_sq(Vector::Zero(3), DenseMatrix::Identity(2, 2)), std::invalid_argument);
}

TEST(WeightedNorm, SymmetricPartGivesSameForm) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const DenseMatrix G = fixtures::random_matrix(5, 5, rng);
    const Vector x = fixtures::random_vector(5, rng);
    const DenseMatrix S = 0.5 * (G + G.transpose());
    EXPECT_NEAR(weighted_norm_sq(x, G), weighted_norm_sq(x, S), 1e-12 * (1 + x.squaredNorm() * G.norm()));
  }
}

TEST(WeightedNorm, DiagonalVersionMatchesDense) {
  Vector x(3), d(3);
  x << 1, -2, 3;
  d << 2, 0.5, 1;
  EXPECT_DOUBLE_EQ(weighted_norm_sq_diag(x, d), weighted_norm_sq(x, DenseMatrix(d.asDiagonal())));
}

TEST(SpectralNorm, Diagonal) {
  Rng rng(1);
  DenseMatrix M = DenseMatrix::Zero(2, 2);
  M(0, 0) = 3;
  M(1, 1) = 1;
  const auto e = spectral_norm_est(M, 1e-10, 1000, rng);
  EXPECT_NEAR(e.value, 3.0, 3e-10 * 3);
  EXPECT_TRUE(e.converged);
}

TEST(SpectralNorm, Identity) {
  Rng rng(2);
  const auto e = spectral_norm_est(DenseMatrix::Identity(6, 6), 1e-10, 1000, rng);
  EXPECT_NEAR(e.value, 1.0, 1e-9);
}

TEST(SpectralNorm, Nilpotent) {
  Rng rng(3);
  DenseMatrix M(2, 2);
  M << 0, 2, 0, 0;
  const auto e = spectral_norm_est(M, 1e-10, 1000, rng);
  EXPECT_NEAR(e.value, 2.0, 1e-9);
}

TEST(SpectralNorm, SparseAgreesWithSvd) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix M = fixtures::random_matrix(7, 4, rng);
    const double truth = Eigen::JacobiSVD<DenseMatrix>(M).singularValues()(0);
    Rng r1(trial), r2(trial);
    const auto d = spectral_norm_est(M, 1e-8, 10000, r1);
    const auto s = spectral_norm_est(fixtures::to_sparse(M), 1e-8, 10000, r2);
    EXPECT_GE(d.value, (1 - 1e-6) * truth);
    EXPECT_LE(d.value, truth * (1 + 1e-12));
    EXPECT_NEAR(d.value, s.value, 1e-10 * truth);
  }
}

TEST(SpectralNorm, DeterministicGivenSeed) {
  Rng a(9), b(9), src(5);
  const DenseMatrix M = fixtures::random_matrix(10, 10, src);
  EXPECT_EQ(spectral_norm_est(M, 1e-6, 50, a).value, spectral_norm_est(M, 1e-6, 50, b).value);
}

TEST(SpectralNorm, IterationCapFlagsNonConvergence) {
  Rng src(6), rng(7);
  const DenseMatrix M = fixtures::random_matrix(30, 30, src);
  const auto e = spectral_norm_est(M, 1e-15, 2, rng);
  EXPECT_FALSE(e.converged);
  EXPECT_GT(e.value, 0.0);
}

TEST(SpectralNorm, GramHelperMatchesEigenvalue) {
  Rng src(8);
  const DenseMatrix M = fixtures::random_matrix(6, 3, src);
  const double truth = Eigen::SelfAdjointEigenSolver<DenseMatrix>(M.transpose() * M).eigenvalues().maxCoeff();
  EXPECT_NEAR(lambda_max_gram(M), truth, 1e-6 * truth);
  EXPECT_NEAR(lambda_max_gram(fixtures::to_sparse(M)), truth, 1e-6 * truth);
}

TEST(PsdCertify, Examples) {
  EXPECT_TRUE(psd_certify(DenseMatrix::Identity(3, 3), 0.0));
  DenseMatrix D = DenseMatrix::Zero(2, 2);
  D(0, 0) = 1;
  D(1, 1) = -1;
  EXPECT_FALSE(psd_certify(D, 0.0));
  DenseMatrix S(2, 2);
  S << 1, 1, 1, 1;
  EXPECT_TRUE(psd_certify(S, 0.0));
}

TEST(PsdCertify, AsymmetricThrows) {
  DenseMatrix S(2, 2);
  S << 1, 1, 0, 1;
  EXPECT_THROW(psd_certify(S, 0.0), std::invalid_argument);
  EXPECT_THROW(psd_certify(DenseMatrix::Zero(2, 3), 0.0), std::invalid_argument);
}

TEST(PsdCertify, AgreesWithEigenSolveOnRandomMatrices) {
  Rng rng(2024);
  int disagreements = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    // Mix definite, indefinite and rank-deficient draws.
    DenseMatrix S;
    const int kind = trial % 3;
    if (kind == 0) {
      const DenseMatrix R = fixtures::random_matrix(8, 8, rng);
      S = 0.5 * (R + R.transpose());
    } else {
      const DenseMatrix R = fixtures::random_matrix(8, kind == 1 ? 8 : 5, rng);
      S = R * R.transpose();
      S = 0.5 * (S + S.transpose());
    }
    const double lmin = Eigen::SelfAdjointEigenSolver<DenseMatrix>(S).eigenvalues().minCoeff();
    const double scale = 1e-8 * (1 + S.cwiseAbs().maxCoeff());
    if (std::abs(lmin) < scale) continue;  // too close to call either way
    if (psd_certify(S, 1e-10) != (lmin >= -1e-10)) ++disagreements;
  }
  EXPECT_EQ(disagreements, 0);
}

TEST(PsdCertify, ShiftRescuesSlightlyNegative) {
  DenseMatrix S = DenseMatrix::Identity(3, 3);
  S(2, 2) = -1e-3;
  EXPECT_FALSE(psd_certify(S, 0.0));
  EXPECT_TRUE(psd_certify(S, 2e-3));
}

TEST(Rng, EngineMatchesStandardReference) {
  // The standard pins the 10000th output of a default-seeded mt19937_64.
  Rng rng(5489u);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next_u64();
  EXPECT_EQ(v, 9981545732273789042ull);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(a.uniform_index(17), b.uniform_index(17));
    EXPECT_EQ(a.normal(), b.normal());
    EXPECT_EQ(a.uniform01(), b.uniform01());
  }
}

TEST(Rng, UniformIndexInRangeAndCoversAll) {
  Rng rng(1);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto k = rng.uniform_index(7);
    ASSERT_LT(k, 7u);
    ++hits[k];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, NormalMoments) {
  Rng rng(5);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(FormatReal, RoundTripsExactly) {
  Rng rng(77);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(rng.normal(), static_cast<int>(rng.uniform_index(200)) - 100);
    EXPECT_EQ(std::stod(format_real(v)), v);
  }
  EXPECT_EQ(format_real(0.5), "0.5");
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
}

TEST(GramIdentityMultiple, DetectsScaledIdentity) {
  EXPECT_DOUBLE_EQ(gram_identity_multiple(sparse_identity(4, -1.0)), 1.0);
  EXPECT_DOUBLE_EQ(gram_identity_multiple(sparse_identity(3, 2.0)), 4.0);
  DenseMatrix M(2, 2);
  M << 1, 1, 0, 1;
  EXPECT_EQ(gram_identity_multiple(fixtures::to_sparse(M)), -1.0);
}
