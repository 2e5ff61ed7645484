#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "cbcc/errors.hpp"
#include "cbcc/numerics.hpp"

namespace cbcc {
namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Matrix random_spd(Eigen::Index d, RngStream& rng) {
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = 2.0 * rng.uniform() - 1.0;
  return a * a.transpose() + Matrix::Identity(d, d);
}

TEST(SpdMatrix, RejectsAsymmetric) {
  Matrix m(2, 2);
  m << 1, 0.5, 0.4, 1;
  EXPECT_THROW(SpdMatrix{m}, InvalidParameter);
}

TEST(SpdMatrix, RejectsNonSquareAndEmpty) {
  EXPECT_THROW(SpdMatrix{Matrix(2, 3)}, DimensionMismatch);
  EXPECT_THROW(SpdMatrix{Matrix(0, 0)}, InvalidParameter);
  EXPECT_THROW(SpdMatrix::identity(0), InvalidParameter);
}

TEST(Cholesky, Identity) {
  const auto f = cholesky(SpdMatrix::identity(3));
  EXPECT_EQ(f.lower(), Matrix::Identity(3, 3));
}

TEST(Cholesky, TwoByTwo) {
  Matrix a(2, 2);
  a << 4, 2, 2, 3;
  const auto f = cholesky(SpdMatrix(a));
  Matrix expected(2, 2);
  expected << 2, 0, 1, std::sqrt(2.0);
  EXPECT_LT(max_abs(f.lower() - expected), 1e-15);
  EXPECT_LT(max_abs(f.reconstruct() - a), 1e-12);
}

TEST(Cholesky, IndefiniteThrows) {
  Matrix a(2, 2);
  a << 1, 2, 2, 1;
  try {
    (void)cholesky(SpdMatrix(a));
    FAIL() << "expected NotPositiveDefinite";
  } catch (const NotPositiveDefinite& e) {
    EXPECT_EQ(e.pivot_index(), 1u);
    EXPECT_DOUBLE_EQ(e.pivot(), -3.0);
  }
}

TEST(Cholesky, TinyPivotThrows) {
  Matrix a = Matrix::Identity(2, 2);
  a(1, 1) = 1e-13;
  EXPECT_THROW((void)cholesky(SpdMatrix(a)), NotPositiveDefinite);
}

TEST(Cholesky, ReconstructsRandomSpd) {
  RngStream rng(3);
  for (Eigen::Index d : {1, 5, 20, 50}) {
    const Matrix a = random_spd(d, rng);
    const auto f = cholesky(SpdMatrix(a));
    EXPECT_LT(max_abs(f.reconstruct() - a), 1e-8) << "d=" << d;
    EXPECT_TRUE((f.lower().diagonal().array() > 0).all());
    EXPECT_LT(max_abs(f.lower().triangularView<Eigen::StrictlyUpper>().toDenseMatrix()), 1e-300);
  }
}

TEST(CholeskyFactor, FromLowerValidates) {
  Matrix upper(2, 2);
  upper << 1, 1, 0, 1;
  EXPECT_THROW(CholeskyFactor::from_lower(upper), InvalidParameter);
  Matrix zero_diag = Matrix::Identity(2, 2);
  zero_diag(1, 1) = 0.0;
  EXPECT_THROW(CholeskyFactor::from_lower(zero_diag), InvalidParameter);
  EXPECT_THROW(CholeskyFactor::from_lower(Matrix(2, 3)), DimensionMismatch);
}

TEST(CholeskyFactor, RankOneUpdateMatchesRefactorization) {
  RngStream rng(8);
  const Eigen::Index d = 12;
  Matrix a = random_spd(d, rng);
  auto f = cholesky(SpdMatrix(a));
  for (int k = 0; k < 200; ++k) {
    Vector c(d);
    for (Eigen::Index i = 0; i < d; ++i) c(i) = rng.uniform() < 0.3 ? rng.uniform() : 0.0;
    f.rank_one_update(c);
    a += c * c.transpose();
  }
  const auto fresh = cholesky(SpdMatrix(a));
  EXPECT_LT(max_abs(f.lower() - fresh.lower()), 1e-9);
  EXPECT_LT(max_abs(f.reconstruct() - a), 1e-8);
}

TEST(InverseFromFactor, IsSymmetricInverse) {
  RngStream rng(4);
  const Matrix a = random_spd(15, rng);
  const Matrix inv = inverse_from_factor(cholesky(SpdMatrix(a)));
  EXPECT_EQ(inv, inv.transpose());
  EXPECT_LT(max_abs(inv * a - Matrix::Identity(15, 15)), 1e-10);
}

TEST(ShermanMorrison, IdentityUnitVector) {
  Vector c(2);
  c << 1, 0;
  const auto out = sherman_morrison_update(SpdMatrix::identity(2), c);
  Matrix expected(2, 2);
  expected << 0.5, 0, 0, 1;
  EXPECT_LT(max_abs(out.matrix() - expected), 1e-15);
  EXPECT_EQ(out.matrix(), out.matrix().transpose());
}

TEST(ShermanMorrison, ZeroVectorIsNoop) {
  const auto out = sherman_morrison_update(SpdMatrix::identity(2), Vector::Zero(2));
  EXPECT_EQ(out.matrix(), Matrix::Identity(2, 2));
}

TEST(ShermanMorrison, DimensionMismatch) {
  EXPECT_THROW(sherman_morrison_update(SpdMatrix::identity(3), Vector::Zero(2)),
               DimensionMismatch);
}

// Oracle: Eigen's LU inverse of the directly accumulated I + sum c c^T.
TEST(ShermanMorrison, ThousandUpdatesMatchDirectInversion) {
  for (Eigen::Index d : {20, 50}) {
    RngStream rng(static_cast<std::uint64_t>(d));
    Matrix b = Matrix::Identity(d, d);
    Matrix b_inv = Matrix::Identity(d, d);
    for (int k = 0; k < 1000; ++k) {
      Vector c(d);
      for (Eigen::Index i = 0; i < d; ++i) c(i) = rng.uniform();
      b += c * c.transpose();
      sherman_morrison_update_in_place(b_inv, c);
    }
    const Matrix direct = b.partialPivLu().inverse();
    EXPECT_LT(max_abs(b_inv - direct), 1e-8) << "d=" << d;
    EXPECT_EQ(b_inv, b_inv.transpose());
    EXPECT_NO_THROW((void)cholesky(SpdMatrix(b_inv)));
  }
}

TEST(SampleMvn, ZeroScaleReturnsMeanExactly) {
  RngStream rng(1);
  Vector m(3);
  m << 0.1, -2.5, 1e300;
  EXPECT_EQ(sample_mvn(m, 0.0, CholeskyFactor::identity(3), rng), m);
  EXPECT_EQ(sample_mvn_precision(m, 0.0, CholeskyFactor::identity(3), rng), m);
}

TEST(SampleMvn, IdentityFactorReturnsNormals) {
  RngStream a(77);
  RngStream b(77);
  const Vector x = sample_mvn(Vector::Zero(2), 1.0, CholeskyFactor::identity(2), a);
  const double z1 = sample_standard_normal(b);
  const double z2 = sample_standard_normal(b);
  EXPECT_EQ(x(0), z1);
  EXPECT_EQ(x(1), z2);
}

TEST(SampleMvn, ReproducibleBitForBit) {
  Matrix a(2, 2);
  a << 2, 0.3, 0.3, 1;
  const auto f = cholesky(SpdMatrix(a));
  RngStream r1(5);
  RngStream r2(5);
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(sample_mvn(Vector::Ones(2), 1.5, f, r1), sample_mvn(Vector::Ones(2), 1.5, f, r2));
  }
}

TEST(SampleMvn, Errors) {
  RngStream rng(1);
  EXPECT_THROW(sample_mvn(Vector::Zero(3), 1.0, CholeskyFactor::identity(2), rng),
               DimensionMismatch);
  EXPECT_THROW(sample_mvn(Vector::Zero(2), -1.0, CholeskyFactor::identity(2), rng),
               InvalidParameter);
  EXPECT_THROW(sample_mvn_precision(Vector::Zero(3), 1.0, CholeskyFactor::identity(2), rng),
               DimensionMismatch);
}

Matrix empirical_covariance(const std::vector<Vector>& xs) {
  const Eigen::Index d = xs.front().size();
  Vector mean = Vector::Zero(d);
  for (const auto& x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  Matrix cov = Matrix::Zero(d, d);
  for (const auto& x : xs) cov += (x - mean) * (x - mean).transpose();
  return cov / static_cast<double>(xs.size() - 1);
}

TEST(SampleMvn, CovarianceScaledIdentity) {
  RngStream rng(2024);
  std::vector<Vector> xs;
  for (int i = 0; i < 100000; ++i) {
    xs.push_back(sample_mvn(Vector::Zero(3), 2.0, CholeskyFactor::identity(3), rng));
  }
  const Matrix target = 4.0 * Matrix::Identity(3, 3);
  const Matrix cov = empirical_covariance(xs);
  EXPECT_LT((cov - target).norm() / target.norm(), 0.05);
}

TEST(SampleMvn, PrecisionPathCovariance) {
  Matrix b(3, 3);
  b << 3, 1, 0.5, 1, 2, 0.2, 0.5, 0.2, 1.5;
  const double v = 1.7;
  RngStream rng(99);
  const auto factor = cholesky(SpdMatrix(b));
  std::vector<Vector> xs;
  for (int i = 0; i < 100000; ++i) {
    xs.push_back(sample_mvn_precision(Vector::Zero(3), v, factor, rng));
  }
  const Matrix target = v * v * b.inverse();
  EXPECT_LT((empirical_covariance(xs) - target).norm() / target.norm(), 0.05);
}

TEST(SampleStandardNormal, Moments) {
  RngStream rng(10);
  double sum = 0;
  double sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = sample_standard_normal(rng);
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(SampleGamma, MeanEqualsShape) {
  RngStream rng(12);
  for (double shape : {0.3, 1.0, 2.5, 40.0}) {
    double sum = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += sample_gamma(shape, rng);
    EXPECT_NEAR(sum / n / shape, 1.0, 0.02) << "shape=" << shape;
  }
  EXPECT_THROW(sample_gamma(0.0, rng), InvalidParameter);
  EXPECT_THROW(sample_gamma(-1.0, rng), InvalidParameter);
}

double beta_mean(double s, double f, std::uint64_t seed, int n = 100000) {
  RngStream rng(seed);
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += sample_beta(s, f, rng);
  return sum / n;
}

TEST(SampleBeta, Means) {
  EXPECT_NEAR(beta_mean(1, 1, 1), 0.5, 0.01);
  EXPECT_NEAR(beta_mean(3, 7, 2), 0.3, 0.01);
  EXPECT_NEAR(beta_mean(50, 50, 3), 0.5, 0.01);
}

TEST(SampleBeta, StrictlyInsideUnitInterval) {
  RngStream rng(13);
  for (int i = 0; i < 20000; ++i) {
    const double x = sample_beta(0.05, 0.05, rng);
    ASSERT_GT(x, 0.0);
    ASSERT_LT(x, 1.0);
  }
}

// P(X > 0.99) for Beta(1000, 1) is 1 - 0.99^1000, about 0.99996.
TEST(SampleBeta, HeavySuccessTail) {
  RngStream rng(14);
  int above = 0;
  for (int i = 0; i < 10000; ++i) above += sample_beta(1000, 1, rng) > 0.99;
  EXPECT_GT(above / 10000.0, 0.99);
}

TEST(SampleBeta, SymmetricInDistribution) {
  RngStream a(15);
  RngStream b(16);
  double mx = 0;
  double my = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    mx += sample_beta(2.0, 5.0, a);
    my += 1.0 - sample_beta(5.0, 2.0, b);
  }
  EXPECT_NEAR(mx / n, my / n, 0.01);
}

TEST(SampleBeta, RejectsNonPositive) {
  RngStream rng(1);
  EXPECT_THROW(sample_beta(0.0, 1.0, rng), InvalidParameter);
  EXPECT_THROW(sample_beta(1.0, -2.0, rng), InvalidParameter);
  EXPECT_THROW(sample_beta(std::nan(""), 1.0, rng), InvalidParameter);
}

}  // namespace
}  // namespace cbcc
