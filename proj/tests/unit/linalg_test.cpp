#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "psdpath/ensemble.hpp"
#include "psdpath/errors.hpp"
#include "psdpath/linalg.hpp"
#include "psdpath/matrix.hpp"
#include "support/oracles.hpp"
#include "support/test_helpers.hpp"

namespace psdpath {
namespace {

using testing::is_orthogonal;
using testing::matrices_near;
using testing::rows;
using testing::sym_rows;

SymMatrix random_spd(Rng& rng, std::size_t n, double shift) {
  const Matrix g = gaussian_matrix(rng, n);
  return gram(g) + shift * SymMatrix::identity(n);
}

TEST(Matrix, RejectsWrongEntryCount) {
  EXPECT_THROW(Matrix(2, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST(Matrix, RejectsNonFiniteEntries) {
  EXPECT_THROW(Matrix(1, {std::numeric_limits<double>::quiet_NaN()}), std::invalid_argument);
  EXPECT_THROW(Matrix(1, {std::numeric_limits<double>::infinity()}), std::invalid_argument);
}

TEST(Matrix, RejectsRaggedRows) {
  EXPECT_THROW(Matrix::from_rows({{1.0, 2.0}, {3.0}}), std::invalid_argument);
}

TEST(Matrix, ArithmeticChecksDimensions) {
  EXPECT_THROW(Matrix::identity(2) + Matrix::identity(3), DimensionMismatch);
  EXPECT_THROW(Matrix::identity(2) * Matrix::identity(3), DimensionMismatch);
}

TEST(Matrix, ProductAndTranspose) {
  const Matrix a = rows({{1, 2}, {3, 4}});
  const Matrix b = rows({{0, 1}, {1, 0}});
  EXPECT_EQ(a * b, rows({{2, 1}, {4, 3}}));
  EXPECT_EQ(a.transpose(), rows({{1, 3}, {2, 4}}));
  EXPECT_DOUBLE_EQ(trace(a), 5.0);
}

TEST(SymMatrix, SymmetrisesGeneralInput) {
  const SymMatrix s(rows({{1, 2}, {4, 3}}));
  EXPECT_DOUBLE_EQ(s(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(s(1, 0), 3.0);
}

TEST(SymMatrix, GramIsTransposeTimesMatrix) {
  const Matrix m = rows({{1, 2}, {0, 3}});
  EXPECT_EQ(gram(m).matrix(), rows({{1, 2}, {2, 13}}));
}

TEST(EigSym, TridiagonalExample) {
  // Spectrum 3 + sqrt(3), 3, 3 - sqrt(3).
  const auto e = eig_sym(sym_rows({{4, 1, 0}, {1, 3, 1}, {0, 1, 2}}));
  ASSERT_EQ(e.eigenvalues.size(), 3u);
  EXPECT_NEAR(e.eigenvalues[0], 4.7320508075688772935, 1e-14);
  EXPECT_NEAR(e.eigenvalues[1], 3.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues[2], 1.2679491924311227065, 1e-14);
}

TEST(EigSym, DiagonalInputIsSorted) {
  const std::vector<double> d{1.0, 5.0, -2.0, 3.0};
  const auto e = eig_sym(SymMatrix::diagonal(d));
  EXPECT_EQ(e.eigenvalues, (std::vector<double>{5.0, 3.0, 1.0, -2.0}));
}

TEST(EigSym, ReconstructsRandomMatrices) {
  Rng rng(7);
  for (std::size_t n = 2; n <= 8; ++n) {
    for (int t = 0; t < 20; ++t) {
      const SymMatrix a(gaussian_matrix(rng, n));
      const auto e = eig_sym(a);
      EXPECT_TRUE(is_orthogonal(e.eigenvectors, 1e-14));
      EXPECT_TRUE(matrices_near(e.reconstruct(), a, 1e-13 * (1.0 + frobenius_norm(a))));
      for (std::size_t k = 1; k < n; ++k) EXPECT_GE(e.eigenvalues[k - 1], e.eigenvalues[k]);
    }
  }
}

TEST(EigSym, ResolvesGradedSpectrum) {
  const std::vector<double> d{1.0, 1e-8, 1e-16};
  Rng rng(3);
  const Matrix v = random_orthogonal(rng, 3);
  const SymMatrix a(v * Matrix::diagonal(d) * v.transpose());
  const auto ev = eigenvalues(a);
  EXPECT_NEAR(ev[0], 1.0, 1e-15);
  EXPECT_NEAR(ev[1], 1e-8, 1e-15);
}

TEST(MatrixFunction, SquareRootKnownValue) {
  const SymMatrix r = sqrt_psd(sym_rows({{2, 1}, {1, 2}}));
  EXPECT_TRUE(matrices_near(r, rows({{1.3660254037844386468, 0.36602540378443864676},
                                     {0.36602540378443864676, 1.3660254037844386468}}),
                            1e-15));
}

TEST(MatrixFunction, SquareRootMatchesDenmanBeavers) {
  Rng rng(11);
  for (std::size_t n = 2; n <= 6; ++n) {
    for (int t = 0; t < 10; ++t) {
      const SymMatrix a = random_spd(rng, n, 0.1);
      const Matrix reference = oracle::denman_beavers_sqrt(a);
      EXPECT_TRUE(matrices_near(sqrt_psd(a), reference, 1e-12 * frobenius_norm(reference)));
    }
  }
}

TEST(MatrixFunction, SquareRootSquaresBack) {
  Rng rng(12);
  for (int t = 0; t < 50; ++t) {
    const SymMatrix a(gram(gaussian_matrix(rng, 4)));
    const SymMatrix r = sqrt_psd(a);
    EXPECT_GE(eig_sym(r).lambda_min(), 0.0);
    EXPECT_TRUE(matrices_near(r * r, a, 1e-13 * (1.0 + frobenius_norm(a))));
  }
}

TEST(MatrixFunction, ClampsRoundingNegatives) {
  const std::vector<double> d{1.0, -1e-14};
  const SymMatrix r = sqrt_psd(SymMatrix::diagonal(d));
  EXPECT_DOUBLE_EQ(r(1, 1), 0.0);
}

TEST(MatrixFunction, RejectsIndefiniteInput) {
  const std::vector<double> d{1.0, -0.5};
  EXPECT_THROW(sqrt_psd(SymMatrix::diagonal(d)), DomainViolation);
}

TEST(MatrixFunction, PowerAndLog) {
  const std::vector<double> d{4.0, 9.0};
  const SymMatrix a = SymMatrix::diagonal(d);
  EXPECT_NEAR(power_psd(a, 1.5)(1, 1), 27.0, 1e-13);
  EXPECT_NEAR(log_pd(a)(0, 0), std::log(4.0), 1e-15);
  EXPECT_NEAR(inverse_sqrt_pd(a)(1, 1), 1.0 / 3.0, 1e-15);
}

TEST(MatrixFunction, InverseRootsRejectSingularInput) {
  const std::vector<double> d{1.0, 0.0};
  EXPECT_THROW(inverse_sqrt_pd(SymMatrix::diagonal(d)), SingularInput);
  EXPECT_THROW(log_pd(SymMatrix::diagonal(d)), SingularInput);
}

TEST(Svd, ReconstructsAndOrders) {
  Rng rng(5);
  for (std::size_t n = 2; n <= 7; ++n) {
    for (int t = 0; t < 10; ++t) {
      const Matrix x = gaussian_matrix(rng, n);
      const auto d = svd(x);
      EXPECT_TRUE(is_orthogonal(d.left, 1e-13));
      EXPECT_TRUE(is_orthogonal(d.right, 1e-13));
      EXPECT_EQ(d.rank, n);
      for (std::size_t k = 1; k < n; ++k) EXPECT_GE(d.singular_values[k - 1], d.singular_values[k]);
      const Matrix back = d.left * Matrix::diagonal(d.singular_values) * d.right.transpose();
      EXPECT_TRUE(matrices_near(back, x, 1e-13 * (1.0 + frobenius_norm(x))));
    }
  }
}

TEST(Svd, ReportsRankOfSingularMatrix) {
  const auto d = svd(rows({{1, 2, 3}, {2, 4, 6}, {1, 0, 1}}));
  EXPECT_EQ(d.rank, 2u);
  EXPECT_TRUE(is_orthogonal(d.left, 1e-14));
}

TEST(Polar, KnownProduct) {
  // X = Q2 Q1 with Q1 = diag(1, 2), Q2 = [[2, 1], [1, 1]].
  const auto pd = polar(rows({{2, 2}, {1, 2}}));
  EXPECT_TRUE(matrices_near(pd.orthogonal,
                            rows({{0.97014250014533189408, 0.24253562503633297352},
                                  {-0.24253562503633297352, 0.97014250014533189408}}),
                            1e-15));
  EXPECT_TRUE(matrices_near(pd.modulus,
                            rows({{1.6977493752543308146, 1.4552137502179978411},
                                  {1.4552137502179978411, 2.4253562503633297352}}),
                            1e-14));
}

TEST(Polar, MatchesNewtonIteration) {
  Rng rng(17);
  for (std::size_t n = 2; n <= 6; ++n) {
    for (int t = 0; t < 10; ++t) {
      const Matrix x = gaussian_matrix(rng, n) + Matrix::identity(n) * 0.5;
      const auto pd = polar(x);
      const auto reference = oracle::newton_polar(x);
      EXPECT_TRUE(matrices_near(pd.orthogonal, reference.orthogonal, 1e-10));
      EXPECT_TRUE(matrices_near(pd.modulus, SymMatrix(reference.modulus), 1e-10 * frobenius_norm(x)));
    }
  }
}

TEST(Polar, SingularInputStillFactors) {
  const Matrix x = rows({{1, 1}, {1, 1}});
  const auto pd = polar(x);
  EXPECT_TRUE(is_orthogonal(pd.orthogonal, 1e-14));
  EXPECT_TRUE(matrices_near(pd.orthogonal * pd.modulus, x, 1e-14));
  EXPECT_GE(eig_sym(pd.modulus).lambda_min(), -1e-15);
}

TEST(Polar, LimitAgreesWithPolarWhenInvertible) {
  Rng rng(19);
  const Matrix x = gaussian_matrix(rng, 4) + Matrix::identity(4);
  const Matrix direction = Matrix::identity(4);
  EXPECT_TRUE(matrices_near(polar_limit(x, direction).orthogonal, polar(x).orthogonal, 1e-12));
}

TEST(Polar, LimitFollowsTheDirectionOnTheNullSpace) {
  // X = diag(1, 0): polar(X + tI) has U = I for every t > 0.
  const Matrix x = rows({{1, 0}, {0, 0}});
  const auto pd = polar_limit(x, Matrix::identity(2));
  EXPECT_TRUE(matrices_near(pd.orthogonal, Matrix::identity(2), 1e-14));
  // With direction -I the limit on the null space flips sign.
  const auto flipped = polar_limit(x, Matrix::identity(2) * -1.0);
  EXPECT_NEAR(flipped.orthogonal(1, 1), -1.0, 1e-14);
}

TEST(Determinant, MatchesLeibnizExpansion) {
  Rng rng(23);
  for (std::size_t n = 2; n <= 6; ++n) {
    for (int t = 0; t < 10; ++t) {
      const Matrix x = gaussian_matrix(rng, n);
      const double reference = static_cast<double>(oracle::leibniz_det(x));
      EXPECT_NEAR(determinant(x), reference, 1e-13 * (1.0 + std::abs(reference)));
    }
  }
}

TEST(Determinant, SingularMatrixGivesZero) {
  EXPECT_EQ(determinant(rows({{1, 2}, {2, 4}})), 0.0);
}

TEST(Frobenius, Norm) { EXPECT_DOUBLE_EQ(frobenius_norm(rows({{3, 0}, {0, 4}})), 5.0); }

TEST(IsPsd, ToleratesRoundingOnly) {
  const std::vector<double> ok{1.0, -1e-12};
  const std::vector<double> bad{1.0, -1e-6};
  EXPECT_TRUE(is_psd(SymMatrix::diagonal(ok)));
  EXPECT_FALSE(is_psd(SymMatrix::diagonal(bad)));
}

TEST(Cholesky, KnownFactor) {
  const Matrix s = cholesky_upper(sym_rows({{4, 2}, {2, 3}}));
  EXPECT_TRUE(matrices_near(s, rows({{2, 1}, {0, std::sqrt(2.0)}}), 1e-15));
}

TEST(Cholesky, RankDeficientGivesZeroRow) {
  const Matrix s = cholesky_upper(sym_rows({{1, 1}, {1, 1}}));
  EXPECT_NEAR(s(1, 1), 0.0, 1e-15);
  EXPECT_EQ(s(1, 0), 0.0);
  EXPECT_TRUE(matrices_near(s.transpose() * s, rows({{1, 1}, {1, 1}}), 1e-15));
}

TEST(Cholesky, RejectsIndefiniteInput) {
  EXPECT_THROW(cholesky_upper(sym_rows({{1, 2}, {2, 1}})), NotPsd);
}

TEST(Cholesky, ReconstructsRandomSpd) {
  Rng rng(29);
  for (int t = 0; t < 30; ++t) {
    const SymMatrix d = random_spd(rng, 5, 0.01);
    const Matrix s = cholesky_upper(d);
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_GE(s(i, i), 0.0);
      for (std::size_t j = 0; j < i; ++j) EXPECT_EQ(s(i, j), 0.0);
    }
    EXPECT_TRUE(matrices_near(s.transpose() * s, d, 1e-13 * frobenius_norm(d)));
  }
}

}  // namespace
}  // namespace psdpath
