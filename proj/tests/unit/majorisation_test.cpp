#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "psdpath/ensemble.hpp"
#include "psdpath/errors.hpp"
#include "psdpath/linalg.hpp"
#include "psdpath/majorisation.hpp"
#include "support/test_helpers.hpp"

namespace psdpath {
namespace {

using testing::matrices_near;
using testing::rows;

TEST(SortDesc, Orders) {
  EXPECT_EQ(sort_desc({1.0, 3.0, 2.0}), (RealVector{3.0, 2.0, 1.0}));
}

TEST(Majorisation, UniformVectorIsMajorised) {
  const RealVector x{3.0, 0.0, 0.0};
  const RealVector y{1.0, 1.0, 1.0};
  EXPECT_TRUE(majorises(x, y).relation_holds);
  EXPECT_FALSE(majorises(y, x).relation_holds);
  EXPECT_EQ(majorises(y, x).violating_k, 1u);
}

TEST(Majorisation, WeakDropsTheTotal) {
  const RealVector x{3.0, 1.0};
  const RealVector y{2.0, 1.0};
  EXPECT_TRUE(weakly_majorises(x, y).relation_holds);
  EXPECT_FALSE(majorises(x, y).relation_holds);
}

TEST(Majorisation, OrderOfEntriesIsIrrelevant) {
  const RealVector x{0.0, 3.0, 0.0};
  const RealVector y{1.0, 1.0, 1.0};
  EXPECT_TRUE(majorises(x, y).relation_holds);
}

TEST(Majorisation, LengthMismatch) {
  const RealVector x{1.0};
  const RealVector y{1.0, 2.0};
  EXPECT_THROW(majorises(x, y), LengthMismatch);
  EXPECT_THROW(log_majorises(x, y), LengthMismatch);
}

TEST(LogMajorisation, PositiveEntries) {
  const RealVector x{8.0, 1.0};
  const RealVector y{4.0, 2.0};
  EXPECT_TRUE(log_majorises(x, y).relation_holds);
  EXPECT_FALSE(log_majorises(y, x).relation_holds);
  const RealVector z{4.0, 1.0};
  EXPECT_FALSE(log_majorises(x, z).relation_holds);
  EXPECT_TRUE(log_majorises(x, z, kMajorisationTolerance, true).relation_holds);
}

TEST(LogMajorisation, ZeroEntriesUseProducts) {
  const RealVector x{4.0, 0.0};
  const RealVector y{2.0, 0.0};
  EXPECT_TRUE(log_majorises(x, y).relation_holds);
  EXPECT_FALSE(log_majorises(y, x).relation_holds);
}

TEST(LogMajorisation, RejectsNegativeEntries) {
  const RealVector x{1.0, -1.0};
  const RealVector y{1.0, 1.0};
  EXPECT_THROW(log_majorises(x, y), NegativeEntry);
}

TEST(Phi, KnownValueAndGradient) {
  const RealVector x{0.0, 1.0, -2.0};
  EXPECT_NEAR(phi_isotone(x), 2.1333368791211406399, 1e-15);
  const RealVector g = phi_gradient(x);
  EXPECT_DOUBLE_EQ(g[0], 0.5);
  EXPECT_NEAR(g[1], 1.0 / (1.0 + std::exp(-1.0)), 1e-16);
}

TEST(Phi, LargeArgumentsDoNotOverflow) {
  const RealVector x{800.0};
  EXPECT_NEAR(phi_isotone(x), 800.0, 1e-12);
}

TEST(Phi, IsotoneOnMajorisedPairs) {
  Rng rng(61);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    RealVector x(5);
    for (double& v : x) v = normal(rng);
    // Averaging two coordinates (a T-transform) yields y majorised by x.
    RealVector y = x;
    const double mid = 0.5 * (y[1] + y[3]);
    y[1] = y[3] = mid;
    ASSERT_TRUE(majorises(x, y).relation_holds);
    EXPECT_LE(phi_isotone(y), phi_isotone(x) + 1e-12);
  }
}

TEST(IndexSubsets, LexicographicOrder) {
  const auto s = index_subsets(4, 2);
  ASSERT_EQ(s.size(), 6u);
  EXPECT_EQ(s.front(), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(s[2], (std::vector<std::size_t>{0, 3}));
  EXPECT_EQ(s.back(), (std::vector<std::size_t>{2, 3}));
  EXPECT_TRUE(index_subsets(2, 3).empty());
}

TEST(Compound, KnownSecondCompound) {
  const Matrix a = rows({{4, 1, 0}, {1, 3, 1}, {0, 1, 2}});
  EXPECT_TRUE(matrices_near(compound_matrix(a, 2), rows({{11, 4, 1}, {4, 8, 2}, {1, 2, 5}}), 1e-13));
}

TEST(Compound, ExtremeOrders) {
  const Matrix a = rows({{4, 1, 0}, {1, 3, 1}, {0, 1, 2}});
  EXPECT_TRUE(matrices_near(compound_matrix(a, 1), a, 0.0));
  const Matrix top = compound_matrix(a, 3);
  ASSERT_EQ(top.dim(), 1u);
  EXPECT_NEAR(top(0, 0), determinant(a), 1e-13);
  EXPECT_THROW(compound_matrix(a, 0), InvalidOrder);
  EXPECT_THROW(compound_matrix(a, 4), InvalidOrder);
}

TEST(Compound, MultiplicativeAndSpectral) {
  Rng rng(67);
  for (std::size_t n = 3; n <= 5; ++n) {
    const Matrix x = gaussian_matrix(rng, n);
    const Matrix y = gaussian_matrix(rng, n);
    const SymMatrix s = gram(gaussian_matrix(rng, n));
    const auto ev = eigenvalues(s);
    for (std::size_t k = 1; k <= n; ++k) {
      const Matrix lhs = compound_matrix(x * y, k);
      const Matrix rhs = compound_matrix(x, k) * compound_matrix(y, k);
      EXPECT_TRUE(matrices_near(lhs, rhs, 1e-11 * (1.0 + frobenius_norm(rhs))));
      double top = 1.0;
      for (std::size_t i = 0; i < k; ++i) top *= ev[i];
      EXPECT_NEAR(eig_sym(SymMatrix(compound_matrix(s, k))).lambda_max(), top, 1e-11 * top);
    }
  }
}

}  // namespace
}  // namespace psdpath
