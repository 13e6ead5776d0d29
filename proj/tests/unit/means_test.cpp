#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "psdpath/ensemble.hpp"
#include "psdpath/errors.hpp"
#include "psdpath/linalg.hpp"
#include "psdpath/means.hpp"
#include "support/test_helpers.hpp"

namespace psdpath {
namespace {

using testing::matrices_near;
using testing::rows;
using testing::sym_rows;

SymMatrix random_spd(Rng& rng, std::size_t n) {
  return gram(gaussian_matrix(rng, n)) + 0.05 * SymMatrix::identity(n);
}

SymMatrix diag(std::vector<double> d) { return SymMatrix::diagonal(d); }

TEST(GeometricMean, KnownTwoByTwo) {
  const SymMatrix g = geometric_mean(sym_rows({{2, 1}, {1, 1}}), diag({1, 2}));
  EXPECT_TRUE(matrices_near(g,
                            rows({{1.3683056745854403803, 0.50544946512442356216},
                                  {0.50544946512442356216, 1.2202629537976100741}}),
                            1e-15));
  EXPECT_NEAR(determinant(g), std::sqrt(2.0), 1e-15);
}

TEST(GeometricMean, KnownThreeByThree) {
  const SymMatrix a = sym_rows({{3, 1, 0}, {1, 2, 0.5}, {0, 0.5, 1}});
  const SymMatrix b = sym_rows({{1, 0.2, 0.1}, {0.2, 2, 0.3}, {0.1, 0.3, 4}});
  EXPECT_TRUE(matrices_near(
      geometric_mean(a, b),
      rows({{1.72650463999786429494, 0.498717506794844416093, 0.0262392304478510382548},
            {0.498717506794844416093, 1.94991486849446400678, 0.451645636469762634215},
            {0.0262392304478510382548, 0.451645636469762634215, 1.94939487540356101587}}),
      1e-14));
}

TEST(GeometricMean, CommutingInputsMultiplyEntrywise) {
  EXPECT_TRUE(matrices_near(geometric_mean(diag({4, 9}), diag({1, 4})), diag({2, 6}), 1e-15));
}

TEST(GeometricMean, AlgebraicIdentities) {
  Rng rng(31);
  for (std::size_t n = 2; n <= 6; ++n) {
    for (int t = 0; t < 10; ++t) {
      const SymMatrix a = random_spd(rng, n);
      const SymMatrix b = random_spd(rng, n);
      const SymMatrix g = geometric_mean(a, b);
      const double tol = 1e-10 * (1.0 + frobenius_norm(g));
      EXPECT_TRUE(matrices_near(g, geometric_mean(b, a), tol)) << "symmetry";
      EXPECT_TRUE(matrices_near(geometric_mean(a, a), a, 1e-12 * frobenius_norm(a))) << "idempotence";
      EXPECT_TRUE(matrices_near(geometric_mean(a, SymMatrix::identity(n)), sqrt_psd(a), tol))
          << "mean with identity";
      // Riccati: G A^{-1} G = B.
      const SymMatrix a_inv_half = inverse_sqrt_pd(a);
      const Matrix riccati = g * a_inv_half * a_inv_half * g;
      EXPECT_TRUE(matrices_near(riccati, b, 1e-8 * (1.0 + frobenius_norm(b)))) << "Riccati";
      // Congruence: (X A X^T) # (X B X^T) = X (A#B) X^T.
      const Matrix x = gaussian_matrix(rng, n) + Matrix::identity(n);
      const SymMatrix lhs = geometric_mean(SymMatrix(x * a * x.transpose()),
                                           SymMatrix(x * b * x.transpose()));
      const Matrix rhs = x * g * x.transpose();
      EXPECT_TRUE(matrices_near(lhs, rhs, 1e-8 * (1.0 + frobenius_norm(rhs)))) << "congruence";
    }
  }
}

TEST(GeometricMean, ScalingIdentity) {
  Rng rng(37);
  const SymMatrix a = random_spd(rng, 4);
  const SymMatrix b = random_spd(rng, 4);
  const SymMatrix g = geometric_mean(a, b);
  EXPECT_TRUE(matrices_near(geometric_mean(3.0 * a, 0.5 * b), std::sqrt(1.5) * g,
                            1e-12 * frobenius_norm(g)));
}

TEST(GeometricMean, SingularCommutingPair) {
  const auto r = geometric_mean_detailed(diag({1, 0}), diag({4, 0}));
  EXPECT_TRUE(r.regularised);
  EXPECT_TRUE(matrices_near(r.value, diag({2, 0}), 1e-12));
}

TEST(GeometricMean, TransversalRanksGiveZero) {
  const SymMatrix g = geometric_mean(diag({1, 0}), sym_rows({{1, 1}, {1, 1}}));
  EXPECT_TRUE(matrices_near(g, Matrix(2), 1e-6));
}

TEST(GeometricMean, OneSingularArgumentNeedsNoLadder) {
  const SymMatrix b = sym_rows({{1, 1}, {1, 1}});
  const auto r = geometric_mean_detailed(SymMatrix::identity(2), b);
  EXPECT_FALSE(r.regularised);
  EXPECT_TRUE(matrices_near(r.value, sqrt_psd(b), 1e-14));
}

TEST(GeometricMean, ResultIsPsd) {
  Rng rng(41);
  EnsembleSpec spec;
  spec.dim = 5;
  spec.rank_mode = RankMode::Mixed;
  for (std::uint64_t i = 0; i < 40; ++i) {
    const SymMatrix g = geometric_mean(draw_psd(spec, i, 0), draw_psd(spec, i, 1));
    EXPECT_GE(eig_sym(g).lambda_min(), -1e-12 * (1.0 + eig_sym(g).lambda_max()));
  }
}

TEST(GeometricMean, RejectsInvalidInput) {
  EXPECT_THROW(geometric_mean(diag({1, -1}), diag({1, 1})), NotPsd);
  EXPECT_THROW(geometric_mean(diag({1, 1}), diag({1, 1, 1})), DimensionMismatch);
}

TEST(GeometricMean, ConfigValidation) {
  GeoMeanConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.eps_ladder = {};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.eps_ladder = {1e-8, 1e-6};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.eps_ladder = {1e-6, -1e-8};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = GeoMeanConfig{};
  cfg.regularisation_eps = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(GeometricMeanDirect, MatchesMeanAndRejectsSingularFirstArgument) {
  const SymMatrix a = sym_rows({{2, 1}, {1, 1}});
  const SymMatrix b = diag({1, 2});
  EXPECT_TRUE(matrices_near(geometric_mean_direct(a, b), geometric_mean(a, b), 1e-14));
  EXPECT_THROW(geometric_mean_direct(diag({1, 0}), b), SingularInput);
}

TEST(NaiveMean, KnownProduct) {
  EXPECT_TRUE(matrices_near(naive_geometric_mean(sym_rows({{2, 1}, {1, 1}}), diag({1, 2})),
                            rows({{1.3416407864998738178, 0.6324555320336758664},
                                  {0.44721359549995793928, 1.2649110640673517328}}),
                            1e-15));
}

TEST(BlockMaximality, MeanIsTheExtremeBlock) {
  Rng rng(43);
  const SymMatrix a = random_spd(rng, 3);
  const SymMatrix b = random_spd(rng, 3);
  const SymMatrix g = geometric_mean(a, b);
  EXPECT_TRUE(check_block_maximality(a, b, g, 1e-10));
  EXPECT_GE(block_min_eigenvalue(a, b, g), -1e-12);
  const SymMatrix bumped = g + 0.01 * SymMatrix::identity(3);
  EXPECT_FALSE(check_block_maximality(a, b, bumped, 1e-10));
}

TEST(Hiai, PowersStayBelowOne) {
  Rng rng(47);
  const SymMatrix a0 = random_spd(rng, 3);
  const SymMatrix b0 = random_spd(rng, 3);
  const double top = eig_sym(geometric_mean(a0, b0)).lambda_max();
  const SymMatrix a = (1.0 / top) * a0;
  const SymMatrix b = (1.0 / top) * b0;
  EXPECT_TRUE(check_hiai_power(a, b, 2.0, 1e-9));
  EXPECT_TRUE(check_hiai_power(a, b, 3.0, 1e-9));
  EXPECT_THROW(check_hiai_power(2.0 * a, 2.0 * b, 2.0, 1e-9), HypothesisViolated);
  EXPECT_THROW(check_hiai_power(a, b, 0.5, 1e-9), std::invalid_argument);
}

TEST(MeanOfPowers, AgreesWithPoweredArguments) {
  Rng rng(53);
  const SymMatrix a = random_spd(rng, 3);
  const SymMatrix b = random_spd(rng, 3);
  EXPECT_TRUE(matrices_near(geometric_mean_of_powers(a, b, 1.0), geometric_mean(a, b), 1e-13));
  const SymMatrix expected = geometric_mean(SymMatrix(a * a), SymMatrix(b * b));
  EXPECT_TRUE(matrices_near(geometric_mean_of_powers(a, b, 2.0), expected,
                            1e-10 * frobenius_norm(expected)));
  EXPECT_THROW(geometric_mean_of_powers(a, b, 0.0), std::invalid_argument);
}

}  // namespace
}  // namespace psdpath
