#pragma once

#include <vector>

#include "psdpath/matrix.hpp"

namespace psdpath {

/// Controls the limiting procedure for rank-deficient inputs.
///
/// An argument counts as singular when lambda_min <= regularisation_eps *
/// lambda_max. The eigenvalues of a singular argument below that threshold are
/// set to zero and it is never inverted. When both are singular, the arguments are
/// rescaled to equal lambda_max (A#B is unchanged by A -> cA, B -> B/c), and
/// the mean is evaluated as (A + eI)#(B + eI) for every e in eps_ladder times
/// that common lambda_max. The rungs are extrapolated to e -> 0 with a
/// polynomial in sqrt(e).
struct GeoMeanConfig {
  double regularisation_eps = 1e-13;
  std::vector<double> eps_ladder{1e-10, 1e-12, 1e-14};

  /// Throws std::invalid_argument unless the ladder is non-empty, strictly
  /// decreasing and positive.
  void validate() const;
};

struct GeoMeanResult {
  SymMatrix value;
  bool regularised = false;
  /// Frobenius gap between the last two ladder rungs (0 when not regularised).
  double rung_gap = 0.0;
  /// Frobenius distance between the last rung and the extrapolated value.
  double accuracy_estimate = 0.0;
};

GeoMeanResult geometric_mean_detailed(const SymMatrix& a, const SymMatrix& b,
                                      const GeoMeanConfig& cfg = {});

/// A#B. Throws NotPsd if either argument fails is_psd.
SymMatrix geometric_mean(const SymMatrix& a, const SymMatrix& b, const GeoMeanConfig& cfg = {});

/// A^r # B^r computed from the eigendecompositions of A and B, so the powers
/// are never rounded into matrix entries. Singularity is judged on A and B.
SymMatrix geometric_mean_of_powers(const SymMatrix& a, const SymMatrix& b, double r,
                                   const GeoMeanConfig& cfg = {});

/// A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2} exactly as written, with no
/// argument swap and no regularisation. Throws SingularInput for singular A.
SymMatrix geometric_mean_direct(const SymMatrix& a, const SymMatrix& b);

/// sqrt(A) sqrt(B); not symmetric in general.
Matrix naive_geometric_mean(const SymMatrix& a, const SymMatrix& b);

/// Smallest eigenvalue of the 2n x 2n block matrix [[A, X], [X, B]].
double block_min_eigenvalue(const SymMatrix& a, const SymMatrix& b, const SymMatrix& x);

/// True iff [[A, X], [X, B]] is PSD within tol (relative to max(1, lambda_max)).
bool check_block_maximality(const SymMatrix& a, const SymMatrix& b, const SymMatrix& x,
                            double tol);

/// lambda_max(A^r # B^r) <= 1 + tol, given the hypothesis lambda_max(A#B) <= 1 + tol.
/// Throws HypothesisViolated when the hypothesis fails; r must be >= 1.
bool check_hiai_power(const SymMatrix& a, const SymMatrix& b, double r, double tol);

}  // namespace psdpath
