#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "psdpath/matrix.hpp"

namespace psdpath {

/// Eigenvalues sorted non-ascending; eigenvector k is column k of `eigenvectors`.
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;

  double lambda_max() const { return eigenvalues.front(); }
  double lambda_min() const { return eigenvalues.back(); }
  SymMatrix reconstruct() const;
};

/// Cyclic Jacobi in extended precision. An off-diagonal entry is annihilated
/// once |a_pq| <= 1e-18 sqrt(|a_pp a_qq|); throws NonConvergence if a sweep
/// still rotates after 64 sweeps.
EigenDecomposition eig_sym(const SymMatrix& a);

std::vector<double> eigenvalues(const SymMatrix& a);

/// Rounding slack for "is this eigenvalue really negative": 1e-10 max(1, lambda_max).
double psd_tolerance(double lambda_max) noexcept;

/// V f(clamp(lambda)) V^T. Eigenvalues in [-psd_tolerance, domain_floor) are
/// clamped up to domain_floor; anything below -psd_tolerance throws
/// DomainViolation. Pass -infinity as the floor for functions defined on all of R.
SymMatrix matrix_function(const EigenDecomposition& eig, const std::function<double(double)>& f,
                          double domain_floor);
SymMatrix matrix_function(const SymMatrix& a, const std::function<double(double)>& f,
                          double domain_floor);

SymMatrix sqrt_psd(const SymMatrix& a);
SymMatrix power_psd(const SymMatrix& a, double r);
/// A^{-1/2}; throws SingularInput unless lambda_min > psd_tolerance.
SymMatrix inverse_sqrt_pd(const SymMatrix& a);
/// log A; throws SingularInput unless lambda_min > psd_tolerance.
SymMatrix log_pd(const SymMatrix& a);

/// X = W diag(sigma) V^T with sigma non-ascending, via one-sided (Hestenes)
/// Jacobi in extended precision.
/// Columns of W belonging to zero singular values are an orthonormal completion.
struct SingularValueDecomposition {
  Matrix left;
  std::vector<double> singular_values;
  Matrix right;
  std::size_t rank = 0;  // singular values above the numerical-zero threshold
};

SingularValueDecomposition svd(const Matrix& x);

/// X = U |X| with U orthogonal and |X| = (X^T X)^{1/2}.
struct PolarDecomposition {
  Matrix orthogonal;
  SymMatrix modulus;
};

/// For singular X the orthogonal factor is the SVD-completed W V^T.
PolarDecomposition polar(const Matrix& x);

/// Polar decomposition whose orthogonal factor on the null space of X is the
/// limit of polar(X + t Y) as t -> 0+. When X is invertible this equals polar(X).
PolarDecomposition polar_limit(const Matrix& x, const Matrix& direction);

/// LU with partial pivoting in extended precision; singular input gives 0.
double determinant(const Matrix& x);

double frobenius_norm(const Matrix& x) noexcept;

/// Smallest eigenvalue >= -tol max(1, lambda_max).
bool is_psd(const SymMatrix& a, double tol = 1e-10);

/// Upper-triangular S with non-negative diagonal and D = S^T S. Numerically zero
/// pivots produce zero rows, which keeps S triangular for rank-deficient D.
Matrix cholesky_upper(const SymMatrix& d);

}  // namespace psdpath
