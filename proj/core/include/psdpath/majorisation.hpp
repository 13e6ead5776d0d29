#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "psdpath/matrix.hpp"

namespace psdpath {

using RealVector = std::vector<double>;

struct MajorisationVerdict {
  bool relation_holds = false;
  /// Minimum normalised slack over k; negative means violated.
  double worst_margin = 0.0;
  /// First violating k (1-based), if any.
  std::optional<std::size_t> violating_k;
};

inline constexpr double kMajorisationTolerance = 1e-9;

RealVector sort_desc(RealVector x);

/// y <_w x: every top-k partial sum of y is dominated by that of x. The slack
/// at k is (sum x - sum y) / (1 + |sum x|).
MajorisationVerdict weakly_majorises(std::span<const double> x, std::span<const double> y,
                                     double tol = kMajorisationTolerance);

/// y < x: weak majorisation plus equal totals.
MajorisationVerdict majorises(std::span<const double> x, std::span<const double> y,
                              double tol = kMajorisationTolerance);

/// y <_log x (weak = false) or y <_{w,log} x (weak = true) on non-negative
/// vectors. With all entries positive the slack is the raw log-space
/// difference of partial sums; if any entry is zero, partial products are
/// compared directly, relative to the running product of max(x_i, y_i).
MajorisationVerdict log_majorises(std::span<const double> x, std::span<const double> y,
                                  double tol = kMajorisationTolerance, bool weak = false);

/// Phi(x) = sum_i log(1 + exp(x_i)), evaluated without overflow.
double phi_isotone(std::span<const double> x);

/// dPhi/dx_i = 1 / (1 + exp(-x_i)).
RealVector phi_gradient(std::span<const double> x);

/// k-th compound: the C(n,k) x C(n,k) matrix of k x k minors, rows and columns
/// indexed by lexicographically ordered index subsets.
Matrix compound_matrix(const Matrix& a, std::size_t k);

/// Index subsets of {0..n-1} of size k in lexicographic order.
std::vector<std::vector<std::size_t>> index_subsets(std::size_t n, std::size_t k);

}  // namespace psdpath
