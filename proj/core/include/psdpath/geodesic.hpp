#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "psdpath/linalg.hpp"
#include "psdpath/matrix.hpp"

namespace psdpath {

enum class MetricKind { Euclidean, Cholesky, EuclideanRoot, Procrustes, Riemannian };

std::string_view to_string(MetricKind kind) noexcept;
/// Accepts the names produced by to_string ("euclidean", "cholesky",
/// "euclidean-root", "procrustes", "riemannian").
std::optional<MetricKind> parse_metric_kind(std::string_view name) noexcept;

/// Endpoints of a two-point path. The path convention puts weight p on
/// endpoint_a, so D(1) = endpoint_a and D(0) = endpoint_b.
struct GeodesicSpec {
  MetricKind metric = MetricKind::EuclideanRoot;
  SymMatrix endpoint_a;
  SymMatrix endpoint_b;

  /// Throws DimensionMismatch or NotPsd.
  void validate() const;
};

double distance(MetricKind kind, const SymMatrix& d1, const SymMatrix& d2);

/// Orthogonal factor U of the polar decomposition Q2 Q1 = U |Q2 Q1|, where Qi
/// are the positive square roots. On the null space of Q2 Q1 (singular
/// endpoints) U is the limit obtained by regularising both roots towards the
/// identity, which is the completion under which the determinant ordering
/// survives the passage to rank-deficient endpoints.
Matrix unscaled_polar_factor(const SymMatrix& d1, const SymMatrix& d2);

/// A path with its factorisations precomputed, for repeated evaluation.
class Geodesic {
 public:
  explicit Geodesic(GeodesicSpec spec);

  /// The path at parameter p (any real). Square-root paths return |M(p)|^2 and
  /// stay PSD for every p; the Euclidean path throws NotPsd once it leaves
  /// the cone.
  SymMatrix at(double p) const;

  const GeodesicSpec& spec() const noexcept { return spec_; }

 private:
  GeodesicSpec spec_;
  Matrix factor_a_;  // square-root factors (Cholesky / root / Procrustes)
  Matrix factor_b_;
  SymMatrix riemann_half_;
  EigenDecomposition riemann_inner_;
};

SymMatrix path_point(const GeodesicSpec& spec, double p);

struct SwellingSample {
  double p = 0.0;
  double det_root = 0.0;  // det(D(p))^{1/dim}, the cube root for 3x3 tensors
};

/// Samples p = k / (steps - 1), k = 0 .. steps - 1.
std::vector<SwellingSample> swelling_profile(const GeodesicSpec& spec, std::size_t steps);

/// det(D)^{1/dim}, with tiny negative determinants from rounding read as 0.
double det_root(const SymMatrix& d);

}  // namespace psdpath
