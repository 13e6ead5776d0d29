#include "psdpath/geodesic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "psdpath/errors.hpp"
#include "psdpath/linalg.hpp"

namespace psdpath {

std::string_view to_string(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::Euclidean: return "euclidean";
    case MetricKind::Cholesky: return "cholesky";
    case MetricKind::EuclideanRoot: return "euclidean-root";
    case MetricKind::Procrustes: return "procrustes";
    case MetricKind::Riemannian: return "riemannian";
  }
  return "unknown";
}

std::optional<MetricKind> parse_metric_kind(std::string_view name) noexcept {
  for (auto kind : {MetricKind::Euclidean, MetricKind::Cholesky, MetricKind::EuclideanRoot,
                    MetricKind::Procrustes, MetricKind::Riemannian}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

namespace {

void require_psd(const SymMatrix& d, const char* what) {
  if (!is_psd(d)) throw NotPsd(std::string(what) + " is not positive semidefinite");
}

void require_pair(const SymMatrix& d1, const SymMatrix& d2) {
  if (d1.dim() != d2.dim() || d1.dim() == 0)
    throw DimensionMismatch("endpoints must be non-empty and of equal dimension");
  require_psd(d1, "first endpoint");
  require_psd(d2, "second endpoint");
}

// Generalised eigen-structure D1^{-1/2} D2 D1^{-1/2}; both endpoints must be
// strictly positive definite.
SymMatrix riemann_inner(const SymMatrix& d1, const SymMatrix& d2, SymMatrix* half_out) {
  SymMatrix inv_half;
  try {
    inv_half = inverse_sqrt_pd(d1);
    (void)inverse_sqrt_pd(d2);
  } catch (const SingularInput&) {
    throw SingularInput(
        "riemannian metric: singular endpoint (rank-deficient tensors are infinitely far apart)");
  }
  if (half_out) *half_out = sqrt_psd(d1);
  return SymMatrix(inv_half * d2 * inv_half);
}

}  // namespace

void GeodesicSpec::validate() const { require_pair(endpoint_a, endpoint_b); }

Matrix unscaled_polar_factor(const SymMatrix& d1, const SymMatrix& d2) {
  require_pair(d1, d2);
  const SymMatrix q1 = sqrt_psd(d1);
  const SymMatrix q2 = sqrt_psd(d2);
  return polar_limit(q2 * q1, q1 + q2).orthogonal;
}

double distance(MetricKind kind, const SymMatrix& d1, const SymMatrix& d2) {
  require_pair(d1, d2);
  switch (kind) {
    case MetricKind::Euclidean:
      return frobenius_norm(d1 - d2);
    case MetricKind::Cholesky:
      return frobenius_norm(cholesky_upper(d1) - cholesky_upper(d2));
    case MetricKind::EuclideanRoot:
      return frobenius_norm(sqrt_psd(d1) - sqrt_psd(d2));
    case MetricKind::Procrustes: {
      // Closed form: the minimising rotation is U^T, so no search is needed.
      const SymMatrix q1 = sqrt_psd(d1);
      const SymMatrix q2 = sqrt_psd(d2);
      const Matrix u = polar_limit(q2 * q1, q1 + q2).orthogonal;
      return frobenius_norm(q1 - u.transpose() * q2);
    }
    case MetricKind::Riemannian: {
      double s = 0.0;
      for (double mu : eigenvalues(riemann_inner(d1, d2, nullptr))) {
        const double l = std::log(mu);
        s += l * l;
      }
      return std::sqrt(s);
    }
  }
  throw std::invalid_argument("distance: unknown metric");
}

Geodesic::Geodesic(GeodesicSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const SymMatrix& d1 = spec_.endpoint_a;
  const SymMatrix& d2 = spec_.endpoint_b;
  switch (spec_.metric) {
    case MetricKind::Euclidean:
      break;
    case MetricKind::Cholesky:
      factor_a_ = cholesky_upper(d1);
      factor_b_ = cholesky_upper(d2);
      break;
    case MetricKind::EuclideanRoot:
      factor_a_ = sqrt_psd(d1);
      factor_b_ = sqrt_psd(d2);
      break;
    case MetricKind::Procrustes: {
      const SymMatrix q1 = sqrt_psd(d1);
      const SymMatrix q2 = sqrt_psd(d2);
      // U comes from the unscaled product for every p, including p outside [0, 1].
      const Matrix u = polar_limit(q2 * q1, q1 + q2).orthogonal;
      factor_a_ = q1;
      factor_b_ = u.transpose() * q2;
      break;
    }
    case MetricKind::Riemannian:
      riemann_inner_ = eig_sym(riemann_inner(d1, d2, &riemann_half_));
      break;
  }
}

SymMatrix Geodesic::at(double p) const {
  if (!std::isfinite(p)) throw std::invalid_argument("path parameter must be finite");
  switch (spec_.metric) {
    case MetricKind::Euclidean: {
      SymMatrix d = p * spec_.endpoint_a + (1.0 - p) * spec_.endpoint_b;
      if (!is_psd(d)) {
        throw NotPsd("euclidean path leaves the PSD cone at p = " + std::to_string(p));
      }
      return d;
    }
    case MetricKind::Cholesky:
    case MetricKind::EuclideanRoot:
    case MetricKind::Procrustes:
      return gram(p * factor_a_ + (1.0 - p) * factor_b_);
    case MetricKind::Riemannian: {
      const SymMatrix power = matrix_function(
          riemann_inner_, [p](double x) { return std::pow(x, 1.0 - p); }, 0.0);
      return SymMatrix(riemann_half_ * power * riemann_half_);
    }
  }
  throw std::invalid_argument("path_point: unknown metric");
}

SymMatrix path_point(const GeodesicSpec& spec, double p) { return Geodesic(spec).at(p); }

double det_root(const SymMatrix& d) {
  const double det = std::max(0.0, determinant(d));
  return std::pow(det, 1.0 / static_cast<double>(d.dim()));
}

std::vector<SwellingSample> swelling_profile(const GeodesicSpec& spec, std::size_t steps) {
  if (steps < 2) throw std::invalid_argument("swelling_profile: steps must be >= 2");
  const Geodesic path(spec);
  std::vector<SwellingSample> out;
  out.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double p = static_cast<double>(k) / static_cast<double>(steps - 1);
    out.push_back({p, det_root(path.at(p))});
  }
  return out;
}

}  // namespace psdpath
