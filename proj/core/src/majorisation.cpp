#include "psdpath/majorisation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "psdpath/errors.hpp"
#include "psdpath/linalg.hpp"

namespace psdpath {

namespace {

void require_equal_length(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw LengthMismatch("majorisation: lengths " + std::to_string(x.size()) + " and " +
                         std::to_string(y.size()) + " differ");
  }
}

RealVector sorted(std::span<const double> v) { return sort_desc(RealVector(v.begin(), v.end())); }

void record(MajorisationVerdict& v, double margin, std::size_t k, double tol) {
  v.worst_margin = std::min(v.worst_margin, margin);
  if (margin < -tol && !v.violating_k) v.violating_k = k;
}

MajorisationVerdict finish(MajorisationVerdict v, double tol) {
  v.relation_holds = v.worst_margin >= -tol;
  return v;
}

}  // namespace

RealVector sort_desc(RealVector x) {
  std::sort(x.begin(), x.end(), std::greater<>());
  return x;
}

MajorisationVerdict weakly_majorises(std::span<const double> x, std::span<const double> y,
                                     double tol) {
  require_equal_length(x, y);
  const RealVector xs = sorted(x);
  const RealVector ys = sorted(y);
  MajorisationVerdict v{false, xs.empty() ? 0.0 : std::numeric_limits<double>::infinity(), std::nullopt};
  double sx = 0.0, sy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    record(v, (sx - sy) / (1.0 + std::abs(sx)), k + 1, tol);
  }
  return finish(v, tol);
}

MajorisationVerdict majorises(std::span<const double> x, std::span<const double> y, double tol) {
  MajorisationVerdict v = weakly_majorises(x, y, tol);
  double sx = 0.0, sy = 0.0;
  for (double e : x) sx += e;
  for (double e : y) sy += e;
  record(v, -std::abs(sx - sy) / (1.0 + std::abs(sx)), x.size(), tol);
  return finish(v, tol);
}

MajorisationVerdict log_majorises(std::span<const double> x, std::span<const double> y,
                                  double tol, bool weak) {
  require_equal_length(x, y);
  bool any_zero = false;
  for (auto vec : {x, y})
    for (double e : vec) {
      if (e < 0.0) throw NegativeEntry("log_majorises: negative entry " + std::to_string(e));
      any_zero = any_zero || e == 0.0;
    }
  const RealVector xs = sorted(x);
  const RealVector ys = sorted(y);
  const std::size_t n = xs.size();
  MajorisationVerdict v{false, n == 0 ? 0.0 : std::numeric_limits<double>::infinity(), std::nullopt};

  if (!any_zero) {
    double lx = 0.0, ly = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      lx += std::log(xs[k]);
      ly += std::log(ys[k]);
      record(v, lx - ly, k + 1, tol);
    }
    if (!weak && n > 0) record(v, -std::abs(lx - ly), n, tol);
    return finish(v, tol);
  }

  double px = 1.0, py = 1.0, scale = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    px *= xs[k];
    py *= ys[k];
    scale *= std::max(xs[k], ys[k]);
    record(v, scale > 0.0 ? (px - py) / scale : 0.0, k + 1, tol);
  }
  if (!weak && n > 0) record(v, scale > 0.0 ? -std::abs(px - py) / scale : 0.0, n, tol);
  return finish(v, tol);
}

double phi_isotone(std::span<const double> x) {
  double s = 0.0;
  for (double e : x) s += e > 30.0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
  return s;
}

RealVector phi_gradient(std::span<const double> x) {
  RealVector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = 1.0 / (1.0 + std::exp(-x[i]));
  return g;
}

std::vector<std::vector<std::size_t>> index_subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > n) return out;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    out.push_back(idx);
    // Advance the rightmost index that still has room.
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

Matrix compound_matrix(const Matrix& a, std::size_t k) {
  const std::size_t n = a.dim();
  if (k < 1 || k > n) {
    throw InvalidOrder("compound_matrix: order " + std::to_string(k) + " outside [1, " +
                       std::to_string(n) + "]");
  }
  const auto subsets = index_subsets(n, k);
  Matrix c(subsets.size());
  Matrix minor(k);
  for (std::size_t r = 0; r < subsets.size(); ++r)
    for (std::size_t s = 0; s < subsets.size(); ++s) {
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) minor(i, j) = a(subsets[r][i], subsets[s][j]);
      c(r, s) = determinant(minor);
    }
  return c;
}

}  // namespace psdpath
