#include "psdpath/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "psdpath/errors.hpp"

namespace psdpath {

namespace {

constexpr int kJacobiSweeps = 64;
constexpr double kSingularValueZero = 1e-13;

// The kernels below run in extended precision and round once on output, so
// eigenvalues and determinants of matrices with condition numbers up to ~1e10
// keep relative accuracy well below the verifier's 1e-8 tolerances.
using Wide = long double;

// An off-diagonal pair is annihilated once it is below this fraction of the
// geometric mean of its two diagonal entries (relative Jacobi criterion).
constexpr Wide kJacobiRelative = 1e-18L;
constexpr Wide kJacobiAbsolute = 1e-40L;

class WideMatrix {
 public:
  explicit WideMatrix(std::size_t n) : n_(n), data_(n * n, 0.0L) {}
  explicit WideMatrix(const Matrix& m) : WideMatrix(m.dim()) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) (*this)(i, j) = m(i, j);
  }
  static WideMatrix identity(std::size_t n) {
    WideMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0L;
    return m;
  }
  std::size_t dim() const noexcept { return n_; }
  Wide operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
  Wide& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
  Wide frobenius() const noexcept {
    Wide s = 0.0L;
    for (Wide v : data_) s += v * v;
    return std::sqrt(s);
  }

 private:
  std::size_t n_;
  std::vector<Wide> data_;
};

// Rotation (c, s) that zeroes the off-diagonal entry of [[alpha, gamma], [gamma, beta]].
void jacobi_rotation(Wide alpha, Wide beta, Wide gamma, Wide& c, Wide& s) {
  const Wide zeta = (beta - alpha) / (2.0L * gamma);
  const Wide t = std::copysign(1.0L, zeta) / (std::abs(zeta) + std::hypot(1.0L, zeta));
  c = 1.0L / std::hypot(1.0L, t);
  s = c * t;
}

// Flip each column so its largest-magnitude component is positive.
void normalise_column_signs(Matrix& v) {
  const std::size_t n = v.dim();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t arg = 0;
    for (std::size_t r = 1; r < n; ++r)
      if (std::abs(v(r, c)) > std::abs(v(arg, c))) arg = r;
    if (v(arg, c) < 0.0)
      for (std::size_t r = 0; r < n; ++r) v(r, c) = -v(r, c);
  }
}

// Orthonormal vectors spanning the complement of the first `keep` columns of q.
// Candidates are the standard basis vectors, taken greedily by residual norm,
// with two Gram-Schmidt passes each.
void complete_orthonormal_basis(Matrix& q, std::size_t keep) {
  const std::size_t n = q.dim();
  std::vector<bool> used(n, false);
  for (std::size_t col = keep; col < n; ++col) {
    std::vector<double> best;
    double best_norm = -1.0;
    std::size_t best_e = 0;
    for (std::size_t e = 0; e < n; ++e) {
      if (used[e]) continue;
      std::vector<double> v(n, 0.0);
      v[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t c = 0; c < col; ++c) {
          double dot = 0.0;
          for (std::size_t r = 0; r < n; ++r) dot += q(r, c) * v[r];
          for (std::size_t r = 0; r < n; ++r) v[r] -= dot * q(r, c);
        }
      const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
      if (norm > best_norm) {
        best_norm = norm;
        best = std::move(v);
        best_e = e;
      }
    }
    used[best_e] = true;
    for (std::size_t r = 0; r < n; ++r) q(r, col) = best[r] / best_norm;
  }
}

}  // namespace

SymMatrix EigenDecomposition::reconstruct() const {
  const std::size_t n = eigenvectors.dim();
  Matrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      Wide s = 0.0L;
      for (std::size_t k = 0; k < n; ++k)
        s += static_cast<Wide>(eigenvectors(i, k)) * eigenvalues[k] * eigenvectors(j, k);
      r(i, j) = static_cast<double>(s);
      r(j, i) = r(i, j);
    }
  return SymMatrix(r);
}

EigenDecomposition eig_sym(const SymMatrix& input) {
  WideMatrix a(input.matrix());
  const std::size_t n = a.dim();
  WideMatrix v = WideMatrix::identity(n);
  const Wide floor = kJacobiAbsolute * a.frobenius();

  bool converged = n < 2;
  for (int sweep = 0; sweep < kJacobiSweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Wide apq = a(p, q);
        if (apq == 0.0L) continue;
        const Wide app = a(p, p);
        const Wide aqq = a(q, q);
        if (std::abs(apq) <= kJacobiRelative * std::sqrt(std::abs(app * aqq)) ||
            std::abs(apq) <= floor) {
          a(p, q) = 0.0L;
          a(q, p) = 0.0L;
          continue;
        }
        rotated = true;
        Wide c, s;
        jacobi_rotation(app, aqq, apq, c, s);
        for (std::size_t k = 0; k < n; ++k) {
          const Wide akp = a(k, p);
          const Wide akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Wide apk = a(p, k);
          const Wide aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0L;
        a(q, p) = 0.0L;
        for (std::size_t k = 0; k < n; ++k) {
          const Wide vkp = v(k, p);
          const Wide vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) throw NonConvergence("eig_sym: Jacobi sweep budget exhausted");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenDecomposition out{std::vector<double>(n), Matrix(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = static_cast<double>(a(order[k], order[k]));
    for (std::size_t r = 0; r < n; ++r)
      out.eigenvectors(r, k) = static_cast<double>(v(r, order[k]));
  }
  normalise_column_signs(out.eigenvectors);
  return out;
}

std::vector<double> eigenvalues(const SymMatrix& a) { return eig_sym(a).eigenvalues; }

double psd_tolerance(double lambda_max) noexcept { return 1e-10 * std::max(1.0, lambda_max); }

SymMatrix matrix_function(const EigenDecomposition& eig, const std::function<double(double)>& f,
                          double domain_floor) {
  const std::size_t n = eig.eigenvectors.dim();
  const double tol = psd_tolerance(eig.lambda_max());
  std::vector<double> fl(n);
  for (std::size_t k = 0; k < n; ++k) {
    double lambda = eig.eigenvalues[k];
    if (std::isfinite(domain_floor)) {
      if (lambda < -tol) {
        throw DomainViolation("matrix_function: eigenvalue " + std::to_string(lambda) +
                              " below the PSD tolerance");
      }
      lambda = std::max(lambda, domain_floor);
    }
    fl[k] = f(lambda);
  }
  Matrix r(n);
  const Matrix& v = eig.eigenvectors;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      Wide s = 0.0L;
      for (std::size_t k = 0; k < n; ++k) s += static_cast<Wide>(v(i, k)) * fl[k] * v(j, k);
      r(i, j) = static_cast<double>(s);
      r(j, i) = r(i, j);
    }
  return SymMatrix(r);
}

SymMatrix matrix_function(const SymMatrix& a, const std::function<double(double)>& f,
                          double domain_floor) {
  return matrix_function(eig_sym(a), f, domain_floor);
}

SymMatrix sqrt_psd(const SymMatrix& a) {
  return matrix_function(a, [](double x) { return std::sqrt(x); }, 0.0);
}

SymMatrix power_psd(const SymMatrix& a, double r) {
  return matrix_function(a, [r](double x) { return std::pow(x, r); }, 0.0);
}

namespace {

EigenDecomposition require_positive_definite(const SymMatrix& a, const char* what) {
  EigenDecomposition eig = eig_sym(a);
  if (eig.lambda_min() <= psd_tolerance(eig.lambda_max())) {
    throw SingularInput(std::string(what) + ": matrix is numerically singular (lambda_min = " +
                        std::to_string(eig.lambda_min()) + ")");
  }
  return eig;
}

}  // namespace

SymMatrix inverse_sqrt_pd(const SymMatrix& a) {
  const auto eig = require_positive_definite(a, "inverse_sqrt_pd");
  return matrix_function(eig, [](double x) { return 1.0 / std::sqrt(x); }, 0.0);
}

SymMatrix log_pd(const SymMatrix& a) {
  const auto eig = require_positive_definite(a, "log_pd");
  return matrix_function(eig, [](double x) { return std::log(x); }, 0.0);
}

SingularValueDecomposition svd(const Matrix& x) {
  const std::size_t n = x.dim();
  WideMatrix w(x);  // columns get orthogonalised in place
  WideMatrix v = WideMatrix::identity(n);
  // Columns below this norm are numerically zero and are left alone.
  const Wide floor = kJacobiAbsolute * w.frobenius();
  const Wide floor_sq = floor * floor;

  bool rotated = true;
  for (int sweep = 0; sweep < kJacobiSweeps && rotated; ++sweep) {
    rotated = false;
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        Wide alpha = 0.0L, beta = 0.0L, gamma = 0.0L;
        for (std::size_t k = 0; k < n; ++k) {
          alpha += w(k, i) * w(k, i);
          beta += w(k, j) * w(k, j);
          gamma += w(k, i) * w(k, j);
        }
        if (gamma == 0.0L || alpha <= floor_sq || beta <= floor_sq ||
            std::abs(gamma) <= kJacobiRelative * std::sqrt(alpha * beta))
          continue;
        rotated = true;
        Wide c, s;
        jacobi_rotation(alpha, beta, gamma, c, s);
        for (std::size_t k = 0; k < n; ++k) {
          const Wide wi = w(k, i);
          const Wide wj = w(k, j);
          w(k, i) = c * wi - s * wj;
          w(k, j) = s * wi + c * wj;
          const Wide vi = v(k, i);
          const Wide vj = v(k, j);
          v(k, i) = c * vi - s * vj;
          v(k, j) = s * vi + c * vj;
        }
      }
  }
  if (rotated) throw NonConvergence("svd: one-sided Jacobi sweep budget exhausted");

  std::vector<Wide> sigma(n);
  for (std::size_t c = 0; c < n; ++c) {
    Wide s = 0.0L;
    for (std::size_t k = 0; k < n; ++k) s += w(k, c) * w(k, c);
    sigma[c] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

  SingularValueDecomposition out{Matrix(n), std::vector<double>(n), Matrix(n), 0};
  const Wide sigma_max = n ? sigma[order[0]] : 0.0L;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t c = order[k];
    out.singular_values[k] = static_cast<double>(sigma[c]);
    for (std::size_t r = 0; r < n; ++r) out.right(r, k) = static_cast<double>(v(r, c));
    if (sigma_max > 0.0L && sigma[c] > kSingularValueZero * sigma_max) {
      for (std::size_t r = 0; r < n; ++r) out.left(r, k) = static_cast<double>(w(r, c) / sigma[c]);
      ++out.rank;
    }
  }
  complete_orthonormal_basis(out.left, out.rank);
  return out;
}

namespace {

SymMatrix modulus_from_svd(const SingularValueDecomposition& d) {
  const std::size_t n = d.right.dim();
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      Wide s = 0.0L;
      for (std::size_t k = 0; k < n; ++k)
        s += static_cast<Wide>(d.right(i, k)) * d.singular_values[k] * d.right(j, k);
      m(i, j) = static_cast<double>(s);
      m(j, i) = m(i, j);
    }
  return SymMatrix(m);
}

// Columns [first, first + count) of m as a rectangular block stored column-wise.
std::vector<std::vector<double>> columns(const Matrix& m, std::size_t first, std::size_t count) {
  std::vector<std::vector<double>> cols(count, std::vector<double>(m.dim()));
  for (std::size_t c = 0; c < count; ++c)
    for (std::size_t r = 0; r < m.dim(); ++r) cols[c][r] = m(r, first + c);
  return cols;
}

}  // namespace

PolarDecomposition polar(const Matrix& x) {
  const auto d = svd(x);
  return {d.left * d.right.transpose(), modulus_from_svd(d)};
}

PolarDecomposition polar_limit(const Matrix& x, const Matrix& direction) {
  if (direction.dim() != x.dim()) throw DimensionMismatch("polar_limit: direction dimension");
  const auto d = svd(x);
  const std::size_t n = x.dim();
  const std::size_t r = d.rank;
  if (r == n) return {d.left * d.right.transpose(), modulus_from_svd(d)};

  // First-order perturbation of the null block: the small singular triplets of
  // X + tY follow the polar factor of the compression W_c^T Y V_c.
  const std::size_t k = n - r;
  const auto wc = columns(d.left, r, k);
  const auto vc = columns(d.right, r, k);
  Matrix compressed(k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s += wc[a][i] * direction(i, j) * vc[b][j];
      compressed(a, b) = s;
    }
  const Matrix inner = polar(compressed).orthogonal;

  Matrix u(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < r; ++c) s += d.left(i, c) * d.right(j, c);
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) s += wc[a][i] * inner(a, b) * vc[b][j];
      u(i, j) = s;
    }
  return {u, modulus_from_svd(d)};
}

double determinant(const Matrix& x) {
  WideMatrix lu(x);
  const std::size_t n = lu.dim();
  Wide det = 1.0L;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(lu(r, col)) > std::abs(lu(pivot, col))) pivot = r;
    if (lu(pivot, col) == 0.0L) return 0.0;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu(pivot, c), lu(col, c));
      det = -det;
    }
    const Wide p = lu(col, col);
    det *= p;
    for (std::size_t r = col + 1; r < n; ++r) {
      const Wide f = lu(r, col) / p;
      if (f == 0.0L) continue;
      for (std::size_t c = col + 1; c < n; ++c) lu(r, c) -= f * lu(col, c);
    }
  }
  return static_cast<double>(det);
}

double frobenius_norm(const Matrix& x) noexcept {
  double s = 0.0;
  for (double v : x.entries()) s += v * v;
  return std::sqrt(s);
}

bool is_psd(const SymMatrix& a, double tol) {
  const auto ev = eigenvalues(a);
  return ev.back() >= -tol * std::max(1.0, ev.front());
}

Matrix cholesky_upper(const SymMatrix& d) {
  const std::size_t n = d.dim();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, d(i, i));
  const double zero_pivot = 1e-13 * max_diag;
  const double negative_pivot = -psd_tolerance(max_diag);

  Matrix s(n);
  for (std::size_t i = 0; i < n; ++i) {
    double pivot = d(i, i);
    for (std::size_t k = 0; k < i; ++k) pivot -= s(k, i) * s(k, i);
    if (pivot < negative_pivot) throw NotPsd("cholesky_upper: matrix is not PSD");
    if (pivot <= zero_pivot) continue;  // zero row
    const double sii = std::sqrt(pivot);
    s(i, i) = sii;
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = d(i, j);
      for (std::size_t k = 0; k < i; ++k) v -= s(k, i) * s(k, j);
      s(i, j) = v / sii;
    }
  }
  return s;
}

}  // namespace psdpath
