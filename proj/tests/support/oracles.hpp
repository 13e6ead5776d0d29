#pragma once

// Reference algorithms that share no code path with the library kernels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "psdpath/matrix.hpp"

namespace psdpath::oracle {

using Wide = std::vector<std::vector<long double>>;

inline Wide widen(const Matrix& m) {
  Wide w(m.dim(), std::vector<long double>(m.dim()));
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) w[i][j] = m(i, j);
  return w;
}

inline Matrix narrow(const Wide& w) {
  Matrix m(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) m(i, j) = static_cast<double>(w[i][j]);
  return m;
}

inline Wide identity(std::size_t n) {
  Wide w(n, std::vector<long double>(n, 0.0L));
  for (std::size_t i = 0; i < n; ++i) w[i][i] = 1.0L;
  return w;
}

inline Wide multiply(const Wide& a, const Wide& b) {
  const std::size_t n = a.size();
  Wide c(n, std::vector<long double>(n, 0.0L));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Wide transpose(const Wide& a) {
  Wide t = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) t[i][j] = a[j][i];
  return t;
}

inline Wide average(const Wide& a, const Wide& b) {
  Wide c = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) c[i][j] = 0.5L * (a[i][j] + b[i][j]);
  return c;
}

inline long double max_abs_diff(const Wide& a, const Wide& b) {
  long double d = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::fabs(a[i][j] - b[i][j]));
  return d;
}

// Gauss-Jordan elimination with partial pivoting.
inline Wide inverse(Wide a) {
  const std::size_t n = a.size();
  Wide inv = identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0.0L) throw std::domain_error("oracle::inverse: singular");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const long double d = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= d;
      inv[col][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const long double f = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

// Sum over permutations with their signs.
inline long double leibniz_det(const Matrix& m) {
  const std::size_t n = m.dim();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  long double total = 0.0L;
  do {
    long double term = 1.0L;
    for (std::size_t i = 0; i < n; ++i) term *= m(i, perm[i]);
    std::size_t inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
    total += (inversions % 2 ? -term : term);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

// Denman-Beavers iteration for the principal square root of a positive
// definite matrix.
inline Matrix denman_beavers_sqrt(const Matrix& a) {
  Wide y = widen(a);
  Wide z = identity(a.dim());
  for (int k = 0; k < 100; ++k) {
    const Wide y_next = average(y, inverse(z));
    const Wide z_next = average(z, inverse(y));
    const long double change = max_abs_diff(y_next, y);
    y = y_next;
    z = z_next;
    if (change < 1e-17L) break;
  }
  return narrow(y);
}

struct Polar {
  Matrix orthogonal;
  Matrix modulus;
};

// Newton iteration U <- (U + U^{-T}) / 2 for invertible X.
inline Polar newton_polar(const Matrix& x) {
  Wide u = widen(x);
  for (int k = 0; k < 100; ++k) {
    const Wide next = average(u, transpose(inverse(u)));
    const long double change = max_abs_diff(next, u);
    u = next;
    if (change < 1e-17L) break;
  }
  return {narrow(u), narrow(multiply(transpose(u), widen(x)))};
}

}  // namespace psdpath::oracle
