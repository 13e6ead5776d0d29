#include "psdpath/matrix.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "psdpath/errors.hpp"

namespace psdpath {

namespace {

void require_same_dim(const Matrix& a, const Matrix& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch(std::string(op) + ": dimension " + std::to_string(a.dim()) +
                            " vs " + std::to_string(b.dim()));
  }
}

}  // namespace

Matrix::Matrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}

Matrix::Matrix(std::size_t dim, std::vector<double> entries)
    : dim_(dim), data_(std::move(entries)) {
  if (data_.size() != dim_ * dim_) {
    throw std::invalid_argument("Matrix: expected " + std::to_string(dim_ * dim_) +
                                " entries, got " + std::to_string(data_.size()));
  }
  if (!all_finite()) throw std::invalid_argument("Matrix: non-finite entry");
}

Matrix Matrix::identity(std::size_t dim) {
  Matrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
  Matrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  if (!m.all_finite()) throw std::invalid_argument("Matrix: non-finite entry");
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  std::vector<double> data;
  data.reserve(n * n);
  for (const auto& row : rows) {
    if (row.size() != n) throw std::invalid_argument("Matrix::from_rows: ragged or non-square");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(n, std::move(data));
}

Matrix Matrix::transpose() const {
  Matrix t(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool Matrix::all_finite() const noexcept {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_dim(*this, other, "operator+");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_dim(*this, other, "operator-");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }
Matrix operator*(Matrix a, double s) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  require_same_dim(a, b, "operator*");
  const std::size_t n = a.dim();
  Matrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

double trace(const Matrix& a) noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) t += a(i, i);
  return t;
}

std::vector<double> diagonal_of(const Matrix& a) {
  std::vector<double> d(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) d[i] = a(i, i);
  return d;
}

std::ostream& operator<<(std::ostream& os, const Matrix& m) {
  os << '[';
  for (std::size_t i = 0; i < m.dim(); ++i) {
    os << (i ? ", [" : "[");
    for (std::size_t j = 0; j < m.dim(); ++j) os << (j ? ", " : "") << m(i, j);
    os << ']';
  }
  return os << ']';
}

SymMatrix::SymMatrix(const Matrix& m) : m_(m.dim()) {
  const std::size_t n = m.dim();
  for (std::size_t i = 0; i < n; ++i) {
    m_(i, i) = m(i, i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m_(i, j) = v;
      m_(j, i) = v;
    }
  }
}

SymMatrix::SymMatrix(std::size_t dim, std::vector<double> entries)
    : SymMatrix(Matrix(dim, std::move(entries))) {}

SymMatrix SymMatrix::identity(std::size_t dim) { return SymMatrix(Matrix::identity(dim)); }

SymMatrix SymMatrix::diagonal(std::span<const double> values) {
  return SymMatrix(Matrix::diagonal(values));
}

SymMatrix SymMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  return SymMatrix(Matrix::from_rows(rows));
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  m_ += other.m_;
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
  m_ -= other.m_;
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) noexcept {
  m_ *= s;
  return *this;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
SymMatrix operator*(SymMatrix a, double s) { return a *= s; }

SymMatrix gram(const Matrix& m) {
  const std::size_t n = m.dim();
  Matrix g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += m(k, i) * m(k, j);
      g(i, j) = s;
      g(j, i) = s;
    }
  return SymMatrix(g);
}

}  // namespace psdpath
