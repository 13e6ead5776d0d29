#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace psdpath {

/// Dense real square matrix, row-major.
///
/// Constructors that take raw entries validate the size and reject NaN/Inf;
/// arithmetic results are not re-checked.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t dim);
  Matrix(std::size_t dim, std::vector<double> entries);

  static Matrix identity(std::size_t dim);
  static Matrix diagonal(std::span<const double> values);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return dim_ == 0; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * dim_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * dim_ + j]; }

  std::span<const double> entries() const noexcept { return data_; }
  std::span<double> entries() noexcept { return data_; }

  Matrix transpose() const;
  bool all_finite() const noexcept;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s) noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(Matrix a, double s);

double trace(const Matrix& a) noexcept;
std::vector<double> diagonal_of(const Matrix& a);

std::ostream& operator<<(std::ostream& os, const Matrix& m);

/// Real symmetric matrix. Construction from a general matrix symmetrises it as
/// (M + M^T)/2, so the stored entries are exactly symmetric.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim) : m_(dim) {}
  explicit SymMatrix(const Matrix& m);
  SymMatrix(std::size_t dim, std::vector<double> entries);

  static SymMatrix identity(std::size_t dim);
  static SymMatrix diagonal(std::span<const double> values);
  static SymMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t dim() const noexcept { return m_.dim(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }

  const Matrix& matrix() const noexcept { return m_; }
  operator const Matrix&() const noexcept { return m_; }  // NOLINT(google-explicit-constructor)

  std::span<const double> entries() const noexcept { return m_.entries(); }

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator-=(const SymMatrix& other);
  SymMatrix& operator*=(double s) noexcept;

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  Matrix m_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(SymMatrix a, const SymMatrix& b);
SymMatrix operator*(double s, SymMatrix a);
SymMatrix operator*(SymMatrix a, double s);

/// M^T M, which is symmetric PSD for any square M.
SymMatrix gram(const Matrix& m);

}  // namespace psdpath
