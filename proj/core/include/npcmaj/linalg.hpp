#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace npcmaj {

// Dense row-major real matrix. Sized for the small symmetric matrices used by
// the Spd geometry and for the stochastic matrices of majorization problems.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  std::vector<std::vector<double>> to_rows() const;

  Matrix transpose() const;
  double max_abs() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }
  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend bool operator==(const Matrix& a, const Matrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Eigen-decomposition S = V diag(values) V^T of a symmetric matrix.
/// `values` ascend; column k of `vectors` pairs with values[k].
struct SymmetricEigen {
  std::vector<double> values;
  Matrix vectors;
};

/// Cyclic Jacobi rotations on the symmetric part of `s`.
SymmetricEigen symmetric_eigen(const Matrix& s);

/// V diag(f(values)) V^T.
Matrix spectral_apply(const SymmetricEigen& eig, const std::function<double(double)>& f);

Matrix symmetrize(const Matrix& s);

/// max |s_ij - s_ji|, relative to max |s_ij| (0 for the zero matrix).
double relative_asymmetry(const Matrix& s);

double frobenius_norm(const Matrix& s);
double trace(const Matrix& s);

}  // namespace npcmaj
