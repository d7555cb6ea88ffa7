#pragma once

#include <cstddef>
#include <vector>

namespace sgp {

using Vector = std::vector<double>;

/// Dense row-major matrix. Element (r, c) is data()[r * cols + c].
class Matrix {
public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool operator==(const Matrix& other) const = default;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
double norm2_sq(const Vector& a);

/// y += a * x
void add_scaled(Vector& y, double a, const Vector& x);
Vector scaled(const Vector& x, double a);
Vector diff(const Vector& a, const Vector& b);

/// Ordered product m[k-1] * ... * m[1] * m[0] (newest factor on the left).
Matrix ordered_product(const std::vector<Matrix>& factors);

Matrix multiply(const Matrix& a, const Matrix& b);

}  // namespace sgp
