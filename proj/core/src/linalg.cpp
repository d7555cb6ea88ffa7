#include "sgp/linalg.hpp"

#include <cmath>

#include "sgp/error.hpp"

namespace sgp {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ShapeError("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2_sq(const Vector& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

double norm2(const Vector& a) { return std::sqrt(norm2_sq(a)); }

void add_scaled(Vector& y, double a, const Vector& x) {
  if (y.size() != x.size()) throw ShapeError("add_scaled: size mismatch");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

Vector scaled(const Vector& x, double a) {
  Vector y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i];
  return y;
}

Vector diff(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ShapeError("diff: size mismatch");
  Vector y(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = a[i] - b[i];
  return y;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("multiply: inner dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Matrix ordered_product(const std::vector<Matrix>& factors) {
  if (factors.empty()) throw ShapeError("ordered_product: empty factor list");
  Matrix p = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) p = multiply(factors[k], p);
  return p;
}

}  // namespace sgp
