#pragma once

#include <cstddef>
#include <vector>

namespace ee {

// Dense row-major matrix of doubles. Row vectors are 1 x n matrices; scalars
// on the tape are 1 x 1.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  Matrix(std::size_t r, std::size_t c, std::vector<double> d);

  static Matrix scalar(double v);

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }

  std::size_t size() const { return data.size(); }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
  bool all_finite() const;
};

// Kernels shared by the eager forward path and the tape. Shape mismatches and
// domain violations throw ee::DomainError.
Matrix matmul(const Matrix& a, const Matrix& b);     // a * b
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // a * b^T
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // a^T * b
Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix add_rowvec(const Matrix& a, const Matrix& r);  // r broadcast over rows
Matrix scale(const Matrix& a, double s);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix leaky_relu(const Matrix& a, double slope);
Matrix row_normalize(const Matrix& a);  // rows scaled to unit L2 norm
Matrix exp_elem(const Matrix& a);
Matrix log_elem(const Matrix& a);
Matrix concat_cols(const Matrix& a, const Matrix& b);
Matrix col_sums(const Matrix& a);  // 1 x cols
double sum_all(const Matrix& a);
double mean_all(const Matrix& a);
double diag_mean(const Matrix& a);  // mean of a(i, i), requires rows <= cols

// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& a);
// Mean over rows of [logsumexp_j a(i, j) - a(i, i)]; requires rows <= cols.
double softmax_xent_diag(const Matrix& a);

double row_dot(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j);

}  // namespace ee
