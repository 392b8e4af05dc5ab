#include "core/matrix.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "core/errors.hpp"

namespace ee {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows) + "x" + std::to_string(m.cols);
}

}  // namespace

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<double> d)
    : rows(r), cols(c), data(std::move(d)) {
  require(data.size() == r * c, "matrix init size mismatch");
}

Matrix Matrix::scalar(double v) {
  Matrix m(1, 1);
  m.data[0] = v;
  return m;
}

bool Matrix::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols == b.rows, "matmul shape mismatch " + shape_str(a) + " * " + shape_str(b));
  Matrix c(a.rows, b.cols);
  // i-k-j order keeps the inner loop contiguous in b and c.
  for (std::size_t i = 0; i < a.rows; ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = ai[k];
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (std::size_t j = 0; j < b.cols; ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  require(a.cols == b.cols, "matmul_nt shape mismatch " + shape_str(a) + " * " + shape_str(b) + "^T");
  Matrix c(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    double* ci = c.row(i);
    for (std::size_t j = 0; j < b.rows; ++j) {
      const double* bj = b.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) s += ai[k] * bj[k];
      ci[j] = s;
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  require(a.rows == b.rows, "matmul_tn shape mismatch " + shape_str(a) + "^T * " + shape_str(b));
  Matrix c(a.cols, b.cols);
  for (std::size_t k = 0; k < a.rows; ++k) {
    const double* ak = a.row(k);
    const double* bk = b.row(k);
    for (std::size_t i = 0; i < a.cols; ++i) {
      const double aki = ak[i];
      if (aki == 0.0) continue;
      double* ci = c.row(i);
      for (std::size_t j = 0; j < b.cols; ++j) ci[j] += aki * bk[j];
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), "add shape mismatch " + shape_str(a) + " vs " + shape_str(b));
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data[i] += b.data[i];
  return c;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), "sub shape mismatch " + shape_str(a) + " vs " + shape_str(b));
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data[i] -= b.data[i];
  return c;
}

Matrix add_rowvec(const Matrix& a, const Matrix& r) {
  require(r.rows == 1 && r.cols == a.cols, "add_rowvec: bias must be 1x" + std::to_string(a.cols));
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows; ++i) {
    double* ci = c.row(i);
    for (std::size_t j = 0; j < a.cols; ++j) ci[j] += r.data[j];
  }
  return c;
}

Matrix scale(const Matrix& a, double s) {
  Matrix c = a;
  for (double& v : c.data) v *= s;
  return c;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), "hadamard shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data[i] *= b.data[i];
  return c;
}

Matrix leaky_relu(const Matrix& a, double slope) {
  Matrix c = a;
  for (double& v : c.data)
    if (v < 0.0) v *= slope;
  return c;
}

Matrix row_normalize(const Matrix& a) {
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) s += ai[j] * ai[j];
    const double n = std::sqrt(s);
    if (n == 0.0) throw DomainError("row_normalize: zero-norm row " + std::to_string(i));
    double* ci = c.row(i);
    for (std::size_t j = 0; j < a.cols; ++j) ci[j] /= n;
  }
  return c;
}

Matrix exp_elem(const Matrix& a) {
  Matrix c = a;
  for (double& v : c.data) v = std::exp(v);
  return c;
}

Matrix log_elem(const Matrix& a) {
  Matrix c = a;
  for (double& v : c.data) {
    if (v <= 0.0) throw DomainError("log of non-positive value");
    v = std::log(v);
  }
  return c;
}

Matrix concat_cols(const Matrix& a, const Matrix& b) {
  require(a.rows == b.rows, "concat_cols row mismatch");
  Matrix c(a.rows, a.cols + b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    const double* bi = b.row(i);
    for (std::size_t j = 0; j < a.cols; ++j) ci[j] = ai[j];
    for (std::size_t j = 0; j < b.cols; ++j) ci[a.cols + j] = bi[j];
  }
  return c;
}

Matrix col_sums(const Matrix& a) {
  Matrix c(1, a.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    for (std::size_t j = 0; j < a.cols; ++j) c.data[j] += ai[j];
  }
  return c;
}

double sum_all(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data) s += v;
  return s;
}

double mean_all(const Matrix& a) {
  require(a.size() > 0, "mean of empty matrix");
  return sum_all(a) / static_cast<double>(a.size());
}

double diag_mean(const Matrix& a) {
  require(a.rows > 0 && a.rows <= a.cols, "diag_mean requires rows <= cols");
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i) s += a(i, i);
  return s / static_cast<double>(a.rows);
}

Matrix softmax_rows(const Matrix& a) {
  Matrix p = a;
  for (std::size_t i = 0; i < a.rows; ++i) {
    double* pi = p.row(i);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < a.cols; ++j) mx = std::max(mx, pi[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) {
      pi[j] = std::exp(pi[j] - mx);
      z += pi[j];
    }
    for (std::size_t j = 0; j < a.cols; ++j) pi[j] /= z;
  }
  return p;
}

double softmax_xent_diag(const Matrix& a) {
  require(a.rows > 0 && a.rows <= a.cols, "softmax_xent_diag requires rows <= cols");
  double loss = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < a.cols; ++j) mx = std::max(mx, ai[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) z += std::exp(ai[j] - mx);
    loss += mx + std::log(z) - ai[i];
  }
  return loss / static_cast<double>(a.rows);
}

double row_dot(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
  require(a.cols == b.cols, "row_dot width mismatch");
  const double* ai = a.row(i);
  const double* bj = b.row(j);
  double s = 0.0;
  for (std::size_t k = 0; k < a.cols; ++k) s += ai[k] * bj[k];
  return s;
}

}  // namespace ee
