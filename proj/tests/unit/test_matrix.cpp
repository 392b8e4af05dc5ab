#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/matrix.hpp"
#include "core/rng.hpp"

using ee::Matrix;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, ee::Rng& rng) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.normal();
  return m;
}

// Independent oracle: textbook triple loop.
Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.cols; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

void check_close(const Matrix& a, const Matrix& b, double tol) {
  REQUIRE(a.same_shape(b));
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::abs(a.data[i] - b.data[i]) <= tol * std::max(1.0, std::abs(b.data[i])));
}

}  // namespace

TEST_CASE("matmul matches naive triple loop on random shapes") {
  ee::Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    std::size_t m = 1 + rng.below(6), k = 1 + rng.below(6), n = 1 + rng.below(6);
    Matrix a = random_matrix(m, k, rng), b = random_matrix(k, n, rng);
    check_close(ee::matmul(a, b), naive_matmul(a, b), 1e-12);
    check_close(ee::matmul_nt(a, ee::transpose(b)), naive_matmul(a, b), 1e-12);
    check_close(ee::matmul_tn(ee::transpose(a), b), naive_matmul(a, b), 1e-12);
  }
}

TEST_CASE("matmul shape mismatch throws") {
  Matrix a(2, 3), b(2, 3);
  CHECK_THROWS_AS(ee::matmul(a, b), ee::DomainError);
}

TEST_CASE("transpose involution") {
  ee::Rng rng(5);
  Matrix a = random_matrix(3, 5, rng);
  check_close(ee::transpose(ee::transpose(a)), a, 0.0);
}

TEST_CASE("row_normalize produces unit rows") {
  ee::Rng rng(7);
  Matrix a = random_matrix(8, 5, rng);
  Matrix y = ee::row_normalize(a);
  for (std::size_t i = 0; i < y.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < y.cols; ++j) s += y(i, j) * y(i, j);
    CHECK(std::abs(std::sqrt(s) - 1.0) < 1e-12);
  }
}

TEST_CASE("row_normalize of a zero row is a domain error") {
  Matrix a(2, 3);
  a(0, 0) = 1.0;  // row 1 stays all-zero
  CHECK_THROWS_AS(ee::row_normalize(a), ee::DomainError);
}

TEST_CASE("leaky_relu applies slope on negatives only") {
  Matrix a(1, 4, {-2.0, -0.5, 0.0, 3.0});
  Matrix y = ee::leaky_relu(a, 0.2);
  CHECK(y.data[0] == doctest::Approx(-0.4));
  CHECK(y.data[1] == doctest::Approx(-0.1));
  CHECK(y.data[2] == 0.0);
  CHECK(y.data[3] == 3.0);
}

TEST_CASE("softmax rows sum to one and are shift invariant") {
  ee::Rng rng(3);
  Matrix a = random_matrix(4, 6, rng);
  Matrix p = ee::softmax_rows(a);
  for (std::size_t i = 0; i < p.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < p.cols; ++j) s += p(i, j);
    CHECK(std::abs(s - 1.0) < 1e-12);
  }
  Matrix shifted = a;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) shifted(i, j) += 7.5;
  check_close(ee::softmax_rows(shifted), p, 1e-12);
}

TEST_CASE("softmax_xent_diag hand value") {
  // Two rows with logits (1,-1) / (-1,1): loss = log(1+e^-2).
  Matrix a(2, 2, {1.0, -1.0, -1.0, 1.0});
  CHECK(ee::softmax_xent_diag(a) == doctest::Approx(0.1269280110429726).epsilon(1e-12));
}

TEST_CASE("concat_cols layout and col_sums") {
  Matrix a(2, 2, {1, 2, 3, 4});
  Matrix b(2, 1, {5, 6});
  Matrix c = ee::concat_cols(a, b);
  CHECK(c.cols == 3);
  CHECK(c(0, 2) == 5.0);
  CHECK(c(1, 0) == 3.0);
  Matrix s = ee::col_sums(a);
  CHECK(s(0, 0) == 4.0);
  CHECK(s(0, 1) == 6.0);
}

TEST_CASE("diag_mean and scalar reductions") {
  Matrix a(2, 3, {1, 2, 3, 4, 5, 6});
  CHECK(ee::diag_mean(a) == doctest::Approx(3.0));  // (1 + 5) / 2
  CHECK(ee::sum_all(a) == doctest::Approx(21.0));
  CHECK(ee::mean_all(a) == doctest::Approx(3.5));
  Matrix tall(3, 2);
  CHECK_THROWS_AS(ee::diag_mean(tall), ee::DomainError);
}

TEST_CASE("log of non-positive entries is a domain error") {
  Matrix a(1, 2, {1.0, -1.0});
  CHECK_THROWS_AS(ee::log_elem(a), ee::DomainError);
  Matrix b(1, 2, {2.0, 0.5});
  check_close(ee::log_elem(ee::exp_elem(b)), b, 1e-12);
}
