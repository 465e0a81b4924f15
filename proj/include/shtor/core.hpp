#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

// Small exact integer vectors and matrices used for group elements,
// lattice vectors and quadratic forms.  Ranks are tiny (m <= 4); entries
// stay well inside int64 for everything outside the sparse linear algebra.

namespace shtor {

using i64 = std::int64_t;

using RowVec = std::vector<i64>;  // lattice vectors are row vectors

i64 gcd_nonneg(i64 a, i64 b);

// gcd of all entries (nonnegative); 0 for the zero vector
i64 content(const RowVec& v);

// divide by content; throws on the zero vector
RowVec primitivize(const RowVec& v);

// flip so the first nonzero coordinate is positive; identity on zero
RowVec canonical_sign(const RowVec& v);

bool lex_less(const RowVec& a, const RowVec& b);

// Dense m x n integer matrix, row major.
struct Mat {
  int rows = 0, cols = 0;
  std::vector<i64> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a((size_t)r * c, 0) {}

  i64& operator()(int i, int j) { return a[(size_t)i * cols + j]; }
  i64 operator()(int i, int j) const { return a[(size_t)i * cols + j]; }

  static Mat identity(int n);
  bool operator==(const Mat&) const = default;
};

Mat mat_mul(const Mat& x, const Mat& y);
RowVec row_times_mat(const RowVec& v, const Mat& m);
Mat transpose(const Mat& m);
i64 det(const Mat& m);  // bareiss, exact for the small sizes used here

// exact inverse of a matrix with det = +-1; throws otherwise
Mat unimodular_inverse(const Mat& m);

// adjugate (integer) and determinant together
std::pair<Mat, i64> adjugate(const Mat& m);

// rank over Q of a list of row vectors
int row_rank(const std::vector<RowVec>& rows);

std::string to_string(const RowVec& v);
std::string to_string(const Mat& m);

}  // namespace shtor
