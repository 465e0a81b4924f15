#include "shtor/core.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace shtor {

i64 gcd_nonneg(i64 a, i64 b) { return std::gcd(std::llabs(a), std::llabs(b)); }

i64 content(const RowVec& v) {
  i64 g = 0;
  for (i64 x : v) g = gcd_nonneg(g, x);
  return g;
}

RowVec primitivize(const RowVec& v) {
  i64 g = content(v);
  if (g == 0) throw std::invalid_argument("primitivize: zero vector");
  RowVec w = v;
  if (g != 1)
    for (i64& x : w) x /= g;
  return w;
}

RowVec canonical_sign(const RowVec& v) {
  for (i64 x : v) {
    if (x > 0) return v;
    if (x < 0) {
      RowVec w = v;
      for (i64& y : w) y = -y;
      return w;
    }
  }
  return v;
}

bool lex_less(const RowVec& a, const RowVec& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

Mat mat_mul(const Mat& x, const Mat& y) {
  if (x.cols != y.rows) throw std::invalid_argument("mat_mul: shape mismatch");
  Mat z(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      i64 v = x(i, k);
      if (v == 0) continue;
      for (int j = 0; j < y.cols; ++j) z(i, j) += v * y(k, j);
    }
  return z;
}

RowVec row_times_mat(const RowVec& v, const Mat& m) {
  if ((int)v.size() != m.rows) throw std::invalid_argument("row_times_mat: shape mismatch");
  RowVec w(m.cols, 0);
  for (int i = 0; i < m.rows; ++i) {
    if (v[i] == 0) continue;
    for (int j = 0; j < m.cols; ++j) w[j] += v[i] * m(i, j);
  }
  return w;
}

Mat transpose(const Mat& m) {
  Mat t(m.cols, m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  return t;
}

namespace {

// Laplace expansion; fine for n <= 6.
i64 det_rec(const Mat& m, std::vector<int>& cols, int row) {
  int n = m.rows;
  if (row == n) return 1;
  if ((int)cols.size() == 1) return m(row, cols[0]);
  i64 sum = 0, sign = 1;
  for (size_t k = 0; k < cols.size(); ++k) {
    i64 v = m(row, cols[k]);
    if (v != 0) {
      std::vector<int> rest;
      rest.reserve(cols.size() - 1);
      for (size_t j = 0; j < cols.size(); ++j)
        if (j != k) rest.push_back(cols[j]);
      sum += sign * v * det_rec(m, rest, row + 1);
    }
    sign = -sign;
  }
  return sum;
}

}  // namespace

i64 det(const Mat& m) {
  if (m.rows != m.cols) throw std::invalid_argument("det: not square");
  if (m.rows == 0) return 1;
  std::vector<int> cols(m.cols);
  for (int j = 0; j < m.cols; ++j) cols[j] = j;
  return det_rec(m, cols, 0);
}

std::pair<Mat, i64> adjugate(const Mat& m) {
  int n = m.rows;
  if (n != m.cols) throw std::invalid_argument("adjugate: not square");
  Mat adj(n, n);
  i64 d = det(m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mat minor(n - 1, n - 1);
      for (int r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (int c = 0, cc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(rr, cc++) = m(r, c);
        }
        ++rr;
      }
      i64 cof = (n == 1) ? 1 : det(minor);
      adj(j, i) = (((i + j) & 1) ? -cof : cof);
    }
  return {adj, d};
}

Mat unimodular_inverse(const Mat& m) {
  auto [adj, d] = adjugate(m);
  if (d != 1 && d != -1) throw std::invalid_argument("unimodular_inverse: det not +-1");
  if (d == -1)
    for (i64& x : adj.a) x = -x;
  return adj;
}

int row_rank(const std::vector<RowVec>& rows) {
  if (rows.empty()) return 0;
  size_t n = rows.size(), m = rows[0].size();
  std::vector<RowVec> a = rows;
  int rank = 0;
  for (size_t col = 0; col < m && rank < (int)n; ++col) {
    size_t piv = n;
    for (size_t i = rank; i < n; ++i)
      if (a[i][col] != 0) { piv = i; break; }
    if (piv == n) continue;
    std::swap(a[rank], a[piv]);
    for (size_t i = rank + 1; i < n; ++i) {
      if (a[i][col] == 0) continue;
      i64 g = gcd_nonneg(a[i][col], a[rank][col]);
      i64 fi = a[rank][col] / g, fr = a[i][col] / g;
      for (size_t j = 0; j < m; ++j) a[i][j] = a[i][j] * fi - a[rank][j] * fr;
      i64 c = content(a[i]);
      if (c > 1)
        for (i64& x : a[i]) x /= c;
    }
    ++rank;
  }
  return rank;
}

std::string to_string(const RowVec& v) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

std::string to_string(const Mat& m) {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < m.rows; ++i) {
    os << (i ? ";" : "");
    for (int j = 0; j < m.cols; ++j) os << (j ? "," : "") << m(i, j);
  }
  os << ']';
  return os.str();
}

}  // namespace shtor
