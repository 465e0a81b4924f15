#include <doctest.h>

#include "shtor/core.hpp"

using namespace shtor;

TEST_CASE("content and primitivize") {
  CHECK(content({6, -9, 12}) == 3);
  CHECK(content({0, 0}) == 0);
  CHECK(primitivize({6, -9, 12}) == RowVec{2, -3, 4});
  CHECK(primitivize({-5}) == RowVec{-1});
  CHECK_THROWS(primitivize({0, 0, 0}));
}

TEST_CASE("canonical sign flips at first nonzero") {
  CHECK(canonical_sign({0, -2, 5}) == RowVec{0, 2, -5});
  CHECK(canonical_sign({3, -1}) == RowVec{3, -1});
  CHECK(canonical_sign({0, 0}) == RowVec{0, 0});
}

TEST_CASE("matrix determinant and unimodular inverse") {
  Mat g(3, 3);
  g(0, 0) = 1; g(0, 1) = 2; g(0, 2) = 3;
  g(1, 0) = 0; g(1, 1) = 1; g(1, 2) = 4;
  g(2, 0) = 0; g(2, 1) = 0; g(2, 2) = 1;
  CHECK(det(g) == 1);
  Mat inv = unimodular_inverse(g);
  CHECK(mat_mul(g, inv) == Mat::identity(3));
  CHECK(mat_mul(inv, g) == Mat::identity(3));

  Mat s = Mat::identity(2);
  s(0, 0) = 2;
  CHECK(det(s) == 2);
  CHECK_THROWS(unimodular_inverse(s));
}

TEST_CASE("adjugate identity M adj(M) = det(M) I") {
  Mat g(3, 3);
  long vals[3][3] = {{2, -1, 0}, {3, 4, 1}, {0, 5, -2}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g(i, j) = vals[i][j];
  auto [adj, d] = adjugate(g);
  CHECK(d == det(g));
  Mat prod = mat_mul(g, adj);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(prod(i, j) == (i == j ? d : 0));
}

TEST_CASE("row rank over Q") {
  CHECK(row_rank({{1, 0}, {0, 1}}) == 2);
  CHECK(row_rank({{1, 2}, {2, 4}}) == 1);
  CHECK(row_rank({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}) == 2);
}
