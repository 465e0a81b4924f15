#include <doctest.h>

#include <random>

#include "shtor/quadform.hpp"

using namespace shtor;
using namespace shtor::retract;

TEST_CASE("evaluation and transformation") {
  QForm g = qform_identity(2);
  CHECK(qform_eval(g, {3, 4}) == 25);
  Mat u(2, 2);
  u(0, 0) = 1; u(0, 1) = 1; u(1, 0) = 0; u(1, 1) = 1;
  QForm t = qform_transform(g, u);
  // Q'(v) = Q(v u)
  CHECK(qform_eval(t, {1, 0}) == qform_eval(g, row_times_mat({1, 0}, u)));
  CHECK(qform_eval(t, {2, -3}) == qform_eval(g, row_times_mat({2, -3}, u)));
}

TEST_CASE("positive definiteness") {
  CHECK(is_positive_definite(qform_identity(3)));
  QForm bad = qform_identity(2);
  bad[0][1] = bad[1][0] = 5;  // 1 5 / 5 1 has negative determinant
  CHECK_FALSE(is_positive_definite(bad));
}

TEST_CASE("minimal vectors of the hexagonal form") {
  // x^2 + xy + y^2 scaled by 2: gram [[2,1],[1,2]], minimum 2, three pairs
  QForm g{{2, 1}, {1, 2}};
  auto [min, vecs] = minimal_vectors(g);
  CHECK(min == 2);
  CHECK(vecs.size() == 3);
}

TEST_CASE("short vector count matches brute force") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    // random SL2(Z) transform of a diagonal form
    QForm g{{mpz_class(1 + (long)(rng() % 3)), 0}, {0, mpz_class(1 + (long)(rng() % 3))}};
    Mat u(2, 2);
    long k = (long)(rng() % 5) - 2, l = (long)(rng() % 5) - 2;
    u(0, 0) = 1; u(0, 1) = k; u(1, 0) = l; u(1, 1) = 1 + k * l;  // det 1
    g = qform_transform(g, u);
    mpz_class bound = 12;
    auto sv = short_vectors(g, bound);
    long brute = 0;
    for (long x = -60; x <= 60; ++x)
      for (long y = 0; y <= 60; ++y) {  // one per +-pair: y > 0 or (y = 0, x > 0)
        if (y == 0 && x <= 0) continue;
        if (qform_eval(g, {x, y}) <= bound) ++brute;
      }
    CHECK((long)sv.size() == brute);
  }
}

TEST_CASE("lll reduction preserves the class") {
  QForm g{{101, 100, 0}, {100, 101, 10}, {0, 10, 51}};
  REQUIRE(is_positive_definite(g));
  auto [red, u] = lll_reduce(g);
  CHECK(qform_eq(red, qform_transform(g, u)));
  // the reduced form has no larger diagonal than the original maximum
  CHECK(red[0][0] <= g[0][0]);
}

TEST_CASE("adjugate identity for forms") {
  QForm g{{2, 1}, {1, 3}};
  QForm a = qform_adjugate(g);
  mpz_class d = qform_det(g);
  // g * adj = det * I
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      mpz_class s = 0;
      for (int k = 0; k < 2; ++k) s += g[i][k] * a[k][j];
      CHECK(s == (i == j ? d : 0));
    }
}
