#include <doctest.h>

#include <random>

#include "shtor/sharbly.hpp"

using namespace shtor;
using namespace shtor::sharbly;

namespace {

RowVec random_primitive(std::mt19937_64& rng, int m) {
  for (;;) {
    RowVec v(m);
    bool zero = true;
    for (int i = 0; i < m; ++i) {
      v[i] = (long)(rng() % 9) - 4;
      if (v[i]) zero = false;
    }
    if (!zero) return primitivize(v);
  }
}

}  // namespace

TEST_CASE("normalization: signs, permutations, degeneracy") {
  ZRing R;
  // swapping two vectors flips the sign
  Normalized a = normalize(2, {{1, 0}, {0, 1}, {1, 1}});
  Normalized b = normalize(2, {{0, 1}, {1, 0}, {1, 1}});
  REQUIRE(a.symbol);
  REQUIRE(b.symbol);
  CHECK(*a.symbol == *b.symbol);
  CHECK(a.sign == -b.sign);
  // negating one vector does not change the class
  Normalized c = normalize(2, {{-1, 0}, {0, 1}, {1, 1}});
  REQUIRE(c.symbol);
  CHECK(*c.symbol == *a.symbol);
  CHECK(c.sign == a.sign);
  // repeated vector (up to sign and scale) is the zero class
  CHECK_FALSE(normalize(2, {{1, 0}, {-2, 0}, {0, 1}}).symbol);
  // non-spanning list is the zero class
  CHECK_FALSE(normalize(3, {{1, 0, 0}, {0, 1, 0}, {1, 1, 0}}).symbol);
  CHECK_THROWS_AS(normalize(2, {{0, 0}, {1, 0}}), ZeroVector);
}

TEST_CASE("normalization is idempotent") {
  std::mt19937_64 rng(123);
  for (int m : {2, 3, 4})
    for (int trial = 0; trial < 50; ++trial) {
      int k = m + (int)(rng() % 3);
      std::vector<RowVec> vecs;
      for (int i = 0; i < k; ++i) vecs.push_back(random_primitive(rng, m));
      Normalized n = normalize(m, vecs);
      if (!n.symbol) continue;
      Normalized again = normalize(m, n.symbol->vectors);
      REQUIRE(again.symbol);
      CHECK(*again.symbol == *n.symbol);
      CHECK(again.sign == 1);
    }
}

TEST_CASE("boundary squares to zero on random chains") {
  ZRing R;
  std::mt19937_64 rng(20240401);
  int done = 0;
  for (int m : {2, 3, 4})
    for (int trial = 0; trial < 70; ++trial) {
      Chain<ZRing> c;
      c.m = m;
      c.degree = 2;
      int terms = 1 + (int)(rng() % 4);
      for (int t = 0; t < terms; ++t) {
        std::vector<RowVec> vecs;
        for (int i = 0; i < m + 2; ++i) vecs.push_back(random_primitive(rng, m));
        chain_add_normalized(R, c, m, std::move(vecs), mpz_class((long)(rng() % 7) - 3));
      }
      if (c.is_zero()) continue;
      Chain<ZRing> d2 = boundary(R, boundary(R, c));
      CHECK(d2.is_zero());
      ++done;
    }
  CHECK(done > 150);
}

TEST_CASE("boundary of a degree-zero chain is rejected") {
  ZRing R;
  Chain<ZRing> c;
  c.m = 2;
  c.degree = 0;
  chain_add_normalized(R, c, 2, {{1, 0}, {0, 1}}, 1);
  CHECK_THROWS_AS(boundary(R, c), DegreeZero);
}

TEST_CASE("transform is an action compatible with the boundary") {
  ZRing R;
  std::mt19937_64 rng(55);
  Chain<ZRing> c;
  c.m = 3;
  c.degree = 1;
  for (int t = 0; t < 3; ++t) {
    std::vector<RowVec> vecs;
    for (int i = 0; i < 4; ++i) vecs.push_back(random_primitive(rng, 3));
    chain_add_normalized(R, c, 3, std::move(vecs), mpz_class(1 + (long)(rng() % 3)));
  }
  Mat g = Mat::identity(3);
  g(0, 1) = 2;
  g(1, 2) = -1;
  CHECK(boundary(R, chain_transform(R, c, g)).terms ==
        chain_transform(R, boundary(R, c), g).terms);
}

TEST_CASE("prime-coefficient chains") {
  FpRing R{5};
  Chain<FpRing> c;
  c.m = 2;
  c.degree = 0;
  Normalized n = normalize(2, {{1, 0}, {0, 1}});
  chain_add(R, c, *n.symbol, 3);
  chain_add(R, c, *n.symbol, 2);  // 3 + 2 = 0 mod 5
  CHECK(c.is_zero());
}
