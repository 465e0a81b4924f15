#include <doctest.h>

#include "shtor/gf.hpp"

using namespace shtor::gf;

TEST_CASE("prime field arithmetic") {
  Field F(7);
  CHECK(F.order() == 7);
  auto a = F.from_int(3), b = F.from_int(5);
  CHECK(F.eq(F.add(a, b), F.from_int(1)));
  CHECK(F.eq(F.mul(a, b), F.from_int(1)));
  CHECK(F.eq(F.inv(a), F.from_int(5)));
  CHECK(F.eq(F.pow(a, 6), F.one()));  // Fermat
  CHECK(F.eq(F.from_int(-1), F.from_int(6)));
  CHECK_THROWS(F.inv(F.zero()));
}

TEST_CASE("extension field arithmetic") {
  Field F(5, 2);
  CHECK(F.order() == 25);
  auto x = F.gen();
  // multiplicative group has order 24
  CHECK(F.eq(F.pow(x, 24), F.one()));
  // Frobenius is the p-power map and has order 2
  auto y = F.add(x, F.from_int(3));
  CHECK(F.eq(F.frobenius(y), F.pow(y, 5)));
  CHECK(F.eq(F.frobenius(F.frobenius(y)), y));
  // inverses in the extension
  CHECK(F.eq(F.mul(y, F.inv(y)), F.one()));
}

TEST_CASE("polynomial division and gcd") {
  Field F(13);
  // (x^2 + 1)(x + 3) = x^3 + 3x^2 + x + 3
  Poly f = poly_from_ints(F, {3, 1, 3, 1});
  Poly g = poly_from_ints(F, {1, 0, 1});
  auto [q, r] = poly_divmod(F, f, g);
  CHECK(poly_eq(q, poly_from_ints(F, {3, 1})));
  CHECK(poly_deg(r) == -1);
  Poly h = poly_from_ints(F, {3, 1});  // x + 3 divides both
  CHECK(poly_eq(poly_gcd(F, f, poly_mul(F, h, poly_from_ints(F, {1, 1}))), h));
}

TEST_CASE("root finding agrees with brute force") {
  Field F(11);
  // f = (x - 2)(x - 2)(x - 7) = expand
  Poly f = poly_mul(F, poly_mul(F, poly_from_ints(F, {-2, 1}), poly_from_ints(F, {-2, 1})),
                    poly_from_ints(F, {-7, 1}));
  auto roots = poly_roots(F, f);
  REQUIRE(roots.size() == 2);
  bool saw2 = false, saw7 = false;
  for (auto& [r, mult] : roots) {
    if (F.eq(r, F.from_int(2))) {
      saw2 = true;
      CHECK(mult == 2);
    }
    if (F.eq(r, F.from_int(7))) {
      saw7 = true;
      CHECK(mult == 1);
    }
  }
  CHECK(saw2);
  CHECK(saw7);
}

TEST_CASE("factorization multiplies back") {
  Field F(5);
  Poly f = poly_from_ints(F, {1, 0, 0, 0, 4});  // 4x^4 + 1
  auto factors = poly_factor(F, f);
  Poly prod = poly_from_ints(F, {4});  // leading coefficient
  for (auto& [g, e] : factors) {
    CHECK(is_irreducible(F, g));
    for (int i = 0; i < e; ++i) prod = poly_mul(F, prod, g);
  }
  CHECK(poly_eq(prod, f));
}

TEST_CASE("deterministic irreducible moduli") {
  CHECK(find_irreducible(5, 2) == find_irreducible(5, 2));
  Field F(5, 2);
  Field G(5, find_irreducible(5, 2));
  CHECK(F.modulus() == G.modulus());
}
