#include <doctest.h>

#include <random>

#include "shtor/galois.hpp"

using namespace shtor;
using namespace shtor::galois;
using gf::Field;

namespace {

std::shared_ptr<const Field> F5() { return std::make_shared<const Field>(5); }

EigenPackage make_package(int m, long N, long p, std::shared_ptr<const Field> F,
                          std::vector<std::pair<long, std::vector<long>>> data) {
  EigenPackage pkg;
  pkg.m = m;
  pkg.N = N;
  pkg.p = p;
  pkg.field = F;
  for (auto& [ell, as] : data)
    for (int k = 1; k <= m; ++k) pkg.entries[{ell, k}] = F->from_int(as[k - 1]);
  return pkg;
}

DirichletCharacter quadratic_mod5(std::shared_ptr<const Field> F) {
  for (auto& c : all_characters(5, F)) {
    if (c.is_trivial()) continue;
    auto v = c.value(2);
    if (F->eq(F->mul(v, v), F->one())) return c;
  }
  throw std::logic_error("no quadratic character mod 5");
}

bool poly_is(const Field& F, const gf::Poly& p, std::vector<long> want) {
  if (p.size() != want.size()) return false;
  for (size_t i = 0; i < want.size(); ++i)
    if (!F.eq(p[i], F.from_int(want[i]))) return false;
  return true;
}

}  // namespace

TEST_CASE("unit group structure and discrete logs") {
  for (long n : {5L, 8L, 12L, 30L, 253L}) {
    UnitGroup u(n);
    long phi = 1;
    for (long o : u.orders()) phi *= o;
    long count = 0;
    for (long a = 1; a < n; ++a) {
      if (std::gcd(a, n) != 1) continue;
      ++count;
      // exp(log(a)) = a
      long x = 1;
      const std::vector<long>& e = u.log(a);
      REQUIRE(e.size() == u.generators().size());
      for (size_t i = 0; i < e.size(); ++i)
        for (long t = 0; t < e[i]; ++t) x = x * u.generators()[i] % n;
      CHECK(x == a % n);
    }
    CHECK(phi == (n == 1 ? 1 : count));
    CHECK_THROWS_AS(u.log(0), RamifiedPrime);
  }
}

TEST_CASE("characters mod 5 over F_5") {
  auto F = F5();
  auto chars = all_characters(5, F);
  REQUIRE(chars.size() == 4);
  CHECK(chars[0].is_trivial());
  CHECK(chars[0].conductor() == 1);
  DirichletCharacter beta = quadratic_mod5(F);
  CHECK(beta.conductor() == 5);
  CHECK(F->eq(beta.value(2), F->from_int(4)));  // beta(2) = -1
  CHECK(F->eq(beta.value(4), F->one()));
  CHECK_THROWS_AS(beta.value(10), RamifiedPrime);
  // multiplicativity on a generator pair
  CHECK(F->eq(beta.value(6), F->mul(beta.value(2), beta.value(3))));
}

TEST_CASE("frobenius characteristic polynomials") {
  // full cyclotomic ladder mod 11, characters mod 253 = 11 * 23
  auto F11 = std::make_shared<const Field>(11);
  GaloisRep rep;
  rep.m = 4;
  rep.p = 11;
  rep.field = F11;
  for (int i = 0; i < 4; ++i) rep.summands.push_back({trivial_character(253, F11), i});
  CHECK(poly_is(*F11, frobenius_charpoly(rep, 2), {1, 7, 4, 1, 9}));
  CHECK_THROWS_AS(frobenius_charpoly(rep, 11), RamifiedPrime);
  CHECK_THROWS_AS(frobenius_charpoly(rep, 23), RamifiedPrime);

  // quadratic twist mod 5
  auto F = F5();
  DirichletCharacter beta = quadratic_mod5(F);
  GaloisRep twist;
  twist.m = 4;
  twist.p = 5;
  twist.field = F;
  twist.summands.push_back({beta, 0});
  twist.summands.push_back({trivial_character(5, F), 1});
  twist.summands.push_back({trivial_character(5, F), 2});
  twist.summands.push_back({beta, 3});
  CHECK(poly_is(*F, frobenius_charpoly(twist, 11), {1, 1, 1, 1, 1}));
  CHECK(poly_is(*F, frobenius_charpoly(twist, 7), {1, 3, 2, 4, 4}));
  // the polynomial does not depend on the summand order
  GaloisRep shuffled = twist;
  std::swap(shuffled.summands[0], shuffled.summands[3]);
  std::swap(shuffled.summands[1], shuffled.summands[2]);
  for (long ell : {7L, 11L, 13L})
    CHECK(gf::poly_eq(frobenius_charpoly(twist, ell), frobenius_charpoly(shuffled, ell)));
  CHECK(reps_equivalent(twist, shuffled, {7, 11, 13}));
}

TEST_CASE("hecke-side polynomial") {
  auto F = F5();
  auto pkg = make_package(4, 11, 5, F, {{2, {15, 35, 15, 1}}, {3, {40, 130, 40, 1}}});
  CHECK(poly_is(*F, hecke_lhs_polynomial(pkg, 2), {1, 0, 0, 0, 4}));  // 1 - X^4
  CHECK(poly_is(*F, hecke_lhs_polynomial(pkg, 3), {1, 0, 0, 0, 4}));
  CHECK_THROWS_AS(hecke_lhs_polynomial(pkg, 7), MissingEntry);
}

TEST_CASE("good primes of a package") {
  auto F = F5();
  auto pkg = make_package(4, 22, 5, F, {{3, {0, 0, 0, 1}}, {7, {0, 0, 0, 1}}});
  pkg.entries[{2, 1}] = F->one();  // partial column
  pkg.entries[{11, 1}] = F->one();
  pkg.entries[{11, 2}] = F->one();
  pkg.entries[{11, 3}] = F->one();
  pkg.entries[{11, 4}] = F->one();  // full column but 11 | N
  CHECK(pkg.good_primes() == std::vector<long>{3, 7});
  pkg.u_primes.insert(2);
  CHECK(pkg.good_primes() == std::vector<long>{3, 7});
}

TEST_CASE("matcher recovers the cyclotomic ladder at level 11") {
  auto F = F5();
  auto pkg = make_package(4, 11, 5, F,
                          {{2, {0, 0, 0, 1}}, {3, {0, 0, 0, 1}}, {7, {0, 0, 0, 1}}});
  auto matches = match_representation(pkg);
  REQUIRE(!matches.empty());
  GaloisRep ladder;
  ladder.m = 4;
  ladder.p = 5;
  ladder.field = matches[0].field;
  for (int i = 0; i < 4; ++i)
    ladder.summands.push_back({trivial_character(5, matches[0].field), i});
  bool found = false;
  for (auto& r : matches)
    if (reps_equivalent(r, ladder, {2, 3, 7, 13})) found = true;
  CHECK(found);
  // deterministic output order on a rerun
  auto again = match_representation(pkg);
  REQUIRE(again.size() == matches.size());
  for (size_t i = 0; i < matches.size(); ++i)
    CHECK(matches[i].describe() == again[i].describe());
}

TEST_CASE("matcher handles the quadratic twist at level 30") {
  auto F = F5();
  DirichletCharacter beta = quadratic_mod5(F);
  GaloisRep twist;
  twist.m = 4;
  twist.p = 5;
  twist.field = F;
  twist.summands.push_back({beta, 0});
  twist.summands.push_back({trivial_character(5, F), 1});
  twist.summands.push_back({trivial_character(5, F), 2});
  twist.summands.push_back({beta, 3});
  EigenPackage pkg;
  pkg.m = 4;
  pkg.N = 30;
  pkg.p = 5;
  pkg.field = F;
  for (long ell : {7L, 11L, 13L}) {
    auto cp = frobenius_charpoly(twist, ell);
    for (int k = 1; k <= 4; ++k) {
      auto c = (size_t)k < cp.size() ? cp[k] : F->zero();
      if (k % 2) c = F->neg(c);
      pkg.entries[{ell, k}] = F->mul(c, F->inv(F->pow(F->from_int(ell), k * (k - 1) / 2)));
    }
  }
  auto matches = match_representation(pkg);
  REQUIRE(!matches.empty());
  bool found = false;
  for (auto& r : matches)
    if (reps_equivalent(r, twist, {7, 11, 13, 17})) found = true;
  CHECK(found);
}

TEST_CASE("matcher rejects incompatible packages") {
  auto F = F5();
  // a column that is not a product of linear factors of the right shape
  auto pkg = make_package(4, 11, 5, F,
                          {{2, {1, 0, 0, 1}}, {3, {2, 3, 1, 4}}, {7, {1, 2, 0, 3}}});
  CHECK(match_representation(pkg).empty());
  // fewer than two good primes is an error
  auto tiny = make_package(4, 11, 5, F, {{2, {0, 0, 0, 1}}});
  CHECK_THROWS_AS(match_representation(tiny), std::invalid_argument);
}

TEST_CASE("package and report serialization round trip") {
  auto F = F5();
  auto pkg = make_package(4, 11, 5, F,
                          {{2, {0, 0, 0, 1}}, {3, {0, 0, 0, 1}}, {7, {0, 0, 0, 1}}});
  pkg.u_primes.insert(11);
  EigenPackage back = package_from_json(package_to_json(pkg));
  CHECK(back.m == pkg.m);
  CHECK(back.N == pkg.N);
  CHECK(back.p == pkg.p);
  CHECK(back.u_primes == pkg.u_primes);
  REQUIRE(back.entries.size() == pkg.entries.size());
  for (auto& [key, v] : pkg.entries) CHECK(back.field->eq(back.entries.at(key), v));
  CHECK(package_to_json(back) == package_to_json(pkg));

  auto matches = match_representation(pkg);
  auto report = match_report(pkg, matches, "11a");
  CHECK(report["class_id"] == "11a");
  CHECK(report["level"] == 11);
  CHECK(report["matched"].size() == matches.size());
}
