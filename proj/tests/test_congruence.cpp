#include <doctest.h>

#include <random>

#include "json.hpp"
#include "shtor/congruence.hpp"

using namespace shtor;
using namespace shtor::congruence;

namespace {

Mat random_sl(std::mt19937_64& rng, int m) {
  Mat g = Mat::identity(m);
  for (int step = 0; step < 8; ++step) {
    int i = (int)(rng() % m), j = (int)(rng() % m);
    if (i == j) continue;
    Mat e = Mat::identity(m);
    e(i, j) = (long)(rng() % 5) - 2;
    g = mat_mul(g, e);
  }
  return g;
}

Mat random_gamma0(std::mt19937_64& rng, int m, int N) {
  // shears that keep the first row congruent to (*, 0, ..., 0) mod N
  Mat g = Mat::identity(m);
  for (int step = 0; step < 8; ++step) {
    int i = (int)(rng() % m), j = (int)(rng() % m);
    if (i == j) continue;
    Mat e = Mat::identity(m);
    long c = (long)(rng() % 5) - 2;
    e(i, j) = (i == 0 && j != 0) ? c * N : c;
    g = mat_mul(g, e);
  }
  return g;
}

}  // namespace

TEST_CASE("coset labels canonicalize and reject imprimitive data") {
  CHECK(make_label(11, {2, 6}) == make_label(11, {4, 12}));  // unit rescale
  CHECK(make_label(11, {2, 6}) == make_label(11, {-9, 6}));  // mod N
  CHECK_THROWS_AS(make_label(6, {2, 4}), NotPrimitive);
  CHECK_THROWS_AS(make_label(5, {0, 0}), NotPrimitive);
  // canonical forms are fixed points of make_label
  for (const CosetLabel& l : all_labels(2, 12)) {
    std::vector<long> raw(l.coords.begin(), l.coords.end());
    CHECK(make_label(12, raw) == l);
  }
}

TEST_CASE("label counts match subgroup indices in rank 2") {
  CHECK(all_labels(2, 1).size() == 1);
  CHECK(all_labels(2, 2).size() == 3);
  CHECK(all_labels(2, 11).size() == 12);   // 11 + 1
  CHECK(all_labels(2, 6).size() == 12);    // 6 * (3/2) * (4/3)
  CHECK(all_labels(4, 2).size() == 15);    // nonzero vectors of F_2^4
}

TEST_CASE("coset_label is a left Gamma_0 invariant and acts on the right") {
  std::mt19937_64 rng(42);
  for (int m : {2, 3}) {
    for (int N : {2, 5, 11}) {
      for (int trial = 0; trial < 20; ++trial) {
        Mat g = random_sl(rng, m);
        Mat gamma = random_gamma0(rng, m, N);
        CHECK(coset_label(mat_mul(gamma, g), N) == coset_label(g, N));
        Mat s = random_sl(rng, m);
        CHECK(coset_label(mat_mul(g, s), N) == label_act(coset_label(g, N), s));
      }
    }
  }
}

TEST_CASE("lifts reproduce their label and determinant") {
  for (int N : {2, 11}) {
    for (const CosetLabel& l : all_labels(3, N)) {
      RowVec v = primitive_lift(l);
      CHECK(content(v) == 1);
      for (int j = 0; j < 3; ++j)
        CHECK(((v[j] - l.coords[j]) % N + N) % N == 0);
      Mat c = sl_completion(v);
      CHECK(det(c) == 1);
      for (int j = 0; j < 3; ++j) CHECK(c(0, j) == v[j]);
      for (int eps : {1, -1}) {
        Mat x = label_lift(l, eps);
        CHECK(det(x) == eps);
        Mat xi = unimodular_inverse(x);
        CHECK(coset_label(xi, N) == l);
      }
    }
  }
}

TEST_CASE("five-torsion criterion agrees with the exhaustive order-5 search") {
  // spot values
  for (long n : {5L, 11L, 31L, 41L, 55L}) CHECK(five_torsion_exists(n));
  for (long n : {2L, 3L, 7L, 22L, 25L, 30L, 50L}) CHECK_FALSE(five_torsion_exists(n));
  for (long n = 1; n <= 24; ++n)
    CHECK(five_torsion_exists(n) == order5_brute_check(n));
  CHECK(order5_brute_check(31));
  CHECK_FALSE(order5_brute_check(30));
}

TEST_CASE("torsion prime lists") {
  CHECK(torsion_primes(11) == std::vector<long>{2, 3, 5});
  CHECK(torsion_primes(22) == std::vector<long>{2, 3});
  CHECK(torsion_primes(1) == std::vector<long>{2, 3, 5});
}

TEST_CASE("assembled complex basis sizes, rank 2 and 3") {
  // frozen from the deterministic enumeration
  struct Row { int m, N; std::vector<size_t> sizes; };
  std::vector<Row> rows = {
      {2, 2, {1, 1}}, {2, 3, {2, 2}}, {2, 11, {4, 6}},
      {3, 2, {1, 0, 0}}, {3, 3, {2, 0, 0}}, {3, 5, {4, 0, 0}}};
  for (const Row& r : rows) {
    std::vector<int> dims = r.m == 2 ? std::vector<int>{0, 1} : std::vector<int>{1, 2, 3};
    AssembledComplex cx = assemble_complex(r.m, r.N, dims);
    REQUIRE(cx.bases.size() == r.sizes.size());
    for (size_t i = 0; i < r.sizes.size(); ++i) CHECK(cx.bases[i].size() == r.sizes[i]);
    // classify round trip on the surviving basis
    for (size_t i = 0; i < cx.bases.size(); ++i)
      for (size_t j = 0; j < cx.bases[i].size(); ++j) {
        const LeveledCell& c = cx.bases[i][j];
        auto pc = cx.classify(c.base, c.label, c.epsilon);
        CHECK(pc.index == (int)j);
        CHECK(pc.sign == 1);
      }
    for (const auto& layer : cx.killed)
      for (const LeveledCell& c : layer)
        CHECK(cx.classify(c.base, c.label, c.epsilon).index == -1);
  }
}

TEST_CASE("homology at the interesting node, rank 2 and 3") {
  TorsionReport r = torsion_classes(2, 11, 1);
  CHECK(r.free_rank == 3);
  CHECK(r.torsion.empty());
  CHECK_FALSE(r.reliable_at_2);
  CHECK(torsion_classes(2, 2, 1).free_rank == 1);
  CHECK(torsion_classes(2, 3, 1).free_rank == 1);
  TorsionReport r3 = torsion_classes(3, 5, 2);
  CHECK(r3.free_rank == 0);
  CHECK(r3.torsion.empty());
}

TEST_CASE("report serialization") {
  TorsionReport r = torsion_classes(2, 11, 1);
  std::string csv = report_csv(r);
  CHECK(csv.rfind("level,prime,dimension", 0) == 0);
  auto j = nlohmann::json::parse(report_json(r));
  CHECK(j["level"] == 11);
  CHECK(j["free-rank"] == 3);
  CHECK(j["reliable-at-2"] == false);
  CHECK(j["torsion"].empty());
}
