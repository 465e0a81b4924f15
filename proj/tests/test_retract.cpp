#include <doctest.h>

#include <random>
#include <sstream>

#include "shtor/retract.hpp"

using namespace shtor;
using namespace shtor::retract;

namespace {

Mat random_glm(std::mt19937_64& rng, int m) {
  // product of elementary shears and a permutation: always det +-1
  Mat g = Mat::identity(m);
  for (int step = 0; step < 6; ++step) {
    int i = (int)(rng() % m), j = (int)(rng() % m);
    if (i == j) continue;
    Mat e = Mat::identity(m);
    e(i, j) = (long)(rng() % 5) - 2;
    g = mat_mul(g, e);
  }
  return g;
}

}  // namespace

TEST_CASE("perfect form class counts for small ranks") {
  CHECK(perfect_forms(2).size() == 1);  // hexagonal
  CHECK(perfect_forms(3).size() == 1);
  CHECK(perfect_forms(4).size() == 2);
  for (int m = 2; m <= 4; ++m)
    for (const PerfectForm& f : perfect_forms(m)) {
      CHECK(is_positive_definite(f.gram));
      auto [min, vecs] = minimal_vectors(f.gram);
      CHECK(min == f.min_value);
      CHECK(vecs == f.min_vectors);
      // perfect: the minimal vectors determine the form up to scale;
      // necessary condition used here is that there are at least
      // m(m+1)/2 pairs
      CHECK((int)vecs.size() >= m * (m + 1) / 2);
    }
}

TEST_CASE("cell orbit counts and vector-count relation") {
  struct Row {
    int m;
    std::vector<int> dims;
    std::vector<int> counts;
  };
  // frozen from the deterministic enumeration
  std::vector<Row> rows = {{2, {0, 1}, {1, 1}}, {3, {1, 2, 3}, {1, 2, 1}}, {4, {4, 5, 6}, {4, 3, 1}}};
  for (const Row& row : rows) {
    CellTable t = retract_cells(row.m, row.dims);
    CHECK(t.m == row.m);
    for (size_t i = 0; i < row.dims.size(); ++i) {
      int c = 0;
      for (const CellOrbit& cell : t.cells)
        if (cell.dim == row.dims[i]) ++c;
      CHECK(c == row.counts[i]);
    }
    for (const CellOrbit& cell : t.cells) {
      // k + d = m(m+1)/2
      CHECK((int)cell.min_vectors.size() + cell.dim == row.m * (row.m + 1) / 2);
      // stabilizers fix the configuration
      for (const Mat& h : cell.stabilizer_gens) {
        auto match = configuration_equiv(cell.min_vectors, cell.min_vectors);
        REQUIRE(match.has_value());
        std::vector<RowVec> img;
        for (const RowVec& v : cell.min_vectors)
          img.push_back(canonical_sign(row_times_mat(v, h)));
        std::sort(img.begin(), img.end(), lex_less);
        CHECK(img == cell.min_vectors);
      }
    }
  }
}

TEST_CASE("boundary records are geometrically consistent") {
  CellTable t = retract_cells(3, {1, 2, 3});
  for (const CellOrbit& cell : t.cells)
    for (const BoundaryRecord& b : cell.boundary) {
      const CellOrbit& tgt = t.cells[b.target];
      CHECK(tgt.dim == cell.dim - 1);
      CHECK((b.sign == 1 || b.sign == -1));
      // {K_cell * h} must contain the lower cell's configuration data:
      // every minimal vector of the instance is one of the target's
      std::vector<RowVec> inst;
      for (const RowVec& v : cell.min_vectors)
        inst.push_back(canonical_sign(row_times_mat(v, b.transporter)));
      std::sort(inst.begin(), inst.end(), lex_less);
      for (const RowVec& v : inst)
        CHECK(std::binary_search(tgt.min_vectors.begin(), tgt.min_vectors.end(), v,
                                 lex_less));
    }
}

TEST_CASE("identify_cell recovers transformed cells") {
  std::mt19937_64 rng(2718);
  for (int m : {2, 3, 4}) {
    std::vector<int> dims = m == 2   ? std::vector<int>{0, 1}
                            : m == 3 ? std::vector<int>{1, 2, 3}
                                     : std::vector<int>{4, 5, 6};
    CellTable t = retract_cells(m, dims);
    CellIndex index(t);
    for (const CellOrbit& cell : t.cells)
      for (int trial = 0; trial < 5; ++trial) {
        Mat g = random_glm(rng, m);
        std::vector<RowVec> img;
        for (const RowVec& v : cell.min_vectors) img.push_back(row_times_mat(v, g));
        auto match = index.identify(img);
        REQUIRE(match.has_value());
        CHECK(match->orbit == cell.id);
        // transporter property: {+-K_orbit h} = {+-img}
        std::vector<RowVec> lhs, rhs;
        for (const RowVec& v : t.cells[match->orbit].min_vectors)
          lhs.push_back(canonical_sign(row_times_mat(v, match->transporter)));
        for (const RowVec& v : img) rhs.push_back(canonical_sign(v));
        std::sort(lhs.begin(), lhs.end(), lex_less);
        std::sort(rhs.begin(), rhs.end(), lex_less);
        CHECK(lhs == rhs);
      }
    // a non-cell is rejected: use a rank-deficient or alien configuration
    std::vector<RowVec> alien;
    for (int i = 0; i < m; ++i) {
      RowVec v(m, 0);
      v[i] = 1;
      alien.push_back(v);
    }
    // the skewed extra vector gives the configuration form a determinant no
    // orbit has, so this is not the minimal-vector set of any cell
    RowVec skew(m, 0);
    skew[0] = 1;
    skew[1] = 7;
    alien.push_back(skew);
    CHECK_FALSE(index.identify(alien).has_value());
  }
}

TEST_CASE("configuration stabilizer is a group containing the identity action") {
  CellTable t = retract_cells(2, {0, 1});
  for (const CellOrbit& cell : t.cells) {
    auto stab = configuration_stabilizer(cell.min_vectors);
    CHECK(!stab.empty());
    for (const Mat& h : stab) {
      int sgn = permutation_sign_on_pairs(cell.min_vectors, h);
      CHECK((sgn == 1 || sgn == -1));
    }
  }
}

TEST_CASE("cell table serialization round trip") {
  CellTable t = retract_cells(3, {1, 2, 3});
  std::ostringstream os;
  write_cell_table(os, t);
  std::istringstream is(os.str());
  CellTable u = read_cell_table(is);
  std::ostringstream os2;
  write_cell_table(os2, u);
  CHECK(os.str() == os2.str());
  CHECK(u.cells.size() == t.cells.size());
}
