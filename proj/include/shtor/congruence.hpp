#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "shtor/linalg.hpp"
#include "shtor/retract.hpp"
#include "shtor/sharbly.hpp"

// Level structure: cosets of the subgroup Gamma_0(N) of SL(m,Z) whose
// elements have first row congruent to (*,0,...,0) mod N, the decomposition
// of retract cells into Gamma_0(N)-orbits, assembly of the resulting
// coinvariants chain complex, and torsion extraction.
//
// Orbits whose stabilizer reverses the cell orientation while fixing the
// coset data carry only 2-torsion; they are excluded ("killed") and every
// report is flagged unreliable at the prime 2.

namespace shtor::congruence {

struct NotPrimitive : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A primitive vector in (Z/N)^m up to unit scalars; canonical form has the
// first invertible coordinate scaled to 1 (lexicographically least unit
// multiple when no single coordinate is invertible).
struct CosetLabel {
  int N = 1;
  std::vector<int> coords;  // values in [0, N)
  auto operator<=>(const CosetLabel&) const = default;
};

// canonicalize; throws NotPrimitive unless gcd(coords, N) = 1
CosetLabel make_label(int N, const std::vector<long>& raw);

// the class of the first row of g mod N; constant on left cosets
// Gamma_0(N) g, and a complete invariant of them for det g = 1
CosetLabel coset_label(const Mat& g, int N);

// right action: class of (coords * s) mod N
CosetLabel label_act(const CosetLabel& l, const Mat& s);

// all labels for (Z/N)^m, sorted
std::vector<CosetLabel> all_labels(int m, int N);

// ---- torsion-prime predicate (m = 4) ----

// true iff 25 does not divide N and every prime divisor p != 5 of N
// has p = 1 mod 5; this is the criterion for 5-torsion at the degree-5
// node, on top of the 2- and 3-torsion present for every N
bool five_torsion_exists(long n);

// {2, 3}, plus 5 when five_torsion_exists(n)
std::vector<long> torsion_primes(long n);

struct SearchBudgetExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// independent oracle: exhaustive search for a primitive v in (Z/N)^4 and a
// unit lambda with v Z = lambda v mod N, Z the companion matrix of
// x^4+x^3+x^2+x+1; `budget` caps the number of (v, lambda) tests
bool order5_brute_check(long n, unsigned long long budget = 1ull << 33);

// ---- the level-N coinvariants complex ----

struct LeveledCell {
  int base = -1;      // CellOrbit id
  CosetLabel label;   // canonical orbit representative
  int epsilon = 1;    // +-1, determinant class of the attached coset
  bool killed = false;
};

struct MissingCellTable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class AssembledComplex {
 public:
  int m = 0;
  int N = 1;
  retract::CellTable table;  // the underlying cell orbits
  std::vector<int> dims;     // ascending
  // surviving basis per dim, canonical order; killed orbits listed aside
  std::vector<std::vector<LeveledCell>> bases;
  std::vector<std::vector<LeveledCell>> killed;
  // d_matrices[i]: vector-omission differential, bases[i] -> bases[i+1]
  std::vector<linalg::IntMatrix> d_matrices;

  int dim_pos(int d) const;  // index into dims; throws std::out_of_range

  // class of a cell instance K_base * x given the pair
  // (label(first row of x^-1), det x): index into bases[dim_pos] plus a
  // relative orientation sign, or index -1 for a killed orbit
  struct PairClass {
    int index = -1;
    int sign = 1;
  };
  PairClass classify(int base, const CosetLabel& l, int epsilon) const;

  std::vector<CosetLabel> labels;  // sorted, shared by all dims

 private:
  friend AssembledComplex assemble_complex(retract::CellTable, int);
  // per orbit id: 2*label_index + (epsilon<0 ? 1 : 0) -> PairClass
  std::vector<std::vector<PairClass>> classes_;
};

AssembledComplex assemble_complex(retract::CellTable table, int N);
AssembledComplex assemble_complex(int m, int N, std::vector<int> dims);

// a group element whose inverse has first row congruent to the label
// (so the cell instance K * lift carries exactly this coset data)
Mat label_lift(const CosetLabel& l, int epsilon);

// determinant-one integer matrix with the given primitive first row
Mat sl_completion(const RowVec& first_row);

// integer vector congruent to the label mod N with gcd 1
RowVec primitive_lift(const CosetLabel& l);

// coefficients of a V-supported integral chain on the basis at its
// dimension; killed orbits are dropped.  `idx` must index cx.table.
std::vector<mpz_class> project_chain(const AssembledComplex& cx, const retract::CellIndex& idx,
                                     const sharbly::Chain<sharbly::ZRing>& chain);

// ---- torsion reports ----

struct TorsionReport {
  int m = 0;
  int N = 1;
  int degree = 0;  // cohomological degree = retract cell dimension
  long free_rank = 0;
  std::vector<std::pair<long, int>> torsion;  // (prime, F_p-dimension)
  bool reliable_at_2 = false;                 // always false; see kill rule
};

TorsionReport torsion_classes(const AssembledComplex& cx, int degree);
TorsionReport torsion_classes(int m, int N, int degree);

std::string report_csv(const TorsionReport& r);
std::string report_json(const TorsionReport& r);

}  // namespace shtor::congruence
