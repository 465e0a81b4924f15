#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "shtor/core.hpp"

// Exact sparse integer linear algebra: Smith normal form and the torsion
// bookkeeping of chain complexes.  All arithmetic is arbitrary precision.

namespace shtor::linalg {

using Int = mpz_class;

// Sparse integer matrix; only nonzero entries are stored.  Dimensions are
// fixed at creation.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_(rows) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  void set(int i, int j, Int v);
  void add(int i, int j, const Int& v);
  Int get(int i, int j) const;

  const std::map<int, Int>& row(int i) const { return row_[i]; }
  long nnz() const;

  static IntMatrix identity(int n);
  static IntMatrix from_dense(const std::vector<std::vector<long>>& a);

  IntMatrix multiplied_by(const IntMatrix& other) const;
  IntMatrix transposed() const;
  bool is_zero() const;
  bool operator==(const IntMatrix& other) const;

  // versioned deterministic text format: header then sorted triples
  void write(std::ostream& os) const;
  static IntMatrix read(std::istream& is);

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<std::map<int, Int>> row_;
};

// A = U * S * V with U, V unimodular, S diagonal with the divisibility chain.
// Uinv and Vinv are the exact inverses of U and V, tracked alongside them
// during the elimination; they certify unimodularity without an inversion.
struct SNFResult {
  IntMatrix U, S, V;
  IntMatrix Uinv, Vinv;
  std::vector<Int> divisors() const;  // nonzero diagonal entries, in order
};

struct SNFOptions {
  bool with_transforms = true;
  // progress callback every `report_every` eliminated pivots (0 = silent)
  long report_every = 0;
};

SNFResult smith_normal_form(const IntMatrix& a, const SNFOptions& opts = {});

// Elementary divisors only (no U/V bookkeeping); cheaper on large inputs.
std::vector<Int> elementary_divisors(const IntMatrix& a, const SNFOptions& opts = {});

long rank_of(const IntMatrix& a);

// exact inverse of a matrix with determinant +-1 (throws std::invalid_argument
// otherwise); Gauss-Jordan with gcd row operations
IntMatrix unimodular_inverse(const IntMatrix& a);

struct CompositionNonzero : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HomologySummands {
  long free_rank = 0;
  std::vector<Int> torsion;  // elementary divisors > 1, divisibility chain
};

// Homology Ker(d_out)/Im(d_in) of   C_in --d_in--> C --d_out--> C_out,
// chains as column vectors.  Throws CompositionNonzero unless d_out*d_in=0.
HomologySummands homology_summands(const IntMatrix& d_in, const IntMatrix& d_out,
                                   const SNFOptions& opts = {});

}  // namespace shtor::linalg
