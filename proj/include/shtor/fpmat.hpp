#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "shtor/gf.hpp"

// Dense matrices over a runtime finite field, simultaneous eigen-system
// extraction, and a sparse prime-field solver used by homology computations.

namespace shtor::linalg {

using gf::Field;
using gf::u64;

class FpMatrix {
 public:
  FpMatrix() = default;
  FpMatrix(std::shared_ptr<const Field> f, int rows, int cols)
      : f_(std::move(f)), rows_(rows), cols_(cols), a_((size_t)rows * cols, f_->zero()) {}

  const std::shared_ptr<const Field>& field() const { return f_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Field::Elem& at(int i, int j) { return a_[(size_t)i * cols_ + j]; }
  const Field::Elem& at(int i, int j) const { return a_[(size_t)i * cols_ + j]; }

  static FpMatrix identity(std::shared_ptr<const Field> f, int n);
  FpMatrix multiplied_by(const FpMatrix& o) const;
  bool operator==(const FpMatrix& o) const { return a_ == o.a_; }
  bool is_zero() const;

 private:
  std::shared_ptr<const Field> f_;
  int rows_ = 0, cols_ = 0;
  std::vector<Field::Elem> a_;
};

// characteristic polynomial det(XI - A), monic, via Hessenberg reduction
gf::Poly charpoly(const FpMatrix& a);

long fp_rank(FpMatrix a);
// solution of A x = b, or nullopt
std::optional<std::vector<Field::Elem>> fp_solve(FpMatrix a, std::vector<Field::Elem> b);
// columns form a basis of the kernel of A
std::vector<std::vector<Field::Elem>> fp_kernel(FpMatrix a);

struct NonCommuting : std::runtime_error {
  int i, j;
  NonCommuting(int i_, int j_)
      : std::runtime_error("matrices do not commute"), i(i_), j(j_) {}
};

// One simultaneous-eigenvalue package: the shared eigenvalue of each input
// matrix on a common generalized eigenspace, over F_{p^L}.  Packages related
// by the Frobenius x -> x^p are merged; multiplicity is the total dimension.
struct RawPackage {
  std::vector<Field::Elem> values;  // one per input matrix
  long multiplicity = 0;
};

struct EigenSystem {
  std::shared_ptr<const Field> field;  // F_{p^L} where the eigenvalues live
  std::vector<RawPackage> packages;
  bool outside_bound = false;  // some eigenvalues needed a larger extension
};

// All simultaneous eigenpackages of a commuting family over F_p and its
// extensions up to degree `extension_bound`.  Throws NonCommuting.
EigenSystem simultaneous_eigenpackages(const std::vector<FpMatrix>& mats,
                                       int extension_bound = 4);

// ---- sparse prime-field solver ----
//
// Holds an incremental factorization of the span of a list of sparse columns
// over F_p.  Coefficients are tracked only for columns at index >= tail_start:
// express() reports how much of each tracked column enters the combination.
class FpSolver {
 public:
  using SparseVec = std::map<int, u64>;  // index -> nonzero value

  FpSolver(u64 p, int nrows, int tail_start);

  // add the next column (columns are numbered in insertion order);
  // returns true if it enlarged the span
  bool add_column(const SparseVec& col);

  // if x lies in the span, return the coefficients of the tracked (tail)
  // columns in one expression of x; otherwise nullopt
  std::optional<std::vector<u64>> express(const SparseVec& x) const;

  long rank() const { return (long)basis_.size(); }

 private:
  struct BasisVec {
    SparseVec v;                // reduced vector, pivot has value 1
    int pivot;                  // smallest index with nonzero value
    std::map<int, u64> tail;    // combination coefficients on tracked columns
  };
  u64 p_;
  int nrows_, tail_start_, ncols_ = 0, ntail_ = 0;
  std::vector<BasisVec> basis_;
  std::map<int, int> by_pivot_;  // pivot index -> basis position

  bool reduce(SparseVec& x, std::map<int, u64>& tail) const;
};

}  // namespace shtor::linalg
