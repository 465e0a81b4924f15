#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <vector>

#include "shtor/core.hpp"

// Exact positive-definite quadratic forms on row vectors: Q(v) = v G v^T.
// Minimal- and short-vector enumeration is exact (LLL-reduced box search
// with rational bounds); no floating point.

namespace shtor::retract {

using QForm = std::vector<std::vector<mpz_class>>;  // symmetric m x m

struct NotPositiveDefinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

QForm qform_identity(int m, const mpz_class& scale = 1);
QForm qform_from_mat(const Mat& g);
// Gram matrix sum of v^T v over rows
QForm qform_of_vectors(const std::vector<RowVec>& rows);
mpz_class qform_eval(const QForm& g, const RowVec& v);
// v G w^T
mpz_class qform_pair(const QForm& g, const RowVec& v, const RowVec& w);
// U G U^T for an integer row-transform U
QForm qform_transform(const QForm& g, const Mat& u);
bool qform_eq(const QForm& a, const QForm& b);
// divide by the gcd of all entries
QForm qform_primitive(const QForm& g);

mpz_class qform_det(const QForm& g);
QForm qform_adjugate(const QForm& g);

// leading principal minors all positive
bool is_positive_definite(const QForm& g);

// exact LLL reduction computed from the Gram matrix alone;
// returns (reduced gram, U) with reduced = U * g * U^T, det U = +-1
std::pair<QForm, Mat> lll_reduce(const QForm& g);

// all nonzero v with Q(v) <= bound, one per +-pair, canonical sign,
// sorted lexicographically; throws NotPositiveDefinite
std::vector<RowVec> short_vectors(const QForm& g, const mpz_class& bound);

// the arithmetical minimum and its vectors (primitive, one per +-pair)
std::pair<mpz_class, std::vector<RowVec>> minimal_vectors(const QForm& g);

}  // namespace shtor::retract
