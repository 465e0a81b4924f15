#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "shtor/quadform.hpp"

// Perfect quadratic forms (Voronoi enumeration) and the GL(m,Z)-orbits of
// well-rounded-retract cells with stabilizers, orientation data and
// incidence, for m = 2, 3, 4.
//
// A cell is stored by its set of minimal-vector pairs {±v_1,...,±v_k}
// (one canonical-signed representative each); a cell of dimension d has
// k + d = m(m+1)/2.

namespace shtor::retract {

struct PerfectForm {
  QForm gram;            // primitive integer Gram matrix
  mpz_class min_value;
  std::vector<RowVec> min_vectors;  // canonical order, one per +-pair
};

// complete set of GL(m,Z)-class representatives, deterministic order
std::vector<PerfectForm> perfect_forms(int m);

struct BoundaryRecord {
  int target;       // id of a cell orbit of dimension d-1
  Mat transporter;  // h in GL(m,Z); see below
  int sign;         // incidence sign
};
// Meaning of (target=tau, h, s) on a cell sigma of dimension d:
// the symbol [K_sigma * h] appears with coefficient s in the alternating
// vector-omission boundary of [K_tau]; equivalently, tau lies in the
// geometric boundary of the instance K_sigma * h of sigma.

struct CellOrbit {
  int id = -1;
  int dim = 0;
  std::vector<RowVec> min_vectors;   // k canonical vectors, sorted
  std::vector<Mat> stabilizer_gens;  // the full finite stabilizer, as a list
  bool orientation_reversing = false;
  std::vector<BoundaryRecord> boundary;
};

struct UnsupportedDimension : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CellTable {
  int m = 0;
  std::vector<int> dims;  // ascending
  std::vector<CellOrbit> cells;
};

// permitted dims: m=2: {0,1}; m=3: {1,2,3}; m=4: {4,5,6}
CellTable retract_cells(int m, std::vector<int> dims);

struct CellMatch {
  int orbit;
  Mat transporter;  // h with {±K_orbit · h} = {±input}
  int sign;         // parity of the sort permutation; see identify_cell
};

// Decide whether `vectors` (primitive, up to sign) form the minimal-vector
// set of some tabulated cell orbit.  On success the transporter h satisfies
// {±K_o · h} = {±vectors}, and sign is the parity of the permutation taking
// the per-vector-canonicalized list K_o · h to the sorted input list.
std::optional<CellMatch> identify_cell(const std::vector<RowVec>& vectors,
                                       const CellTable& table);

// Precomputed invariants for fast repeated identification.
class CellIndex {
 public:
  explicit CellIndex(const CellTable& table);
  ~CellIndex();
  CellIndex(CellIndex&&) noexcept;
  std::optional<CellMatch> identify(const std::vector<RowVec>& vectors) const;
  const CellTable& table() const { return *table_; }

 private:
  const CellTable* table_;
  struct Inv;
  std::vector<Inv> inv_;
};

// h in GL(m,Z) with {±k1 · h} = {±k2}, if one exists
std::optional<Mat> configuration_equiv(const std::vector<RowVec>& k1,
                                       const std::vector<RowVec>& k2);

// Precomputed pairwise invariants of one configuration, for callers that
// test the same vectors against many candidates.  The fingerprint is a
// GL(m,Z)-invariant of the configuration (equivalent configurations agree)
// suitable as a hash-bucket key.
class Configuration {
 public:
  explicit Configuration(const std::vector<RowVec>& k);
  ~Configuration();
  Configuration(Configuration&&) noexcept;
  Configuration& operator=(Configuration&&) noexcept;
  const std::vector<long>& fingerprint() const;

 private:
  friend std::optional<Mat> configuration_equiv(const Configuration& a, const Configuration& b);
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::optional<Mat> configuration_equiv(const Configuration& a, const Configuration& b);

// the full finite group {h : {±k h} = {±k}}
std::vector<Mat> configuration_stabilizer(const std::vector<RowVec>& k);

// parity (+1/-1) of the permutation h induces on the +-pairs of k
int permutation_sign_on_pairs(const std::vector<RowVec>& k, const Mat& h);

// versioned deterministic text serialization (bit-reproducible)
void write_cell_table(std::ostream& os, const CellTable& t);
CellTable read_cell_table(std::istream& is);

}  // namespace shtor::retract
