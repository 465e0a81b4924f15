#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "shtor/congruence.hpp"
#include "shtor/fpmat.hpp"
#include "shtor/sharbly.hpp"

// Hecke operators on the coinvariants complex: double-coset representatives
// for T(ell,k) (and the U-analogue at ell | N), the action on sharbly chains,
// reduction of arbitrary chains to V-supported chains with an exact
// homotopy certificate, and the induced matrices on homology at a node.

namespace shtor::hecke {

using congruence::AssembledComplex;
using linalg::FpMatrix;
using linalg::Int;
using linalg::IntMatrix;
using sharbly::Chain;
using sharbly::ZRing;

struct SingularMatrix : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotACycle : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ReductionFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TwoTorsionUnsupported : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct HeckeOperator {
  int m = 0;
  long ell = 0;
  int k = 0;
  int N = 1;
  bool u_type = false;    // ell | N: restricted representative list
  std::vector<Mat> reps;  // right-coset representatives, det = ell^k

  std::string name() const;  // "T(2,1)" / "U(2,1)"
};

// number of k-dimensional subspaces of F_ell^m
mpz_class gaussian_binomial(int m, int k, long ell);

// Right-coset representatives of Gamma_0(N) D(ell,k) Gamma_0(N), one per
// column sublattice of index ell^k and exponent ell, adjusted so the first
// row satisfies the level-N congruence.  For ell | N only the sublattices
// whose representative has first row primitive mod N are kept.
HeckeOperator double_coset_reps(int m, long ell, int k, int N);

// v -> v s on every vector of every symbol, re-primitivized and normalized;
// throws SingularMatrix when det s = 0
Chain<ZRing> act(const Chain<ZRing>& c, const Mat& s);

// sum of act over the representative list
Chain<ZRing> apply_operator(const Chain<ZRing>& c, const HeckeOperator& op);

struct ReduceStats {
  long cone_steps = 0;
  long forced_steps = 0;  // steps where no strictly-shrinking point existed
};

struct ReduceResult {
  Chain<ZRing> output;       // V-supported, one representative per class
  Chain<ZRing> certificate;  // degree + 1; output = scale * input + boundary(certificate)
  mpz_class scale = 1;       // power of 2: divisions by 2 forced by symbols whose
                             // cone folds back onto themselves are deferred here
  ReduceStats stats;
};

// Rewrite `chain` as a homologous V-supported chain by repeated coning of
// the worst non-V symbol class at a short reducing point of its associated
// positive form.  All bookkeeping is modulo Gamma_0(N): symbols in the same
// Gamma_0(N)-orbit merge (with the orientation sign), and orbits carrying an
// orientation-reversing self-equivalence are 2-torsion and are dropped --
// this is the step that is only valid away from the prime 2.  The
// certificate satisfies output = input + boundary(certificate) in the
// coinvariant complex.  Throws NotACycle if the boundary of `chain` does
// not vanish modulo the identifications, BudgetExhausted after `budget`
// cone steps.
ReduceResult reduce_to_V(const Chain<ZRing>& chain, const retract::CellIndex& index, int N,
                         long budget = 10000);

// ---- homology at a node of the assembled complex ----

struct SpuriousCycleWarning {
  int basis_index = -1;  // p-torsion generator that reduced to zero
};

struct HeckeOptions {
  long budget = 10000;
  bool parallel = true;  // OpenMP over coset representatives
  std::vector<SpuriousCycleWarning>* warnings = nullptr;
};

// Presentation of H = Ker(d_out)/Im(d_in) at one cell dimension of an
// assembled complex, with the plumbing needed to run Hecke operators on it:
// V-sharbly chains for basis cells, integral cycle generators, and the
// expression of an output cycle in homology coordinates.
class NodeHomology {
 public:
  NodeHomology(const AssembledComplex& cx, int node_dim);

  const AssembledComplex& complex() const { return *cx_; }
  int node_dim() const { return node_dim_; }
  long free_rank() const { return free_rank_; }
  const std::vector<Int>& divisors() const { return divisors_; }

  long p_torsion_dim(long p) const;
  // dimension of H tensor F_p (free rank + number of divisors divisible by p)
  long mod_p_dim(long p) const;

  // the V-sharbly chain of basis cell `i` at the node (projects to e_i)
  Chain<ZRing> cell_chain(int i) const;
  // integral cycle whose class is x in homology coordinates
  std::vector<Int> cycle_of(const std::vector<Int>& homology_coords) const;

  // homology coordinates of an integral cycle (node-chain coordinates);
  // throws NotACycle if the vector is not in Ker(d_out)
  std::vector<Int> express(const std::vector<Int>& cycle) const;

  // matrix of op on the p-torsion subspace {x : p x = 0}; p odd
  FpMatrix matrix_on_torsion(const HeckeOperator& op, long p,
                             const HeckeOptions& opts = {}) const;
  // matrix of op on H tensor F_p; p odd
  FpMatrix matrix_mod_p(const HeckeOperator& op, long p,
                        const HeckeOptions& opts = {}) const;

  // image class of the basis chain `i` of the given subspace, as homology
  // coordinates of the reduced, reconverted Hecke image
  std::vector<Int> apply_to_class(const HeckeOperator& op, const std::vector<Int>& coords,
                                  const HeckeOptions& opts = {}) const;

 private:
  const AssembledComplex* cx_;
  std::shared_ptr<const retract::CellIndex> index_;
  int node_dim_ = 0;
  int pos_ = 0;   // dim position in cx_->dims
  long n_ = 0;    // chain rank at the node
  long ker_rank_ = 0;  // rank r of d_out (head coordinates that must vanish)
  IntMatrix v_out_;       // SNF row transform of d_out: head of v_out * x = 0 on cycles
  IntMatrix u_pres_;      // column transform of the presentation SNF (g x g)
  IntMatrix u_pres_inv_;  // its inverse
  std::vector<Int> divisors_;  // presentation divisors (1s kept for alignment)
  long free_rank_ = 0;
  IntMatrix kernel_;  // n x g, columns form a basis of Ker(d_out)
  std::vector<int> chain_sign_;  // per basis cell: projection sign fix
};

// p = 2 requests are rejected at the interface
void require_odd(long p);

}  // namespace shtor::hecke
