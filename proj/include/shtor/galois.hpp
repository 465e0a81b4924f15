#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "shtor/gf.hpp"

// Mod-p Dirichlet/cyclotomic character arithmetic, Frobenius characteristic
// polynomials of character-sum representations, the Hecke-side polynomial
// attached to an eigenvalue package, and the matcher between the two.

namespace shtor::galois {

using gf::Field;
using gf::Poly;

struct RamifiedPrime : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct MissingEntry : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// structure of (Z/nZ)^x: independent generators with their orders, and
// discrete logarithms (n is small; all units are tabulated)
class UnitGroup {
 public:
  explicit UnitGroup(long n);

  long modulus() const { return n_; }
  const std::vector<long>& generators() const { return gens_; }
  const std::vector<long>& orders() const { return orders_; }

  // exponent vector of a over the generators; throws RamifiedPrime when
  // gcd(a, n) > 1
  const std::vector<long>& log(long a) const;

 private:
  long n_ = 1;
  std::vector<long> gens_;
  std::vector<long> orders_;
  std::map<long, std::vector<long>> logs_;
};

// character (Z/modulus)^x -> F_q^x, stored by its values on the generators
struct DirichletCharacter {
  long modulus = 1;
  std::shared_ptr<const UnitGroup> units;
  std::shared_ptr<const Field> field;
  std::vector<Field::Elem> gen_values;  // one per generator

  bool is_trivial() const;
  // chi(a); throws RamifiedPrime when gcd(a, modulus) > 1
  Field::Elem value(long a) const;
  // smallest f | modulus with chi trivial on units congruent to 1 mod f
  long conductor() const;
};

bool operator==(const DirichletCharacter& a, const DirichletCharacter& b);

DirichletCharacter trivial_character(long modulus, std::shared_ptr<const Field> field);

// every character mod `modulus` with values in `field` (order divides q-1),
// deterministic order, the trivial character first
std::vector<DirichletCharacter> all_characters(long modulus,
                                               std::shared_ptr<const Field> field);

// one direct summand chi . eps^power, where eps is the mod-p cyclotomic
// character: eps(Frob_ell) = ell
struct Summand {
  DirichletCharacter chi;
  int power = 0;
};

// semisimple abelian mod-p representation: a formal direct sum of character
// twists of cyclotomic powers
struct GaloisRep {
  int m = 0;
  long p = 0;
  std::shared_ptr<const Field> field;
  std::vector<Summand> summands;  // |summands| = m, multiset semantics

  std::string describe() const;  // e.g. "1 + eps + eps^2 + eps^3"
};

// det(I - rho(Frob_ell) X) = prod over summands of (1 - chi(ell) ell^i X);
// throws RamifiedPrime unless ell is coprime to p and every summand modulus
Poly frobenius_charpoly(const GaloisRep& rep, long ell);

// Hecke eigenvalue package of one eigenclass: a(ell, k) in F_q with the
// convention a(ell, 0) = 1
struct EigenPackage {
  int m = 0;
  long N = 1;
  long p = 0;
  std::shared_ptr<const Field> field;
  std::map<std::pair<long, int>, Field::Elem> entries;  // (ell, k) -> a(ell,k)
  std::set<long> u_primes;  // ell | N: U-type entries, excluded from matching

  // primes with a full column of entries, coprime to p N and not U-type
  std::vector<long> good_primes() const;
};

// sum over k = 0..m of (-1)^k ell^{k(k-1)/2} a(ell,k) X^k in F_q; throws
// MissingEntry when a needed entry is absent (k = 0 defaults to 1)
Poly hecke_lhs_polynomial(const EigenPackage& pkg, long ell);

struct MatchOptions {
  int max_power = -1;        // cyclotomic powers 0..max_power; default m-1
  int extension_degree = 2;  // character values allowed in F_{p^e}, e up to this
  long conductor_bound = 0;  // characters mod divisors of this; default N*p
  bool parallel = true;
};

// every character-sum representation in the search space whose Frobenius
// characteristic polynomial equals the package's Hecke polynomial at every
// good prime of the package; deterministic order, possibly empty.
// Requires at least two good primes.
std::vector<GaloisRep> match_representation(const EigenPackage& pkg,
                                            const MatchOptions& options = {});

// whether two representations have equal Frobenius characteristic
// polynomials at every listed prime (the matcher reports one representative
// per such equivalence class)
bool reps_equivalent(const GaloisRep& a, const GaloisRep& b, const std::vector<long>& primes);

// ---- serialization ----

nlohmann::json rep_to_json(const GaloisRep& rep);
nlohmann::json package_to_json(const EigenPackage& pkg);
EigenPackage package_from_json(const nlohmann::json& j);
// {level, p, class_id, matched: [...], verified_primes: [...]}
nlohmann::json match_report(const EigenPackage& pkg, const std::vector<GaloisRep>& matches,
                            const std::string& class_id);

}  // namespace shtor::galois
