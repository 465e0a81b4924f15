#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Runtime finite fields F_{p^e} (p < 2^31 prime) with polynomial arithmetic,
// univariate factorization and root finding.  Elements are coefficient
// vectors of length e over F_p modulo a monic irreducible polynomial.

namespace shtor::gf {

using u64 = std::uint64_t;

class Field {
 public:
  using Elem = std::vector<u64>;  // length degree(), coefficients in [0,p)

  explicit Field(u64 p);                 // prime field
  Field(u64 p, int e);                   // modulus found deterministically
  Field(u64 p, std::vector<u64> modulus);  // monic, length e+1

  u64 p() const { return p_; }
  int degree() const { return e_; }
  const std::vector<u64>& modulus() const { return mod_; }
  mpz_class order() const;  // p^e

  Elem zero() const { return Elem(e_, 0); }
  Elem one() const;
  Elem gen() const;  // class of x (equals from_int image for e = 1)
  Elem from_int(long long n) const;

  bool is_zero(const Elem& a) const;
  bool eq(const Elem& a, const Elem& b) const { return a == b; }

  Elem add(const Elem& a, const Elem& b) const;
  Elem sub(const Elem& a, const Elem& b) const;
  Elem neg(const Elem& a) const;
  Elem mul(const Elem& a, const Elem& b) const;
  Elem inv(const Elem& a) const;  // throws std::domain_error on zero
  Elem pow(const Elem& a, const mpz_class& n) const;
  Elem frobenius(const Elem& a) const;  // a -> a^p

  std::string to_string(const Elem& a) const;

 private:
  u64 p_ = 0;
  int e_ = 1;
  std::vector<u64> mod_;  // monic, length e_+1, over F_p
};

// find a monic irreducible polynomial of degree e over F_p, deterministic
std::vector<u64> find_irreducible(u64 p, int e);

// --- polynomials over a Field, coefficients low to high, no trailing zeros ---

using Poly = std::vector<Field::Elem>;

Poly poly_trim(const Field& F, Poly f);
int poly_deg(const Poly& f);  // -1 for zero
Poly poly_from_ints(const Field& F, const std::vector<long long>& c);
Poly poly_x(const Field& F);
Poly poly_one(const Field& F);
Poly poly_add(const Field& F, const Poly& a, const Poly& b);
Poly poly_sub(const Field& F, const Poly& a, const Poly& b);
Poly poly_mul(const Field& F, const Poly& a, const Poly& b);
Poly poly_scale(const Field& F, const Poly& a, const Field::Elem& c);
// division with remainder; divisor's leading coefficient must be invertible
std::pair<Poly, Poly> poly_divmod(const Field& F, const Poly& a, const Poly& b);
Poly poly_mod(const Field& F, const Poly& a, const Poly& b);
Poly poly_monic(const Field& F, const Poly& a);
Poly poly_gcd(const Field& F, Poly a, Poly b);  // monic (or zero)
Poly poly_pow_mod(const Field& F, Poly base, const mpz_class& n, const Poly& mod);
Poly poly_derivative(const Field& F, const Poly& a);
Field::Elem poly_eval(const Field& F, const Poly& a, const Field::Elem& x);
bool poly_eq(const Poly& a, const Poly& b);
std::string poly_to_string(const Field& F, const Poly& a, const std::string& var = "X");

bool is_irreducible(const Field& F, const Poly& f);

// monic irreducible factors with multiplicities, deterministic order and
// internal randomness (p must be odd for degree > 1 splitting)
std::vector<std::pair<Poly, int>> poly_factor(const Field& F, const Poly& f);

// roots in F with multiplicities
std::vector<std::pair<Field::Elem, int>> poly_roots(const Field& F, const Poly& f);

}  // namespace shtor::gf
