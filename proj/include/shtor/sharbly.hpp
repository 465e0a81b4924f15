#pragma once

#include <gmpxx.h>

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shtor/core.hpp"
#include "shtor/gf.hpp"
#include "shtor/retract.hpp"

// Sharbly symbols and chains: normalization (permutation sign, vanishing on
// non-spanning lists, free vector signs), the alternating vector-omission
// boundary, and the V-support test against a retract cell table.

namespace shtor::sharbly {

struct ZeroVector : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DegreeZero : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Symbol {
  int m = 0;
  std::vector<RowVec> vectors;  // primitive, canonical-signed, sorted

  int degree() const { return (int)vectors.size() - m; }
  auto operator<=>(const Symbol&) const = default;
};

struct Normalized {
  std::optional<Symbol> symbol;  // nullopt = the zero class
  int sign = 1;                  // meaningful only when symbol is set
};

// re-primitivize, canonicalize signs, drop non-spanning or repeated-vector
// lists, sort with permutation-parity tracking; throws ZeroVector
Normalized normalize(int m, std::vector<RowVec> vectors);

std::string symbol_to_string(const Symbol& s);

// ---- coefficient rings ----

struct ZRing {
  using Coeff = mpz_class;
  Coeff add(const Coeff& a, const Coeff& b) const { return a + b; }
  Coeff neg(const Coeff& a) const { return -a; }
  Coeff mul(const Coeff& a, const Coeff& b) const { return a * b; }
  bool is_zero(const Coeff& a) const { return a == 0; }
  Coeff from_int(long v) const { return Coeff(v); }
  std::string to_string(const Coeff& a) const { return a.get_str(); }
};

struct FpRing {
  gf::u64 p;
  using Coeff = gf::u64;
  Coeff add(Coeff a, Coeff b) const { return (a + b) % p; }
  Coeff neg(Coeff a) const { return a ? p - a : 0; }
  Coeff mul(Coeff a, Coeff b) const { return (Coeff)((unsigned __int128)a * b % p); }
  bool is_zero(Coeff a) const { return a == 0; }
  Coeff from_int(long v) const {
    long r = v % (long)p;
    return (Coeff)(r < 0 ? r + (long)p : r);
  }
  std::string to_string(Coeff a) const { return std::to_string(a); }
};

// ---- chains ----

template <class Ring>
struct Chain {
  int m = 0;
  int degree = 0;
  std::map<Symbol, typename Ring::Coeff> terms;

  bool is_zero() const { return terms.empty(); }
};

template <class Ring>
void chain_add(const Ring& r, Chain<Ring>& c, const Symbol& s, typename Ring::Coeff v) {
  if (r.is_zero(v)) return;
  auto it = c.terms.find(s);
  if (it == c.terms.end()) {
    c.terms.emplace(s, std::move(v));
  } else {
    it->second = r.add(it->second, v);
    if (r.is_zero(it->second)) c.terms.erase(it);
  }
}

template <class Ring>
void chain_add_normalized(const Ring& r, Chain<Ring>& c, int m, std::vector<RowVec> vectors,
                          const typename Ring::Coeff& v) {
  Normalized n = normalize(m, std::move(vectors));
  if (!n.symbol) return;
  chain_add(r, c, *n.symbol, n.sign < 0 ? r.neg(v) : v);
}

template <class Ring>
Chain<Ring> chain_sub(const Ring& r, const Chain<Ring>& a, const Chain<Ring>& b) {
  Chain<Ring> out = a;
  for (auto& [s, v] : b.terms) chain_add(r, out, s, r.neg(v));
  return out;
}

// ∂[v_1,...,v_n] = Σ_i (-1)^i [v_1,...,v̂_i,...,v_n], extended linearly
template <class Ring>
Chain<Ring> boundary(const Ring& r, const Chain<Ring>& c) {
  if (c.degree < 1) throw DegreeZero("boundary: chain has degree 0");
  Chain<Ring> out;
  out.m = c.m;
  out.degree = c.degree - 1;
  for (auto& [s, v] : c.terms) {
    for (size_t i = 0; i < s.vectors.size(); ++i) {
      std::vector<RowVec> sub;
      sub.reserve(s.vectors.size() - 1);
      for (size_t j = 0; j < s.vectors.size(); ++j)
        if (j != i) sub.push_back(s.vectors[j]);
      typename Ring::Coeff t = (i % 2) ? r.neg(v) : v;
      chain_add_normalized(r, out, c.m, std::move(sub), t);
    }
  }
  return out;
}

// apply g (det ±1) to every vector of every symbol
template <class Ring>
Chain<Ring> chain_transform(const Ring& r, const Chain<Ring>& c, const Mat& g) {
  Chain<Ring> out;
  out.m = c.m;
  out.degree = c.degree;
  for (auto& [s, v] : c.terms) {
    std::vector<RowVec> img;
    for (auto& w : s.vectors) img.push_back(row_times_mat(w, g));
    chain_add_normalized(r, out, c.m, std::move(img), v);
  }
  return out;
}

// true iff every symbol of the chain is the minimal-vector set of a
// tabulated retract cell; offenders lists those that are not
template <class Ring>
std::pair<bool, std::vector<Symbol>> v_support(const Chain<Ring>& c,
                                               const retract::CellIndex& index) {
  std::vector<Symbol> offenders;
  for (auto& [s, v] : c.terms)
    if (!index.identify(s.vectors)) offenders.push_back(s);
  return {offenders.empty(), offenders};
}

// one line per term: "coeff ; v1 ; v2 ; ..." in canonical symbol order
template <class Ring>
std::string chain_to_string(const Ring& r, const Chain<Ring>& c) {
  std::string out;
  for (auto& [s, v] : c.terms) {
    out += r.to_string(v);
    for (auto& w : s.vectors) {
      out += " ;";
      for (auto x : w) out += ' ' + std::to_string(x);
    }
    out += '\n';
  }
  return out;
}

}  // namespace shtor::sharbly
