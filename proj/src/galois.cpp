#include "shtor/galois.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#ifdef SHTOR_OPENMP
#include <omp.h>
#endif

namespace shtor::galois {

namespace {

long gcd_l(long a, long b) { return std::gcd(a, b); }

long pow_mod_l(long b, long e, long n) {
  long r = 1 % n;
  b %= n;
  if (b < 0) b += n;
  while (e > 0) {
    if (e & 1) r = (long)((__int128)r * b % n);
    b = (long)((__int128)b * b % n);
    e >>= 1;
  }
  return r;
}

std::vector<std::pair<long, int>> factorize(long n) {
  std::vector<std::pair<long, int>> out;
  for (long q = 2; q * q <= n; ++q)
    if (n % q == 0) {
      int e = 0;
      while (n % q == 0) n /= q, ++e;
      out.push_back({q, e});
    }
  if (n > 1) out.push_back({n, 1});
  return out;
}

long euler_phi(long n) {
  long r = n;
  for (auto& [q, e] : factorize(n)) r = r / q * (q - 1);
  return r;
}

// multiplicative order of a mod n (a coprime to n)
long order_mod(long a, long n) {
  long phi = euler_phi(n);
  long ord = phi;
  for (auto& [q, e] : factorize(phi))
    while (ord % q == 0 && pow_mod_l(a, ord / q, n) == 1) ord /= q;
  return ord;
}

// x with x = a mod m, x = b mod n, for coprime m, n
long crt(long a, long m, long b, long n) {
  for (long x = b % n; x < m * n; x += n)
    if (x % m == a % m) return x;
  throw std::logic_error("crt: no solution");
}

}  // namespace

UnitGroup::UnitGroup(long n) : n_(n) {
  if (n < 1) throw std::invalid_argument("UnitGroup: modulus must be positive");
  // local generators per prime power, lifted to mod n by CRT
  for (auto& [q, e] : factorize(n)) {
    long pe = 1;
    for (int i = 0; i < e; ++i) pe *= q;
    long rest = n / pe;
    std::vector<std::pair<long, long>> local;  // (generator mod pe, order)
    if (q == 2) {
      if (e == 2) local.push_back({3, 2});
      if (e >= 3) {
        local.push_back({pe - 1, 2});
        local.push_back({3, pe / 4});
      }
    } else {
      long phi = pe / q * (q - 1);
      for (long g = 2; g < pe; ++g) {
        if (gcd_l(g, pe) != 1) continue;
        if (order_mod(g, pe) == phi) {
          local.push_back({g, phi});
          break;
        }
      }
    }
    for (auto& [g, ord] : local) {
      long lifted = rest == 1 ? g : crt(g, pe, 1, rest);
      gens_.push_back(lifted % n);
      orders_.push_back(ord);
    }
  }
  // tabulate discrete logs by enumerating the full group
  std::vector<long> exp(gens_.size(), 0);
  for (;;) {
    long v = 1 % n;
    for (size_t i = 0; i < gens_.size(); ++i)
      v = (long)((__int128)v * pow_mod_l(gens_[i], exp[i], n) % n);
    logs_.emplace(v, exp);
    size_t i = 0;
    for (; i < gens_.size(); ++i) {
      if (++exp[i] < orders_[i]) break;
      exp[i] = 0;
    }
    if (i == gens_.size()) break;
  }
}

const std::vector<long>& UnitGroup::log(long a) const {
  long r = a % n_;
  if (r < 0) r += n_;
  auto it = logs_.find(r);
  if (it == logs_.end())
    throw RamifiedPrime("UnitGroup::log: argument not coprime to the modulus");
  return it->second;
}

bool DirichletCharacter::is_trivial() const {
  for (auto& v : gen_values)
    if (!field->eq(v, field->one())) return false;
  return true;
}

Field::Elem DirichletCharacter::value(long a) const {
  const std::vector<long>& e = units->log(a);
  Field::Elem v = field->one();
  for (size_t i = 0; i < gen_values.size(); ++i)
    v = field->mul(v, field->pow(gen_values[i], e[i]));
  return v;
}

long DirichletCharacter::conductor() const {
  for (long f = 1; f <= modulus; ++f) {
    if (modulus % f != 0) continue;
    bool ok = true;
    for (long a = 1; a < modulus + 1 && ok; ++a) {
      if (gcd_l(a, modulus) != 1) continue;
      if (a % f != 1 % f) continue;
      if (!field->eq(value(a), field->one())) ok = false;
    }
    if (ok) return f;
  }
  return modulus;
}

bool operator==(const DirichletCharacter& a, const DirichletCharacter& b) {
  return a.modulus == b.modulus && a.gen_values == b.gen_values;
}

DirichletCharacter trivial_character(long modulus, std::shared_ptr<const Field> field) {
  DirichletCharacter chi;
  chi.modulus = modulus;
  chi.units = std::make_shared<UnitGroup>(modulus);
  chi.field = std::move(field);
  chi.gen_values.assign(chi.units->generators().size(), chi.field->one());
  return chi;
}

namespace {

// a generator of the cyclic group F_q^x
Field::Elem multiplicative_generator(const Field& F) {
  mpz_class qm1 = F.order() - 1;
  long n = qm1.get_si();
  auto fac = factorize(n);
  // search constants first, then polynomials in the generator
  for (long trial = 1;; ++trial) {
    Field::Elem a = F.from_int(trial % (long)F.p());
    if (F.degree() > 1) {
      // mix in powers of the field generator to sweep non-prime elements
      Field::Elem x = F.gen();
      a = F.add(a, F.pow(x, 1 + trial / (long)F.p()));
    }
    if (F.is_zero(a)) continue;
    bool primitive = true;
    for (auto& [q, e] : fac)
      if (F.eq(F.pow(a, mpz_class(n / q)), F.one())) {
        primitive = false;
        break;
      }
    if (primitive) return a;
    if (trial > 100000)
      throw std::runtime_error("multiplicative_generator: search exhausted");
  }
}

}  // namespace

std::vector<DirichletCharacter> all_characters(long modulus,
                                               std::shared_ptr<const Field> field) {
  auto units = std::make_shared<UnitGroup>(modulus);
  mpz_class qm1z = field->order() - 1;
  long qm1 = qm1z.get_si();
  Field::Elem zeta = multiplicative_generator(*field);
  const std::vector<long>& ords = units->orders();
  // the value on a generator of order d ranges over the gcd(d, q-1) roots of
  // unity of order dividing d
  std::vector<std::vector<Field::Elem>> choices(ords.size());
  for (size_t i = 0; i < ords.size(); ++i) {
    long g = gcd_l(ords[i], qm1);
    for (long k = 0; k < g; ++k)
      choices[i].push_back(field->pow(zeta, mpz_class(k * (qm1 / g))));
  }
  std::vector<DirichletCharacter> out;
  std::vector<size_t> pick(ords.size(), 0);
  for (;;) {
    DirichletCharacter chi;
    chi.modulus = modulus;
    chi.units = units;
    chi.field = field;
    for (size_t i = 0; i < ords.size(); ++i) chi.gen_values.push_back(choices[i][pick[i]]);
    out.push_back(std::move(chi));
    size_t i = 0;
    for (; i < pick.size(); ++i) {
      if (++pick[i] < choices[i].size()) break;
      pick[i] = 0;
    }
    if (i == pick.size()) break;
  }
  return out;
}

std::string GaloisRep::describe() const {
  std::ostringstream os;
  for (size_t i = 0; i < summands.size(); ++i) {
    if (i) os << " + ";
    const Summand& s = summands[i];
    bool triv = s.chi.is_trivial();
    if (triv && s.power == 0) {
      os << "1";
      continue;
    }
    if (!triv) {
      os << "chi[" << s.chi.conductor() << "]";
      if (s.power != 0) os << ".";
    }
    if (s.power == 1) os << "eps";
    if (s.power > 1) os << "eps^" << s.power;
  }
  return os.str();
}

Poly frobenius_charpoly(const GaloisRep& rep, long ell) {
  const Field& F = *rep.field;
  if (ell % rep.p == 0)
    throw RamifiedPrime("frobenius_charpoly: ell must be coprime to p");
  for (const Summand& s : rep.summands)
    if (gcd_l(ell, s.chi.modulus) != 1)
      throw RamifiedPrime("frobenius_charpoly: ell ramified in a summand character");
  Poly poly = gf::poly_one(F);
  for (const Summand& s : rep.summands) {
    Field::Elem v = F.mul(s.chi.value(ell), F.pow(F.from_int(ell), s.power));
    Poly lin{F.one(), F.neg(v)};  // 1 - v X
    poly = gf::poly_mul(F, poly, lin);
  }
  return poly;
}

std::vector<long> EigenPackage::good_primes() const {
  std::set<long> ells;
  for (auto& [key, v] : entries) ells.insert(key.first);
  std::vector<long> out;
  for (long ell : ells) {
    if (ell % p == 0 || N % ell == 0 || u_primes.count(ell)) continue;
    bool full = true;
    for (int k = 1; k <= m; ++k)
      if (!entries.count({ell, k})) full = false;
    if (full) out.push_back(ell);
  }
  return out;
}

Poly hecke_lhs_polynomial(const EigenPackage& pkg, long ell) {
  const Field& F = *pkg.field;
  Poly poly;
  for (int k = 0; k <= pkg.m; ++k) {
    Field::Elem a;
    if (k == 0) {
      auto it = pkg.entries.find({ell, 0});
      a = it == pkg.entries.end() ? F.one() : it->second;
    } else {
      auto it = pkg.entries.find({ell, k});
      if (it == pkg.entries.end())
        throw MissingEntry("hecke_lhs_polynomial: missing a(" + std::to_string(ell) + "," +
                           std::to_string(k) + ")");
      a = it->second;
    }
    // (-1)^k ell^{k(k-1)/2} a(ell,k)
    Field::Elem c = F.mul(a, F.pow(F.from_int(ell), k * (k - 1) / 2));
    if (k % 2) c = F.neg(c);
    poly.push_back(c);
  }
  return gf::poly_trim(F, std::move(poly));
}

namespace {

// multiset combinations (nondecreasing index sequences) of length m over
// [0, s)
void enumerate_multisets(int s, int m, std::vector<int>& cur,
                         std::vector<std::vector<int>>& out) {
  if ((int)cur.size() == m) {
    out.push_back(cur);
    return;
  }
  int start = cur.empty() ? 0 : cur.back();
  for (int i = start; i < s; ++i) {
    cur.push_back(i);
    enumerate_multisets(s, m, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<GaloisRep> match_representation(const EigenPackage& pkg,
                                            const MatchOptions& options) {
  std::vector<long> good = pkg.good_primes();
  if (good.size() < 2)
    throw std::invalid_argument("match_representation: need at least two good primes");

  int max_power = options.max_power < 0 ? pkg.m - 1 : options.max_power;
  long cond = options.conductor_bound > 0 ? options.conductor_bound : pkg.N * pkg.p;

  // working field: extend the package field when the search allows larger
  // character value fields (package entries are prime-field scalars and embed
  // as constants)
  std::shared_ptr<const Field> F = pkg.field;
  if (options.extension_degree > F->degree()) {
    if (F->degree() != 1)
      throw std::invalid_argument("match_representation: cannot extend a non-prime field");
    F = std::make_shared<const Field>(F->p(), options.extension_degree);
  }
  auto embed = [&](const Field::Elem& a) {
    Field::Elem b = F->zero();
    for (size_t i = 0; i < a.size(); ++i) b[i] = a[i];
    return b;
  };

  // target polynomials per good prime, in the working field
  std::vector<Poly> target;
  for (long ell : good) {
    Poly t = hecke_lhs_polynomial(pkg, ell);
    Poly te;
    for (auto& c : t) te.push_back(embed(c));
    target.push_back(std::move(te));
  }

  // summand types: (character mod cond, cyclotomic power); value tables at
  // the good primes
  std::vector<DirichletCharacter> chars = all_characters(cond, F);
  struct Type {
    int chi;
    int power;
    std::vector<Field::Elem> values;  // at good primes
  };
  std::vector<Type> types;
  {
    // Frobenius evaluation cannot separate summand types with equal value
    // vectors at the good primes (e.g. mod p a conductor-p character is a
    // power of the cyclotomic character), so each value vector keeps one
    // representative: the one with the smallest (conductor, power)
    std::vector<long> conductor_of(chars.size());
    for (size_t ci = 0; ci < chars.size(); ++ci) conductor_of[ci] = chars[ci].conductor();
    std::map<std::vector<Field::Elem>, Type> by_values;
    for (int ci = 0; ci < (int)chars.size(); ++ci)
      for (int i = 0; i <= max_power; ++i) {
        Type t{ci, i, {}};
        for (long ell : good)
          t.values.push_back(F->mul(chars[ci].value(ell), F->pow(F->from_int(ell), i)));
        auto it = by_values.find(t.values);
        if (it == by_values.end()) {
          by_values.emplace(t.values, std::move(t));
        } else {
          const Type& old = it->second;
          if (std::make_pair(conductor_of[ci], i) <
              std::make_pair(conductor_of[old.chi], old.power))
            it->second = std::move(t);
        }
      }
    for (auto& [vals, t] : by_values) types.push_back(std::move(t));
    std::sort(types.begin(), types.end(), [&](const Type& a, const Type& b) {
      return std::make_pair(conductor_of[a.chi], a.power) <
             std::make_pair(conductor_of[b.chi], b.power);
    });
  }

  // prune: a usable summand's value at the first good prime must be a
  // reciprocal root of the first target polynomial
  std::vector<int> usable;
  for (int j = 0; j < (int)types.size(); ++j) {
    const Field::Elem& v = types[j].values[0];
    if (F->is_zero(v)) continue;
    if (F->is_zero(gf::poly_eval(*F, target[0], F->inv(v)))) usable.push_back(j);
  }

  std::vector<std::vector<int>> candidates;
  std::vector<int> cur;
  enumerate_multisets((int)usable.size(), pkg.m, cur, candidates);

  long nc = (long)candidates.size();
  std::vector<char> hit(nc, 0);
#ifdef SHTOR_OPENMP
#pragma omp parallel for schedule(dynamic, 64) if (options.parallel)
#endif
  for (long a = 0; a < nc; ++a) {
    bool ok = true;
    for (size_t gi = 0; gi < good.size() && ok; ++gi) {
      Poly poly = gf::poly_one(*F);
      for (int pick : candidates[a]) {
        const Field::Elem& v = types[usable[pick]].values[gi];
        Poly lin{F->one(), F->neg(v)};
        poly = gf::poly_mul(*F, poly, lin);
      }
      if (!gf::poly_eq(poly, target[gi])) ok = false;
    }
    if (ok) hit[a] = 1;
  }

  std::vector<GaloisRep> out;
  for (long a = 0; a < nc; ++a) {
    if (!hit[a]) continue;
    GaloisRep rep;
    rep.m = pkg.m;
    rep.p = pkg.p;
    rep.field = F;
    for (int pick : candidates[a]) {
      const Type& t = types[usable[pick]];
      rep.summands.push_back({chars[t.chi], t.power});
    }
    std::sort(rep.summands.begin(), rep.summands.end(), [](const Summand& x, const Summand& y) {
      if (x.power != y.power) return x.power < y.power;
      return x.chi.gen_values < y.chi.gen_values;
    });
    out.push_back(std::move(rep));
  }
  return out;
}

bool reps_equivalent(const GaloisRep& a, const GaloisRep& b, const std::vector<long>& primes) {
  if (a.m != b.m || a.p != b.p) return false;
  for (long ell : primes) {
    Poly pa = frobenius_charpoly(a, ell);
    Poly pb = frobenius_charpoly(b, ell);
    // compare in the common prime subfield when the fields differ
    if (a.field->degree() != b.field->degree()) {
      auto flat = [](const Poly& f) {
        std::vector<std::vector<gf::u64>> out;
        for (auto& c : f) {
          std::vector<gf::u64> cc(c);
          while (cc.size() > 1 && cc.back() == 0) cc.pop_back();
          out.push_back(std::move(cc));
        }
        return out;
      };
      if (flat(pa) != flat(pb)) return false;
    } else if (!gf::poly_eq(pa, pb)) {
      return false;
    }
  }
  return true;
}

nlohmann::json rep_to_json(const GaloisRep& rep) {
  nlohmann::json summands = nlohmann::json::array();
  for (const Summand& s : rep.summands) {
    nlohmann::json gv = nlohmann::json::array();
    for (auto& v : s.chi.gen_values) gv.push_back(v);  // coefficient vectors
    summands.push_back({{"conductor", s.chi.conductor()},
                        {"modulus", s.chi.modulus},
                        {"generator_values", gv},
                        {"cyclotomic_power", s.power}});
  }
  return {{"dimension", rep.m},
          {"p", rep.p},
          {"field_degree", rep.field->degree()},
          {"description", rep.describe()},
          {"summands", summands}};
}

nlohmann::json package_to_json(const EigenPackage& pkg) {
  nlohmann::json entries = nlohmann::json::array();
  for (auto& [key, v] : pkg.entries)
    entries.push_back({{"ell", key.first},
                       {"k", key.second},
                       {"value", v},  // coefficient vector over F_p
                       {"value_str", pkg.field->to_string(v)},
                       {"u_type", pkg.u_primes.count(key.first) > 0}});
  return {{"level", pkg.N},
          {"p", pkg.p},
          {"m", pkg.m},
          {"field_degree", pkg.field->degree()},
          {"u_primes", pkg.u_primes},
          {"entries", entries}};
}

EigenPackage package_from_json(const nlohmann::json& j) {
  EigenPackage pkg;
  pkg.m = j.at("m").get<int>();
  pkg.N = j.at("level").get<long>();
  pkg.p = j.at("p").get<long>();
  int e = j.value("field_degree", 1);
  pkg.field = e == 1 ? std::make_shared<const Field>((gf::u64)pkg.p)
                     : std::make_shared<const Field>((gf::u64)pkg.p, e);
  for (auto& entry : j.at("entries")) {
    long ell = entry.at("ell").get<long>();
    int k = entry.at("k").get<int>();
    Field::Elem v = entry.at("value").get<Field::Elem>();
    v.resize(e, 0);
    pkg.entries[{ell, k}] = std::move(v);
    if (entry.value("u_type", false)) pkg.u_primes.insert(ell);
  }
  for (long ell : j.value("u_primes", std::set<long>{})) pkg.u_primes.insert(ell);
  return pkg;
}

nlohmann::json match_report(const EigenPackage& pkg, const std::vector<GaloisRep>& matches,
                            const std::string& class_id) {
  nlohmann::json ms = nlohmann::json::array();
  for (const GaloisRep& r : matches) ms.push_back(rep_to_json(r));
  return {{"level", pkg.N},
          {"p", pkg.p},
          {"class_id", class_id},
          {"matched", ms},
          {"verified_primes", pkg.good_primes()}};
}

}  // namespace shtor::galois
