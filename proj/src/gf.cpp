#include "shtor/gf.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace shtor::gf {

namespace {

u64 add_p(u64 a, u64 b, u64 p) {
  u64 s = a + b;
  return s >= p ? s - p : s;
}
u64 sub_p(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }
u64 mul_p(u64 a, u64 b, u64 p) {
  return (u64)((unsigned __int128)a * b % p);
}
u64 pow_p(u64 a, u64 n, u64 p) {
  u64 r = 1 % p;
  while (n) {
    if (n & 1) r = mul_p(r, a, p);
    a = mul_p(a, a, p);
    n >>= 1;
  }
  return r;
}
u64 inv_p(u64 a, u64 p) { return pow_p(a % p, p - 2, p); }

bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<int> prime_divisors(int n) {
  std::vector<int> out;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace

Field::Field(u64 p) : p_(p), e_(1), mod_{0, 1} {
  if (!is_prime_u64(p) || p >= (1ull << 31)) throw std::invalid_argument("Field: bad prime");
}

Field::Field(u64 p, int e) : Field(p, find_irreducible(p, e)) {}

Field::Field(u64 p, std::vector<u64> modulus) : p_(p), mod_(std::move(modulus)) {
  if (!is_prime_u64(p) || p >= (1ull << 31)) throw std::invalid_argument("Field: bad prime");
  e_ = (int)mod_.size() - 1;
  if (e_ < 1 || mod_[e_] != 1) throw std::invalid_argument("Field: modulus must be monic");
  for (u64& c : mod_) c %= p_;
}

mpz_class Field::order() const {
  mpz_class q;
  mpz_ui_pow_ui(q.get_mpz_t(), (unsigned long)p_, (unsigned long)e_);
  return q;
}

Field::Elem Field::one() const {
  Elem a(e_, 0);
  a[0] = 1 % p_;
  return a;
}

Field::Elem Field::gen() const {
  Elem a(e_, 0);
  if (e_ > 1)
    a[1] = 1;
  else
    a[0] = (p_ - mod_[0]) % p_;  // x mod (x + c) = -c
  return a;
}

Field::Elem Field::from_int(long long n) const {
  long long r = n % (long long)p_;
  if (r < 0) r += (long long)p_;
  Elem a(e_, 0);
  a[0] = (u64)r;
  return a;
}

bool Field::is_zero(const Elem& a) const {
  for (u64 c : a)
    if (c) return false;
  return true;
}

Field::Elem Field::add(const Elem& a, const Elem& b) const {
  Elem c(e_);
  for (int i = 0; i < e_; ++i) c[i] = add_p(a[i], b[i], p_);
  return c;
}

Field::Elem Field::sub(const Elem& a, const Elem& b) const {
  Elem c(e_);
  for (int i = 0; i < e_; ++i) c[i] = sub_p(a[i], b[i], p_);
  return c;
}

Field::Elem Field::neg(const Elem& a) const {
  Elem c(e_);
  for (int i = 0; i < e_; ++i) c[i] = a[i] ? p_ - a[i] : 0;
  return c;
}

Field::Elem Field::mul(const Elem& a, const Elem& b) const {
  std::vector<u64> c(2 * e_ - 1, 0);
  for (int i = 0; i < e_; ++i) {
    if (!a[i]) continue;
    for (int j = 0; j < e_; ++j)
      if (b[j]) c[i + j] = add_p(c[i + j], mul_p(a[i], b[j], p_), p_);
  }
  // reduce modulo the monic modulus
  for (int d = 2 * e_ - 2; d >= e_; --d) {
    u64 lead = c[d];
    if (!lead) continue;
    c[d] = 0;
    for (int i = 0; i < e_; ++i)
      if (mod_[i]) c[d - e_ + i] = sub_p(c[d - e_ + i], mul_p(lead, mod_[i], p_), p_);
  }
  c.resize(e_);
  return c;
}

Field::Elem Field::inv(const Elem& a) const {
  if (is_zero(a)) throw std::domain_error("Field::inv: zero");
  if (e_ == 1) {
    Elem r(1);
    r[0] = inv_p(a[0], p_);
    return r;
  }
  // extended Euclid over F_p[x] on (a, modulus)
  using P = std::vector<u64>;
  auto trim = [](P f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
    return f;
  };
  P r0 = mod_, r1 = trim(a);
  P s0{}, s1{1};
  while (!r1.empty()) {
    // divide r0 by r1
    P q(r0.size() > r1.size() - 1 ? r0.size() - r1.size() + 1 : 0, 0);
    P rem = r0;
    u64 linv = inv_p(r1.back(), p_);
    for (int d = (int)rem.size() - 1; d >= (int)r1.size() - 1; --d) {
      if (d >= (int)rem.size() || rem[d] == 0) continue;
      u64 f = mul_p(rem[d], linv, p_);
      q[d - (r1.size() - 1)] = f;
      for (size_t i = 0; i < r1.size(); ++i)
        rem[d - (r1.size() - 1) + i] = sub_p(rem[d - (r1.size() - 1) + i], mul_p(f, r1[i], p_), p_);
    }
    rem = trim(rem);
    // s2 = s0 - q*s1
    P qs(q.size() + s1.size(), 0);
    for (size_t i = 0; i < q.size(); ++i)
      if (q[i])
        for (size_t j = 0; j < s1.size(); ++j)
          if (s1[j]) qs[i + j] = add_p(qs[i + j], mul_p(q[i], s1[j], p_), p_);
    P s2(std::max(s0.size(), qs.size()), 0);
    for (size_t i = 0; i < s2.size(); ++i) {
      u64 x = i < s0.size() ? s0[i] : 0;
      u64 y = i < qs.size() ? qs[i] : 0;
      s2[i] = sub_p(x, y, p_);
    }
    r0 = r1;
    r1 = rem;
    s0 = s1;
    s1 = trim(s2);
  }
  if (r0.size() != 1) throw std::domain_error("Field::inv: modulus not irreducible");
  u64 c = inv_p(r0[0], p_);
  Elem out(e_, 0);
  for (size_t i = 0; i < s0.size() && i < (size_t)e_; ++i) out[i] = mul_p(s0[i], c, p_);
  return out;
}

Field::Elem Field::pow(const Elem& a, const mpz_class& n) const {
  if (n < 0) return pow(inv(a), -n);
  Elem base = a, r = one();
  mpz_class m = n;
  while (m > 0) {
    if (mpz_odd_p(m.get_mpz_t())) r = mul(r, base);
    base = mul(base, base);
    m >>= 1;
  }
  return r;
}

Field::Elem Field::frobenius(const Elem& a) const { return pow(a, mpz_class((unsigned long)p_)); }

std::string Field::to_string(const Elem& a) const {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < e_; ++i) os << (i ? "," : "") << a[i];
  os << ']';
  return os.str();
}

// ---------------- polynomials ----------------

Poly poly_trim(const Field& F, Poly f) {
  while (!f.empty() && F.is_zero(f.back())) f.pop_back();
  return f;
}

int poly_deg(const Poly& f) { return (int)f.size() - 1; }

Poly poly_from_ints(const Field& F, const std::vector<long long>& c) {
  Poly f;
  f.reserve(c.size());
  for (long long x : c) f.push_back(F.from_int(x));
  return poly_trim(F, std::move(f));
}

Poly poly_x(const Field& F) { return {F.zero(), F.one()}; }
Poly poly_one(const Field& F) { return {F.one()}; }

Poly poly_add(const Field& F, const Poly& a, const Poly& b) {
  Poly c(std::max(a.size(), b.size()), F.zero());
  for (size_t i = 0; i < c.size(); ++i) {
    if (i < a.size()) c[i] = F.add(c[i], a[i]);
    if (i < b.size()) c[i] = F.add(c[i], b[i]);
  }
  return poly_trim(F, std::move(c));
}

Poly poly_sub(const Field& F, const Poly& a, const Poly& b) {
  Poly c(std::max(a.size(), b.size()), F.zero());
  for (size_t i = 0; i < c.size(); ++i) {
    if (i < a.size()) c[i] = F.add(c[i], a[i]);
    if (i < b.size()) c[i] = F.sub(c[i], b[i]);
  }
  return poly_trim(F, std::move(c));
}

Poly poly_mul(const Field& F, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, F.zero());
  for (size_t i = 0; i < a.size(); ++i) {
    if (F.is_zero(a[i])) continue;
    for (size_t j = 0; j < b.size(); ++j) c[i + j] = F.add(c[i + j], F.mul(a[i], b[j]));
  }
  return poly_trim(F, std::move(c));
}

Poly poly_scale(const Field& F, const Poly& a, const Field::Elem& s) {
  Poly c;
  c.reserve(a.size());
  for (auto& x : a) c.push_back(F.mul(x, s));
  return poly_trim(F, std::move(c));
}

std::pair<Poly, Poly> poly_divmod(const Field& F, const Poly& a, const Poly& b) {
  if (b.empty()) throw std::domain_error("poly_divmod: division by zero");
  Poly rem = a;
  if (a.size() < b.size()) return {{}, rem};
  Poly q(a.size() - b.size() + 1, F.zero());
  auto linv = F.inv(b.back());
  for (int d = (int)rem.size() - 1; d >= (int)b.size() - 1; --d) {
    if (F.is_zero(rem[d])) continue;
    auto f = F.mul(rem[d], linv);
    q[d - (b.size() - 1)] = f;
    for (size_t i = 0; i < b.size(); ++i) {
      size_t k = d - (b.size() - 1) + i;
      rem[k] = F.sub(rem[k], F.mul(f, b[i]));
    }
  }
  return {poly_trim(F, std::move(q)), poly_trim(F, std::move(rem))};
}

Poly poly_mod(const Field& F, const Poly& a, const Poly& b) { return poly_divmod(F, a, b).second; }

Poly poly_monic(const Field& F, const Poly& a) {
  if (a.empty()) return a;
  return poly_scale(F, a, F.inv(a.back()));
}

Poly poly_gcd(const Field& F, Poly a, Poly b) {
  a = poly_trim(F, std::move(a));
  b = poly_trim(F, std::move(b));
  while (!b.empty()) {
    Poly r = poly_mod(F, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return poly_monic(F, a);
}

Poly poly_pow_mod(const Field& F, Poly base, const mpz_class& n, const Poly& mod) {
  Poly r = poly_one(F);
  base = poly_mod(F, base, mod);
  mpz_class m = n;
  while (m > 0) {
    if (mpz_odd_p(m.get_mpz_t())) r = poly_mod(F, poly_mul(F, r, base), mod);
    base = poly_mod(F, poly_mul(F, base, base), mod);
    m >>= 1;
  }
  return r;
}

Poly poly_derivative(const Field& F, const Poly& a) {
  Poly d;
  for (size_t i = 1; i < a.size(); ++i) d.push_back(F.mul(a[i], F.from_int((long long)i)));
  return poly_trim(F, std::move(d));
}

Field::Elem poly_eval(const Field& F, const Poly& a, const Field::Elem& x) {
  Field::Elem r = F.zero();
  for (size_t i = a.size(); i-- > 0;) r = F.add(F.mul(r, x), a[i]);
  return r;
}

bool poly_eq(const Poly& a, const Poly& b) { return a == b; }

std::string poly_to_string(const Field& F, const Poly& a, const std::string& var) {
  if (a.empty()) return "0";
  std::ostringstream os;
  for (size_t i = 0; i < a.size(); ++i) {
    if (F.is_zero(a[i])) continue;
    if (os.tellp() > 0) os << " + ";
    os << F.to_string(a[i]);
    if (i == 1) os << "*" << var;
    if (i > 1) os << "*" << var << "^" << i;
  }
  return os.str();
}

bool is_irreducible(const Field& F, const Poly& f) {
  int n = poly_deg(f);
  if (n <= 0) return false;
  if (n == 1) return true;
  mpz_class q = F.order();
  // x^(q^j) mod f by iterating the q-power map
  auto qpow_iter = [&](int j) {
    Poly b = poly_x(F);
    for (int t = 0; t < j; ++t) b = poly_pow_mod(F, b, q, f);
    return b;
  };
  Poly xn = qpow_iter(n);
  if (!poly_eq(xn, poly_mod(F, poly_x(F), f))) return false;
  for (int r : {2, 3, 5, 7, 11, 13}) {
    if (n % r != 0 || r > n) continue;
    Poly xd = qpow_iter(n / r);
    Poly g = poly_gcd(F, poly_sub(F, xd, poly_x(F)), f);
    if (poly_deg(g) != 0) return false;
  }
  if (n > 16 * 13) throw std::domain_error("is_irreducible: degree too large");
  return true;
}

std::vector<u64> find_irreducible(u64 p, int e) {
  if (e == 1) return {0, 1};
  Field Fp(p);
  for (u64 counter = 0;; ++counter) {
    std::vector<u64> coeffs(e + 1, 0);
    coeffs[e] = 1;
    u64 c = counter;
    for (int i = 0; i < e && c; ++i) {
      coeffs[i] = c % p;
      c /= p;
    }
    if (c) throw std::runtime_error("find_irreducible: search exhausted");
    Poly f;
    for (u64 x : coeffs) f.push_back(Field::Elem{x % p});
    if (is_irreducible(Fp, f)) return coeffs;
  }
}

namespace {

// p-th root of f(x) = g(x^p): inverse Frobenius on coefficients
Poly poly_pth_root(const Field& F, const Poly& f) {
  mpz_class inv_frob = F.order() / (long)1;
  inv_frob /= (unsigned long)F.p();  // q/p : c -> c^(q/p) is the inverse of c -> c^p
  Poly g;
  for (size_t i = 0; i < f.size(); i += F.p()) g.push_back(F.pow(f[i], inv_frob));
  return poly_trim(F, std::move(g));
}

void equal_degree_split(const Field& F, Poly g, int d, std::mt19937_64& rng,
                        std::vector<Poly>& out) {
  int n = poly_deg(g);
  if (n == d) {
    out.push_back(poly_monic(F, g));
    return;
  }
  if (F.p() == 2)
    throw std::domain_error("poly_factor: equal-degree splitting in characteristic 2 unsupported");
  mpz_class qd = 1;
  for (int t = 0; t < d; ++t) qd *= F.order();
  mpz_class exp = (qd - 1) / 2;
  for (;;) {
    Poly r(n, F.zero());
    for (int i = 0; i < n; ++i) {
      Field::Elem e(F.degree());
      for (int j = 0; j < F.degree(); ++j) e[j] = rng() % F.p();
      r[i] = e;
    }
    r = poly_trim(F, std::move(r));
    if (poly_deg(r) < 1) continue;
    Poly t = poly_pow_mod(F, r, exp, g);
    t = poly_sub(F, t, poly_one(F));
    Poly u = poly_gcd(F, t, g);
    int du = poly_deg(u);
    if (du > 0 && du < n) {
      equal_degree_split(F, u, d, rng, out);
      equal_degree_split(F, poly_divmod(F, g, u).first, d, rng, out);
      return;
    }
  }
}

// distinct monic irreducible factors of f (no multiplicities)
void distinct_factors(const Field& F, Poly f, std::mt19937_64& rng, std::vector<Poly>& out) {
  f = poly_monic(F, poly_trim(F, std::move(f)));
  if (poly_deg(f) <= 0) return;
  Poly df = poly_derivative(F, f);
  if (df.empty()) {
    distinct_factors(F, poly_pth_root(F, f), rng, out);
    return;
  }
  Poly g = poly_gcd(F, f, df);
  Poly s = poly_divmod(F, f, g).first;  // squarefree, contains factors of mult not div by p
  if (poly_deg(g) > 0) distinct_factors(F, g, rng, out);
  // distinct-degree factorization of s
  s = poly_monic(F, s);
  Poly h = poly_x(F);
  mpz_class q = F.order();
  for (int d = 1; poly_deg(s) >= 2 * d; ++d) {
    h = poly_pow_mod(F, h, q, s);
    Poly gd = poly_gcd(F, poly_sub(F, h, poly_x(F)), s);
    if (poly_deg(gd) > 0) {
      equal_degree_split(F, gd, d, rng, out);
      s = poly_divmod(F, s, gd).first;
      h = poly_mod(F, h, s);
    }
  }
  if (poly_deg(s) > 0) out.push_back(poly_monic(F, s));
}

}  // namespace

std::vector<std::pair<Poly, int>> poly_factor(const Field& F, const Poly& f0) {
  Poly f = poly_trim(F, f0);
  if (f.empty()) throw std::domain_error("poly_factor: zero polynomial");
  std::mt19937_64 rng(0x5eedf00dULL ^ (u64)poly_deg(f));
  std::vector<Poly> raw;
  distinct_factors(F, f, rng, raw);
  // dedupe (a factor can appear from both the gcd part and the squarefree part)
  std::vector<Poly> uniq;
  for (auto& g : raw)
    if (std::find_if(uniq.begin(), uniq.end(), [&](const Poly& h) { return poly_eq(g, h); }) ==
        uniq.end())
      uniq.push_back(g);
  std::sort(uniq.begin(), uniq.end(), [](const Poly& a, const Poly& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (size_t i = a.size(); i-- > 0;)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  });
  std::vector<std::pair<Poly, int>> out;
  for (auto& g : uniq) {
    int mult = 0;
    Poly rem = f;
    for (;;) {
      auto [q, r] = poly_divmod(F, rem, g);
      if (!r.empty()) break;
      ++mult;
      rem = q;
    }
    out.push_back({g, mult});
  }
  return out;
}

std::vector<std::pair<Field::Elem, int>> poly_roots(const Field& F, const Poly& f) {
  std::vector<std::pair<Field::Elem, int>> out;
  for (auto& [g, mult] : poly_factor(F, f))
    if (poly_deg(g) == 1) out.push_back({F.neg(g[0]), mult});
  return out;
}

}  // namespace shtor::gf
