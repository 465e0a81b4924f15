#include "shtor/congruence.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "json.hpp"

namespace shtor::congruence {

namespace {

int mod_pos(long v, int n) {
  long r = v % n;
  return (int)(r < 0 ? r + n : r);
}

// multiplicative inverses mod n (index -1 for non-units); inv[0] = 0 for n = 1
std::vector<int> inverse_table(int n) {
  std::vector<int> inv(n, -1);
  if (n == 1) return {0};
  for (int a = 1; a < n; ++a)
    for (int b = 1; b < n; ++b)
      if ((long)a * b % n == 1) {
        inv[a] = b;
        break;
      }
  return inv;
}

std::vector<long> prime_divisors(long n) {
  std::vector<long> ps;
  for (long p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      ps.push_back(p);
      while (n % p == 0) n /= p;
    }
  if (n > 1) ps.push_back(n);
  return ps;
}

std::vector<int> canonical_coords(int n, std::vector<int> c, const std::vector<int>& inv) {
  if (n == 1) return c;
  int m = (int)c.size();
  for (int i = 0; i < m; ++i)
    if (inv[c[i]] >= 0) {
      long u = inv[c[i]];
      for (int j = 0; j < m; ++j) c[j] = (int)(u * c[j] % n);
      return c;
    }
  // no invertible coordinate (possible for composite n): least unit multiple
  std::vector<int> best;
  for (int u = 1; u < n; ++u) {
    if (inv[u] < 0) continue;
    std::vector<int> t(m);
    for (int j = 0; j < m; ++j) t[j] = (int)((long)u * c[j] % n);
    if (best.empty() || t < best) best = std::move(t);
  }
  return best;
}

}  // namespace

CosetLabel make_label(int n, const std::vector<long>& raw) {
  if (n < 1) throw std::invalid_argument("make_label: level must be positive");
  std::vector<int> c(raw.size());
  long g = n;
  for (size_t i = 0; i < raw.size(); ++i) {
    c[i] = mod_pos(raw[i], n);
    g = std::gcd(g, (long)c[i]);
  }
  if (g != 1 && n > 1) throw NotPrimitive("make_label: coords not primitive mod N");
  static thread_local int cached_n = 0;
  static thread_local std::vector<int> inv;
  if (cached_n != n) {
    inv = inverse_table(n);
    cached_n = n;
  }
  CosetLabel l;
  l.N = n;
  l.coords = canonical_coords(n, std::move(c), inv);
  return l;
}

CosetLabel coset_label(const Mat& g, int n) {
  std::vector<long> row(g.cols);
  for (int j = 0; j < g.cols; ++j) row[j] = g(0, j);
  return make_label(n, row);
}

CosetLabel label_act(const CosetLabel& l, const Mat& s) {
  int m = (int)l.coords.size();
  std::vector<long> out(m, 0);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) out[j] += (long)l.coords[i] * mod_pos(s(i, j), l.N);
  return make_label(l.N, out);
}

std::vector<CosetLabel> all_labels(int m, int n) {
  std::vector<int> inv = inverse_table(n);
  std::set<std::vector<int>> seen;
  std::vector<int> c(m, 0);
  auto rec = [&](auto&& self, int i, long g) -> void {
    if (i == m) {
      if (g == 1 || n == 1) seen.insert(canonical_coords(n, c, inv));
      return;
    }
    for (int x = 0; x < n; ++x) {
      c[i] = x;
      self(self, i + 1, std::gcd(g, (long)x));
    }
    c[i] = 0;
  };
  rec(rec, 0, (long)n);
  if (n == 1) seen.insert(std::vector<int>(m, 0));
  std::vector<CosetLabel> out;
  for (auto& v : seen) out.push_back({n, v});
  return out;
}

bool five_torsion_exists(long n) {
  if (n % 25 == 0) return false;
  for (long p : prime_divisors(n))
    if (p != 5 && (p - 1) % 5 != 0) return false;
  return true;
}

std::vector<long> torsion_primes(long n) {
  std::vector<long> out = {2, 3};
  if (five_torsion_exists(n)) out.push_back(5);
  return out;
}

bool order5_brute_check(long n, unsigned long long budget) {
  if (n == 1) return true;
  int N = (int)n;
  std::vector<int> gcd_n(N);
  for (int x = 0; x < N; ++x) gcd_n[x] = (int)std::gcd((long)x, n);
  std::vector<int> units;
  for (int u = 0; u < N; ++u)
    if (gcd_n[u] == 1) units.push_back(u);
  // (v1,v2,v3,v4) primitive, unit lambda, with
  //   v Z = (-v4, v1-v4, v2-v4, v3-v4) = lambda v  mod N
  unsigned long long used = 0;
  for (int v1 = 0; v1 < N; ++v1)
    for (int v2 = 0; v2 < N; ++v2)
      for (int v3 = 0; v3 < N; ++v3)
        for (int v4 = 0; v4 < N; ++v4) {
          if (std::gcd(std::gcd(gcd_n[v1], gcd_n[v2]), std::gcd(gcd_n[v3], gcd_n[v4])) != 1)
            continue;
          int w1 = (N - v4) % N;
          int w2 = mod_pos(v1 - v4, N);
          int w3 = mod_pos(v2 - v4, N);
          int w4 = mod_pos(v3 - v4, N);
          for (int lam : units) {
            if (++used > budget)
              throw SearchBudgetExhausted("order5_brute_check: budget exhausted");
            if ((long)lam * v1 % N != w1) continue;
            if ((long)lam * v2 % N != w2) continue;
            if ((long)lam * v3 % N != w3) continue;
            if ((long)lam * v4 % N == w4) return true;
          }
        }
  return false;
}

// ---- lifts ----

RowVec primitive_lift(const CosetLabel& l) {
  int m = (int)l.coords.size();
  long n = l.N;
  RowVec v(m);
  for (int i = 0; i < m; ++i) v[i] = l.coords[i];
  if (content(v) == 1) return v;
  i64 rest = 0;
  for (int i = 1; i < m; ++i) rest = gcd_nonneg(rest, v[i]);
  if (rest == 0) {
    // only the first coordinate is nonzero mod N; it is a unit
    v[m - 1] += n;
    return v;
  }
  for (long a = 0;; ++a) {
    if (a > 4 * (rest + n)) throw std::logic_error("primitive_lift: no adjustment found");
    i64 c0 = v[0] + a * n;
    if (gcd_nonneg(c0, rest) == 1) {
      v[0] = c0;
      return v;
    }
  }
}

Mat sl_completion(const RowVec& v) {
  int m = (int)v.size();
  if (content(v) != 1) throw std::invalid_argument("sl_completion: row not primitive");
  // column operations bringing v to e1; U accumulates them, v * U = e1
  Mat u = Mat::identity(m);
  RowVec w = v;
  for (int i = 1; i < m; ++i) {
    if (w[i] == 0) continue;
    // extended gcd of w[0], w[i]
    i64 a = w[0], b = w[i], x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
      i64 q = a / b, t;
      t = a - q * b, a = b, b = t;
      t = x0 - q * x1, x0 = x1, x1 = t;
      t = y0 - q * y1, y0 = y1, y1 = t;
    }
    i64 g = a, x = x0, y = y0;
    if (g < 0) {
      g = -g;
      x = -x;
      y = -y;
    }
    i64 p = w[0] / g, q = w[i] / g;
    for (int r = 0; r < m; ++r) {
      i64 c0 = u(r, 0), ci = u(r, i);
      u(r, 0) = x * c0 + y * ci;
      u(r, i) = -q * c0 + p * ci;
    }
    w[0] = g;
    w[i] = 0;
  }
  if (w[0] != 1) {
    // v = (-1, 0, ..., 0): flip the first column
    if (w[0] != -1) throw std::logic_error("sl_completion: gcd reduction failed");
    for (int r = 0; r < m; ++r) u(r, 0) = -u(r, 0);
  }
  Mat a = unimodular_inverse(u);  // first row is v
  if (det(a) < 0)
    for (int c = 0; c < m; ++c) a(m - 1, c) = -a(m - 1, c);
  return a;
}

Mat label_lift(const CosetLabel& l, int epsilon) {
  int m = (int)l.coords.size();
  Mat a = sl_completion(primitive_lift(l));
  if (epsilon < 0)
    for (int c = 0; c < m; ++c) a(m - 1, c) = -a(m - 1, c);
  return unimodular_inverse(a);
}

// ---- complex assembly ----

namespace {

// small generating subset of a finite matrix group given as a full list
std::vector<int> generator_subset(const std::vector<Mat>& elems) {
  std::map<std::vector<i64>, int> pos;
  for (size_t i = 0; i < elems.size(); ++i) pos[elems[i].a] = (int)i;
  std::vector<char> have(elems.size(), 0);
  std::vector<int> members;
  auto add_closure = [&](int seed) {
    if (!have[seed]) {
      have[seed] = 1;
      members.push_back(seed);
    }
    for (size_t done = 0; done < members.size();) {
      size_t sz = members.size();
      for (size_t i = done; i < sz; ++i)
        for (size_t j = 0; j < sz; ++j) {
          int f = members[i], g = members[j];
          for (int prod :
               {pos.at(mat_mul(elems[f], elems[g]).a), pos.at(mat_mul(elems[g], elems[f]).a)})
            if (!have[prod]) {
              have[prod] = 1;
              members.push_back(prod);
            }
        }
      done = sz;
    }
  };
  std::vector<int> gens;
  for (size_t i = 0; i < elems.size(); ++i)
    if (!have[i]) {
      gens.push_back((int)i);
      add_closure((int)i);
    }
  return gens;
}

struct LabelIndex {
  const std::vector<CosetLabel>& labels;  // sorted by coords
  int find(const CosetLabel& l) const {
    auto it = std::lower_bound(labels.begin(), labels.end(), l,
                               [](const CosetLabel& a, const CosetLabel& b) {
                                 return a.coords < b.coords;
                               });
    if (it == labels.end() || it->coords != l.coords)
      throw std::logic_error("label index: unknown label");
    return (int)(it - labels.begin());
  }
};

}  // namespace

int AssembledComplex::dim_pos(int d) const {
  for (size_t i = 0; i < dims.size(); ++i)
    if (dims[i] == d) return (int)i;
  throw std::out_of_range("dim_pos: dimension not in the assembled window");
}

AssembledComplex::PairClass AssembledComplex::classify(int base, const CosetLabel& l,
                                                       int epsilon) const {
  LabelIndex li{labels};
  int idx = li.find(l);
  return classes_.at(base).at(2 * idx + (epsilon < 0 ? 1 : 0));
}

AssembledComplex assemble_complex(retract::CellTable table, int N) {
  AssembledComplex cx;
  cx.m = table.m;
  cx.N = N;
  cx.dims = table.dims;
  cx.labels = all_labels(table.m, N);
  LabelIndex li{cx.labels};
  size_t L = cx.labels.size();
  cx.bases.resize(cx.dims.size());
  cx.killed.resize(cx.dims.size());
  cx.classes_.resize(table.cells.size());

  for (auto& cell : table.cells) {
    int pos = cx.dim_pos(cell.dim);
    // generators with the data needed for the pair action
    struct Gen {
      Mat inv;
      int det_sign;
      int chi;
    };
    std::vector<Gen> gens;
    for (int gi : generator_subset(cell.stabilizer_gens)) {
      const Mat& s = cell.stabilizer_gens[gi];
      gens.push_back({unimodular_inverse(s), det(s) > 0 ? 1 : -1,
                      retract::permutation_sign_on_pairs(cell.min_vectors, s)});
    }
    // orbits of (label, epsilon) pairs; pair p = 2*label + (eps<0)
    auto& cls = cx.classes_[cell.id];
    cls.assign(2 * L, {-2, 1});
    std::vector<int> chi_of(2 * L, 0);  // orientation sign along the search tree
    for (size_t start = 0; start < 2 * L; ++start) {
      if (cls[start].index != -2) continue;
      std::vector<size_t> orbit = {start};
      chi_of[start] = 1;
      cls[start].index = -3;  // provisional: member of current orbit
      bool orbit_killed = false;
      for (size_t qi = 0; qi < orbit.size(); ++qi) {
        size_t p = orbit[qi];
        CosetLabel lab = cx.labels[p / 2];
        int eps = (p % 2) ? -1 : 1;
        for (auto& g : gens) {
          CosetLabel lab2 = label_act(lab, g.inv);
          size_t p2 = 2 * (size_t)li.find(lab2) + ((eps * g.det_sign) < 0 ? 1 : 0);
          int chi2 = chi_of[p] * g.chi;
          if (cls[p2].index == -3) {
            if (chi_of[p2] != chi2) orbit_killed = true;
          } else {
            cls[p2].index = -3;
            chi_of[p2] = chi2;
            orbit.push_back(p2);
          }
        }
      }
      size_t rep = *std::min_element(orbit.begin(), orbit.end());
      LeveledCell lc;
      lc.base = cell.id;
      lc.label = cx.labels[rep / 2];
      lc.epsilon = (rep % 2) ? -1 : 1;
      lc.killed = orbit_killed;
      if (orbit_killed) {
        for (size_t p : orbit) cls[p] = {-1, 1};
        cx.killed[pos].push_back(std::move(lc));
      } else {
        int idx = (int)cx.bases[pos].size();
        for (size_t p : orbit) cls[p] = {idx, chi_of[p] * chi_of[rep]};
        cx.bases[pos].push_back(std::move(lc));
      }
    }
  }

  // differentials: for each record (tau, h, s) on sigma, [K_sigma h]
  // appears with coefficient s in the omission boundary of [K_tau]
  cx.d_matrices.clear();
  for (size_t i = 0; i + 1 < cx.dims.size(); ++i) {
    linalg::IntMatrix mtx((int)cx.bases[i + 1].size(), (int)cx.bases[i].size());
    for (int col = 0; col < (int)cx.bases[i].size(); ++col) {
      const LeveledCell& src = cx.bases[i][col];
      Mat g = label_lift(src.label, src.epsilon);
      for (auto& sigma : table.cells) {
        if (sigma.dim != cx.dims[i + 1]) continue;
        for (auto& rec : sigma.boundary) {
          if (rec.target != src.base) continue;
          Mat x = mat_mul(rec.transporter, g);
          CosetLabel lab = coset_label(unimodular_inverse(x), N);
          int eps = det(x) > 0 ? 1 : -1;
          auto pc = cx.classes_[sigma.id][2 * (size_t)li.find(lab) + (eps < 0 ? 1 : 0)];
          if (pc.index >= 0) mtx.add(pc.index, col, rec.sign * pc.sign);
        }
      }
    }
    cx.d_matrices.push_back(std::move(mtx));
  }
  for (size_t i = 0; i + 1 < cx.d_matrices.size(); ++i)
    if (!cx.d_matrices[i + 1].multiplied_by(cx.d_matrices[i]).is_zero())
      throw linalg::CompositionNonzero("assemble_complex: d o d != 0");

  cx.table = std::move(table);
  return cx;
}

AssembledComplex assemble_complex(int m, int N, std::vector<int> dims) {
  return assemble_complex(retract::retract_cells(m, std::move(dims)), N);
}

std::vector<mpz_class> project_chain(const AssembledComplex& cx, const retract::CellIndex& idx,
                                     const sharbly::Chain<sharbly::ZRing>& chain) {
  int D = cx.m * (cx.m + 1) / 2;
  int pos = -1;
  if (!chain.terms.empty()) {
    int nvec = (int)chain.terms.begin()->first.vectors.size();
    pos = cx.dim_pos(D - nvec);
  } else {
    pos = cx.dim_pos(D - (cx.m + chain.degree));
  }
  std::vector<mpz_class> out(cx.bases[pos].size(), 0);
  for (auto& [s, c] : chain.terms) {
    auto match = idx.identify(s.vectors);
    if (!match) throw std::invalid_argument("project_chain: chain is not V-supported");
    Mat hinv = unimodular_inverse(match->transporter);
    CosetLabel lab = coset_label(hinv, cx.N);
    int eps = det(match->transporter) > 0 ? 1 : -1;
    auto pc = cx.classify(match->orbit, lab, eps);
    if (pc.index >= 0) out[pc.index] += c * match->sign * pc.sign;
  }
  return out;
}

TorsionReport torsion_classes(const AssembledComplex& cx, int degree) {
  int pos = cx.dim_pos(degree);
  if (pos < 1)
    throw std::invalid_argument("torsion_classes: no incoming differential in the window");
  const linalg::IntMatrix& d_in = cx.d_matrices[pos - 1];
  linalg::IntMatrix d_out(0, (int)cx.bases[pos].size());
  if ((size_t)pos < cx.d_matrices.size()) d_out = cx.d_matrices[pos];
  auto h = linalg::homology_summands(d_in, d_out);
  TorsionReport r;
  r.m = cx.m;
  r.N = cx.N;
  r.degree = degree;
  r.free_rank = h.free_rank;
  std::map<long, int> by_prime;
  for (auto& d : h.torsion) {
    mpz_class rest = d;
    for (long p = 2; rest > 1; ++p) {
      if (mpz_class(p) * p > rest) {
        if (!mpz_fits_slong_p(rest.get_mpz_t()))
          throw std::overflow_error("torsion_classes: huge torsion prime");
        by_prime[rest.get_si()] += 1;
        break;
      }
      if (mpz_divisible_ui_p(rest.get_mpz_t(), (unsigned long)p)) {
        by_prime[p] += 1;
        while (mpz_divisible_ui_p(rest.get_mpz_t(), (unsigned long)p))
          rest /= (unsigned long)p;
      }
    }
  }
  for (auto& [p, k] : by_prime) r.torsion.push_back({p, k});
  r.reliable_at_2 = false;
  return r;
}

TorsionReport torsion_classes(int m, int N, int degree) {
  std::vector<int> dims;
  if (m == 2) dims = {0, 1};
  else if (m == 3) dims = {1, 2, 3};
  else if (m == 4) dims = {4, 5, 6};
  else throw retract::UnsupportedDimension("torsion_classes: m must be 2, 3 or 4");
  return torsion_classes(assemble_complex(m, N, std::move(dims)), degree);
}

std::string report_csv(const TorsionReport& r) {
  std::string out = "level,prime,dimension\n";
  for (auto& [p, k] : r.torsion)
    out += std::to_string(r.N) + "," + std::to_string(p) + "," + std::to_string(k) + "\n";
  return out;
}

std::string report_json(const TorsionReport& r) {
  nlohmann::json j;
  j["m"] = r.m;
  j["level"] = r.N;
  j["degree"] = r.degree;
  j["free-rank"] = r.free_rank;
  j["reliable-at-2"] = r.reliable_at_2;
  j["torsion"] = nlohmann::json::array();
  for (auto& [p, k] : r.torsion) j["torsion"].push_back({{"prime", p}, {"dimension", k}});
  return j.dump(2);
}

}  // namespace shtor::congruence
