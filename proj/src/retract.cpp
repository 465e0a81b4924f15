#include "shtor/retract.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace shtor::retract {

namespace {

// ------------- configuration invariants and equivalence search -------------

// Pairwise products v_i G' v_j^T with G' = adj(sum v^T v) are invariant under
// simultaneous right multiplication of all vectors by any g in GL(m,Z).
struct ConfigData {
  int m = 0;
  std::vector<RowVec> k;                        // canonical-signed, sorted
  std::vector<std::vector<mpz_class>> P;        // pairwise invariants
  std::vector<std::vector<mpz_class>> rowinv;   // sorted |P[i][*]| per row
  mpz_class detF;
};

ConfigData build_config(const std::vector<RowVec>& vecs) {
  ConfigData c;
  c.m = (int)vecs.at(0).size();
  for (auto& v : vecs) c.k.push_back(canonical_sign(primitivize(v)));
  std::sort(c.k.begin(), c.k.end(), lex_less);
  QForm f = qform_of_vectors(c.k);
  c.detF = qform_det(f);
  QForm gp = qform_adjugate(f);
  size_t n = c.k.size();
  c.P.assign(n, std::vector<mpz_class>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) c.P[i][j] = qform_pair(gp, c.k[i], c.k[j]);
  c.rowinv.resize(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) c.rowinv[i].push_back(abs(c.P[i][j]));
    std::sort(c.rowinv[i].begin(), c.rowinv[i].end());
  }
  return c;
}

// all h in GL(m,Z) with {±a.k · h} = {±b.k}; stops after the first unless all
void equiv_search(const ConfigData& a, const ConfigData& b, bool all, std::vector<Mat>& out) {
  size_t n = a.k.size();
  if (n != b.k.size() || a.m != b.m || a.detF != b.detF) return;
  {
    auto s1 = a.rowinv, s2 = b.rowinv;
    std::sort(s1.begin(), s1.end());
    std::sort(s2.begin(), s2.end());
    if (s1 != s2) return;
  }
  int m = a.m;
  // first m linearly independent rows of a.k
  std::vector<int> piv;
  std::vector<RowVec> acc;
  for (size_t i = 0; i < n && (int)piv.size() < m; ++i) {
    acc.push_back(a.k[i]);
    if (row_rank(acc) == (int)acc.size())
      piv.push_back((int)i);
    else
      acc.pop_back();
  }
  if ((int)piv.size() < m) return;

  std::map<RowVec, int> bset;
  for (size_t i = 0; i < n; ++i) bset[b.k[i]] = (int)i;

  std::vector<int> tgt(m), sgn(m);
  std::vector<char> used(n, 0);
  bool done = false;

  auto finalize = [&]() {
    Mat v(m, m), w(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        v(i, j) = a.k[piv[i]][j];
        w(i, j) = sgn[i] * b.k[tgt[i]][j];
      }
    auto [adj, d] = adjugate(v);
    if (d == 0) return;
    Mat h(m, m);
    Mat num = mat_mul(adj, w);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (num(i, j) % d != 0) return;
        h(i, j) = num(i, j) / d;
      }
    i64 dh = det(h);
    if (dh != 1 && dh != -1) return;
    std::vector<char> hit(n, 0);
    for (size_t i = 0; i < n; ++i) {
      RowVec img = canonical_sign(row_times_mat(a.k[i], h));
      auto it = bset.find(img);
      if (it == bset.end() || hit[it->second]) return;
      hit[it->second] = 1;
    }
    if (all) {
      if (std::find(out.begin(), out.end(), h) == out.end()) out.push_back(h);
    } else {
      out.push_back(h);
      done = true;
    }
  };

  auto rec = [&](auto&& self, int d) -> void {
    if (done) return;
    if (d == m) {
      finalize();
      return;
    }
    int pa = piv[d];
    for (size_t t = 0; t < n && !done; ++t) {
      if (used[t]) continue;
      if (a.rowinv[pa] != b.rowinv[t]) continue;
      if (a.P[pa][pa] != b.P[t][t]) continue;
      for (int e : {1, -1}) {
        bool ok = true;
        for (int c = 0; c < d; ++c)
          if (a.P[pa][piv[c]] != e * sgn[c] * b.P[t][tgt[c]]) {
            ok = false;
            break;
          }
        if (!ok) continue;
        used[t] = 1;
        tgt[d] = (int)t;
        sgn[d] = e;
        self(self, d + 1);
        used[t] = 0;
        if (done) return;
      }
    }
  };
  rec(rec, 0);
}

// ------------- exact rational linear algebra on small systems -------------

using QVec = std::vector<mpq_class>;

int rank_mpq(std::vector<QVec> rows) {
  if (rows.empty()) return 0;
  size_t n = rows.size(), m = rows[0].size();
  int r = 0;
  for (size_t c = 0; c < m && r < (int)n; ++c) {
    size_t p = n;
    for (size_t i = r; i < n; ++i)
      if (rows[i][c] != 0) { p = i; break; }
    if (p == n) continue;
    std::swap(rows[r], rows[p]);
    for (size_t i = r + 1; i < n; ++i) {
      if (rows[i][c] == 0) continue;
      mpq_class f = rows[i][c] / rows[r][c];
      for (size_t j = c; j < m; ++j) rows[i][j] -= f * rows[r][j];
    }
    ++r;
  }
  return r;
}

// basis of { x : rows · x = 0 }
std::vector<QVec> nullspace_mpq(std::vector<QVec> rows, size_t m) {
  size_t n = rows.size();
  std::vector<int> pivcol;
  int r = 0;
  for (size_t c = 0; c < m && r < (int)n; ++c) {
    size_t p = n;
    for (size_t i = r; i < n; ++i)
      if (rows[i][c] != 0) { p = i; break; }
    if (p == n) continue;
    std::swap(rows[r], rows[p]);
    mpq_class inv = 1 / rows[r][c];
    for (size_t j = 0; j < m; ++j) rows[r][j] *= inv;
    for (size_t i = 0; i < n; ++i) {
      if ((int)i == r || rows[i][c] == 0) continue;
      mpq_class f = rows[i][c];
      for (size_t j = 0; j < m; ++j) rows[i][j] -= f * rows[r][j];
    }
    pivcol.push_back((int)c);
    ++r;
  }
  std::vector<char> is_piv(m, 0);
  for (int c : pivcol) is_piv[c] = 1;
  std::vector<QVec> out;
  for (size_t c = 0; c < m; ++c) {
    if (is_piv[c]) continue;
    QVec x(m, 0);
    x[c] = 1;
    for (int i = 0; i < (int)pivcol.size(); ++i) x[pivcol[i]] = -rows[i][c];
    out.push_back(std::move(x));
  }
  return out;
}

// ------------- symmetric-space coordinates -------------

// coordinates of v^T v in Sym^m: diagonal v_i^2, then 2 v_i v_j for i<j
std::vector<mpz_class> sym_coord(const RowVec& v) {
  int m = (int)v.size();
  std::vector<mpz_class> c;
  for (int i = 0; i < m; ++i) c.push_back((long)v[i] * (long)v[i]);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) c.push_back(2 * (long)v[i] * (long)v[j]);
  return c;
}

// a coordinate vector back to a symmetric matrix R with <R, v^T v> = v R v^T
QForm sym_from_coord(const std::vector<mpz_class>& c, int m) {
  QForm r(m, std::vector<mpz_class>(m, 0));
  for (int i = 0; i < m; ++i) r[i][i] = c[i];
  int t = m;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      r[i][j] = c[t];
      r[j][i] = c[t];
      ++t;
    }
  return r;
}

void subsets_rec(int n, int s, int start, std::vector<int>& cur,
                 const std::function<void(const std::vector<int>&)>& fn) {
  if ((int)cur.size() == s) {
    fn(cur);
    return;
  }
  for (int i = start; i <= n - (s - (int)cur.size()); ++i) {
    cur.push_back(i);
    subsets_rec(n, s, i + 1, cur, fn);
    cur.pop_back();
  }
}

void for_each_subset(int n, int s, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> cur;
  subsets_rec(n, s, 0, cur, fn);
}

// facet normals of the cone spanned by {v^T v : v in gens}: symmetric integer
// forms R, primitive, with v R v^T >= 0 for all gens and = 0 on the facet
std::vector<QForm> facet_normals(const std::vector<RowVec>& gens, int m) {
  int dd = m * (m + 1) / 2;
  int k = (int)gens.size();
  std::vector<std::vector<mpz_class>> coords;
  for (auto& v : gens) coords.push_back(sym_coord(v));
  std::set<std::vector<mpz_class>> seen;
  std::vector<QForm> out;
  for_each_subset(k, dd - 1, [&](const std::vector<int>& sub) {
    std::vector<QVec> rows;
    for (int i : sub) {
      QVec r;
      for (auto& x : coords[i]) r.push_back(mpq_class(x));
      rows.push_back(std::move(r));
    }
    auto ns = nullspace_mpq(rows, dd);
    if (ns.size() != 1) return;  // subset does not span a hyperplane
    // scale to primitive integer
    mpz_class lcm = 1;
    for (auto& x : ns[0]) lcm = lcm / gcd(lcm, x.get_den()) * x.get_den();
    std::vector<mpz_class> r(dd);
    mpz_class g = 0;
    for (int i = 0; i < dd; ++i) {
      mpq_class q = ns[0][i] * lcm;
      r[i] = q.get_num();
      g = gcd(g, r[i]);
    }
    if (g > 1)
      for (auto& x : r) x /= g;
    QForm rs = sym_from_coord(r, m);
    int pos = 0, neg = 0;
    for (auto& v : gens) {
      int s = sgn(qform_eval(rs, v));
      if (s > 0) ++pos;
      if (s < 0) ++neg;
    }
    if (pos && neg) return;  // not a supporting hyperplane
    if (neg)
      for (auto& row : rs)
        for (auto& x : row) x = -x;
    if (!pos && !neg) return;
    // canonical key for dedupe
    std::vector<mpz_class> key;
    for (auto& row : rs)
      for (auto& x : row) key.push_back(x);
    if (seen.insert(key).second) out.push_back(rs);
  });
  return out;
}

// the Voronoi neighbor of perfect form q (minimum lambda) across facet normal r
QForm voronoi_neighbor(const QForm& q, const mpz_class& lambda, const QForm& r) {
  int m = (int)q.size();
  mpq_class t(1);
  for (int iter = 0; iter < 10000; ++iter) {
    mpz_class num = t.get_num(), den = t.get_den();
    QForm qt(m, std::vector<mpz_class>(m));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) qt[i][j] = den * q[i][j] + num * r[i][j];
    if (!is_positive_definite(qt)) {
      t /= 2;
      continue;
    }
    auto [mu, w] = minimal_vectors(qt);
    mpz_class target = den * lambda;
    if (mu == target) {
      bool has_new = false;
      for (auto& v : w)
        if (qform_eval(r, v) != 0) { has_new = true; break; }
      if (has_new) return qform_primitive(qt);
      t *= 2;
      continue;
    }
    // overshot: pull t back to the first contact
    mpq_class best(-1);
    for (auto& v : w) {
      mpz_class rv = qform_eval(r, v);
      if (rv >= 0) continue;
      mpq_class cand(lambda - qform_eval(q, v), -rv);
      cand.canonicalize();
      if (best < 0 || cand < best) best = cand;
    }
    if (best <= 0) throw std::logic_error("voronoi_neighbor: inconsistent facet data");
    t = best;
  }
  throw std::logic_error("voronoi_neighbor: did not converge");
}

PerfectForm make_perfect(const QForm& gram) {
  PerfectForm p;
  p.gram = qform_primitive(gram);
  auto [mv, vecs] = minimal_vectors(p.gram);
  p.min_value = mv;
  p.min_vectors = vecs;  // already canonical-signed and sorted
  return p;
}

}  // namespace

std::vector<PerfectForm> perfect_forms(int m) {
  if (m < 2 || m > 4) throw std::invalid_argument("perfect_forms: m must be 2..4");
  QForm start(m, std::vector<mpz_class>(m, 0));
  for (int i = 0; i < m; ++i) {
    start[i][i] = 2;
    if (i + 1 < m) start[i][i + 1] = start[i + 1][i] = 1;
  }
  std::vector<PerfectForm> forms{make_perfect(start)};
  std::vector<ConfigData> cfgs{build_config(forms[0].min_vectors)};
  std::deque<size_t> todo{0};
  while (!todo.empty()) {
    size_t cur = todo.front();
    todo.pop_front();
    PerfectForm p = forms[cur];
    for (auto& r : facet_normals(p.min_vectors, m)) {
      QForm nb = voronoi_neighbor(p.gram, p.min_value, r);
      PerfectForm cand = make_perfect(nb);
      ConfigData cc = build_config(cand.min_vectors);
      bool known = false;
      for (size_t i = 0; i < forms.size() && !known; ++i) {
        std::vector<Mat> hs;
        equiv_search(cc, cfgs[i], false, hs);
        if (!hs.empty() && qform_eq(qform_transform(forms[i].gram, hs[0]), cand.gram))
          known = true;
      }
      if (!known) {
        forms.push_back(cand);
        cfgs.push_back(std::move(cc));
        todo.push_back(forms.size() - 1);
      }
    }
  }
  return forms;
}

std::optional<Mat> configuration_equiv(const std::vector<RowVec>& k1,
                                       const std::vector<RowVec>& k2) {
  std::vector<Mat> out;
  equiv_search(build_config(k1), build_config(k2), false, out);
  if (out.empty()) return std::nullopt;
  return out[0];
}

struct Configuration::Impl {
  ConfigData c;
  std::vector<long> fp;
};

Configuration::Configuration(const std::vector<RowVec>& k) : impl_(std::make_unique<Impl>()) {
  impl_->c = build_config(k);
  const ConfigData& c = impl_->c;
  const unsigned long P = 1000000007ul;
  std::vector<long>& fp = impl_->fp;
  fp.push_back((long)c.k.size());
  fp.push_back(c.m);
  fp.push_back((long)mpz_fdiv_ui(c.detF.get_mpz_t(), P));
  std::vector<std::vector<long>> rows;
  for (auto& r : c.rowinv) {
    std::vector<long> rr;
    for (auto& v : r) rr.push_back((long)mpz_fdiv_ui(v.get_mpz_t(), P));
    rows.push_back(std::move(rr));
  }
  std::sort(rows.begin(), rows.end());
  for (auto& r : rows)
    for (long v : r) fp.push_back(v);
}

Configuration::~Configuration() = default;
Configuration::Configuration(Configuration&&) noexcept = default;
Configuration& Configuration::operator=(Configuration&&) noexcept = default;

const std::vector<long>& Configuration::fingerprint() const { return impl_->fp; }

std::optional<Mat> configuration_equiv(const Configuration& a, const Configuration& b) {
  std::vector<Mat> out;
  equiv_search(a.impl_->c, b.impl_->c, false, out);
  if (out.empty()) return std::nullopt;
  return out[0];
}

std::vector<Mat> configuration_stabilizer(const std::vector<RowVec>& k) {
  std::vector<Mat> out;
  ConfigData c = build_config(k);
  equiv_search(c, c, true, out);
  return out;
}

int permutation_sign_on_pairs(const std::vector<RowVec>& k, const Mat& h) {
  std::map<RowVec, int> pos;
  for (size_t i = 0; i < k.size(); ++i) pos[canonical_sign(k[i])] = (int)i;
  std::vector<int> perm(k.size());
  for (size_t i = 0; i < k.size(); ++i) {
    RowVec img = canonical_sign(row_times_mat(k[i], h));
    auto it = pos.find(img);
    if (it == pos.end())
      throw std::invalid_argument("permutation_sign_on_pairs: h does not stabilize the set");
    perm[i] = it->second;
  }
  int sign = 1;
  std::vector<char> seen(k.size(), 0);
  for (size_t i = 0; i < k.size(); ++i) {
    if (seen[i]) continue;
    int len = 0, j = (int)i;
    while (!seen[j]) {
      seen[j] = 1;
      j = perm[j];
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

namespace {

const std::map<int, std::set<int>>& allowed_dims() {
  static const std::map<int, std::set<int>> a{
      {2, {0, 1}}, {3, {1, 2, 3}}, {4, {4, 5, 6}}};
  return a;
}

}  // namespace

CellTable retract_cells(int m, std::vector<int> dims) {
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
  auto it = allowed_dims().find(m);
  if (it == allowed_dims().end()) throw UnsupportedDimension("retract_cells: m must be 2..4");
  for (int d : dims)
    if (!it->second.count(d))
      throw UnsupportedDimension("retract_cells: dimension " + std::to_string(d) +
                                 " not supported for m=" + std::to_string(m));
  int dd = m * (m + 1) / 2;
  auto forms = perfect_forms(m);

  CellTable table;
  table.m = m;
  table.dims = dims;

  // candidate vector sets per dimension, in deterministic generation order
  std::map<int, std::vector<std::vector<RowVec>>> cand;
  for (auto& p : forms) {
    int k = (int)p.min_vectors.size();
    std::vector<std::vector<mpz_class>> coords;
    for (auto& v : p.min_vectors) coords.push_back(sym_coord(v));
    auto coord_rank = [&](const std::vector<int>& sub) {
      std::vector<QVec> rows;
      for (int i : sub) {
        QVec r;
        for (auto& x : coords[i]) r.push_back(mpq_class(x));
        rows.push_back(std::move(r));
      }
      return rank_mpq(std::move(rows));
    };
    auto add_candidate = [&](const std::vector<int>& sub, int d) {
      std::vector<RowVec> vs;
      for (int i : sub) vs.push_back(p.min_vectors[i]);
      if (row_rank(vs) < m) return;  // not well-rounded: not a retract cell
      cand[d].push_back(std::move(vs));
    };
    if (k == dd) {
      // simplicial perfection cone: every generator subset is a face
      for (int d : dims) for_each_subset(k, dd - d, [&](const std::vector<int>& s) {
        add_candidate(s, d);
      });
    } else {
      // non-simplicial: faces are intersections of facets
      std::set<std::vector<int>> faces;
      for (auto& r : facet_normals(p.min_vectors, m)) {
        std::vector<int> on;
        for (int i = 0; i < k; ++i)
          if (qform_eval(r, p.min_vectors[i]) == 0) on.push_back(i);
        faces.insert(on);
      }
      for (bool grew = true; grew;) {
        grew = false;
        std::vector<std::vector<int>> cur(faces.begin(), faces.end());
        for (auto& f1 : cur)
          for (auto& f2 : cur) {
            std::vector<int> in;
            std::set_intersection(f1.begin(), f1.end(), f2.begin(), f2.end(),
                                  std::back_inserter(in));
            if (faces.insert(in).second) grew = true;
          }
      }
      for (auto& f : faces) {
        if (f.empty()) continue;
        int r = coord_rank(f);
        int d = dd - r;
        if (!std::count(dims.begin(), dims.end(), d)) continue;
        if ((int)f.size() != r)
          throw std::logic_error("retract_cells: face with excess generators in permitted range");
        add_candidate(f, d);
      }
    }
  }

  // dedupe into GL(m,Z)-orbits, dims ascending
  std::vector<ConfigData> orbit_cfg;
  for (int d : dims) {
    for (auto& vs : cand[d]) {
      ConfigData c = build_config(vs);
      bool known = false;
      for (size_t i = 0; i < table.cells.size() && !known; ++i) {
        if (table.cells[i].dim != d) continue;
        std::vector<Mat> hs;
        equiv_search(orbit_cfg[i], c, false, hs);
        if (!hs.empty()) known = true;
      }
      if (known) continue;
      CellOrbit o;
      o.id = (int)table.cells.size();
      o.dim = d;
      o.min_vectors = c.k;
      o.stabilizer_gens = configuration_stabilizer(c.k);
      o.orientation_reversing = false;
      for (auto& h : o.stabilizer_gens)
        if (permutation_sign_on_pairs(o.min_vectors, h) < 0) o.orientation_reversing = true;
      table.cells.push_back(std::move(o));
      orbit_cfg.push_back(std::move(c));
    }
  }

  // boundary incidence: omit one vector from each (d-1)-cell and identify
  CellIndex index(table);
  for (auto& tau : table.cells) {
    int d_target = tau.dim + 1;
    if (!std::count(dims.begin(), dims.end(), d_target)) continue;
    for (size_t i = 0; i < tau.min_vectors.size(); ++i) {
      std::vector<RowVec> sub;
      for (size_t j = 0; j < tau.min_vectors.size(); ++j)
        if (j != i) sub.push_back(tau.min_vectors[j]);
      if (row_rank(sub) < m) continue;  // degenerate face, normalizes to zero
      auto match = index.identify(sub);
      if (!match)
        throw std::logic_error("retract_cells: boundary face not found in table");
      if (table.cells[match->orbit].dim != d_target)
        throw std::logic_error("retract_cells: boundary face has unexpected dimension");
      int sign = ((i % 2) ? -1 : 1) * match->sign;
      table.cells[match->orbit].boundary.push_back({tau.id, match->transporter, sign});
    }
  }
  return table;
}

// ------------- identification -------------

struct CellIndex::Inv {
  ConfigData cfg;
};

CellIndex::CellIndex(const CellTable& table) : table_(&table) {
  for (auto& c : table.cells) inv_.push_back({build_config(c.min_vectors)});
}

CellIndex::~CellIndex() = default;
CellIndex::CellIndex(CellIndex&&) noexcept = default;

std::optional<CellMatch> CellIndex::identify(const std::vector<RowVec>& vectors) const {
  ConfigData c = build_config(vectors);
  for (size_t i = 0; i < inv_.size(); ++i) {
    if (inv_[i].cfg.k.size() != c.k.size() || inv_[i].cfg.detF != c.detF) continue;
    std::vector<Mat> hs;
    equiv_search(inv_[i].cfg, c, false, hs);
    if (hs.empty()) continue;
    const Mat& h = hs[0];
    // parity of the permutation sorting the transported reference list
    const auto& ref = inv_[i].cfg.k;
    std::map<RowVec, int> pos;
    for (size_t j = 0; j < c.k.size(); ++j) pos[c.k[j]] = (int)j;
    std::vector<int> perm(ref.size());
    for (size_t j = 0; j < ref.size(); ++j)
      perm[j] = pos.at(canonical_sign(row_times_mat(ref[j], h)));
    int sign = 1;
    std::vector<char> seen(perm.size(), 0);
    for (size_t j = 0; j < perm.size(); ++j) {
      if (seen[j]) continue;
      int len = 0, t = (int)j;
      while (!seen[t]) {
        seen[t] = 1;
        t = perm[t];
        ++len;
      }
      if (len % 2 == 0) sign = -sign;
    }
    return CellMatch{(int)i, h, sign};
  }
  return std::nullopt;
}

std::optional<CellMatch> identify_cell(const std::vector<RowVec>& vectors,
                                       const CellTable& table) {
  return CellIndex(table).identify(vectors);
}

// ------------- serialization -------------

namespace {

void write_mat(std::ostream& os, const Mat& m) {
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) os << ' ' << m(i, j);
}

Mat read_mat(std::istream& is, int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) is >> m(i, j);
  return m;
}

}  // namespace

void write_cell_table(std::ostream& os, const CellTable& t) {
  os << "shtor-celltable 1\n";
  os << "m " << t.m << "\ndims " << t.dims.size();
  for (int d : t.dims) os << ' ' << d;
  os << "\ncells " << t.cells.size() << '\n';
  for (auto& c : t.cells) {
    os << "cell " << c.id << ' ' << c.dim << '\n';
    os << "vectors " << c.min_vectors.size() << '\n';
    for (auto& v : c.min_vectors) {
      for (size_t j = 0; j < v.size(); ++j) os << (j ? " " : "") << v[j];
      os << '\n';
    }
    os << "stabilizers " << c.stabilizer_gens.size() << '\n';
    for (auto& h : c.stabilizer_gens) {
      write_mat(os, h);
      os << '\n';
    }
    os << "orientation_reversing " << (c.orientation_reversing ? 1 : 0) << '\n';
    os << "boundary " << c.boundary.size() << '\n';
    for (auto& b : c.boundary) {
      os << b.target << ' ' << b.sign;
      write_mat(os, b.transporter);
      os << '\n';
    }
  }
}

CellTable read_cell_table(std::istream& is) {
  std::string tag;
  int version = 0;
  is >> tag >> version;
  if (tag != "shtor-celltable" || version != 1)
    throw std::runtime_error("read_cell_table: bad header");
  CellTable t;
  size_t ndims = 0, ncells = 0;
  is >> tag >> t.m >> tag >> ndims;
  t.dims.resize(ndims);
  for (auto& d : t.dims) is >> d;
  is >> tag >> ncells;
  for (size_t ci = 0; ci < ncells; ++ci) {
    CellOrbit c;
    size_t nv = 0, ns = 0, nb = 0;
    is >> tag >> c.id >> c.dim >> tag >> nv;
    for (size_t i = 0; i < nv; ++i) {
      RowVec v(t.m);
      for (auto& x : v) is >> x;
      c.min_vectors.push_back(std::move(v));
    }
    is >> tag >> ns;
    for (size_t i = 0; i < ns; ++i) c.stabilizer_gens.push_back(read_mat(is, t.m));
    int orv = 0;
    is >> tag >> orv;
    c.orientation_reversing = orv != 0;
    is >> tag >> nb;
    for (size_t i = 0; i < nb; ++i) {
      BoundaryRecord b;
      is >> b.target >> b.sign;
      b.transporter = read_mat(is, t.m);
      c.boundary.push_back(std::move(b));
    }
    t.cells.push_back(std::move(c));
  }
  return t;
}

}  // namespace shtor::retract
