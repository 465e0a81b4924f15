#include "shtor/hecke.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "shtor/quadform.hpp"

namespace shtor::hecke {

using retract::QForm;
using sharbly::Symbol;

std::string HeckeOperator::name() const {
  return std::string(u_type ? "U(" : "T(") + std::to_string(ell) + "," + std::to_string(k) + ")";
}

mpz_class gaussian_binomial(int m, int k, long ell) {
  if (k < 0 || k > m) return 0;
  mpz_class num = 1, den = 1, q = ell;
  auto qint = [&](int n) {  // 1 + q + ... + q^(n-1)
    mpz_class s = 0, t = 1;
    for (int i = 0; i < n; ++i) {
      s += t;
      t *= q;
    }
    return s;
  };
  for (int i = 0; i < k; ++i) {
    num *= qint(m - i);
    den *= qint(i + 1);
  }
  return num / den;
}

HeckeOperator double_coset_reps(int m, long ell, int k, int N) {
  if (k < 0 || k > m) throw std::invalid_argument("double_coset_reps: k out of range");
  HeckeOperator op;
  op.m = m;
  op.ell = ell;
  op.k = k;
  op.N = N;
  op.u_type = (N % ell == 0);

  // Column sublattices of Z^m of index ell^k with quotient exponent ell
  // correspond to (m-k)-dimensional subspaces of F_ell^m.  Enumerate each
  // subspace by its reduced row echelon form, lift to an upper-triangular
  // integer matrix t with diagonal in {1, ell}, and take s = t^T so that
  // the columns of s span the sublattice and the first row of s is
  // (d, 0, ..., 0) -- already in Gamma_0(N)-adapted position.
  int r = m - k;
  std::vector<int> pivots(r);
  std::vector<std::vector<long>> rref(r, std::vector<long>(m, 0));

  auto emit = [&]() {
    Mat t(m, m);
    int pi = 0;
    for (int c = 0; c < m; ++c) {
      if (pi < r && pivots[pi] == c) {
        for (int j = 0; j < m; ++j) t(c, j) = rref[pi][j];
        ++pi;
      } else {
        t(c, c) = ell;
      }
    }
    Mat s = transpose(t);
    if (op.u_type && std::gcd((long)s(0, 0), (long)N) != 1) return;  // U-analogue filter
    op.reps.push_back(std::move(s));
  };

  auto choose_pivots = [&](auto&& self, int i, int start) -> void {
    if (i == r) {
      for (int x = 0; x < r; ++x) {
        std::fill(rref[x].begin(), rref[x].end(), 0);
        rref[x][pivots[x]] = 1;
      }
      // walk all assignments of the free positions (row i, column c with
      // c > pivots[i] and c not a pivot)
      struct Pos {
        int row, col;
      };
      std::vector<Pos> free_pos;
      for (int x = 0; x < r; ++x)
        for (int c = pivots[x] + 1; c < m; ++c)
          if (std::find(pivots.begin(), pivots.end(), c) == pivots.end())
            free_pos.push_back({x, c});
      auto walk = [&](auto&& w, size_t idx) -> void {
        if (idx == free_pos.size()) {
          emit();
          return;
        }
        for (long v = 0; v < ell; ++v) {
          rref[free_pos[idx].row][free_pos[idx].col] = v;
          w(w, idx + 1);
        }
        rref[free_pos[idx].row][free_pos[idx].col] = 0;
      };
      walk(walk, 0);
      return;
    }
    for (int c = start; c < m; ++c) {
      pivots[i] = c;
      self(self, i + 1, c + 1);
    }
  };
  if (r == 0) {
    emit();  // s = ell * identity
  } else {
    choose_pivots(choose_pivots, 0, 0);
  }
  return op;
}

Chain<ZRing> act(const Chain<ZRing>& c, const Mat& s) {
  if (det(s) == 0) throw SingularMatrix("act: singular matrix");
  ZRing r;
  Chain<ZRing> out;
  out.m = c.m;
  out.degree = c.degree;
  for (auto& [sym, v] : c.terms) {
    std::vector<RowVec> img;
    img.reserve(sym.vectors.size());
    for (auto& w : sym.vectors) img.push_back(row_times_mat(w, s));
    chain_add_normalized(r, out, c.m, std::move(img), v);
  }
  return out;
}

Chain<ZRing> apply_operator(const Chain<ZRing>& c, const HeckeOperator& op) {
  ZRing r;
  Chain<ZRing> out;
  out.m = c.m;
  out.degree = c.degree;
  for (auto& s : op.reps) {
    Chain<ZRing> part = act(c, s);
    for (auto& [sym, v] : part.terms) chain_add(r, out, sym, v);
  }
  return out;
}

// ---- reduction to V-support, modulo Gamma_0(N) ----

namespace {

mpz_class symbol_size(const Symbol& s) {
  mpz_class t = 0;
  for (auto& v : s.vectors)
    for (i64 x : v) t += mpz_class(x) * x;
  return t;
}

bool in_gamma0(const Mat& t, int N) {
  if (det(t) != 1) return false;
  for (int j = 1; j < t.cols; ++j)
    if (((t(0, j) % N) + N) % N != 0) return false;
  return true;
}

// parity of the permutation mapping the +-pairs of a to those of b under
// v -> v t; requires {+-a t} = {+-b}
int rel_sign(const std::vector<RowVec>& a, const Mat& t, const std::vector<RowVec>& b) {
  size_t n = a.size();
  std::vector<int> perm(n, -1);
  for (size_t i = 0; i < n; ++i) {
    RowVec w = canonical_sign(row_times_mat(a[i], t));
    auto it = std::find(b.begin(), b.end(), w);
    if (it == b.end()) throw std::logic_error("rel_sign: transporter does not map the symbol");
    perm[i] = (int)(it - b.begin());
  }
  int sign = 1;
  std::vector<bool> seen(n, false);
  for (size_t i = 0; i < n; ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (size_t j = i; !seen[j]; j = perm[j]) {
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

// A chain in the Gamma_0(N)-coinvariant sharbly complex: terms are grouped
// into Gamma_0(N)-orbits of symbols (modulo the +-vector relation), orbits
// with an orientation-reversing self-equivalence are 2-torsion and dropped.
struct GammaChain {
  int m = 0;
  int N = 1;
  const retract::CellIndex* index = nullptr;

  // Gamma_0(N)-classes are grouped into GL(m,Z)-families: the expensive
  // configuration search runs once per family, after which membership tests
  // are |stab| cheap matrix products per candidate class.
  struct Family {
    Symbol canon;  // first-seen representative of the GL(m,Z)-class
    std::shared_ptr<retract::Configuration> cfg;
    std::vector<Mat> stab;  // full configuration stabilizer of canon
    bool is_v = false;
    long maxdet = 0;  // largest |det| over m-subsets (GL-invariant)
    std::vector<int> members;
  };
  struct Cls {
    Symbol rep;
    int family = -1;
    Mat h, hinv;  // canon . h = rep (up to signs/order)
    bool is_v = false;
    bool killed = false;
    long maxdet = 0;
    mpz_class size;
    mpz_class coeff = 0;
  };
  std::vector<Family> families;
  std::vector<Cls> classes;
  // GL(m,Z)-invariant fingerprint -> candidate family ids
  std::map<std::vector<long>, std::vector<int>> buckets;

  std::vector<long> key_of(const Symbol& s) const {
    std::vector<long> key;
    int n = (int)s.vectors.size();
    std::vector<int> pick(m);
    auto rec = [&](auto&& self, int pos, int start) -> void {
      if (pos == m) {
        Mat a(m, m);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) a(i, j) = s.vectors[pick[i]][j];
        i64 d = det(a);
        key.push_back((long)(d < 0 ? -d : d));
        return;
      }
      for (int c = start; c <= n - (m - pos); ++c) {
        pick[pos] = c;
        self(self, pos + 1, c + 1);
      }
    };
    rec(rec, 0, 0);
    std::sort(key.begin(), key.end());
    return key;
  }

  struct Loc {
    int id = -1;
    int sign = 1;
    Mat t;  // Gamma_0(N) transporter: rep -> s (identity for a fresh class)
  };

  // class id, the sign of [s] relative to the class representative, and the
  // transporter realizing the equivalence
  Loc locate(const Symbol& s) {
    auto probe = std::make_shared<retract::Configuration>(s.vectors);
    const std::vector<long>& key = probe->fingerprint();

    int fid = -1;
    Mat hs;  // canon . hs = s
    for (int f : buckets[key]) {
      if (families[f].canon.vectors.size() != s.vectors.size()) continue;
      auto h0 = retract::configuration_equiv(*families[f].cfg, *probe);
      if (!h0) continue;
      fid = f;
      hs = *h0;
      break;
    }
    if (fid < 0) {
      Family fam;
      fam.canon = s;
      fam.cfg = probe;
      fam.stab = retract::configuration_stabilizer(s.vectors);
      fam.is_v = index->identify(s.vectors).has_value();
      std::vector<long> dets = key_of(s);
      fam.maxdet = dets.empty() ? 0 : dets.back();
      families.push_back(std::move(fam));
      fid = (int)families.size() - 1;
      buckets[key].push_back(fid);
      hs = Mat(m, m);
      for (int i = 0; i < m; ++i) hs(i, i) = 1;
    }
    Family& fam = families[fid];

    // rep = canon . h  =>  rep . (hinv g hs) = canon g hs = s for g in stab
    for (int ci : fam.members) {
      Cls& cl = classes[ci];
      for (const Mat& g : fam.stab) {
        Mat t = mat_mul(cl.hinv, mat_mul(g, hs));
        if (!in_gamma0(t, N)) continue;
        return {ci, rel_sign(cl.rep.vectors, t, s.vectors), t};
      }
    }

    Cls cl;
    cl.rep = s;
    cl.family = fid;
    cl.h = hs;
    cl.hinv = unimodular_inverse(hs);
    cl.is_v = fam.is_v;
    cl.maxdet = fam.maxdet;
    cl.size = symbol_size(s);
    for (const Mat& g : fam.stab) {
      Mat t = mat_mul(cl.hinv, mat_mul(g, hs));
      if (in_gamma0(t, N) && rel_sign(s.vectors, t, s.vectors) < 0) {
        cl.killed = true;
        break;
      }
    }
    classes.push_back(std::move(cl));
    int id = (int)classes.size() - 1;
    fam.members.push_back(id);
    Mat e(m, m);
    for (int i = 0; i < m; ++i) e(i, i) = 1;
    return {id, 1, e};
  }

  void add(const Symbol& s, const mpz_class& c) {
    if (c == 0) return;
    Loc l = locate(s);
    if (classes[l.id].killed) return;
    classes[l.id].coeff += l.sign < 0 ? -c : c;
  }

  void add_chain(const Chain<ZRing>& c) {
    for (auto& [s, v] : c.terms) add(s, v);
  }

  bool is_zero() const {
    for (auto& cl : classes)
      if (cl.coeff != 0) return false;
    return true;
  }
};

// score a candidate reducing point: count of replacements that stay non-V
// and their total size; smaller is better
struct CandidateScore {
  int nonv = 0;
  mpz_class total = 0;
  bool shrinks = true;  // every surviving non-V replacement strictly smaller

  bool better_than(const CandidateScore& o) const {
    if (nonv != o.nonv) return nonv < o.nonv;
    return total < o.total;
  }
};

CandidateScore score_point(const Symbol& s, const RowVec& w, const retract::CellIndex& index) {
  CandidateScore sc;
  mpz_class size0 = symbol_size(s);
  for (size_t i = 0; i < s.vectors.size(); ++i) {
    std::vector<RowVec> repl = s.vectors;
    repl[i] = w;
    sharbly::Normalized n = sharbly::normalize(s.m, repl);
    if (!n.symbol) continue;  // degenerate face
    if (index.identify(n.symbol->vectors)) continue;
    mpz_class sz = symbol_size(*n.symbol);
    sc.nonv += 1;
    sc.total += sz;
    if (sz >= size0) sc.shrinks = false;
  }
  return sc;
}

// Cone points already spent on a symbol.  A bounded use count (rather than a
// permanent ban) lets a point be retried when the symbol re-enters the chain
// later: a permanent ban can leave a re-created class with no usable point at
// all, forcing the junk-producing endgame.  The cone budget still bounds any
// kill/re-create ping-pong this permits.
struct Tabu {
  std::map<std::pair<Symbol, RowVec>, int> uses;
  static constexpr int kLimit = 3;
  long count(const std::pair<Symbol, RowVec>& key) const {
    auto it = uses.find(key);
    return it != uses.end() && it->second >= kLimit ? 1 : 0;
  }
  void emplace(const Symbol& s, const RowVec& w) { ++uses[{s, w}]; }
};

RowVec choose_reducing_point(const Symbol& s, const retract::CellIndex& index, const Tabu& tabu,
                             ReduceStats& stats) {
  // candidates are short vectors of the dual (adjugate) form; for m = 2
  // this recovers the continued-fraction convergents
  QForm q = retract::qform_adjugate(retract::qform_of_vectors(s.vectors));
  auto [minval, minvecs] = retract::minimal_vectors(q);
  mpz_class bound = minval;
  for (int round = 0; round < 6; ++round) {
    std::vector<RowVec> raw = retract::short_vectors(q, bound);
    std::vector<RowVec> cand;
    cand.reserve(raw.size());
    for (auto& w : raw) cand.push_back(canonical_sign(primitivize(w)));
    std::sort(cand.begin(), cand.end(), lex_less);
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    std::stable_sort(cand.begin(), cand.end(), [&](const RowVec& a, const RowVec& b) {
      return retract::qform_eval(q, a) < retract::qform_eval(q, b);
    });
    std::optional<RowVec> best;
    CandidateScore best_sc;
    for (auto& w : cand) {
      if (std::find(s.vectors.begin(), s.vectors.end(), w) != s.vectors.end()) continue;
      if (tabu.count({s, w})) continue;
      CandidateScore sc = score_point(s, w, index);
      if (!best || sc.better_than(best_sc)) {
        best = w;
        best_sc = sc;
      }
    }
    if (best) {
      if (!best_sc.shrinks) stats.forced_steps += 1;
      return *best;
    }
    bound *= 2;  // every candidate coincided with a symbol vector or is tabu
  }
  throw ReductionFailed("reduce_to_V: no admissible reducing point");
}

mpz_class det_z(const std::vector<std::vector<mpz_class>>& a) {
  int n = (int)a.size();
  if (n == 1) return a[0][0];
  mpz_class d = 0;
  for (int j = 0; j < n; ++j) {
    if (a[0][j] == 0) continue;
    std::vector<std::vector<mpz_class>> sub(n - 1, std::vector<mpz_class>(n - 1));
    for (int r = 1; r < n; ++r) {
      int cc = 0;
      for (int c = 0; c < n; ++c)
        if (c != j) sub[r - 1][cc++] = a[r][c];
    }
    mpz_class t = a[0][j] * det_z(sub);
    d += (j % 2 == 0) ? t : -t;
  }
  return d;
}

// Canonical lattice point in a nontrivial coset of the index-d sublattice
// spanned by the m independent rows of u, reduced into the centered
// fundamental parallelepiped (all barycentric coordinates in [-1/2, 1/2]).
// The choice depends only on the vector configuration, so equivalent facets
// of adjacent symbols in a cycle receive matching points and the cone faces
// they generate cancel under the orbit identifications.  This is the rank-m
// analogue of inserting a continued-fraction convergent.
std::vector<RowVec> parallelepiped_points(int m, const std::vector<RowVec>& u,
                                          size_t max_count = 8) {
  std::vector<std::vector<mpz_class>> M(m, std::vector<mpz_class>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) M[i][j] = u[i][j];
  mpz_class D = det_z(M);
  mpz_class Dp = abs(D);
  if (Dp < 2 || Dp > 4096) return {};

  // adjugate: M * A = D * I, so x M^{-1} = (x A) / D
  std::vector<std::vector<mpz_class>> A(m, std::vector<mpz_class>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      std::vector<std::vector<mpz_class>> sub(m - 1, std::vector<mpz_class>(m - 1));
      int rr = 0;
      for (int r = 0; r < m; ++r) {
        if (r == j) continue;
        int cc = 0;
        for (int c = 0; c < m; ++c)
          if (c != i) sub[rr][cc++] = M[r][c];
        ++rr;
      }
      mpz_class cof = (m == 1) ? mpz_class(1) : det_z(sub);
      A[i][j] = ((i + j) % 2 == 0) ? cof : -cof;
    }

  // cosets of the row lattice: with u = U S V, the points t V for t ranging
  // over the mixed-radix box given by the diagonal of S hit each coset once
  linalg::IntMatrix mi(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) mi.set(i, j, u[i][j]);
  linalg::SNFResult snf = linalg::smith_normal_form(mi);
  std::vector<long> s(m);
  for (int i = 0; i < m; ++i) s[i] = std::abs((long)snf.S.get(i, i).get_si());

  // dual form of the configuration: invariant under v -> v t on the vectors
  // together with w -> w t on candidate points, so the scores below do not
  // depend on which orbit representative the facet came from
  QForm dual = retract::qform_adjugate(retract::qform_of_vectors(u));

  using Score = std::pair<mpz_class, std::vector<mpz_class>>;
  std::map<RowVec, Score> seen;  // candidate -> best score
  std::vector<long> t(m, 0);
  for (;;) {
    int i = 0;
    while (i < m && ++t[i] >= s[i]) t[i++] = 0;
    if (i == m) break;

    std::vector<mpz_class> x(m, 0);
    for (int r = 0; r < m; ++r) {
      if (t[r] == 0) continue;
      for (auto& [c, v] : snf.V.row(r)) x[c] += t[r] * v;
    }
    std::vector<mpz_class> r0(m), res(m);
    std::vector<int> boundary;
    for (int j = 0; j < m; ++j) {
      mpz_class y = 0;
      for (int r = 0; r < m; ++r) y += x[r] * A[r][j];
      if (D < 0) y = -y;
      // nearest integer to y / Dp; exact halves keep both signs below
      mpz_class num = 2 * y + Dp, den = 2 * Dp, r;
      mpz_fdiv_q(r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
      r0[j] = r;
      res[j] = y - r * Dp;
      if (2 * abs(res[j]) == Dp) boundary.push_back(j);
    }
    std::vector<mpz_class> profile(m);
    for (int j = 0; j < m; ++j) profile[j] = abs(res[j]);
    std::sort(profile.begin(), profile.end(), std::greater<mpz_class>());

    // all centered representatives of the coset: residues on the boundary of
    // the fundamental domain may sit on either side
    for (size_t mask = 0; mask < (size_t(1) << boundary.size()); ++mask) {
      std::vector<mpz_class> w = x;
      for (int j = 0; j < m; ++j) {
        mpz_class r = r0[j];
        for (size_t b = 0; b < boundary.size(); ++b)
          if (boundary[b] == j && (mask >> b & 1)) r += (res[j] > 0) ? 1 : -1;
        if (r != 0)
          for (int c = 0; c < m; ++c) w[c] -= r * u[j][c];
      }
      RowVec wv(m);
      bool zero = true, fits = true;
      for (int j = 0; j < m; ++j) {
        if (!w[j].fits_slong_p()) fits = false;
        wv[j] = fits ? (i64)w[j].get_si() : 0;
        if (wv[j] != 0) zero = false;
      }
      if (!fits || zero) continue;
      Score score{retract::qform_eval(dual, wv), profile};
      wv = canonical_sign(primitivize(wv));
      auto it = seen.find(wv);
      if (it == seen.end())
        seen.emplace(std::move(wv), std::move(score));
      else if (score < it->second)
        it->second = std::move(score);
    }
  }
  std::vector<std::pair<Score, RowVec>> ranked;
  for (auto& [wv, sc] : seen) ranked.push_back({sc, wv});
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return lex_less(a.second, b.second);
  });
  std::vector<RowVec> out;
  for (auto& [sc, wv] : ranked) {
    out.push_back(wv);
    if (out.size() >= max_count) break;
  }
  return out;
}

std::optional<RowVec> parallelepiped_point(int m, const std::vector<RowVec>& u) {
  std::vector<RowVec> pts = parallelepiped_points(m, u, 1);
  if (pts.empty()) return std::nullopt;
  return pts[0];
}

// For a symbol with a non-unimodular m-subset: the canonical interior point
// of a densest such subset, skipping points already present or tabu.
std::optional<RowVec> facet_reducing_point(const Symbol& s, long target_det, const Tabu& tabu) {
  int m = s.m;
  int n = (int)s.vectors.size();
  std::optional<RowVec> found;
  long found_det = 1;
  std::vector<int> pick(m);
  auto rec = [&](auto&& self, int pos, int start) -> void {
    if (pos == m) {
      Mat a(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) a(i, j) = s.vectors[pick[i]][j];
      i64 d = det(a);
      long ad = (long)(d < 0 ? -d : d);
      if (ad < 2 || ad <= found_det) return;
      if (target_det > 0 && ad > target_det) return;
      std::vector<RowVec> sub(m);
      for (int i = 0; i < m; ++i) sub[i] = s.vectors[pick[i]];
      for (const RowVec& pt : parallelepiped_points(m, sub)) {
        if (std::find(s.vectors.begin(), s.vectors.end(), pt) != s.vectors.end()) continue;
        if (tabu.count({s, pt})) continue;
        found = pt;
        found_det = ad;
        return;
      }
      return;
    }
    for (int c = start; c <= n - (m - pos); ++c) {
      pick[pos] = c;
      self(self, pos + 1, c + 1);
    }
  };
  rec(rec, 0, 0);
  return found;
}

}  // namespace

ReduceResult reduce_to_V(const Chain<ZRing>& chain, const retract::CellIndex& index, int N,
                         long budget) {
  ZRing R;
  ReduceResult res;
  res.certificate.m = chain.m;
  res.certificate.degree = chain.degree + 1;

  GammaChain work{chain.m, N, &index};
  work.add_chain(chain);

  if (chain.degree >= 1) {
    GammaChain bd{chain.m, N, &index};
    bd.add_chain(sharbly::boundary(R, chain));
    if (!bd.is_zero())
      throw NotACycle("reduce_to_V: boundary is nonzero in the coinvariant complex");
  }

  const bool trace = std::getenv("SHTOR_REDUCE_TRACE") != nullptr;
  long n_sweep = 0, n_fb = 0, n_dual = 0;
  Tabu tabu;
  std::map<int, std::vector<RowVec>> w0_cache;  // facet orbit -> ranked base points

  // registry of facet orbits seen so far: supplies, for every instance of a
  // facet class, a Gamma_0(N) transporter back to the class representative
  GammaChain facets{chain.m, N, &index};

  // Cone class `ci` at w with the exact coefficient that removes it from the
  // chain.  Cone faces can fold back onto the class itself (up to the orbit
  // identifications), so the per-unit effect S on its coefficient is measured
  // first and the cone is applied with coefficient c / S.  When S is even and
  // c odd the required division by 2 is deferred: every coefficient in play
  // is doubled and the factor is accumulated in res.scale (the output then
  // represents scale * input, harmless away from the prime 2).
  auto kill_cone = [&](int ci, const RowVec& w) -> bool {
    const Symbol s = work.classes[ci].rep;
    Chain<ZRing> cone;
    cone.m = chain.m;
    cone.degree = chain.degree + 1;
    std::vector<RowVec> coned = s.vectors;
    coned.insert(coned.begin(), w);
    sharbly::chain_add_normalized(R, cone, chain.m, std::move(coned), 1);
    if (cone.is_zero()) return false;
    Chain<ZRing> dcone = sharbly::boundary(R, cone);
    mpz_class S = 0;
    for (auto& [fs, fc] : dcone.terms) {
      GammaChain::Loc l = work.locate(fs);
      if (l.id == ci) S += l.sign < 0 ? -fc : fc;
    }
    if (S == 0) return false;
    mpz_class c = work.classes[ci].coeff;
    mpz_class odd = abs(S);
    while (odd % 2 == 0) odd /= 2;
    if (!mpz_divisible_p(c.get_mpz_t(), odd.get_mpz_t()))
      throw ReductionFailed("reduce_to_V: torsion obstruction at an odd prime");
    while (!mpz_divisible_p(c.get_mpz_t(), S.get_mpz_t())) {
      for (auto& cl : work.classes) cl.coeff *= 2;
      for (auto& [ss, vv] : res.certificate.terms) vv *= 2;
      res.scale *= 2;
      c *= 2;
    }
    mpz_class a = c / S;
    for (auto& [ss, vv] : cone.terms) vv *= a;
    res.certificate = sharbly::chain_sub(R, res.certificate, cone);
    for (auto& [fs, fc] : dcone.terms) work.add(fs, -(fc * a));
    res.stats.cone_steps += 1;
    return true;
  };

  // first facet of s in the given orbit whose transported base point is not
  // yet spent on s; returns the cone point
  auto facet_instance = [&](const Symbol& s, int facet_id, long facet_det,
                            const RowVec& w0) -> std::optional<RowVec> {
    for (size_t j = 0; j < s.vectors.size(); ++j) {
      std::vector<RowVec> fv;
      for (size_t i = 0; i < s.vectors.size(); ++i)
        if (i != j) fv.push_back(s.vectors[i]);
      sharbly::Normalized n = sharbly::normalize(chain.m, fv);
      if (!n.symbol || (int)n.symbol->vectors.size() != chain.m) continue;
      Mat a(chain.m, chain.m);
      for (int r = 0; r < chain.m; ++r)
        for (int c = 0; c < chain.m; ++c) a(r, c) = n.symbol->vectors[r][c];
      i64 d = det(a);
      if ((d < 0 ? -d : d) != facet_det) continue;
      GammaChain::Loc l = facets.locate(*n.symbol);
      if (l.id != facet_id) continue;
      RowVec w = canonical_sign(primitivize(row_times_mat(w0, l.t)));
      if (tabu.count({s, w})) continue;
      if (std::find(s.vectors.begin(), s.vectors.end(), w) != s.vectors.end()) continue;
      return w;
    }
    return std::nullopt;
  };

  for (;;) {
    std::vector<int> live;
    long nonv = 0;
    mpz_class tot = 0;
    for (size_t i = 0; i < work.classes.size(); ++i)
      if (work.classes[i].coeff != 0 && !work.classes[i].is_v) {
        ++nonv;
        tot += work.classes[i].size;
        live.push_back((int)i);
      }
    long mx = 0;
    for (int ci : live) mx = std::max(mx, work.classes[ci].maxdet);
    if (trace && (res.stats.cone_steps % 25 == 0 || live.empty())) {
      long bad = 0;
      for (int ci : live)
        if (work.classes[ci].maxdet >= 2) ++bad;
      std::fprintf(stderr,
                   "[reduce] step %ld classes %zu nonV %ld bad %ld mx %ld total %s "
                   "sweep %ld fb %ld dual %ld\n",
                   res.stats.cone_steps, work.classes.size(), nonv, bad, mx, tot.get_str().c_str(),
                   n_sweep, n_fb, n_dual);
    }
    if (live.empty()) break;
    if (res.stats.cone_steps >= budget)
      throw BudgetExhausted("reduce_to_V: cone budget exhausted");

    // densest non-unimodular facet over the whole chain (degree >= 1); its
    // whole orbit is coned in one sweep, at translates of one base point, so
    // the [point, facet] cone faces merge into a single orbit whose total
    // coefficient is the facet's coefficient in the vanishing boundary.
    // Only classes with maxdet == mx can hold a facet of determinant mx.
    int attack_id = -1;
    long attack_det = 1;
    std::optional<RowVec> w0;
    if (chain.degree >= 1 && mx >= 2) {
      // largest facet determinant first, then any smaller one: an attack on a
      // lower determinant is still structural and postpones the dual endgame
      for (long d0 = mx; d0 >= 2 && attack_id < 0; --d0) {
        for (int ci : live) {
          if (work.classes[ci].maxdet < d0) continue;
          const Symbol& s = work.classes[ci].rep;
          for (size_t j = 0; j < s.vectors.size() && attack_id < 0; ++j) {
            std::vector<RowVec> fv;
            for (size_t i = 0; i < s.vectors.size(); ++i)
              if (i != j) fv.push_back(s.vectors[i]);
            sharbly::Normalized n = sharbly::normalize(chain.m, fv);
            if (!n.symbol || (int)n.symbol->vectors.size() != chain.m) continue;
            Mat a(chain.m, chain.m);
            for (int r = 0; r < chain.m; ++r)
              for (int c = 0; c < chain.m; ++c) a(r, c) = n.symbol->vectors[r][c];
            i64 d = det(a);
            if ((d < 0 ? -d : d) != d0) continue;
            GammaChain::Loc l = facets.locate(*n.symbol);
            auto it = w0_cache.find(l.id);
            if (it == w0_cache.end())
              it = w0_cache
                       .emplace(l.id,
                                parallelepiped_points(chain.m, facets.classes[l.id].rep.vectors))
                       .first;
            // first ranked base point usable on this instance; later sweeps of
            // the same orbit rotate to other candidates as the tabu fills up
            for (const RowVec& cand : it->second) {
              RowVec w = canonical_sign(primitivize(row_times_mat(cand, l.t)));
              if (tabu.count({s, w})) continue;
              if (std::find(s.vectors.begin(), s.vectors.end(), w) != s.vectors.end()) continue;
              attack_det = d0;
              attack_id = l.id;
              w0 = cand;
              break;
            }
          }
          if (attack_id >= 0) break;
        }
      }
    }

    if (attack_id >= 0) {
      {
        // cone every instance of the attack orbit, whatever the class's own
        // worst determinant: full coverage is what makes the cone faces cancel
        bool progress = false;
        for (int ci : live) {
          if (work.classes[ci].coeff == 0) continue;
          Symbol s = work.classes[ci].rep;
          mpz_class coeff = work.classes[ci].coeff;
          std::optional<RowVec> w = facet_instance(s, attack_id, attack_det, *w0);
          if (!w) continue;
          tabu.emplace(s, *w);
          if (trace && std::getenv("SHTOR_REDUCE_TRACE2"))
            std::fprintf(stderr, "[sweep] step %ld attack %d cone cls %d coeff %s w %lld,%lld,%lld,%lld\n",
                         res.stats.cone_steps, attack_id, ci, coeff.get_str().c_str(),
                         (long long)(*w)[0], (long long)(*w)[1], (long long)(*w)[2],
                         (long long)(*w)[3]);
          if (kill_cone(ci, *w)) {
            progress = true;
            ++n_sweep;
          }
        }
        if (progress) continue;
      }
    }

    // endgame: no non-unimodular facet is left (or only degenerate cones);
    // cone the largest class at a short vector of its dual form
    int chosen = live.front();
    for (int ci : live)
      if (work.classes[ci].size > work.classes[chosen].size) chosen = ci;
    Symbol s = work.classes[chosen].rep;
    if (chain.degree >= 1 && work.classes[chosen].maxdet >= 2) {
      // a facet sweep made no progress here: fall back to the canonical
      // interior point of a densest subset of this class alone
      auto fp = facet_reducing_point(s, work.classes[chosen].maxdet, tabu);
      if (fp) {
        tabu.emplace(s, *fp);
        if (kill_cone(chosen, *fp)) {
          ++n_fb;
          continue;
        }
      }
    }
    RowVec w = choose_reducing_point(s, index, tabu, res.stats);
    tabu.emplace(s, w);
    // a degenerate or net-zero cone cannot remove the class; the tabu entry
    // steers the next candidate search elsewhere, and the budget bounds the
    // number of retries
    if (kill_cone(chosen, w))
      ++n_dual;
    else
      res.stats.cone_steps += 1;  // count the failed attempt against the budget
  }

  res.output.m = chain.m;
  res.output.degree = chain.degree;
  for (auto& cl : work.classes)
    if (cl.coeff != 0) sharbly::chain_add(R, res.output, cl.rep, cl.coeff);
  return res;
}

void require_odd(long p) {
  if (p == 2)
    throw TwoTorsionUnsupported(
        "Hecke operators on 2-torsion classes are unsupported: the sharbly "
        "reduction is only valid away from 2");
  if (p < 2) throw std::invalid_argument("prime expected");
}

// ---- NodeHomology ----

namespace {

std::vector<Int> mat_vec(const IntMatrix& a, const std::vector<Int>& x) {
  std::vector<Int> y(a.rows(), 0);
  for (int i = 0; i < a.rows(); ++i)
    for (auto& [j, v] : a.row(i)) y[i] += v * x[j];
  return y;
}

}  // namespace

NodeHomology::NodeHomology(const AssembledComplex& cx, int node_dim)
    : cx_(&cx), node_dim_(node_dim) {
  index_ = std::make_shared<retract::CellIndex>(cx.table);
  pos_ = cx.dim_pos(node_dim);
  if (pos_ < 1)
    throw std::invalid_argument("NodeHomology: node has no incoming differential");
  n_ = (long)cx.bases[pos_].size();
  const IntMatrix& B = cx.d_matrices[pos_ - 1];

  IntMatrix vout, vout_inv;
  long r = 0;
  if ((size_t)pos_ < cx.d_matrices.size()) {
    const IntMatrix& C = cx.d_matrices[pos_];
    auto snf = linalg::smith_normal_form(C);
    r = (long)snf.divisors().size();
    vout = std::move(snf.V);
    vout_inv = std::move(snf.Vinv);
  } else {
    vout = IntMatrix::identity((int)n_);
    vout_inv = IntMatrix::identity((int)n_);
  }
  ker_rank_ = r;
  v_out_ = std::move(vout);

  // presentation of Ker/Im in kernel coordinates: rows r.. of V*B
  IntMatrix vb = v_out_.multiplied_by(B);
  long g = n_ - r;
  IntMatrix pres((int)g, B.cols());
  for (long i = 0; i < n_; ++i)
    for (auto& [j, v] : vb.row((int)i)) {
      if (i < r) throw linalg::CompositionNonzero("NodeHomology: image not in kernel");
      pres.set((int)(i - r), j, v);
    }
  auto snf2 = linalg::smith_normal_form(pres);
  u_pres_ = std::move(snf2.U);
  u_pres_inv_ = std::move(snf2.Uinv);
  divisors_.assign(g, 0);
  {
    auto d = snf2.S;
    long nz = 0;
    for (long i = 0; i < std::min((long)d.rows(), (long)d.cols()); ++i)
      if (d.get((int)i, (int)i) != 0) {
        divisors_[i] = d.get((int)i, (int)i);
        ++nz;
      }
    free_rank_ = g - nz;
  }

  // kernel basis = trailing g columns of V^-1
  IntMatrix vinv = std::move(vout_inv);
  kernel_ = IntMatrix((int)n_, (int)g);
  for (long i = 0; i < n_; ++i)
    for (auto& [j, v] : vinv.row((int)i))
      if (j >= r) kernel_.set((int)i, (int)(j - r), v);

  // projection signs: each basis cell chain must project to +e_i
  chain_sign_.assign(n_, 1);
  for (long i = 0; i < n_; ++i) {
    const congruence::LeveledCell& lc = cx.bases[pos_][i];
    Mat gmat = congruence::label_lift(lc.label, lc.epsilon);
    const retract::CellOrbit& orb = cx.table.cells[lc.base];
    ZRing R;
    Chain<ZRing> c;
    c.m = cx.m;
    c.degree = (int)orb.min_vectors.size() - cx.m;
    std::vector<RowVec> img;
    for (auto& v : orb.min_vectors) img.push_back(row_times_mat(v, gmat));
    sharbly::chain_add_normalized(R, c, cx.m, std::move(img), Int(1));
    std::vector<Int> proj = congruence::project_chain(cx, *index_, c);
    int hits = 0, sign = 0;
    for (long t = 0; t < n_; ++t)
      if (proj[t] != 0) {
        ++hits;
        if (t != i || (proj[t] != 1 && proj[t] != -1))
          throw std::logic_error("NodeHomology: basis chain does not project to a unit");
        sign = proj[t] == 1 ? 1 : -1;
      }
    if (hits != 1)
      throw std::logic_error("NodeHomology: basis chain projection not supported on itself");
    chain_sign_[i] = sign;
  }
}

long NodeHomology::p_torsion_dim(long p) const {
  long t = 0;
  for (auto& d : divisors_)
    if (d != 0 && mpz_divisible_ui_p(d.get_mpz_t(), (unsigned long)p)) ++t;
  return t;
}

long NodeHomology::mod_p_dim(long p) const { return free_rank_ + p_torsion_dim(p); }

Chain<ZRing> NodeHomology::cell_chain(int i) const {
  const congruence::LeveledCell& lc = cx_->bases[pos_][i];
  Mat gmat = congruence::label_lift(lc.label, lc.epsilon);
  const retract::CellOrbit& orb = cx_->table.cells[lc.base];
  ZRing R;
  Chain<ZRing> c;
  c.m = cx_->m;
  c.degree = (int)orb.min_vectors.size() - cx_->m;
  std::vector<RowVec> img;
  for (auto& v : orb.min_vectors) img.push_back(row_times_mat(v, gmat));
  sharbly::chain_add_normalized(R, c, cx_->m, std::move(img), Int(chain_sign_[i]));
  return c;
}

std::vector<Int> NodeHomology::cycle_of(const std::vector<Int>& z) const {
  if ((long)z.size() != (long)divisors_.size())
    throw std::invalid_argument("cycle_of: coordinate length mismatch");
  return mat_vec(kernel_, mat_vec(u_pres_, z));
}

std::vector<Int> NodeHomology::express(const std::vector<Int>& cycle) const {
  if ((long)cycle.size() != n_) throw std::invalid_argument("express: wrong chain length");
  std::vector<Int> y = mat_vec(v_out_, cycle);
  for (long i = 0; i < ker_rank_; ++i)
    if (y[i] != 0) throw NotACycle("express: vector is not in Ker(d_out)");
  std::vector<Int> w(y.begin() + ker_rank_, y.end());
  return mat_vec(u_pres_inv_, w);
}

std::vector<Int> NodeHomology::apply_to_class(const HeckeOperator& op,
                                              const std::vector<Int>& coords,
                                              const HeckeOptions& opts) const {
  ZRing R;
  std::vector<Int> x = cycle_of(coords);
  Chain<ZRing> c;
  c.m = cx_->m;
  c.degree = cx_->m * (cx_->m - 1) / 2 - node_dim_;
  for (long i = 0; i < n_; ++i) {
    if (x[i] == 0) continue;
    Chain<ZRing> ci = cell_chain((int)i);
    for (auto& [s, v] : ci.terms) chain_add(R, c, s, v * x[i]);
  }

  // total Hecke image: sum over coset representatives (the only data-parallel
  // stage; the reduction below works on the whole sum, since single summands
  // are not cycles in the coinvariant complex)
  long nrep = (long)op.reps.size();
  std::vector<Chain<ZRing>> parts(nrep);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
#endif
  for (long a = 0; a < nrep; ++a) parts[a] = act(c, op.reps[a]);

  Chain<ZRing> total;
  total.m = c.m;
  total.degree = c.degree;
  for (auto& part : parts)
    for (auto& [s, v] : part.terms) chain_add(R, total, s, v);

  ReduceResult red = reduce_to_V(total, *index_, cx_->N, opts.budget);

  // certificate identity (output = scale * input + boundary(certificate)),
  // checked in the coinvariant complex
  Chain<ZRing> scaled = total;
  if (red.scale != 1)
    for (auto& [s, v] : scaled.terms) v *= red.scale;
  Chain<ZRing> diff = sharbly::chain_sub(R, red.output, scaled);
  diff = sharbly::chain_sub(R, diff, sharbly::boundary(R, red.certificate));
  GammaChain check{cx_->m, cx_->N, index_.get()};
  check.add_chain(diff);
  if (!check.is_zero())
    throw ReductionFailed("apply_to_class: certificate identity violated");

  std::vector<Int> proj = congruence::project_chain(*cx_, *index_, red.output);
  std::vector<Int> out = express(proj);
  if (red.scale != 1) {
    // express is Z-linear, so the accumulated power of 2 divides every
    // coordinate exactly
    for (auto& v : out) {
      if (!mpz_divisible_p(v.get_mpz_t(), red.scale.get_mpz_t()))
        throw ReductionFailed("apply_to_class: deferred division by 2 is inexact");
      v /= red.scale;
    }
  }
  return out;
}

FpMatrix NodeHomology::matrix_on_torsion(const HeckeOperator& op, long p,
                                         const HeckeOptions& opts) const {
  require_odd(p);
  std::vector<long> idx;
  for (long i = 0; i < (long)divisors_.size(); ++i)
    if (divisors_[i] != 0 && mpz_divisible_ui_p(divisors_[i].get_mpz_t(), (unsigned long)p))
      idx.push_back(i);
  long t = (long)idx.size();
  auto field = std::make_shared<const gf::Field>((gf::u64)p);
  FpMatrix out(field, (int)t, (int)t);
  for (long j = 0; j < t; ++j) {
    std::vector<Int> z(divisors_.size(), 0);
    z[idx[j]] = divisors_[idx[j]] / p;  // order-p generator of summand idx[j]
    std::vector<Int> img = apply_to_class(op, z, opts);
    bool all_zero = true;
    for (long i = 0; i < (long)divisors_.size(); ++i) {
      Int v = img[i];
      const Int& d = divisors_[i];
      if (d != 0) mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), d.get_mpz_t());
      auto pos = std::find(idx.begin(), idx.end(), i);
      if (pos != idx.end()) {
        Int unit = divisors_[i] / p;
        if (!mpz_divisible_p(v.get_mpz_t(), unit.get_mpz_t()))
          throw ReductionFailed("matrix_on_torsion: image left the p-torsion subspace");
        Int cc = v / unit;
        gf::u64 cval = mpz_fdiv_ui(cc.get_mpz_t(), (unsigned long)p);
        out.at((int)(pos - idx.begin()), (int)j) = field->from_int((long long)cval);
        if (cval != 0) all_zero = false;
      } else if (v != 0) {
        throw ReductionFailed("matrix_on_torsion: image left the p-torsion subspace");
      }
    }
    if (all_zero && opts.warnings) opts.warnings->push_back({(int)j});
  }
  return out;
}

FpMatrix NodeHomology::matrix_mod_p(const HeckeOperator& op, long p,
                                    const HeckeOptions& opts) const {
  require_odd(p);
  std::vector<long> idx;
  for (long i = 0; i < (long)divisors_.size(); ++i)
    if (divisors_[i] == 0 || mpz_divisible_ui_p(divisors_[i].get_mpz_t(), (unsigned long)p))
      idx.push_back(i);
  long t = (long)idx.size();
  auto field = std::make_shared<const gf::Field>((gf::u64)p);
  FpMatrix out(field, (int)t, (int)t);
  for (long j = 0; j < t; ++j) {
    std::vector<Int> z(divisors_.size(), 0);
    z[idx[j]] = 1;
    std::vector<Int> img = apply_to_class(op, z, opts);
    for (long r = 0; r < t; ++r) {
      gf::u64 cval = mpz_fdiv_ui(img[idx[r]].get_mpz_t(), (unsigned long)p);
      out.at((int)r, (int)j) = field->from_int((long long)cval);
    }
  }
  return out;
}

}  // namespace shtor::hecke
