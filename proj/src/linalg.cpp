#include "shtor/linalg.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace shtor::linalg {

void IntMatrix::set(int i, int j, Int v) {
  if (v == 0)
    row_[i].erase(j);
  else
    row_[i][j] = std::move(v);
}

void IntMatrix::add(int i, int j, const Int& v) {
  auto it = row_[i].find(j);
  if (it == row_[i].end()) {
    if (v != 0) row_[i][j] = v;
  } else {
    it->second += v;
    if (it->second == 0) row_[i].erase(it);
  }
}

Int IntMatrix::get(int i, int j) const {
  auto it = row_[i].find(j);
  return it == row_[i].end() ? Int(0) : it->second;
}

long IntMatrix::nnz() const {
  long n = 0;
  for (auto& r : row_) n += (long)r.size();
  return n;
}

IntMatrix IntMatrix::identity(int n) {
  IntMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1);
  return m;
}

IntMatrix IntMatrix::from_dense(const std::vector<std::vector<long>>& a) {
  int r = (int)a.size(), c = r ? (int)a[0].size() : 0;
  IntMatrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j)
      if (a[i][j]) m.set(i, j, Int(a[i][j]));
  return m;
}

IntMatrix IntMatrix::multiplied_by(const IntMatrix& other) const {
  if (cols_ != other.rows_) throw std::invalid_argument("IntMatrix: shape mismatch");
  IntMatrix out(rows_, other.cols_);
  for (int i = 0; i < rows_; ++i)
    for (auto& [k, v] : row_[i])
      for (auto& [j, w] : other.row_[k]) out.add(i, j, v * w);
  return out;
}

IntMatrix IntMatrix::transposed() const {
  IntMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (auto& [j, v] : row_[i]) t.set(j, i, v);
  return t;
}

bool IntMatrix::is_zero() const {
  for (auto& r : row_)
    if (!r.empty()) return false;
  return true;
}

bool IntMatrix::operator==(const IntMatrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && row_ == other.row_;
}

void IntMatrix::write(std::ostream& os) const {
  os << "shtor-intmatrix 1\n" << rows_ << ' ' << cols_ << ' ' << nnz() << '\n';
  for (int i = 0; i < rows_; ++i)
    for (auto& [j, v] : row_[i]) os << i << ' ' << j << ' ' << v << '\n';
}

IntMatrix IntMatrix::read(std::istream& is) {
  std::string tag;
  int version = 0;
  is >> tag >> version;
  if (tag != "shtor-intmatrix" || version != 1)
    throw std::runtime_error("IntMatrix::read: bad header");
  int r, c;
  long n;
  is >> r >> c >> n;
  IntMatrix m(r, c);
  for (long t = 0; t < n; ++t) {
    int i, j;
    Int v;
    is >> i >> j >> v;
    m.set(i, j, v);
  }
  return m;
}

std::vector<Int> SNFResult::divisors() const {
  std::vector<Int> d;
  int n = std::min(S.rows(), S.cols());
  for (int i = 0; i < n; ++i) {
    Int v = S.get(i, i);
    if (v != 0) d.push_back(v);
  }
  return d;
}

namespace {

// Working state for the elimination.  U is stored transposed (its columns
// as rows) because every row operation on S induces a column operation on U.
struct SnfWork {
  int rows, cols;
  std::vector<std::map<int, Int>> a;        // matrix rows
  std::vector<std::unordered_set<int>> cr;  // col -> rows with nonzero entry
  bool track;
  std::vector<std::map<int, Int>> ut;    // U transposed
  std::vector<std::map<int, Int>> v;     // V rows
  std::vector<std::map<int, Int>> uinv;  // U^-1 rows: transform like rows of a
  std::vector<std::map<int, Int>> vinv;  // V^-1 columns: transform like columns of a

  SnfWork(const IntMatrix& m, bool with_transforms)
      : rows(m.rows()), cols(m.cols()), a(rows), cr(cols), track(with_transforms) {
    for (int i = 0; i < rows; ++i)
      for (auto& [j, val] : m.row(i)) {
        a[i][j] = val;
        cr[j].insert(i);
      }
    if (track) {
      ut.resize(rows);
      v.resize(cols);
      uinv.resize(rows);
      vinv.resize(cols);
      for (int i = 0; i < rows; ++i) ut[i][i] = uinv[i][i] = 1;
      for (int j = 0; j < cols; ++j) v[j][j] = vinv[j][j] = 1;
    }
  }

  void put(int i, int j, Int val) {
    if (val == 0) {
      if (a[i].erase(j)) cr[j].erase(i);
    } else {
      if (a[i].find(j) == a[i].end()) cr[j].insert(i);
      a[i][j] = std::move(val);
    }
  }

  // R_r -= q * R_t
  void row_sub(int r, int t, const Int& q) {
    if (q == 0) return;
    for (auto& [j, val] : a[t]) {
      auto it = a[r].find(j);
      if (it == a[r].end()) {
        a[r][j] = -q * val;
        cr[j].insert(r);
      } else {
        it->second -= q * val;
        if (it->second == 0) {
          a[r].erase(it);
          cr[j].erase(r);
        }
      }
    }
    if (track) {  // U: C_t += q * C_r ; U^-1: R_r -= q * R_t
      for (auto& [i, val] : ut[r]) {
        ut[t][i] += q * val;
        if (ut[t][i] == 0) ut[t].erase(i);
      }
      for (auto& [i, val] : uinv[t]) {
        uinv[r][i] -= q * val;
        if (uinv[r][i] == 0) uinv[r].erase(i);
      }
    }
  }

  // C_c -= q * C_t
  void col_sub(int c, int t, const Int& q) {
    if (q == 0) return;
    std::vector<int> rows_t(cr[t].begin(), cr[t].end());
    for (int r : rows_t) {
      const Int& val = a[r][t];
      auto it = a[r].find(c);
      if (it == a[r].end()) {
        a[r][c] = -q * val;
        cr[c].insert(r);
      } else {
        it->second -= q * val;
        if (it->second == 0) {
          a[r].erase(it);
          cr[c].erase(r);
        }
      }
    }
    if (track) {  // V: R_t += q * R_c ; V^-1: C_c -= q * C_t
      for (auto& [j, val] : v[c]) {
        v[t][j] += q * val;
        if (v[t][j] == 0) v[t].erase(j);
      }
      for (auto& [j, val] : vinv[t]) {
        vinv[c][j] -= q * val;
        if (vinv[c][j] == 0) vinv[c].erase(j);
      }
    }
  }

  void row_swap(int r, int t) {
    if (r == t) return;
    std::vector<int> js;
    for (auto& [j, val] : a[r]) js.push_back(j);
    for (auto& [j, val] : a[t]) js.push_back(j);
    std::swap(a[r], a[t]);
    for (int j : js) {
      cr[j].erase(r);
      cr[j].erase(t);
      if (a[r].count(j)) cr[j].insert(r);
      if (a[t].count(j)) cr[j].insert(t);
    }
    if (track) {
      std::swap(ut[r], ut[t]);
      std::swap(uinv[r], uinv[t]);
    }
  }

  void col_swap(int c, int t) {
    if (c == t) return;
    std::unordered_set<int> rows_u = cr[c];
    for (int r : cr[t]) rows_u.insert(r);
    for (int r : rows_u) {
      Int vc = 0, vt = 0;
      auto ic = a[r].find(c);
      if (ic != a[r].end()) vc = ic->second;
      auto it = a[r].find(t);
      if (it != a[r].end()) vt = it->second;
      if (ic != a[r].end()) a[r].erase(c);
      if (it != a[r].end()) a[r].erase(t);
      if (vt != 0) a[r][c] = vt;
      if (vc != 0) a[r][t] = vc;
    }
    std::swap(cr[c], cr[t]);
    if (track) {
      std::swap(v[c], v[t]);
      std::swap(vinv[c], vinv[t]);
    }
  }

  void row_negate(int r) {
    for (auto& [j, val] : a[r]) val = -val;
    if (track) {
      for (auto& [i, val] : ut[r]) val = -val;
      for (auto& [i, val] : uinv[r]) val = -val;
    }
  }
};

// round-to-nearest quotient: |num - q*den| <= |den|/2 for either sign of den
Int nearest_quotient(const Int& num, const Int& den) {
  Int q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  // fdiv gives a remainder with the sign of den; stepping q once more maps it
  // to r - den, which is the representative on the other side of zero
  if (2 * abs(r) > abs(den)) q += 1;
  return q;
}

Int sparse_dot(const std::map<int, Int>& a, const std::map<int, Int>& b) {
  Int s = 0;
  if (a.size() > b.size()) return sparse_dot(b, a);
  for (auto& [j, val] : a) {
    auto it = b.find(j);
    if (it != b.end()) s += val * it->second;
  }
  return s;
}

size_t block_bits(const SnfWork& w, int t) {
  size_t b = 0;
  for (int i = t; i < w.rows; ++i)
    for (auto& [j, val] : w.a[i]) b = std::max(b, mpz_sizeinbase(val.get_mpz_t(), 2));
  return b;
}

// Lagrange-style pairwise size reduction of the active rows (and, via the
// transpose loop, columns).  gcd elimination on a dense block roughly doubles
// the entry bit length per pivot; the entries it produces are huge coordinates
// of a lattice whose actual minors are tiny, so shortening the basis vectors
// against each other restores small entries.  All operations are unimodular
// and tracked, so the factorization is untouched.
void reduce_active_rows(SnfWork& w, int t) {
  std::vector<int> act;
  for (int i = t; i < w.rows; ++i)
    if (!w.a[i].empty()) act.push_back(i);
  if (act.size() < 2) return;
  auto dot = [&](int x, int y) { return sparse_dot(w.a[x], w.a[y]); };
  std::vector<Int> norm(w.rows);
  for (int i : act) norm[i] = dot(i, i);
  for (int sweep = 0; sweep < 30; ++sweep) {
    bool changed = false;
    std::sort(act.begin(), act.end(), [&](int x, int y) { return norm[x] < norm[y]; });
    for (size_t bi = 0; bi < act.size(); ++bi)
      for (size_t si = 0; si < bi; ++si) {
        int big = act[bi], small = act[si];
        if (norm[small] == 0) continue;
        Int d = dot(big, small);
        Int q = nearest_quotient(d, norm[small]);
        if (q == 0) continue;
        // accept only strict decreases to guarantee termination
        Int nn = norm[big] - 2 * q * d + q * q * norm[small];
        if (nn >= norm[big]) continue;
        w.row_sub(big, small, q);
        norm[big] = nn;
        changed = true;
      }
    if (!changed) break;
  }
}

void reduce_active_cols(SnfWork& w, int t) {
  std::vector<int> act;
  for (int j = t; j < w.cols; ++j)
    if (!w.cr[j].empty()) act.push_back(j);
  if (act.size() < 2) return;
  auto col_dot = [&](int c1, int c2) {
    Int s = 0;
    const auto& rows = w.cr[c1].size() <= w.cr[c2].size() ? w.cr[c1] : w.cr[c2];
    int other = w.cr[c1].size() <= w.cr[c2].size() ? c2 : c1;
    int self = other == c2 ? c1 : c2;
    for (int r : rows) {
      auto it = w.a[r].find(other);
      if (it != w.a[r].end()) s += w.a[r].at(self) * it->second;
    }
    return s;
  };
  std::vector<Int> norm(w.cols);
  for (int j : act) norm[j] = col_dot(j, j);
  for (int sweep = 0; sweep < 30; ++sweep) {
    bool changed = false;
    std::sort(act.begin(), act.end(), [&](int x, int y) { return norm[x] < norm[y]; });
    for (size_t bi = 0; bi < act.size(); ++bi)
      for (size_t si = 0; si < bi; ++si) {
        int big = act[bi], small = act[si];
        if (norm[small] == 0) continue;
        Int q = nearest_quotient(col_dot(big, small), norm[small]);
        if (q == 0) continue;
        Int nn = norm[big] - 2 * q * col_dot(big, small) + q * q * norm[small];
        if (nn >= norm[big]) continue;
        w.col_sub(big, small, q);
        norm[big] = nn;
        changed = true;
      }
    if (!changed) break;
  }
}

}  // namespace

static void diagonalize(SnfWork& w, std::vector<Int>& diag, const SNFOptions& opts) {
  int n = std::min(w.rows, w.cols);
  constexpr size_t kSwellBits = 128;
  size_t settled = kSwellBits;  // entry size the last reduction could not improve
  for (int t = 0; t < n; ++t) {
    // pick pivot among active entries: smallest bit length first (units keep
    // the elimination quotient-free and are what prevents entry blow-up), then
    // least Markowitz fill.  A full scan is cheap next to the eliminations.
    int pi = -1, pj = -1;
    size_t pbits = 0;
    long pfill = 0;
    bool any = false;
    for (int i = t; i < w.rows; ++i)
      for (auto& [j, val] : w.a[i]) {
        any = true;
        size_t bits = mpz_sizeinbase(val.get_mpz_t(), 2);
        long fill = ((long)w.a[i].size() - 1) * ((long)w.cr[j].size() - 1);
        if (pi < 0 || bits < pbits || (bits == pbits && fill < pfill)) {
          pi = i;
          pj = j;
          pbits = bits;
          pfill = fill;
        }
      }
    if (!any) break;
    w.row_swap(pi, t);
    w.col_swap(pj, t);

    // gcd elimination until row t and column t are clear outside the pivot.
    // Each pass moves the smallest remaining entry into the pivot slot and
    // reduces every other entry of the column (resp. row) once.  The round
    // robin reaches the gcd in very few passes, so each entry is only mixed a
    // handful of times; reducing to completion against one row at a time mixes
    // entries O(bits) times and makes the coefficients explode.
    for (long round = 0;; ++round) {
      // Size-reduce the active block whenever the entries swell; without this
      // the bit length roughly doubles per clearing pass on a dense block.
      // The round cap keeps the stage terminating even if reduction and
      // clearing were ever to fight (pure clearing terminates on its own).
      size_t cur = block_bits(w, t);
      if (round < 200 && cur > kSwellBits && cur > settled + settled / 4) {
        reduce_active_rows(w, t);
        reduce_active_cols(w, t);
        settled = std::max(kSwellBits, block_bits(w, t));
      }
      if (std::getenv("SHTOR_SNF_TRACE"))
        std::fprintf(stderr, "[snf] t %d round %ld bits %zu colnnz %zu rownnz %zu\n", t,
                     round, block_bits(w, t), w.cr[t].size(), w.a[t].size());
      if (w.cr[t].size() > 1 || !w.cr[t].count(t)) {
        // one column pass: smallest entry into the pivot slot, reduce the rest
        int best = -1;
        size_t bbits = 0;
        for (int x : w.cr[t]) {
          size_t bits = mpz_sizeinbase(w.a[x][t].get_mpz_t(), 2);
          if (best < 0 || bits < bbits) {
            best = x;
            bbits = bits;
          }
        }
        w.row_swap(best, t);
        std::vector<int> others;
        for (int x : w.cr[t])
          if (x != t) others.push_back(x);
        const Int piv = w.a[t][t];
        for (int r : others) w.row_sub(r, t, nearest_quotient(w.a[r][t], piv));
        continue;
      }
      if (w.a[t].size() > 1 || !w.a[t].count(t)) {
        // one row pass, the transpose of the above
        int best = -1;
        size_t bbits = 0;
        for (auto& [j, val] : w.a[t]) {
          size_t bits = mpz_sizeinbase(val.get_mpz_t(), 2);
          if (best < 0 || bits < bbits) {
            best = j;
            bbits = bits;
          }
        }
        w.col_swap(best, t);
        std::vector<int> others;
        for (auto& [j, val] : w.a[t])
          if (j != t) others.push_back(j);
        const Int piv = w.a[t][t];
        for (int c : others) w.col_sub(c, t, nearest_quotient(w.a[t][c], piv));
        continue;
      }
      break;
    }
    if (w.a[t][t] < 0) w.row_negate(t);
    diag.push_back(w.a[t][t]);
    if (opts.report_every > 0 && (t + 1) % opts.report_every == 0)
      std::fprintf(stderr, "[snf] pivot %d/%d\n", t + 1, n);
  }
}

// make diag[i] | diag[j] for i < j, updating transforms
static void fix_divisibility(SnfWork& w, std::vector<Int>& diag) {
  int r = (int)diag.size();
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j) {
      if (diag[j] % diag[i] == 0) continue;
      Int aa = diag[i], bb = diag[j], g, x, y;
      mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), aa.get_mpz_t(), bb.get_mpz_t());
      Int l = aa / g * bb;
      diag[i] = g;
      diag[j] = l;
      w.put(i, i, g);
      w.put(j, j, l);
      if (w.track) {
        // U' = U * Linv with Linv = [[a/g, -y], [b/g, x]] on coords (i,j):
        // columns of U (rows of ut) combine as
        // C_i' = (a/g) C_i + (b/g) C_j ; C_j' = -y C_i + x C_j
        auto ci = w.ut[i], cj = w.ut[j];
        std::map<int, Int> ni, nj;
        auto axpy = [](std::map<int, Int>& dst, const Int& s, const std::map<int, Int>& src) {
          if (s == 0) return;
          for (auto& [k, val] : src) {
            dst[k] += s * val;
            if (dst[k] == 0) dst.erase(k);
          }
        };
        axpy(ni, aa / g, ci);
        axpy(ni, bb / g, cj);
        axpy(nj, -y, ci);
        axpy(nj, x, cj);
        w.ut[i] = std::move(ni);
        w.ut[j] = std::move(nj);
        // V' = Rinv * V with Rinv = [[x a/g, y b/g], [-1, 1]]:
        // R_i' = (x a/g) R_i + (y b/g) R_j ; R_j' = -R_i + R_j
        auto ri = w.v[i], rj = w.v[j];
        std::map<int, Int> mi, mj;
        axpy(mi, x * (aa / g), ri);
        axpy(mi, y * (bb / g), rj);
        axpy(mj, -1, ri);
        axpy(mj, 1, rj);
        w.v[i] = std::move(mi);
        w.v[j] = std::move(mj);
        // U^-1' = L U^-1 with L = Linv^-1 = [[x, y], [-b/g, a/g]] on rows (i,j)
        auto ui = w.uinv[i], uj = w.uinv[j];
        std::map<int, Int> pi, pj;
        axpy(pi, x, ui);
        axpy(pi, y, uj);
        axpy(pj, -(bb / g), ui);
        axpy(pj, aa / g, uj);
        w.uinv[i] = std::move(pi);
        w.uinv[j] = std::move(pj);
        // V^-1' = V^-1 R with R = Rinv^-1 = [[1, -y b/g], [1, x a/g]]:
        // C_i' = C_i + C_j ; C_j' = (-y b/g) C_i + (x a/g) C_j
        auto wi = w.vinv[i], wj = w.vinv[j];
        std::map<int, Int> qi, qj;
        axpy(qi, 1, wi);
        axpy(qi, 1, wj);
        axpy(qj, -y * (bb / g), wi);
        axpy(qj, x * (aa / g), wj);
        w.vinv[i] = std::move(qi);
        w.vinv[j] = std::move(qj);
      }
    }
}

SNFResult smith_normal_form(const IntMatrix& a, const SNFOptions& opts) {
  SnfWork w(a, true);
  std::vector<Int> diag;
  diagonalize(w, diag, opts);
  fix_divisibility(w, diag);
  SNFResult res;
  res.S = IntMatrix(a.rows(), a.cols());
  for (size_t i = 0; i < diag.size(); ++i) res.S.set((int)i, (int)i, diag[i]);
  res.U = IntMatrix(a.rows(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (auto& [j, val] : w.ut[i]) res.U.set(j, i, val);
  res.V = IntMatrix(a.cols(), a.cols());
  for (int i = 0; i < a.cols(); ++i)
    for (auto& [j, val] : w.v[i]) res.V.set(i, j, val);
  res.Uinv = IntMatrix(a.rows(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (auto& [j, val] : w.uinv[i]) res.Uinv.set(i, j, val);
  res.Vinv = IntMatrix(a.cols(), a.cols());
  for (int c = 0; c < a.cols(); ++c)
    for (auto& [r, val] : w.vinv[c]) res.Vinv.set(r, c, val);
  return res;
}

std::vector<Int> elementary_divisors(const IntMatrix& a, const SNFOptions& opts) {
  SnfWork w(a, false);
  std::vector<Int> diag;
  diagonalize(w, diag, opts);
  fix_divisibility(w, diag);
  return diag;
}

long rank_of(const IntMatrix& a) { return (long)elementary_divisors(a).size(); }

IntMatrix unimodular_inverse(const IntMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("unimodular_inverse: not square");
  int n = a.rows();
  // work rows of [A | I]
  std::vector<std::map<int, Int>> w(n), inv(n);
  for (int i = 0; i < n; ++i) {
    for (auto& [j, v] : a.row(i)) w[i][j] = v;
    inv[i][i] = 1;
  }
  auto row_op = [&](int r, int t, Int q) {  // R_r -= q R_t (q by value: callers
                                            // may pass a reference into row r)
    if (q == 0) return;
    for (auto* m : {&w, &inv})
      for (auto& [j, v] : (*m)[t]) {
        Int& x = (*m)[r][j];
        x -= q * v;
        if (x == 0) (*m)[r].erase(j);
      }
  };
  // size-reduce the active augmented rows [W | Inv] against each other when
  // the entries swell; identical rationale and shape as in the SNF elimination
  auto dot = [&](int x, int y) {
    return sparse_dot(w[x], w[y]) + sparse_dot(inv[x], inv[y]);
  };
  auto reduce_active = [&](int c) {
    std::vector<int> act;
    for (int i = c; i < n; ++i) act.push_back(i);
    if (act.size() < 2) return;
    std::vector<Int> norm(n);
    for (int i : act) norm[i] = dot(i, i);
    for (int sweep = 0; sweep < 30; ++sweep) {
      bool changed = false;
      std::sort(act.begin(), act.end(), [&](int x, int y) { return norm[x] < norm[y]; });
      for (size_t bi = 0; bi < act.size(); ++bi)
        for (size_t si = 0; si < bi; ++si) {
          int big = act[bi], small = act[si];
          if (norm[small] == 0) continue;
          Int d = dot(big, small);
          Int q = nearest_quotient(d, norm[small]);
          if (q == 0) continue;
          Int nn = norm[big] - 2 * q * d + q * q * norm[small];
          if (nn >= norm[big]) continue;
          row_op(big, small, q);
          norm[big] = nn;
          changed = true;
        }
      if (!changed) break;
    }
  };
  constexpr size_t kSwellBits = 128;
  auto active_bits = [&](int c) {
    size_t b = 0;
    for (int i = c; i < n; ++i)
      for (auto* m : {&w, &inv})
        for (auto& [j, v] : (*m)[i]) b = std::max(b, mpz_sizeinbase(v.get_mpz_t(), 2));
    return b;
  };
  size_t settled = kSwellBits;  // entry size the last reduction could not improve
  for (int c = 0; c < n; ++c) {
    size_t cur = active_bits(c);
    if (cur > kSwellBits && cur > settled + settled / 4) {
      reduce_active(c);
      settled = std::max(kSwellBits, active_bits(c));
    }
    // gcd-eliminate column c below and at row c to a single unit pivot
    for (;;) {
      int best = -1;
      for (int i = c; i < n; ++i) {
        auto it = w[i].find(c);
        if (it == w[i].end()) continue;
        if (best < 0 || abs(it->second) < abs(w[best].at(c))) best = i;
      }
      if (best < 0) throw std::invalid_argument("unimodular_inverse: singular matrix");
      if (best != c) {
        std::swap(w[best], w[c]);
        std::swap(inv[best], inv[c]);
      }
      bool done = true;
      const Int piv = w[c].at(c);
      for (int i = c + 1; i < n; ++i) {
        auto it = w[i].find(c);
        if (it == w[i].end()) continue;
        row_op(i, c, nearest_quotient(it->second, piv));
        if (w[i].count(c)) done = false;
      }
      if (done) break;
    }
    Int piv = w[c].at(c);
    if (piv != 1 && piv != -1)
      throw std::invalid_argument("unimodular_inverse: determinant not +-1");
    if (piv == -1) {
      for (auto& [j, v] : w[c]) v = -v;
      for (auto& [j, v] : inv[c]) v = -v;
    }
    for (int i = 0; i < c; ++i) {
      auto it = w[i].find(c);
      if (it != w[i].end()) row_op(i, c, it->second);
    }
  }
  // w is now upper unitriangular; clear above the diagonal right to left
  for (int c = n - 1; c >= 0; --c)
    for (int i = 0; i < c; ++i) {
      auto it = w[i].find(c);
      if (it != w[i].end()) row_op(i, c, it->second);
    }
  IntMatrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (auto& [j, v] : inv[i]) out.set(i, j, v);
  return out;
}

HomologySummands homology_summands(const IntMatrix& d_in, const IntMatrix& d_out,
                                   const SNFOptions& opts) {
  if (d_out.cols() != d_in.rows())
    throw std::invalid_argument("homology_summands: chain group dimensions disagree");
  if (!d_out.multiplied_by(d_in).is_zero())
    throw CompositionNonzero("homology_summands: d_out * d_in != 0");
  std::vector<Int> div_in = elementary_divisors(d_in, opts);
  std::vector<Int> div_out = elementary_divisors(d_out, opts);
  HomologySummands h;
  h.free_rank = (long)d_in.rows() - (long)div_out.size() - (long)div_in.size();
  for (auto& d : div_in)
    if (d > 1) h.torsion.push_back(d);
  return h;
}

}  // namespace shtor::linalg
