#include "shtor/quadform.hpp"

#include <algorithm>
#include <set>

namespace shtor::retract {

namespace {

mpz_class det_rec(const std::vector<std::vector<mpz_class>>& m, std::vector<int> cols, int row) {
  if (cols.size() == 1) return m[row][cols[0]];
  mpz_class sum = 0;
  int sign = 1;
  for (size_t k = 0; k < cols.size(); ++k) {
    if (m[row][cols[k]] != 0) {
      std::vector<int> rest;
      for (size_t j = 0; j < cols.size(); ++j)
        if (j != k) rest.push_back(cols[j]);
      sum += sign * m[row][cols[k]] * det_rec(m, rest, row + 1);
    }
    sign = -sign;
  }
  return sum;
}

}  // namespace

mpz_class qform_det(const QForm& g) {
  int n = (int)g.size();
  if (n == 0) return 1;
  std::vector<int> cols(n);
  for (int i = 0; i < n; ++i) cols[i] = i;
  return det_rec(g, cols, 0);
}

QForm qform_adjugate(const QForm& g) {
  int n = (int)g.size();
  QForm adj(n, std::vector<mpz_class>(n, 0));
  if (n == 1) {
    adj[0][0] = 1;
    return adj;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      QForm minor(n - 1, std::vector<mpz_class>(n - 1, 0));
      for (int r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (int c = 0, cc = 0; c < n; ++c) {
          if (c == j) continue;
          minor[rr][cc++] = g[r][c];
        }
        ++rr;
      }
      mpz_class cof = qform_det(minor);
      adj[j][i] = ((i + j) & 1) ? -cof : cof;
    }
  return adj;
}

namespace {

// floor(sqrt(num/den)) for num, den > 0
mpz_class floor_sqrt_rational(const mpz_class& num, const mpz_class& den) {
  mpz_class prod = num * den, r;
  mpz_sqrt(r.get_mpz_t(), prod.get_mpz_t());
  return r / den;
}

}  // namespace

QForm qform_identity(int m, const mpz_class& scale) {
  QForm g(m, std::vector<mpz_class>(m, 0));
  for (int i = 0; i < m; ++i) g[i][i] = scale;
  return g;
}

QForm qform_from_mat(const Mat& a) {
  QForm g(a.rows, std::vector<mpz_class>(a.cols, 0));
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) g[i][j] = (long)a(i, j);
  return g;
}

QForm qform_of_vectors(const std::vector<RowVec>& rows) {
  int m = (int)rows.at(0).size();
  QForm g(m, std::vector<mpz_class>(m, 0));
  for (auto& v : rows)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) g[i][j] += (long)v[i] * (long)v[j];
  return g;
}

mpz_class qform_eval(const QForm& g, const RowVec& v) { return qform_pair(g, v, v); }

mpz_class qform_pair(const QForm& g, const RowVec& v, const RowVec& w) {
  int m = (int)g.size();
  mpz_class s = 0;
  for (int i = 0; i < m; ++i) {
    if (!v[i]) continue;
    for (int j = 0; j < m; ++j)
      if (w[j]) s += (long)v[i] * g[i][j] * (long)w[j];
  }
  return s;
}

QForm qform_transform(const QForm& g, const Mat& u) {
  int m = (int)g.size();
  QForm t(u.rows, std::vector<mpz_class>(m, 0));
  for (int i = 0; i < u.rows; ++i)
    for (int k = 0; k < m; ++k) {
      if (!u(i, k)) continue;
      for (int j = 0; j < m; ++j) t[i][j] += (long)u(i, k) * g[k][j];
    }
  QForm out(u.rows, std::vector<mpz_class>(u.rows, 0));
  for (int i = 0; i < u.rows; ++i)
    for (int j = 0; j < u.rows; ++j)
      for (int k = 0; k < m; ++k)
        if (u(j, k)) out[i][j] += t[i][k] * (long)u(j, k);
  return out;
}

bool qform_eq(const QForm& a, const QForm& b) { return a == b; }

QForm qform_primitive(const QForm& g) {
  mpz_class c = 0;
  for (auto& row : g)
    for (auto& x : row) c = gcd(c, x);
  if (c == 0 || c == 1) return g;
  QForm out = g;
  for (auto& row : out)
    for (auto& x : row) x /= c;
  return out;
}

bool is_positive_definite(const QForm& g) {
  int n = (int)g.size();
  for (int k = 1; k <= n; ++k) {
    QForm lead(k, std::vector<mpz_class>(k, 0));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) lead[i][j] = g[i][j];
    if (qform_det(lead) <= 0) return false;
  }
  return true;
}

namespace {

// Gram-Schmidt data (exact rationals) from a Gram matrix
void gso(const QForm& gc, std::vector<std::vector<mpq_class>>& mu, std::vector<mpq_class>& B) {
  int n = (int)gc.size();
  mu.assign(n, std::vector<mpq_class>(n, 0));
  B.assign(n, 0);
  // inner(b_i, b*_j)
  std::vector<std::vector<mpq_class>> ip(n, std::vector<mpq_class>(n, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      mpq_class v = mpq_class(gc[i][j]);
      for (int l = 0; l < j; ++l) v -= mu[j][l] * ip[i][l];
      ip[i][j] = v;
      if (j < i) mu[i][j] = v / B[j];
    }
    B[i] = ip[i][i];
  }
}

}  // namespace

std::pair<QForm, Mat> lll_reduce(const QForm& g) {
  if (!is_positive_definite(g)) throw NotPositiveDefinite("lll_reduce: form not positive definite");
  int n = (int)g.size();
  QForm gc = g;
  Mat u = Mat::identity(n);
  auto row_op = [&](int k, int j, const mpz_class& q) {  // b_k -= q b_j
    if (q == 0) return;
    long ql = mpz_fits_slong_p(q.get_mpz_t()) ? q.get_si() : 0;
    if (!mpz_fits_slong_p(q.get_mpz_t())) throw std::overflow_error("lll_reduce: huge multiplier");
    for (int c = 0; c < n; ++c) u(k, c) -= ql * u(j, c);
    for (int c = 0; c < n; ++c) gc[k][c] -= q * gc[j][c];
    for (int r = 0; r < n; ++r) gc[r][k] -= q * gc[r][j];
  };
  auto swap_rows = [&](int k, int j) {
    for (int c = 0; c < n; ++c) std::swap(u(k, c), u(j, c));
    std::swap(gc[k], gc[j]);
    for (int r = 0; r < n; ++r) std::swap(gc[r][k], gc[r][j]);
  };
  std::vector<std::vector<mpq_class>> mu;
  std::vector<mpq_class> B;
  gso(gc, mu, B);
  int k = 1;
  while (k < n) {
    for (int j = k - 1; j >= 0; --j) {
      // q = nearest integer to mu[k][j]
      mpq_class two_mu = 2 * mu[k][j] + 1;
      mpz_class q;
      mpz_fdiv_q(q.get_mpz_t(), two_mu.get_num().get_mpz_t(),
                 mpz_class(2 * two_mu.get_den()).get_mpz_t());
      if (q != 0) {
        row_op(k, j, q);
        gso(gc, mu, B);
      }
    }
    mpq_class lhs = B[k];
    mpq_class rhs = (mpq_class(3, 4) - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1];
    if (lhs >= rhs) {
      ++k;
    } else {
      swap_rows(k, k - 1);
      gso(gc, mu, B);
      k = std::max(1, k - 1);
    }
  }
  return {gc, u};
}

std::vector<RowVec> short_vectors(const QForm& g, const mpz_class& bound) {
  auto [gr, u] = lll_reduce(g);
  int n = (int)g.size();
  mpz_class d = qform_det(gr);
  QForm adj = qform_adjugate(gr);
  std::vector<long> box(n);
  for (int i = 0; i < n; ++i) {
    mpz_class b = floor_sqrt_rational(bound * adj[i][i], d);
    if (!mpz_fits_slong_p(b.get_mpz_t())) throw std::overflow_error("short_vectors: huge box");
    box[i] = b.get_si();
  }
  std::set<RowVec> found;
  RowVec v(n, 0);
  // box enumeration with exact final evaluation
  auto rec = [&](auto&& self, int i) -> void {
    if (i == n) {
      bool zero = true;
      for (long x : v)
        if (x) zero = false;
      if (zero) return;
      if (qform_eval(gr, v) <= bound) {
        RowVec w(n, 0);
        for (int r = 0; r < n; ++r)
          for (int c = 0; c < n; ++c) w[c] += v[r] * u(r, c);
        found.insert(canonical_sign(w));
      }
      return;
    }
    for (long x = -box[i]; x <= box[i]; ++x) {
      v[i] = x;
      self(self, i + 1);
    }
    v[i] = 0;
  };
  rec(rec, 0);
  return {found.begin(), found.end()};
}

std::pair<mpz_class, std::vector<RowVec>> minimal_vectors(const QForm& g) {
  auto [gr, u] = lll_reduce(g);
  (void)u;
  mpz_class bound = gr[0][0];
  for (int i = 1; i < (int)gr.size(); ++i) bound = std::min(bound, mpz_class(gr[i][i]));
  auto cands = short_vectors(g, bound);
  mpz_class best = bound;
  for (auto& v : cands) best = std::min(best, qform_eval(g, v));
  std::vector<RowVec> out;
  for (auto& v : cands)
    if (qform_eval(g, v) == best) out.push_back(v);
  return {best, out};
}

}  // namespace shtor::retract
