#include "shtor/fpmat.hpp"

#include <algorithm>
#include <numeric>

namespace shtor::linalg {

using gf::Poly;

FpMatrix FpMatrix::identity(std::shared_ptr<const Field> f, int n) {
  FpMatrix m(f, n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = f->one();
  return m;
}

FpMatrix FpMatrix::multiplied_by(const FpMatrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("FpMatrix: shape mismatch");
  FpMatrix r(f_, rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const auto& v = at(i, k);
      if (f_->is_zero(v)) continue;
      for (int j = 0; j < o.cols_; ++j)
        r.at(i, j) = f_->add(r.at(i, j), f_->mul(v, o.at(k, j)));
    }
  return r;
}

bool FpMatrix::is_zero() const {
  for (auto& x : a_)
    if (!f_->is_zero(x)) return false;
  return true;
}

Poly charpoly(const FpMatrix& a0) {
  const Field& F = *a0.field();
  int n = a0.rows();
  if (n != a0.cols()) throw std::invalid_argument("charpoly: not square");
  FpMatrix h = a0;
  // similarity reduction to upper Hessenberg form
  for (int j = 0; j + 2 < n; ++j) {
    int piv = -1;
    for (int i = j + 1; i < n; ++i)
      if (!F.is_zero(h.at(i, j))) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != j + 1) {  // swap rows and matching columns
      for (int c = 0; c < n; ++c) std::swap(h.at(piv, c), h.at(j + 1, c));
      for (int r = 0; r < n; ++r) std::swap(h.at(r, piv), h.at(r, j + 1));
    }
    auto inv = F.inv(h.at(j + 1, j));
    for (int i = j + 2; i < n; ++i) {
      if (F.is_zero(h.at(i, j))) continue;
      auto f = F.mul(h.at(i, j), inv);
      for (int c = 0; c < n; ++c) h.at(i, c) = F.sub(h.at(i, c), F.mul(f, h.at(j + 1, c)));
      for (int r = 0; r < n; ++r) h.at(r, j + 1) = F.add(h.at(r, j + 1), F.mul(f, h.at(r, i)));
    }
  }
  // leading-minor recurrence for Hessenberg characteristic polynomials
  std::vector<Poly> p(n + 1);
  p[0] = gf::poly_one(F);
  for (int m = 1; m <= n; ++m) {
    Poly t = gf::poly_mul(F, p[m - 1],
                          Poly{F.neg(h.at(m - 1, m - 1)), F.one()});  // (x - h_{m-1,m-1}) p_{m-1}
    auto prod = F.one();
    for (int i = 2; i <= m; ++i) {
      prod = F.mul(prod, h.at(m - i + 1, m - i));
      auto coef = F.mul(h.at(m - i, m - 1), prod);
      t = gf::poly_sub(F, t, gf::poly_scale(F, p[m - i], coef));
    }
    p[m] = std::move(t);
  }
  return p[n];
}

namespace {

// row-reduce in place; returns pivot column for each pivot row
std::vector<int> rref(FpMatrix& a) {
  const Field& F = *a.field();
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < a.cols() && r < a.rows(); ++c) {
    int piv = -1;
    for (int i = r; i < a.rows(); ++i)
      if (!F.is_zero(a.at(i, c))) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != r)
      for (int j = 0; j < a.cols(); ++j) std::swap(a.at(piv, j), a.at(r, j));
    auto inv = F.inv(a.at(r, c));
    for (int j = 0; j < a.cols(); ++j) a.at(r, j) = F.mul(a.at(r, j), inv);
    for (int i = 0; i < a.rows(); ++i) {
      if (i == r || F.is_zero(a.at(i, c))) continue;
      auto f = a.at(i, c);
      for (int j = 0; j < a.cols(); ++j) a.at(i, j) = F.sub(a.at(i, j), F.mul(f, a.at(r, j)));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

long fp_rank(FpMatrix a) { return (long)rref(a).size(); }

std::optional<std::vector<Field::Elem>> fp_solve(FpMatrix a, std::vector<Field::Elem> b) {
  const Field& F = *a.field();
  FpMatrix aug(a.field(), a.rows(), a.cols() + 1);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) aug.at(i, j) = a.at(i, j);
    aug.at(i, a.cols()) = b[i];
  }
  auto piv = rref(aug);
  std::vector<Field::Elem> x(a.cols(), F.zero());
  for (size_t r = 0; r < piv.size(); ++r) {
    if (piv[r] == a.cols()) return std::nullopt;  // inconsistent
    x[piv[r]] = aug.at((int)r, a.cols());
  }
  return x;
}

std::vector<std::vector<Field::Elem>> fp_kernel(FpMatrix a) {
  const Field& F = *a.field();
  int n = a.cols();
  auto piv = rref(a);
  std::vector<char> is_pivot(n, 0);
  for (int c : piv) is_pivot[c] = 1;
  std::vector<std::vector<Field::Elem>> out;
  for (int c = 0; c < n; ++c) {
    if (is_pivot[c]) continue;
    std::vector<Field::Elem> v(n, F.zero());
    v[c] = F.one();
    for (size_t r = 0; r < piv.size(); ++r) v[piv[r]] = F.neg(a.at((int)r, c));
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

// columns of `basis` span an invariant subspace of `a`; matrix of a restricted
// to that subspace, in the given basis
FpMatrix restrict_to(const FpMatrix& a, const std::vector<std::vector<Field::Elem>>& basis) {
  const Field& F = *a.field();
  int n = a.rows(), s = (int)basis.size();
  FpMatrix bmat(a.field(), n, s);
  for (int j = 0; j < s; ++j)
    for (int i = 0; i < n; ++i) bmat.at(i, j) = basis[j][i];
  FpMatrix r(a.field(), s, s);
  for (int j = 0; j < s; ++j) {
    std::vector<Field::Elem> img(n, F.zero());
    for (int i = 0; i < n; ++i) {
      auto acc = F.zero();
      for (int k = 0; k < n; ++k) acc = F.add(acc, F.mul(a.at(i, k), basis[j][k]));
      img[i] = acc;
    }
    auto sol = fp_solve(bmat, img);
    if (!sol) throw std::logic_error("restrict_to: subspace not invariant");
    for (int i = 0; i < s; ++i) r.at(i, j) = (*sol)[i];
  }
  return r;
}

}  // namespace

EigenSystem simultaneous_eigenpackages(const std::vector<FpMatrix>& mats, int extension_bound) {
  if (mats.empty()) throw std::invalid_argument("simultaneous_eigenpackages: no matrices");
  auto base = mats[0].field();
  if (base->degree() != 1)
    throw std::invalid_argument("simultaneous_eigenpackages: expect prime-field input");
  int n = mats[0].rows();
  for (auto& m : mats)
    if (m.rows() != n || m.cols() != n)
      throw std::invalid_argument("simultaneous_eigenpackages: sizes differ");
  for (size_t i = 0; i < mats.size(); ++i)
    for (size_t j = i + 1; j < mats.size(); ++j)
      if (!(mats[i].multiplied_by(mats[j]) == mats[j].multiplied_by(mats[i])))
        throw NonCommuting((int)i, (int)j);

  EigenSystem sys;
  if (n == 0) {
    sys.field = base;
    return sys;
  }

  // choose the extension degree from the char-poly factor degrees over F_p
  long L = 1;
  bool outside = false;
  for (auto& m : mats) {
    auto cp = charpoly(m);
    for (auto& [f, mult] : gf::poly_factor(*base, cp)) {
      int d = gf::poly_deg(f);
      if (d <= extension_bound)
        L = std::lcm(L, (long)d);
      else
        outside = true;
    }
  }
  auto big = std::make_shared<const Field>(base->p(), (int)L);
  sys.field = big;
  sys.outside_bound = outside;

  // lift matrices into the big field
  std::vector<FpMatrix> lifted;
  for (auto& m : mats) {
    FpMatrix lm(big, n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) lm.at(i, j) = big->from_int((long long)m.at(i, j)[0]);
    lifted.push_back(std::move(lm));
  }

  const Field& F = *big;
  struct Piece {
    std::vector<std::vector<Field::Elem>> basis;  // columns, ambient coords
    std::vector<Field::Elem> values;
  };
  std::vector<Piece> pieces(1);
  for (int i = 0; i < n; ++i) {
    std::vector<Field::Elem> e(n, F.zero());
    e[i] = F.one();
    pieces[0].basis.push_back(std::move(e));
  }

  for (auto& a : lifted) {
    std::vector<Piece> next;
    for (auto& pc : pieces) {
      int s = (int)pc.basis.size();
      FpMatrix r = restrict_to(a, pc.basis);
      auto cp = charpoly(r);
      for (auto& [fac, mult] : gf::poly_factor(F, cp)) {
        if (gf::poly_deg(fac) != 1) {
          sys.outside_bound = true;  // eigenvalue not in F_{p^L}
          continue;
        }
        auto lambda = F.neg(fac[0]);
        // generalized eigenspace: kernel of (r - lambda I)^s in subspace coords
        FpMatrix m = r;
        for (int i = 0; i < s; ++i) m.at(i, i) = F.sub(m.at(i, i), lambda);
        FpMatrix pw = FpMatrix::identity(big, s);
        for (int t = 0; t < s; ++t) pw = pw.multiplied_by(m);
        auto ker = fp_kernel(pw);
        if (ker.empty()) continue;
        Piece np;
        np.values = pc.values;
        np.values.push_back(lambda);
        for (auto& kv : ker) {
          std::vector<Field::Elem> amb(n, F.zero());
          for (int j = 0; j < s; ++j)
            for (int i = 0; i < n; ++i) amb[i] = F.add(amb[i], F.mul(kv[j], pc.basis[j][i]));
          np.basis.push_back(std::move(amb));
        }
        next.push_back(std::move(np));
      }
    }
    pieces = std::move(next);
  }

  // collect packages and merge Frobenius orbits
  std::vector<RawPackage> raw;
  for (auto& pc : pieces) raw.push_back({pc.values, (long)pc.basis.size()});
  auto frob_tuple = [&](std::vector<Field::Elem> v) {
    for (auto& x : v) x = F.frobenius(x);
    return v;
  };
  std::vector<char> used(raw.size(), 0);
  for (size_t i = 0; i < raw.size(); ++i) {
    if (used[i]) continue;
    auto probe = frob_tuple(raw[i].values);
    while (!(probe == raw[i].values)) {
      for (size_t j = 0; j < raw.size(); ++j)
        if (j != i && !used[j] && raw[j].values == probe) {
          used[j] = 1;
          raw[i].multiplicity += raw[j].multiplicity;
          if (probe < raw[i].values) raw[i].values = probe;  // canonical representative
        }
      probe = frob_tuple(probe);
    }
  }
  for (size_t i = 0; i < raw.size(); ++i)
    if (!used[i]) sys.packages.push_back(std::move(raw[i]));
  std::sort(sys.packages.begin(), sys.packages.end(),
            [](const RawPackage& a, const RawPackage& b) { return a.values < b.values; });
  return sys;
}

// ---------------- sparse prime-field solver ----------------

namespace {
u64 mulp(u64 a, u64 b, u64 p) { return (u64)((unsigned __int128)a * b % p); }
u64 powp(u64 a, u64 n, u64 p) {
  u64 r = 1 % p;
  while (n) {
    if (n & 1) r = mulp(r, a, p);
    a = mulp(a, a, p);
    n >>= 1;
  }
  return r;
}
u64 invp(u64 a, u64 p) { return powp(a % p, p - 2, p); }
}  // namespace

FpSolver::FpSolver(u64 p, int nrows, int tail_start)
    : p_(p), nrows_(nrows), tail_start_(tail_start) {}

bool FpSolver::reduce(SparseVec& x, std::map<int, u64>& tail) const {
  while (!x.empty()) {
    int piv = x.begin()->first;
    auto it = by_pivot_.find(piv);
    if (it == by_pivot_.end()) return false;  // cannot reduce further
    const BasisVec& bv = basis_[it->second];
    u64 c = x.begin()->second;
    for (auto& [k, v] : bv.v) {
      u64& slot = x[k];
      slot = (slot + p_ - mulp(c, v, p_)) % p_;
      if (slot == 0) x.erase(k);
    }
    for (auto& [k, v] : bv.tail) {
      u64& slot = tail[k];
      slot = (slot + mulp(c, v, p_)) % p_;
      if (slot == 0) tail.erase(k);
    }
  }
  return true;
}

bool FpSolver::add_column(const SparseVec& col) {
  int idx = ncols_++;
  SparseVec x;
  for (auto& [k, v] : col)
    if (v % p_) x[k] = v % p_;
  std::map<int, u64> tail;
  if (idx >= tail_start_) {
    tail[ntail_] = 1;
    ++ntail_;
  }
  // reduce against the basis as far as possible
  while (!x.empty()) {
    int piv = x.begin()->first;
    auto it = by_pivot_.find(piv);
    if (it == by_pivot_.end()) break;
    const BasisVec& bv = basis_[it->second];
    u64 c = x.begin()->second;
    for (auto& [k, v] : bv.v) {
      u64& slot = x[k];
      slot = (slot + p_ - mulp(c, v, p_)) % p_;
      if (slot == 0) x.erase(k);
    }
    for (auto& [k, v] : bv.tail) {
      u64& slot = tail[k];
      slot = (slot + p_ - mulp(c, v, p_)) % p_;
      if (slot == 0) tail.erase(k);
    }
  }
  if (x.empty()) return false;
  // normalize pivot to 1 and insert
  BasisVec bv;
  bv.pivot = x.begin()->first;
  u64 inv = invp(x.begin()->second, p_);
  for (auto& [k, v] : x) bv.v[k] = mulp(v, inv, p_);
  for (auto& [k, v] : tail) bv.tail[k] = mulp(v, inv, p_);
  by_pivot_[bv.pivot] = (int)basis_.size();
  basis_.push_back(std::move(bv));
  return true;
}

std::optional<std::vector<u64>> FpSolver::express(const SparseVec& x0) const {
  SparseVec x;
  for (auto& [k, v] : x0)
    if (v % p_) x[k] = v % p_;
  std::map<int, u64> tail;
  if (!reduce(x, tail)) return std::nullopt;
  std::vector<u64> out(ntail_, 0);
  for (auto& [k, v] : tail) out[k] = v;
  return out;
}

}  // namespace shtor::linalg
