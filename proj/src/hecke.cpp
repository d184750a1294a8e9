#include "hida/hecke.hpp"

#include <deque>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <tuple>

#include "hida/parallel.hpp"

namespace hida {

// ---- operators ----

std::string HeckeOp::name() const { return std::string(1, kind) + std::to_string(ell); }

HeckeOp HeckeOp::parse(const std::string& s) {
  if (s.size() < 2 || (s[0] != 'T' && s[0] != 'U'))
    fail(ErrorKind::Validation, "operator must look like T2 or U5: " + s);
  HeckeOp op;
  op.kind = s[0];
  try {
    op.ell = std::stoull(s.substr(1));
  } catch (...) {
    fail(ErrorKind::Validation, "bad operator index: " + s);
  }
  if (!is_prime(op.ell)) fail(ErrorKind::Validation, "operator index must be prime: " + s);
  return op;
}

HeckeOp hecke_at(const ManinData& md, u64 ell) {
  return {md.level() % ell == 0 ? 'U' : 'T', ell};
}

std::vector<Mat2> hecke_cosets(const ManinData& md, const HeckeOp& op) {
  const u64 l = op.ell;
  if (!is_prime(l)) fail(ErrorKind::Validation, "Hecke index must be prime");
  bool divides = md.level() % l == 0;
  if (op.kind == 'T' && divides) fail(ErrorKind::Validation, "T_l needs l prime to the level");
  if (op.kind == 'U' && !divides) fail(ErrorKind::Validation, "U_l needs l dividing the level");
  std::vector<Mat2> H;
  for (u64 a = 0; a < l; ++a) H.push_back({1, (i64)a, 0, (i64)l});
  if (op.kind == 'T') H.push_back({(i64)l, 0, 0, 1});
  return H;
}

namespace {
struct OpKey {
  const ManinData* md;
  u64 p;
  int M, L, m;
  char kind;
  u64 ell;
  bool operator<(const OpKey& o) const {
    return std::tie(md, p, M, L, m, kind, ell) <
           std::tie(o.md, o.p, o.M, o.L, o.m, o.kind, o.ell);
  }
};
std::mutex op_mu;
std::map<OpKey, std::shared_ptr<const SymbolOperator>>& op_cache() {
  static std::map<OpKey, std::shared_ptr<const SymbolOperator>> c;
  return c;
}

std::shared_ptr<const SymbolOperator> hecke_operator(const FamilySymbol& phi, const HeckeOp& op) {
  OpKey key{phi.manin.get(), phi.profile.p, phi.profile.M, phi.profile.L, phi.m, op.kind, op.ell};
  {
    std::lock_guard<std::mutex> lock(op_mu);
    auto it = op_cache().find(key);
    if (it != op_cache().end()) return it->second;
  }
  auto made = std::make_shared<const SymbolOperator>(phi.manin, phi.profile, phi.m,
                                                     hecke_cosets(*phi.manin, op));
  std::lock_guard<std::mutex> lock(op_mu);
  if (op_cache().size() > 48) op_cache().clear();
  op_cache().emplace(key, made);
  return made;
}
}  // namespace

FamilySymbol apply_hecke(const FamilySymbol& phi, const HeckeOp& op) {
  return hecke_operator(phi, op)->apply(phi);
}

FamilySymbol apply_Up(const FamilySymbol& phi) {
  return apply_hecke(phi, HeckeOp{'U', phi.profile.p});
}

TotalMeasureVector total_measures(const FamilySymbol& phi) {
  TotalMeasureVector v;
  for (auto& d : phi.values) v.push_back(d.moment_series(0));
  return v;
}

// ---- linear algebra over Z/p^M ----

namespace {
struct ZpmSystem {
  u64 p;
  int M;
  u64 mod;
  std::vector<std::vector<u64>> A;
  std::vector<u64> b;
};

// Returns false when inconsistent; fills x and the largest pivot valuation.
bool eliminate(ZpmSystem& S, std::vector<u64>& x, int& maxv, int& bad_row_val) {
  const int R = (int)S.A.size();
  const int C = R ? (int)S.A[0].size() : 0;
  const u64 p = S.p, mod = S.mod;
  std::vector<char> used(C, 0);
  std::vector<std::pair<int, int>> piv;  // (col, valuation)
  maxv = 0;
  int k = 0;
  for (; k < R; ++k) {
    int br = -1, bc = -1, bv = S.M;
    for (int r = k; r < R && bv > 0; ++r)
      for (int c = 0; c < C; ++c) {
        u64 e = S.A[r][c];
        if (!e || used[c]) continue;
        int v = vp_int((i64)e, p);
        if (v < bv) {
          bv = v;
          br = r;
          bc = c;
          if (v == 0) break;
        }
      }
    if (br < 0) break;
    std::swap(S.A[k], S.A[br]);
    std::swap(S.b[k], S.b[br]);
    used[bc] = 1;
    piv.push_back({bc, bv});
    maxv = std::max(maxv, bv);
    u64 pv = PadicContext::get(p).pow(bv);
    u64 uinv = invmod((S.A[k][bc] / pv) % mod, mod);
    for (int r = k + 1; r < R; ++r) {
      u64 e = S.A[r][bc];
      if (!e) continue;
      u64 f = mulmod(e / pv, uinv, mod);
      for (int c = 0; c < C; ++c)
        if (S.A[k][c]) S.A[r][c] = submod(S.A[r][c], mulmod(f, S.A[k][c], mod), mod);
      S.b[r] = submod(S.b[r], mulmod(f, S.b[k], mod), mod);
    }
  }
  for (int r = k; r < R; ++r)
    if (S.b[r]) {
      bad_row_val = vp_int((i64)S.b[r], p);
      return false;
    }
  x.assign(C, 0);
  for (int i = k - 1; i >= 0; --i) {
    auto [c, v] = piv[i];
    u64 s = S.b[i];
    for (int cc = 0; cc < C; ++cc)
      if (cc != c && S.A[i][cc] && x[cc]) s = submod(s, mulmod(S.A[i][cc], x[cc], mod), mod);
    u64 pv = PadicContext::get(p).pow(v);
    if (s % pv) {
      bad_row_val = vp_int((i64)s, p);
      return false;
    }
    u64 uinv = invmod((S.A[i][c] / pv) % mod, mod);
    x[c] = mulmod(s / pv, uinv, mod);
  }
  return true;
}

bool solve_truncated(const std::vector<TotalMeasureVector>& vs, const TotalMeasureVector& u, int L,
                     LinearSolution& out, int& bad_val) {
  const int d = (int)vs.size(), t = (int)u.size();
  const u64 p = u[0].prime();
  const int M = u[0].M();
  ZpmSystem S{p, M, PadicContext::get(p).pow(M), {}, {}};
  S.A.assign((std::size_t)t * L, std::vector<u64>((std::size_t)d * L, 0));
  S.b.assign((std::size_t)t * L, 0);
  for (int i = 0; i < t; ++i)
    for (int n = 0; n < L; ++n) {
      S.b[i * L + n] = u[i][n] % S.mod;
      for (int k = 0; k < d; ++k)
        for (int n2 = 0; n2 <= n; ++n2) S.A[i * L + n][k * L + n2] = vs[k][i][n - n2] % S.mod;
    }
  std::vector<u64> x;
  int maxv = 0;
  if (!eliminate(S, x, maxv, bad_val)) return false;
  out.coeffs.clear();
  for (int k = 0; k < d; ++k) {
    TruncSeries c(p, M, u[0].L());
    for (int n = 0; n < L; ++n) c[n] = x[k * L + n];
    out.coeffs.push_back(c);
  }
  out.certified = M - maxv;
  return true;
}
}  // namespace

LinearSolution solve_linear(const std::vector<TotalMeasureVector>& vs, const TotalMeasureVector& u) {
  if (u.empty()) fail(ErrorKind::Validation, "empty target vector");
  for (auto& v : vs)
    if (v.size() != u.size()) fail(ErrorKind::Validation, "vector length mismatch");
  LinearSolution out;
  if (vs.empty()) {
    for (auto& x : u)
      if (!x.is_zero()) fail(ErrorKind::Numerical, "no solution at w-degree 0: no vectors given");
    out.certified = u[0].M();
    return out;
  }
  const int L = u[0].L();
  int bad = 0;
  if (solve_truncated(vs, u, L, out, bad)) return out;
  for (int l = 1; l <= L; ++l) {
    LinearSolution tmp;
    int bv = 0;
    if (!solve_truncated(vs, u, l, tmp, bv))
      fail(ErrorKind::Numerical, "no solution at w-degree " + std::to_string(l - 1) +
                                     ", residual valuation " + std::to_string(bv));
  }
  fail(ErrorKind::Numerical, "no solution, residual valuation " + std::to_string(bad));
}

int fp_rank(std::vector<std::vector<u64>> rows, u64 p) {
  int rank = 0;
  if (rows.empty()) return 0;
  const int C = (int)rows[0].size();
  for (auto& r : rows)
    for (auto& x : r) x %= p;
  for (int c = 0; c < C && rank < (int)rows.size(); ++c) {
    int piv = -1;
    for (int r = rank; r < (int)rows.size(); ++r)
      if (rows[r][c]) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[rank], rows[piv]);
    u64 inv = invmod(rows[rank][c], p);
    for (int r = rank + 1; r < (int)rows.size(); ++r) {
      u64 f = rows[r][c] * inv % p;
      if (!f) continue;
      for (int cc = c; cc < C; ++cc) rows[r][cc] = (rows[r][cc] + p * p - f * rows[rank][cc]) % p;
    }
    ++rank;
  }
  return rank;
}

int reduction_rank(const std::vector<TotalMeasureVector>& vs) {
  if (vs.empty()) return 0;
  u64 p = vs[0][0].prime();
  std::vector<std::vector<u64>> rows;
  for (auto& v : vs) {
    std::vector<u64> r;
    for (auto& s : v) r.push_back(s[0] % p);
    rows.push_back(r);
  }
  return fp_rank(rows, p);
}

// ---- Krylov projection ----

namespace {
FamilySymbol combine(const std::vector<TruncSeries>& c, const std::deque<FamilySymbol>& win,
                     int from) {
  FamilySymbol acc = win[from].scaled(0);
  for (std::size_t i = 0; i < c.size(); ++i) acc = acc + win[from + 1 + i].times(c[i]);
  return acc;
}
}  // namespace

KrylovResult krylov_project(const FamilySymbol& phi, const SymbolMap& op, int d, int max_iters) {
  d = std::max(d, 1);
  std::deque<FamilySymbol> win;
  win.push_back(phi);
  int last_rank = 0;
  for (int n = 0; n <= max_iters; ++n) {
    while ((int)win.size() < d + 1) win.push_back(op(win.back()));
    const FamilySymbol& cur = win[0];
    if (cur.is_zero()) return {cur, n, {}};
    std::vector<TotalMeasureVector> vs;
    for (int i = 1; i <= d; ++i) vs.push_back(total_measures(win[i]));
    last_rank = reduction_rank(vs);
    try {
      LinearSolution sol = solve_linear(vs, total_measures(cur));
      if (combine(sol.coeffs, win, 0) == cur) return {cur, n, sol.coeffs};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Numerical) throw;
    }
    win.pop_front();
  }
  fail(ErrorKind::Numerical, "Krylov projection did not stabilize within " +
                                 std::to_string(max_iters) + " iterations (reduced Krylov rank " +
                                 std::to_string(last_rank) + " of " + std::to_string(d) + ")");
}

KrylovResult ordinary_project(const FamilySymbol& phi, int rank_hint, int max_iters) {
  if (max_iters < 0) max_iters = 2 * (phi.profile.M + std::max(rank_hint, 1));
  return krylov_project(phi, [](const FamilySymbol& s) { return apply_Up(s); }, rank_hint,
                        max_iters);
}

// ---- localization ----

MaximalIdealSpec parse_killers(const std::string& s) {
  MaximalIdealSpec spec;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    auto colon = item.find(':');
    if (colon == std::string::npos) fail(ErrorKind::Validation, "killer must look like U5:-1,0,1");
    Killer k;
    k.op = HeckeOp::parse(item.substr(0, colon));
    std::stringstream cs(item.substr(colon + 1));
    std::string c;
    while (std::getline(cs, c, ',')) {
      try {
        k.poly.push_back(std::stoll(c));
      } catch (...) {
        fail(ErrorKind::Validation, "bad killer coefficient: " + c);
      }
    }
    if (k.poly.size() < 2 || k.poly.back() != 1)
      fail(ErrorKind::Validation, "killer polynomial must be monic of degree >= 1");
    spec.push_back(k);
  }
  return spec;
}

std::string killers_str(const MaximalIdealSpec& spec) {
  std::string s;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (i) s += ";";
    s += spec[i].op.name() + ":";
    for (std::size_t j = 0; j < spec[i].poly.size(); ++j) {
      if (j) s += ",";
      s += std::to_string(spec[i].poly[j]);
    }
  }
  return s;
}

FamilySymbol apply_killers(const FamilySymbol& phi, const MaximalIdealSpec& spec) {
  const u64 mod = PadicContext::get(phi.profile.p).pow(phi.profile.M);
  FamilySymbol cur = phi;
  for (const Killer& k : spec) {
    int n = (int)k.poly.size() - 1;
    FamilySymbol acc = cur.scaled(reduce_signed(k.poly[n], mod));
    for (int i = n - 1; i >= 0; --i)
      acc = apply_hecke(acc, k.op) + cur.scaled(reduce_signed(k.poly[i], mod));
    cur = acc;
  }
  return cur;
}

KrylovResult localize(const FamilySymbol& phi, const MaximalIdealSpec& spec, int rank_hint,
                      int max_iters) {
  if (spec.empty()) return {phi, 0, {}};
  if (max_iters < 0) max_iters = 2 * (phi.profile.M + std::max(rank_hint, 1));
  auto res = krylov_project(
      phi, [&](const FamilySymbol& s) { return apply_killers(s, spec); }, rank_hint, max_iters);
  if (res.phi.is_zero())
    fail(ErrorKind::Numerical, "localization collapsed the symbol to zero; check the killer spec");
  return res;
}

// ---- classical symbols over F_p ----

namespace {
using FpMat = std::vector<std::vector<u64>>;

FpMat fp_mul(const FpMat& A, const FpMat& B, u64 p) {
  int n = (int)A.size(), k = (int)B.size(), m = k ? (int)B[0].size() : 0;
  FpMat C(n, std::vector<u64>(m, 0));
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < k; ++l) {
      u64 a = A[i][l];
      if (!a) continue;
      for (int j = 0; j < m; ++j) C[i][j] = (C[i][j] + a * B[l][j]) % p;
    }
  return C;
}

// (mu|g)(z^j) = mu((a+cz)^{k-j} (b+dz)^j) mod p
FpMat sym_matrix(const Mat2& g, int k, u64 p) {
  u64 a = reduce_signed(g.a, p), b = reduce_signed(g.b, p), c = reduce_signed(g.c, p),
      d = reduce_signed(g.d, p);
  auto polymul = [&](const std::vector<u64>& x, u64 u, u64 v) {
    std::vector<u64> r(x.size() + 1, 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      r[i] = (r[i] + x[i] * u) % p;
      r[i + 1] = (r[i + 1] + x[i] * v) % p;
    }
    return r;
  };
  FpMat S(k + 1, std::vector<u64>(k + 1, 0));
  for (int j = 0; j <= k; ++j) {
    std::vector<u64> poly{1};
    for (int i = 0; i < k - j; ++i) poly = polymul(poly, a, c);
    for (int i = 0; i < j; ++i) poly = polymul(poly, b, d);
    for (int i = 0; i <= k; ++i) S[j][i] = poly[i];
  }
  return S;
}

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(FpMat& A, u64 p) {
  std::vector<int> piv;
  if (A.empty()) return piv;
  const int R = (int)A.size(), C = (int)A[0].size();
  int r = 0;
  for (int c = 0; c < C && r < R; ++c) {
    int pr = -1;
    for (int i = r; i < R; ++i)
      if (A[i][c] % p) {
        pr = i;
        break;
      }
    if (pr < 0) continue;
    std::swap(A[r], A[pr]);
    u64 inv = invmod(A[r][c] % p, p);
    for (auto& x : A[r]) x = x * inv % p;
    for (int i = 0; i < R; ++i) {
      if (i == r) continue;
      u64 f = A[i][c] % p;
      if (!f) continue;
      for (int j = c; j < C; ++j)
        if (A[r][j]) A[i][j] = (A[i][j] + (p - f) * A[r][j]) % p;
    }
    piv.push_back(c);
    ++r;
  }
  A.resize(r);
  return piv;
}

// Basis of the column space of A (as columns).
FpMat column_basis(const FpMat& A, u64 p) {
  if (A.empty()) return {};
  FpMat T(A[0].size(), std::vector<u64>(A.size()));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < A[0].size(); ++j) T[j][i] = A[i][j];
  rref(T, p);  // rows of T now span the column space
  return T;    // each row is a basis vector
}
}  // namespace

ClassicalSpace::ClassicalSpace(std::shared_ptr<const ManinData> md, int k)
    : md_(std::move(md)), k_(k), p_(md_->prime()) {
  if (k < 0) fail(ErrorKind::Validation, "weight must be non-negative");
  const int n = md_->index(), K1 = k + 1;
  const u64 p = p_;
  const Mat2 sigma{0, -1, 1, 0}, tau{0, -1, 1, -1}, tau2{-1, 1, -1, 0};
  // one block of unknowns per sigma-orbit; E_c = P_c X_block(c)
  std::vector<int> block(n, -1), block_edge;
  std::vector<FpMat> P(n);
  FpMat I(K1, std::vector<u64>(K1, 0));
  for (int i = 0; i < K1; ++i) I[i][i] = 1;
  auto pulled = [&](int target, const Mat2& g) {
    return sym_matrix(md_->rep(target) * g.inverse(), k, p);
  };
  for (int c = 0; c < n; ++c) {
    if (block[c] >= 0) continue;
    int s = md_->sigma(c);
    block[c] = (int)block_edge.size();
    block_edge.push_back(c);
    P[c] = I;
    if (s != c) {
      // E_s + E_c|(g_c (g_s sigma)^{-1}) = 0
      FpMat S = pulled(c, md_->rep(s) * sigma);
      for (auto& row : S)
        for (auto& x : row) x = (p - x) % p;
      block[s] = block[c];
      P[s] = S;
    }
  }
  const int nv = (int)block_edge.size() * K1;
  FpMat eq;
  auto add_term = [&](FpMat& rows, int edge, const FpMat& S) {
    // rows (K1 x nv) += S * P_edge on block(edge)
    FpMat SP = fp_mul(S, P[edge], p);
    int off = block[edge] * K1;
    for (int j = 0; j < K1; ++j)
      for (int i = 0; i < K1; ++i) rows[j][off + i] = (rows[j][off + i] + SP[j][i]) % p;
  };
  std::vector<char> seen(n, 0);
  for (int c = 0; c < n; ++c) {
    int s = md_->sigma(c);
    if (s == c) {
      FpMat rows(K1, std::vector<u64>(nv, 0));
      add_term(rows, c, I);
      add_term(rows, s, pulled(s, md_->rep(c) * sigma));
      for (auto& r : rows) eq.push_back(r);
    }
    if (seen[c]) continue;
    int t1 = md_->tau(c), t2 = md_->tau(t1);
    seen[c] = seen[t1] = seen[t2] = 1;
    FpMat rows(K1, std::vector<u64>(nv, 0));
    add_term(rows, c, I);
    add_term(rows, t1, pulled(t1, md_->rep(c) * tau));
    add_term(rows, t2, pulled(t2, md_->rep(c) * tau2));
    for (auto& r : rows) eq.push_back(r);
  }
  // sigma relations on paired blocks must also hold in the other direction
  for (int c = 0; c < n; ++c) {
    int s = md_->sigma(c);
    if (s == c || block_edge[block[c]] != c) continue;
    FpMat rows(K1, std::vector<u64>(nv, 0));
    add_term(rows, c, I);
    add_term(rows, s, pulled(s, md_->rep(c) * sigma));
    for (auto& r : rows) eq.push_back(r);
  }
  std::vector<int> piv = rref(eq, p);
  std::vector<char> is_piv(nv, 0);
  for (int c : piv) is_piv[c] = 1;
  for (int f = 0; f < nv; ++f) {
    if (is_piv[f]) continue;
    std::vector<u64> x(nv, 0);
    x[f] = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = (p - eq[r][f] % p) % p;
    free_cols_.push_back(f);
    // expand to all (coset, moment) coordinates
    std::vector<u64> full((std::size_t)n * K1, 0);
    for (int c = 0; c < n; ++c) {
      int off = block[c] * K1;
      for (int j = 0; j < K1; ++j) {
        u64 acc = 0;
        for (int i = 0; i < K1; ++i) acc = (acc + P[c][j][i] * x[off + i]) % p;
        full[(std::size_t)c * K1 + j] = acc;
      }
    }
    basis_.push_back(full);
  }
  // free column f sits at block f / K1, moment f % K1; remember the edge
  for (int& f : free_cols_) f = block_edge[f / K1] * K1 + f % K1;
}

std::vector<std::vector<u64>> ClassicalSpace::op_matrix(const std::vector<Mat2>& H) const {
  const int K1 = k_ + 1, d = dim();
  const u64 p = p_;
  std::map<int, std::vector<std::pair<int, FpMat>>> terms;  // edge -> (edge, signed matrix)
  for (int f : free_cols_) {
    int c = f / K1;
    if (terms.count(c)) continue;
    const Mat2& g = md_->rep(c);
    Cusp a = Cusp::make(g.a, g.c), b = Cusp::make(g.b, g.d);
    std::vector<std::pair<int, FpMat>> list;
    for (const Mat2& h : H)
      for (const SymTerm& t : md_->decompose(a, b, h)) {
        FpMat S = sym_matrix(t.beta, k_, p);
        if (t.sign < 0)
          for (auto& row : S)
            for (auto& x : row) x = (p - x) % p;
        list.emplace_back(t.edge, S);
      }
    terms[c] = list;
  }
  FpMat out(d, std::vector<u64>(d, 0));
  for (int i = 0; i < d; ++i) {
    const auto& v = basis_[i];
    for (int r = 0; r < d; ++r) {
      int f = free_cols_[r];
      int c = f / K1, j = f % K1;
      u64 acc = 0;
      for (auto& [e, S] : terms[c])
        for (int l = 0; l <= k_; ++l) acc = (acc + S[j][l] * v[(std::size_t)e * K1 + l]) % p;
      out[r][i] = acc;
    }
  }
  return out;
}

std::vector<std::vector<u64>> ClassicalSpace::sign_basis(int sign) const {
  const int d = dim();
  const u64 p = p_;
  FpMat Pm(d, std::vector<u64>(d, 0));
  for (int i = 0; i < d; ++i) Pm[i][i] = 1;
  if (sign != 0) {
    FpMat iota = op_matrix({Mat2{1, 0, 0, -1}});
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        Pm[i][j] = (Pm[i][j] + (sign > 0 ? iota[i][j] : (p - iota[i][j]) % p)) % p;
  }
  return Pm;
}

std::vector<std::vector<u64>> ClassicalSpace::ordinary_basis(int sign) const {
  const int d = dim();
  if (d == 0) return {};
  const u64 p = p_;
  FpMat U = op_matrix(hecke_cosets(*md_, HeckeOp{'U', p}));
  FpMat Pw = sign_basis(sign);
  // U^e with e >= d
  FpMat acc = Pw, base = U;
  for (int e = d; e > 0; e >>= 1) {
    if (e & 1) acc = fp_mul(base, acc, p);
    base = fp_mul(base, base, p);
  }
  return column_basis(acc, p);
}

int ClassicalSpace::ordinary_rank(int sign) const { return (int)ordinary_basis(sign).size(); }

std::vector<u64> ClassicalSpace::ordinary_charpoly(const HeckeOp& op, int sign) const {
  auto Y = ordinary_op(op, sign);
  if (Y.empty()) return {1};
  return fp_charpoly(Y, p_);
}

int ClassicalSpace::localized_rank(const MaximalIdealSpec& spec, int sign) const {
  const u64 p = p_;
  const int r = ordinary_rank(sign);
  if (r == 0 || spec.empty()) return r;
  auto mul = [&](const FpMat& A, const FpMat& B) {
    FpMat C(r, std::vector<u64>(r, 0));
    for (int i = 0; i < r; ++i)
      for (int k = 0; k < r; ++k)
        if (A[i][k])
          for (int j = 0; j < r; ++j) C[i][j] = (C[i][j] + A[i][k] * B[k][j]) % p;
    return C;
  };
  FpMat I(r, std::vector<u64>(r, 0));
  for (int i = 0; i < r; ++i) I[i][i] = 1;
  FpMat Q = I;
  for (auto& k : spec) {
    FpMat Y = ordinary_op(k.op, sign);
    // Horner: P(Y) with P monic, lowest coefficient first
    FpMat P(r, std::vector<u64>(r, 0));
    for (int d = (int)k.poly.size() - 1; d >= 0; --d) {
      P = mul(P, Y);
      u64 c = reduce_signed(k.poly[d], p);
      for (int i = 0; i < r; ++i) P[i][i] = (P[i][i] + c) % p;
    }
    Q = mul(Q, P);
  }
  // the stable image of Q is the part where every killer is invertible
  FpMat Qn = I;
  for (int i = 0; i < r; ++i) Qn = mul(Qn, Q);
  return fp_rank(Qn, p);
}

std::vector<std::vector<u64>> ClassicalSpace::ordinary_op(const HeckeOp& op, int sign) const {
  const u64 p = p_;
  FpMat B = ordinary_basis(sign);  // rows are basis vectors
  const int r = (int)B.size();
  if (r == 0) return {};
  FpMat T = op_matrix(hecke_cosets(*md_, op));
  const int d = dim();
  // Y with T b_i = sum_j Y[j][i] b_j; B is in reduced echelon form
  std::vector<int> lead(r);
  for (int i = 0; i < r; ++i)
    for (int c = 0; c < d; ++c)
      if (B[i][c]) {
        lead[i] = c;
        break;
      }
  FpMat Y(r, std::vector<u64>(r, 0));
  for (int i = 0; i < r; ++i) {
    std::vector<u64> tb(d, 0);
    for (int a = 0; a < d; ++a)
      for (int c = 0; c < d; ++c) tb[a] = (tb[a] + T[a][c] * B[i][c]) % p;
    for (int j = 0; j < r; ++j) Y[j][i] = tb[lead[j]];
    // check membership
    for (int c = 0; c < d; ++c) {
      u64 s = 0;
      for (int j = 0; j < r; ++j) s = (s + Y[j][i] * B[j][c]) % p;
      if (s != tb[c]) fail(ErrorKind::Numerical, "ordinary subspace not stable under the operator");
    }
  }
  return Y;
}

int classical_ordinary_rank(u64 N, u64 p, int k, int sign) {
  return ClassicalSpace(solve_manin(N, p), k).ordinary_rank(sign);
}

// ---- characteristic polynomials ----

namespace {
// Berkowitz: returns det(xI - A), highest degree first.
template <class T, class Ops>
std::vector<T> berkowitz(const std::vector<std::vector<T>>& A, const Ops& ops) {
  const int n = (int)A.size();
  std::vector<T> q{ops.one()};
  for (int r = 0; r < n; ++r) {
    // B = A[0..r-1][0..r-1], C = column A[0..r-1][r], R = row A[r][0..r-1]
    std::vector<T> t(r + 2, ops.zero());
    t[0] = ops.one();
    t[1] = ops.neg(A[r][r]);
    std::vector<T> v(r);
    for (int i = 0; i < r; ++i) v[i] = A[i][r];
    for (int k = 2; k <= r + 1; ++k) {
      T s = ops.zero();
      for (int i = 0; i < r; ++i) s = ops.add(s, ops.mul(A[r][i], v[i]));
      t[k] = ops.neg(s);
      std::vector<T> nv(r, ops.zero());
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) nv[i] = ops.add(nv[i], ops.mul(A[i][j], v[j]));
      v = nv;
    }
    std::vector<T> nq(r + 2, ops.zero());
    for (int i = 0; i <= r + 1; ++i)
      for (int j = 0; j <= std::min(i, r); ++j) nq[i] = ops.add(nq[i], ops.mul(t[i - j], q[j]));
    q = nq;
  }
  return q;
}
}  // namespace

std::vector<TruncSeries> charpoly(const std::vector<std::vector<TruncSeries>>& A) {
  if (A.empty()) fail(ErrorKind::Validation, "charpoly of an empty matrix");
  const TruncSeries& z = A[0][0];
  struct Ops {
    TruncSeries zero_, one_;
    TruncSeries zero() const { return zero_; }
    TruncSeries one() const { return one_; }
    TruncSeries add(const TruncSeries& a, const TruncSeries& b) const { return a + b; }
    TruncSeries mul(const TruncSeries& a, const TruncSeries& b) const { return a * b; }
    TruncSeries neg(const TruncSeries& a) const { return -a; }
  } ops{TruncSeries(z.prime(), z.M(), z.L()), TruncSeries::constant(z.prime(), z.M(), z.L(), 1)};
  auto hi = berkowitz(A, ops);
  return std::vector<TruncSeries>(hi.rbegin(), hi.rend());
}

std::vector<u64> fp_charpoly(std::vector<std::vector<u64>> A, u64 p) {
  struct Ops {
    u64 p;
    u64 zero() const { return 0; }
    u64 one() const { return 1; }
    u64 add(u64 a, u64 b) const { return (a + b) % p; }
    u64 mul(u64 a, u64 b) const { return a * b % p; }
    u64 neg(u64 a) const { return (p - a % p) % p; }
  } ops{p};
  auto hi = berkowitz(A, ops);
  return std::vector<u64>(hi.rbegin(), hi.rend());
}

// ---- bases and matrices ----

std::vector<FamilySymbol> build_basis(std::shared_ptr<const ManinData> md,
                                      const PrecisionProfile& prof, int m,
                                      const BasisOptions& opt) {
  std::vector<FamilySymbol> basis;
  if (opt.target_rank <= 0) return basis;
  const u64 p = prof.p;
  const auto& C = PadicContext::get(p);
  int attempts = opt.max_attempts > 0 ? opt.max_attempts : 4 * opt.target_rank + 4;
  int margin = difference_scale(p, prof.M + 4) + 2;
  std::mt19937_64 seeds(opt.seed);
  std::vector<TotalMeasureVector> alphas;
  std::string last_issue = "none";
  for (int at = 0; at < attempts && (int)basis.size() < opt.target_rank; ++at) {
    u64 seed = seeds();
    PrecisionProfile Wp(p, prof.M + margin, prof.L);
    PrecisionProfile need = assemble_working_profile(*md, Wp, m);
    // the automorphy factors at the working profile need two more digits
    while (need.M + 2 > C.cap && margin > 0) {
      --margin;
      Wp = PrecisionProfile(p, prof.M + margin, prof.L);
      need = assemble_working_profile(*md, Wp, m);
    }
    if (need.M + 2 > C.cap)
      fail(ErrorKind::Validation, "requested precision needs more than 64-bit arithmetic");
    FamilySymbol phi = random_symbol(md, Wp, m, seed);
    if (opt.sign) phi = sign_project(phi, opt.sign);
    phi = ordinary_project(phi, opt.ordinary_rank > 0 ? opt.ordinary_rank : opt.target_rank,
                          opt.max_iters).phi;
    if (!opt.spec.empty()) phi = localize(phi, opt.spec, opt.target_rank, opt.max_iters).phi;
    if (phi.is_zero()) {
      last_issue = "projection vanished";
      continue;
    }
    int e = phi.common_p_power();
    if (Wp.M - e < prof.M) {
      last_issue = "lost " + std::to_string(e) + " digits to normalization";
      margin += e - (Wp.M - prof.M);
      continue;
    }
    phi = phi.div_p(e).reduced(prof);
    phi.m_scale = 0;
    phi.seed = seed;
    auto alpha = total_measures(phi);
    alphas.push_back(alpha);
    if (reduction_rank(alphas) == (int)alphas.size()) {
      basis.push_back(phi);
    } else {
      alphas.pop_back();
      last_issue = "dependent reduction";
    }
  }
  if ((int)basis.size() < opt.target_rank)
    fail(ErrorKind::Numerical, "build_basis found " + std::to_string(basis.size()) + " of " +
                                   std::to_string(opt.target_rank) +
                                   " independent ordinary symbols (last issue: " + last_issue +
                                   "); rank mismatch or precision loss");
  return basis;
}

HeckeMatrix hecke_matrix(const std::vector<FamilySymbol>& basis, const HeckeOp& op) {
  HeckeMatrix H;
  if (basis.empty()) return H;
  std::vector<TotalMeasureVector> vs;
  for (auto& b : basis) vs.push_back(total_measures(b));
  H.certified = basis[0].profile.M;
  for (auto& b : basis) {
    FamilySymbol tb = apply_hecke(b, op);
    LinearSolution sol = solve_linear(vs, total_measures(tb));
    FamilySymbol rec = b.scaled(0);
    for (std::size_t j = 0; j < basis.size(); ++j) rec = rec + basis[j].times(sol.coeffs[j]);
    if (sol.certified == b.profile.M && !(rec == tb))
      fail(ErrorKind::Numerical, "basis is not stable under " + op.name());
    H.certified = std::min(H.certified, sol.certified);
    H.a.push_back(sol.coeffs);
  }
  return H;
}

}  // namespace hida
