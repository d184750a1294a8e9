#include "hida/lfunc.hpp"
#include "hida/parallel.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace hida {

namespace {
PadicNum pint(u64 p, i64 x) { return PadicNum::from_int(p, x); }

int legendre(i64 n, u64 p) {
  int v = 0;
  for (i64 q = (i64)p; q <= n; q *= (i64)p) v += (int)(n / q);
  return v;
}

}  // namespace

// ---- eigenvalues ----

TruncSeries eigenvalue(const FamilySymbol& phi, const HeckeOp& op, int* certified) {
  auto a = total_measures(phi);
  if (reduction_rank({a}) != 1)
    fail(ErrorKind::Validation,
         "total-measure vector vanishes mod (p, w); normalize the symbol or check the rank");
  FamilySymbol t = apply_hecke(phi, op);
  LinearSolution sol;
  try {
    sol = solve_linear({a}, total_measures(t));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Numerical) throw;
    fail(ErrorKind::Numerical, "not an eigensymbol for " + op.name() + ": " + e.what());
  }
  if (sol.certified == phi.profile.M && !(phi.times(sol.coeffs[0]) == t))
    fail(ErrorKind::Numerical, "not an eigensymbol for " + op.name());
  if (certified) *certified = sol.certified;
  return sol.coeffs[0];
}

EigenPacket q_expansion(const FamilySymbol& phi, u64 prime_bound) {
  EigenPacket pk;
  pk.symbol = phi;
  pk.certified = phi.profile.M;
  for (u64 l = 2; l <= prime_bound; ++l) {
    if (!is_prime(l)) continue;
    int cert = 0;
    TruncSeries A = eigenvalue(phi, hecke_at(*phi.manin, l), &cert);
    pk.certified = std::min(pk.certified, cert);
    pk.eigenvalues[l] = A;
    pk.weight_expansions[l] = substitute_weight(A);
    pk.iwasawa[l] = A.iwasawa_extendable();
  }
  return pk;
}

TruncSeries weight_character(u64 ell, u64 p, int m, int M, int L) {
  const auto& C = PadicContext::get(p);
  PadicNum w = teichmuller(ell, p);
  PadicNum br = pint(p, (i64)ell) / w;  // <ell>
  PadicNum x = padic_log(br) / C.log_gamma();
  // (1+pw)^x = sum binom(x, n) p^n w^n
  TruncSeries r(p, M, L);
  PadicNum b = pint(p, 1);
  for (int n = 0; n < L; ++n) {
    if (n > 0) b = b * (x - pint(p, n - 1)) / pint(p, n);
    r[n] = b.shift(n).residue_trunc(M);
  }
  PadicNum lead = pint(p, (i64)ell) * w.pow(m);
  return r.scaled(lead.residue(M));
}

std::vector<TruncSeries> qexp_coefficients(const EigenPacket& pk, int nmax) {
  const FamilySymbol& phi = pk.symbol;
  const u64 p = phi.profile.p, level = phi.manin->level();
  const int M = phi.profile.M, L = phi.profile.L;
  std::vector<TruncSeries> a(nmax + 1, TruncSeries(p, M, L));
  std::vector<char> done(nmax + 1, 0);
  if (nmax >= 1) {
    a[1] = TruncSeries::constant(p, M, L, 1);
    done[1] = 1;
  }
  for (int l = 2; l <= nmax; ++l) {
    if (!is_prime((u64)l)) continue;
    auto it = pk.eigenvalues.find((u64)l);
    if (it == pk.eigenvalues.end())
      fail(ErrorKind::Validation, "missing eigenvalue at " + std::to_string(l));
    TruncSeries chi = level % l == 0 ? TruncSeries(p, M, L)
                                     : weight_character((u64)l, p, phi.m, M, L);
    i64 prev = 1, cur = l;
    a[l] = it->second;
    done[l] = 1;
    while (cur * l <= nmax) {
      i64 nxt = cur * l;
      a[nxt] = it->second * a[cur] - chi * a[prev];
      done[nxt] = 1;
      prev = cur;
      cur = nxt;
    }
  }
  for (int n = 2; n <= nmax; ++n) {
    if (done[n]) continue;
    // n = q * r with q a maximal prime power
    int m = n, l = 2;
    while (m % l) ++l;
    int q = 1;
    while (m % l == 0) {
      m /= l;
      q *= l;
    }
    a[n] = a[q] * a[m];
    done[n] = 1;
  }
  return a;
}

// ---- L-invariants ----

PadicNum l_invariant(const TruncSeries& a_k, i64 k0) {
  const u64 p = a_k.prime();
  const int M = a_k.M(), L = a_k.L();
  PadicNum K = pint(p, k0);
  PadicNum val = PadicNum::zero(p), der = PadicNum::zero(p);
  PadicNum kp = pint(p, 1);
  for (int n = 0; n < L; ++n) {
    PadicNum c = a_k.coeff(n);
    if (n >= 1) der = der + c * pint(p, n) * (n == 1 ? pint(p, 1) : K.pow(n - 1));
    val = val + c * kp;
    kp = kp * K;
  }
  // a(k) = A((1+p)^k - 1) with A in Z_p[[W]] gives v(a_n) >= n - v(n!)
  int tail = M;
  if (k0 != 0) {
    int vk = vp_int(k0, p);
    for (i64 n = L; n < L + 8 * (i64)p + 16; ++n)
      tail = std::min<i64>(tail, n - legendre(n, p) + (n - 1) * vk);
  }
  int prec = std::min(M, tail);
  val = val.with_abs_prec(prec);
  der = der.with_abs_prec(prec);
  if (val.is_zero() || val.valuation() != 0)
    fail(ErrorKind::Numerical, "a_p(k0) is not a p-adic unit");
  return (pint(p, -2) * der / val).with_abs_prec(prec);
}

QpSeries to_W(const TruncSeries& f) {
  QpSeries r;
  for (int n = 0; n < f.L() && n < f.M(); ++n) r.push_back(f.coeff(n).shift(-n));
  if (r.empty()) r.push_back(PadicNum::zero(f.prime(), 0));
  return r;
}

AdjointReport adjoint_l_invariant_family(const TruncSeries& A) {
  const u64 p = A.prime();
  const int M = A.M(), L = A.L();
  if (L < 2) fail(ErrorKind::Validation, "adjoint L-invariant needs at least two w-terms");
  const auto& C = PadicContext::get(p);
  const u64 mod = C.pow(M);
  AdjointReport rep;
  TruncSeries a = substitute_weight(A);
  rep.series_k =
      (a.derivative() * invert(a.reduced(M, L - 1))).scaled(reduce_signed(-2, mod));
  // d/dk = (log gamma / p)(1 + pw) d/dw
  TruncSeries onepw = TruncSeries::constant(p, M, L - 1, 1);
  if (L - 1 > 1) onepw[1] = p % mod;
  u64 lg = C.log_gamma().shift(-1).residue(M);
  TruncSeries lw = (A.derivative() * invert(A.reduced(M, L - 1)) * onepw)
                       .scaled(lg)
                       .scaled(reduce_signed(-2, mod));
  rep.series_W = to_W(lw);
  rep.wd = weierstrass_prep(rep.series_W);
  if (rep.wd.lambda == 1) {
    QpSeries g;
    for (auto& c : rep.series_W) g.push_back(c.shift(-rep.wd.mu));
    try {
      PadicNum r = newton_root(g, PadicNum::zero(p));
      rep.root_W = r;
      rep.root_k = padic_log(pint(p, 1) + r) / C.log_gamma();
    } catch (const Error&) {
    }
  }
  return rep;
}

// ---- two-variable L ----

std::vector<PadicNum> cjn_coefficients(int n, int j_max, u64 p, int prec) {
  const auto& C = PadicContext::get(p);
  PadicNum lg = C.log_gamma().with_abs_prec(std::min(prec + 1, C.cap));
  std::size_t N = (std::size_t)j_max + 1;
  QpSeries Ly(N, PadicNum::zero(p));
  for (std::size_t i = 1; i < N; ++i) {
    PadicNum t = pint(p, 1) / pint(p, (i64)i) / lg;
    Ly[i] = (i % 2) ? t : -t;
  }
  QpSeries prod(N, PadicNum::zero(p));
  prod[0] = pint(p, 1);
  for (int k = 0; k < n; ++k) {
    QpSeries f = Ly;
    f[0] = pint(p, -k);
    prod = qp_mul(prod, f, N);
  }
  PadicNum fact = pint(p, 1);
  for (int k = 2; k <= n; ++k) fact = fact * pint(p, k);
  return qp_scale(prod, fact.inverse());
}

TwoVarL two_var_L(const FamilySymbol& phi, const TruncSeries& alpha, int n_max, int j_max) {
  const PrecisionProfile& prof = phi.profile;
  const u64 p = prof.p;
  const int M = prof.M, L = prof.L;
  const auto& C = PadicContext::get(p);
  if (!alpha.is_unit()) fail(ErrorKind::Numerical, "U_p eigenvalue is not a unit");
  TruncSeries ainv = invert(alpha.reduced(M, L));
  int J = prof.J();
  if (j_max < 0 || j_max > J - 1) j_max = J - 1;

  // Jsum[j] = alpha^{-1} sum_a omega(a)^{-j} p^{-j} int_{a+pZ_p} (z - omega(a))^j
  std::vector<TruncSeries> Jsum(j_max + 1);
  for (int j = 0; j <= j_max; ++j) Jsum[j] = TruncSeries(p, prof.prec(j), L);
  int ds = 0;
  const u64 modM = C.pow(M);
  // binomials mod p^M
  std::vector<std::vector<u64>> binom(j_max + 1, std::vector<u64>(j_max + 1, 0));
  for (int j = 0; j <= j_max; ++j) {
    binom[j][0] = 1;
    for (int i = 1; i <= j; ++i) binom[j][i] = addmod(binom[j - 1][i - 1], i <= j - 1 ? binom[j - 1][i] : 0, modM);
  }
  // one slot per residue a, summed in order afterwards
  std::vector<std::vector<TruncSeries>> part(p - 1);
  std::vector<int> shift(p - 1, 0);
  parallel_for((int)p - 1, [&](int idx) {
    const u64 a = (u64)idx + 1;
    FamilyDistribution nu = eval_at_divisor(phi, Cusp::inf(), Cusp::make((i64)a, (i64)p));
    shift[idx] = nu.denom_shift;
    PadicNum om = teichmuller(a, p);
    u64 t = (pint(p, (i64)a) - om).shift(-1).residue(M);
    u64 oinv = om.inverse().residue(M);
    std::vector<u64> tp(j_max + 1, 1);
    for (int i = 1; i <= j_max; ++i) tp[i] = mulmod(tp[i - 1], t, modM);
    u64 ow = 1;
    auto& out = part[idx];
    for (int j = 0; j <= j_max; ++j) {
      TruncSeries g(p, prof.prec(j), L);
      for (int i = 0; i <= j; ++i)
        g = g + nu.moment_series(i).reduced(prof.prec(j), L).scaled(mulmod(binom[j][i], tp[j - i], modM));
      out.push_back(g.scaled(ow));
      ow = mulmod(ow, oinv, modM);
    }
  });
  for (u64 a = 1; a < p; ++a) {
    ds = std::max(ds, shift[a - 1]);
    for (int j = 0; j <= j_max; ++j) Jsum[j] = Jsum[j] + part[a - 1][j];
  }
  for (int j = 0; j <= j_max; ++j) Jsum[j] = Jsum[j] * ainv.reduced(prof.prec(j), L);

  TwoVarL out;
  out.p = p;
  for (int n = 0; n < n_max; ++n) {
    int e = n / (int)(p - 1) + ds;
    auto c = cjn_coefficients(n, j_max, p, M + 2 * n + 4);
    int P = C.cap;
    // tail beyond j_max: exact valuations for a stretch, then
    // v(c_j p^j) >= j - n - v(n!) - floor(j/p)
    const int stretch = 3 * (int)p + 4;
    auto cx = cjn_coefficients(n, j_max + stretch, p, M + 2 * n + 4);
    for (int j = j_max + 1; j <= j_max + stretch; ++j) {
      PadicNum u = cx[j].shift(j + e);
      P = std::min(P, u.is_zero() ? u.abs_prec() : u.valuation());
    }
    {
      int j = j_max + stretch + 1;
      P = std::min(P, j + e - n - legendre(n, p) - j / (int)p);
    }
    for (int j = 0; j <= j_max; ++j) {
      PadicNum u = c[j].shift(j + e);
      if (u.is_zero()) {
        P = std::min(P, u.abs_prec() + 0);
        continue;
      }
      if (u.valuation() < 0) fail(ErrorKind::Numerical, "c_j^(n) bound violated");
      P = std::min({P, u.abs_prec(), prof.prec(j) + u.valuation()});
    }
    if (P - e < 1) break;
    TruncSeries S(p, P, L);
    for (int j = 0; j <= j_max; ++j) {
      PadicNum u = c[j].shift(j + e);
      if (u.is_zero() || u.valuation() >= P) continue;
      int v = u.valuation();
      u64 unit = u.shift(-v).residue(P - v);
      TruncSeries term = Jsum[j].reduced(P - v, L).scaled(unit);
      TruncSeries lifted(p, P, L);
      u64 pv = C.pow(v);
      for (int i = 0; i < L; ++i) lifted[i] = term[i] * pv;
      S = S + lifted;
    }
    out.a.push_back(S.div_p(e));
    out.error_prec.push_back(P - e);
    out.j_used.push_back(j_max);
  }
  if (out.a.empty()) fail(ErrorKind::Numerical, "no two-variable coefficient survives the precision budget");

  // normalization: first nonzero coefficient becomes p^a w^b
  std::size_t n0 = 0;
  while (n0 < out.a.size() && out.a[n0].is_zero()) ++n0;
  if (n0 == out.a.size()) return out;
  const TruncSeries& f = out.a[n0];
  int mu = f.valuation();
  int b = 0;
  while (b < f.L() && (f[b] == 0 || vp_int((i64)f[b], p) > mu)) ++b;
  out.norm_p = mu;
  out.norm_w = b;
  for (int i = 0; i < b; ++i)
    if (f[i] != 0) out.norm_exact = false;
  TruncSeries g = f.div_p(mu);
  TruncSeries u(p, g.M(), g.L() - b);
  for (int i = 0; i + b < g.L(); ++i) u[i] = g[i + b];
  TruncSeries uinv = invert(u);
  for (std::size_t n = 0; n < out.a.size(); ++n) {
    out.a[n] = out.a[n] * uinv;
    out.error_prec[n] = std::min(out.error_prec[n], out.a[n].M());
  }
  return out;
}

KSSeries to_ks(const TwoVarL& F, int deg) {
  const u64 p = F.p;
  const auto& C = PadicContext::get(p);
  KSSeries out;
  out.p = p;
  out.deg = deg;
  out.c.assign(deg, std::vector<PadicNum>(deg, PadicNum::zero(p)));
  // T(s) = (1+p)^s - 1
  int hp = C.cap;
  QpSeries Ts(deg, PadicNum::zero(p));
  PadicNum term = pint(p, 1);
  for (int m = 1; m < deg; ++m) {
    term = term * C.log_gamma() / pint(p, m);
    Ts[m] = term.with_abs_prec(hp);
  }
  QpSeries Tn(deg, PadicNum::zero(p));
  Tn[0] = pint(p, 1);
  int nmax = std::min<int>((int)F.a.size(), deg);
  int min_prec = C.cap;
  for (int n = 0; n < nmax; ++n) {
    TruncSeries ak = substitute_weight(F.a[n]);
    min_prec = std::min(min_prec, F.error_prec[n] + n);
    for (int i = 0; i < deg && i < ak.L(); ++i) {
      PadicNum ci = PadicNum::from_residue(p, ak[i], F.error_prec[n]);
      for (int j = n; i + j < deg; ++j) out.c[i][j] = out.c[i][j] + ci * Tn[j];
    }
    Tn = qp_mul(Tn, Ts, deg);
  }
  // k-degree limited by the w-length; s-degree by the number of a_n
  for (int i = 0; i < deg; ++i)
    for (int j = 0; i + j < deg; ++j) {
      int cap = min_prec;
      if (nmax < deg) cap = std::min(cap, nmax);
      if (!F.a.empty() && i >= F.a[0].L()) cap = 0;
      out.c[i][j] = out.c[i][j].with_abs_prec(cap);
    }
  return out;
}

KSSeries divide_k_minus_2s(const KSSeries& F, KSSeries* residual) {
  const u64 p = F.p;
  const int deg = F.deg;
  KSSeries G;
  G.p = p;
  G.deg = deg - 1;
  G.c.assign(std::max(deg - 1, 0), std::vector<PadicNum>(std::max(deg - 1, 0), PadicNum::zero(p)));
  KSSeries R;
  R.p = p;
  R.deg = deg;
  R.c.assign(deg, std::vector<PadicNum>(deg, PadicNum::zero(p)));
  if (deg > 0) R.c[0][0] = F.c[0][0];
  PadicNum two = pint(p, 2);
  for (int d = 0; d + 1 < deg; ++d) {
    // F_{i, d+1-i} = G_{i-1, d+1-i} - 2 G_{i, d-i}
    G.c[d][0] = F.c[d + 1][0];
    for (int i = d; i >= 1; --i) G.c[i - 1][d + 1 - i] = F.c[i][d + 1 - i] + two * G.c[i][d - i];
    R.c[0][d + 1] = F.c[0][d + 1] + two * G.c[0][d];
  }
  if (residual) *residual = R;
  return G;
}

namespace {
// Bivariate helper: rows in T, each a QpSeries in w of length Lw.
using Biv = std::vector<QpSeries>;

QpSeries wmul(const QpSeries& a, const QpSeries& b, std::size_t Lw) { return qp_mul(a, b, Lw); }

QpSeries winv(const QpSeries& a, std::size_t Lw) {
  u64 p = a[0].prime();
  QpSeries r(Lw, PadicNum::zero(p));
  PadicNum i0 = a[0].inverse();
  r[0] = i0;
  for (std::size_t n = 1; n < Lw; ++n) {
    PadicNum s = PadicNum::zero(p);
    for (std::size_t k = 1; k <= n && k < a.size(); ++k) s = s + a[k] * r[n - k];
    r[n] = -(s * i0);
  }
  return r;
}

QpSeries restrict_to_line(const Biv& F, u64 p, int tdeg) {
  // w = (2T + T^2)/p
  QpSeries G(tdeg, PadicNum::zero(p));
  std::size_t Lw = F.empty() ? 0 : F[0].size();
  std::vector<QpSeries> pw;  // (2T+T^2)^m
  QpSeries base(tdeg, PadicNum::zero(p));
  if (tdeg > 1) base[1] = pint(p, 2);
  if (tdeg > 2) base[2] = pint(p, 1);
  QpSeries cur(tdeg, PadicNum::zero(p));
  cur[0] = pint(p, 1);
  for (std::size_t m = 0; m < Lw && (int)m < tdeg; ++m) {
    pw.push_back(cur);
    cur = qp_mul(cur, base, tdeg);
  }
  for (int n = 0; n < (int)F.size() && n < tdeg; ++n)
    for (std::size_t m = 0; m < pw.size(); ++m) {
      PadicNum b = F[n][m].shift(-(int)m);
      for (int r = n; r < tdeg; ++r) {
        if (r - n >= (int)pw[m].size()) break;
        G[r] = G[r] + b * pw[m][r - n];
      }
    }
  // terms with m >= tdeg only reach T-degree >= tdeg
  return G;
}
}  // namespace

GreenbergReport greenberg_line_check(const TwoVarL& F, int tdeg) {
  const u64 p = F.p;
  GreenbergReport rep;
  const int NT = (int)F.a.size();
  if (NT == 0) fail(ErrorKind::Numerical, "empty two-variable series");
  std::size_t Lw = (std::size_t)F.a[0].L();
  for (auto& a : F.a) Lw = std::min<std::size_t>(Lw, a.L());
  Biv A(NT);
  for (int n = 0; n < NT; ++n) {
    A[n].resize(Lw);
    for (std::size_t m = 0; m < Lw; ++m) A[n][m] = PadicNum::from_residue(p, F.a[n][m], F.error_prec[n]);
  }
  // tau = sqrt(1 + pw) - 1
  QpSeries tau(Lw, PadicNum::zero(p));
  PadicNum half = pint(p, 1) / pint(p, 2), b = pint(p, 1);
  for (std::size_t m = 1; m < Lw; ++m) {
    b = b * (half - pint(p, (i64)m - 1)) / pint(p, (i64)m);
    tau[m] = b.shift((int)m);
  }
  // residual F(tau, w); truncating at NT costs p^NT
  QpSeries res(Lw, PadicNum::zero(p)), tp(Lw, PadicNum::zero(p));
  tp[0] = pint(p, 1);
  for (int n = 0; n < NT; ++n) {
    res = qp_add(res, wmul(A[n], tp, Lw));
    tp = wmul(tp, tau, Lw);
  }
  int rv = PadicNum::kInf, cp = PadicNum::kInf;
  for (auto& x : res) {
    x = x.with_abs_prec(NT);
    cp = std::min(cp, x.abs_prec());
    if (!x.is_zero()) rv = std::min(rv, x.valuation());
  }
  rep.check_prec = cp;
  rep.residual_val = rv >= PadicNum::kInf ? cp : rv;
  rep.has_factor = rv >= PadicNum::kInf;
  Biv target;
  if (rep.has_factor) {
    // F = (T - tau) Q, then Q = (T + 2 + tau) F_1
    Biv Q(std::max(NT - 1, 1), QpSeries(Lw, PadicNum::zero(p)));
    if (NT >= 2) {
      Q[NT - 2] = A[NT - 1];
      for (int n = NT - 2; n >= 1; --n) Q[n - 1] = qp_add(A[n], wmul(tau, Q[n], Lw));
    }
    for (int n = 0; n < (int)Q.size(); ++n)
      for (auto& x : Q[n]) x = x.with_abs_prec(std::max(NT - n - 1, 0));
    QpSeries c = tau;
    c[0] = c[0] + pint(p, 2);
    QpSeries ci = winv(c, Lw);  // (2 + tau)^{-1}
    Biv inv(Q.size());
    QpSeries pwr = ci;
    for (std::size_t i = 0; i < Q.size(); ++i) {
      inv[i] = (i % 2) ? qp_scale(pwr, pint(p, -1)) : pwr;
      pwr = wmul(pwr, ci, Lw);
    }
    target.assign(Q.size(), QpSeries(Lw, PadicNum::zero(p)));
    for (std::size_t n = 0; n < Q.size(); ++n)
      for (std::size_t i = 0; i <= n; ++i)
        target[n] = qp_add(target[n], wmul(Q[n - i], inv[i], Lw));
  } else {
    target = A;
  }
  rep.restriction = restrict_to_line(target, p, tdeg);
  rep.order_at_zero = tdeg;
  for (int r = 0; r < tdeg; ++r)
    if (!rep.restriction[r].is_zero()) {
      rep.order_at_zero = r;
      rep.unit = rep.restriction[r].valuation() == 0;
      break;
    }
  return rep;
}

std::string GreenbergReport::str(int pdigits, int tdeg) const {
  std::ostringstream os;
  if (restriction.empty()) return "0";
  int r0 = order_at_zero;
  std::vector<std::string> parts;
  for (int r = r0; r < r0 + tdeg && r < (int)restriction.size(); ++r) {
    PadicNum c = restriction[r];
    if (c.is_zero() || c.valuation() >= pdigits) continue;
    std::string s = padic_pretty(c.with_abs_prec(pdigits), pdigits);
    int e = r - r0;
    if (e == 0)
      parts.push_back(s);
    else {
      std::string t = e == 1 ? "T" : "T^" + std::to_string(e);
      parts.push_back(s == "1" ? t : (s.find('+') != std::string::npos ? "(" + s + ")" + t : s + t));
    }
  }
  std::string body;
  for (std::size_t i = 0; i < parts.size(); ++i) body += (i ? " + " : "") + parts[i];
  body += (body.empty() ? "" : " + ") + std::string("O(p^") + std::to_string(pdigits) + ", T^" +
          std::to_string(tdeg) + ")";
  if (r0 > 0) body = "(" + body + ")" + (r0 == 1 ? "T" : "T^" + std::to_string(r0));
  os << body;
  return os.str();
}

// ---- discriminants ----

DiscriminantReport discriminant_analysis(const std::vector<TruncSeries>& cp) {
  if (cp.size() != 3) fail(ErrorKind::Validation, "discriminant analysis needs a degree-2 polynomial");
  const u64 p = cp[0].prime();
  const u64 mod = cp[0].modulus();
  DiscriminantReport rep;
  rep.d_w = cp[1] * cp[1] - cp[0].scaled(4 % mod);
  rep.d_W = to_W(rep.d_w);
  rep.zero = rep.d_w.is_zero();
  if (rep.zero) return rep;
  rep.wd = weierstrass_prep(rep.d_W);
  QpSeries g;
  for (auto& c : rep.d_W) g.push_back(c.shift(-rep.wd.mu));
  if (rep.wd.lambda == 1) {
    try {
      rep.root = newton_root(g, PadicNum::zero(p));
    } catch (const Error&) {
    }
  } else if (rep.wd.lambda == 2) {
    QpSeries dg = qp_derivative(g);
    try {
      PadicNum x = newton_root(dg, PadicNum::zero(p));
      PadicNum fx = qp_eval(g, x);
      if (x.valuation() > 0) fx = fx.with_abs_prec((int)g.size() * x.valuation());
      if (fx.is_zero() || fx.valuation() >= 2 * x.abs_prec() - 1) {
        rep.root = x;
        rep.double_root = true;
      }
    } catch (const Error&) {
    }
  }
  if (rep.wd.lambda % 2 == 0 && !rep.wd.unit.empty() && !rep.wd.unit[0].is_zero()) {
    u64 u = rep.wd.unit[0].residue_trunc(1) % p;
    rep.square_times_unit = u != 0 && powmod(u, (p - 1) / 2, p) == 1;
  }
  return rep;
}

std::string DiscriminantReport::str(int terms) const {
  std::ostringstream os;
  if (zero) return "discriminant = 0 to precision";
  for (int n = 0; n < terms && n < (int)d_W.size(); ++n) {
    if (n) os << " + ";
    os << "(" << d_W[n].str() << ")";
    if (n) os << "W" << (n > 1 ? "^" + std::to_string(n) : "");
  }
  os << " + ...";
  return os.str();
}

}  // namespace hida
