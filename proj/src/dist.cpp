#include "hida/dist.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <random>
#include <tuple>

namespace hida {

// ---- Mat2 ----

static i64 mul_checked(i64 x, i64 y) {
  i64 r;
  if (__builtin_mul_overflow(x, y, &r)) fail(ErrorKind::Numerical, "matrix entry overflow");
  return r;
}
static i64 add_checked(i64 x, i64 y) {
  i64 r;
  if (__builtin_add_overflow(x, y, &r)) fail(ErrorKind::Numerical, "matrix entry overflow");
  return r;
}

Mat2 Mat2::operator*(const Mat2& o) const {
  return {add_checked(mul_checked(a, o.a), mul_checked(b, o.c)),
          add_checked(mul_checked(a, o.b), mul_checked(b, o.d)),
          add_checked(mul_checked(c, o.a), mul_checked(d, o.c)),
          add_checked(mul_checked(c, o.b), mul_checked(d, o.d))};
}

i64 Mat2::det() const { return add_checked(mul_checked(a, d), -mul_checked(b, c)); }

Mat2 Mat2::inverse() const {
  i64 D = det();
  if (D == 1) return adjugate();
  if (D == -1) return -adjugate();
  fail(ErrorKind::Numerical, "matrix not invertible over Z");
}

// ---- profile ----

int PrecisionProfile::prec(int j) const {
  i64 drop = (i64)j * ((i64)p - 2) / ((i64)p - 1);
  return (int)std::max<i64>(0, (i64)M - drop);
}

int PrecisionProfile::J() const {
  int j = 0;
  while (prec(j) >= 1) ++j;
  return j;
}

// ---- FamilyDistribution ----

FamilyDistribution::FamilyDistribution(const PrecisionProfile& prof) : prof_(prof) {
  const auto& C = PadicContext::get(prof.p);
  if (prof.M > C.cap) fail(ErrorKind::Validation, "precision M exceeds 64-bit capacity for this p");
  J_ = prof.J();
  mods_.resize(J_);
  for (int j = 0; j < J_; ++j) mods_[j] = C.pow(prof.prec(j));
  m_.assign((std::size_t)J_ * prof.L, 0);
}

TruncSeries FamilyDistribution::moment_series(int j) const {
  TruncSeries s(prof_.p, prof_.prec(j), prof_.L);
  for (int n = 0; n < prof_.L; ++n) s[n] = moment(j)[n];
  return s;
}

void FamilyDistribution::set_moment(int j, const TruncSeries& s) {
  for (int n = 0; n < prof_.L; ++n) moment(j)[n] = n < s.L() ? s[n] % mods_[j] : 0;
}

void FamilyDistribution::normalize() {
  for (int j = 0; j < J_; ++j)
    for (int n = 0; n < prof_.L; ++n) moment(j)[n] %= mods_[j];
}

FamilyDistribution FamilyDistribution::operator+(const FamilyDistribution& o) const {
  if (!(prof_ == o.prof_)) fail(ErrorKind::Validation, "profile mismatch in addition");
  FamilyDistribution r = *this;
  for (int j = 0; j < J_; ++j)
    for (int n = 0; n < prof_.L; ++n)
      r.moment(j)[n] = addmod(moment(j)[n], o.moment(j)[n], mods_[j]);
  return r;
}

FamilyDistribution FamilyDistribution::operator-() const {
  FamilyDistribution r = *this;
  for (int j = 0; j < J_; ++j)
    for (int n = 0; n < prof_.L; ++n) r.moment(j)[n] = negmod(moment(j)[n], mods_[j]);
  return r;
}

FamilyDistribution FamilyDistribution::operator-(const FamilyDistribution& o) const {
  return *this + (-o);
}

FamilyDistribution FamilyDistribution::scaled(u64 c) const {
  FamilyDistribution r = *this;
  for (int j = 0; j < J_; ++j)
    for (int n = 0; n < prof_.L; ++n)
      r.moment(j)[n] = mulmod(moment(j)[n], c % mods_[j], mods_[j]);
  return r;
}

FamilyDistribution FamilyDistribution::times(const TruncSeries& f) const {
  FamilyDistribution r(prof_);
  r.denom_shift = denom_shift;
  for (int j = 0; j < J_; ++j) {
    TruncSeries s = moment_series(j) * f.reduced(prof_.prec(j), prof_.L);
    for (int n = 0; n < prof_.L; ++n) r.moment(j)[n] = n < s.L() ? s[n] : 0;
  }
  return r;
}

bool FamilyDistribution::operator==(const FamilyDistribution& o) const {
  return prof_ == o.prof_ && m_ == o.m_;
}

bool FamilyDistribution::is_zero() const {
  for (u64 x : m_)
    if (x) return false;
  return true;
}

int FamilyDistribution::common_p_power(int cap_e) const {
  int e = cap_e;
  for (u64 x : m_)
    if (x) e = std::min(e, vp_int((i64)x, prof_.p));
  return e;
}

FamilyDistribution FamilyDistribution::div_p(int e) const {
  if (e == 0) return *this;
  const auto& C = PadicContext::get(prof_.p);
  FamilyDistribution r(prof_.lowered(e));
  r.denom_shift = denom_shift;
  u64 pe = C.pow(e);
  for (int j = 0; j < r.J_; ++j)
    for (int n = 0; n < prof_.L; ++n) {
      u64 x = moment(j)[n];
      if (x % pe) fail(ErrorKind::Numerical, "div_p: moment not divisible");
      r.moment(j)[n] = (x / pe) % r.mods_[j];
    }
  return r;
}

FamilyDistribution FamilyDistribution::reduced(const PrecisionProfile& to) const {
  if (to.p != prof_.p || to.M > prof_.M || to.L > prof_.L)
    fail(ErrorKind::Validation, "cannot raise precision by reduction");
  FamilyDistribution r(to);
  r.denom_shift = denom_shift;
  for (int j = 0; j < r.J_; ++j)
    for (int n = 0; n < to.L; ++n) r.moment(j)[n] = moment(j)[n] % r.mods_[j];
  return r;
}

// ---- automorphy factor ----

namespace {
struct FactorKey {
  u64 p, a, c;
  int m, M, J, L;
  bool operator<(const FactorKey& o) const {
    return std::tie(p, a, c, m, M, J, L) < std::tie(o.p, o.a, o.c, o.m, o.M, o.J, o.L);
  }
};
std::mutex factor_mu;
std::map<FactorKey, std::shared_ptr<const BivarSeries>>& factor_cache() {
  static std::map<FactorKey, std::shared_ptr<const BivarSeries>> cache;
  return cache;
}

// z-series product mod m truncated at J
std::vector<u64> zmul(const std::vector<u64>& x, const std::vector<u64>& y, int J, u64 m) {
  std::vector<u64> r(J, 0);
  for (int n = 0; n < J; ++n) {
    u128 acc = 0;
    for (int i = 0; i <= n; ++i) {
      acc += (u128)x[i] * y[n - i];
      if (acc >> 120) acc %= m;
    }
    r[n] = (u64)(acc % m);
  }
  return r;
}

std::shared_ptr<BivarSeries> compute_factor(u64 a, u64 c, int m, const PrecisionProfile& prof) {
  const u64 p = prof.p;
  const auto& C = PadicContext::get(p);
  const int M = prof.M, J = prof.J(), L = prof.L;
  int extra = 1;
  for (int n = 1; n < L; ++n) extra += std::max(0, vp_int(n, p) - 1);
  const int W = M + extra;
  if (W + 1 > C.cap) fail(ErrorKind::Validation, "automorphy factor needs more than 64-bit precision");
  const u64 modW = C.pow(W);

  PadicNum A = PadicNum::from_int(p, (i64)a), Cc = PadicNum::from_int(p, (i64)c);
  PadicNum omega = teichmuller(a, p);
  PadicNum lg = C.log_gamma();
  PadicNum l0 = padic_log(A / omega) / lg;
  std::vector<u64> Lz(J, 0);
  if (l0.abs_prec() < W) fail(ErrorKind::Numerical, "automorphy factor: logarithm too imprecise");
  Lz[0] = l0.residue_trunc(W);
  if (J > 1 && c != 0) {
    PadicNum ca = Cc / A, pw = ca;
    for (int i = 1; i < J; ++i) {
      PadicNum t = pw / (PadicNum::from_int(p, (i % 2) ? i : -i) * lg);
      if (!t.is_zero() && t.valuation() < 0)
        fail(ErrorKind::Numerical, "automorphy factor: non-integral logarithm coefficient");
      if (!t.is_zero() && t.abs_prec() < W)
        fail(ErrorKind::Numerical, "automorphy factor: logarithm too imprecise");
      Lz[i] = t.residue_trunc(W);
      pw = pw * ca;
    }
  }

  auto K = std::make_shared<BivarSeries>();
  K->p = p;
  K->M = M;
  K->J = J;
  K->L = L;
  K->t.assign((std::size_t)J * L, 0);
  const u64 modM = C.pow(M);
  u64 om = powmod(omega.residue(W), (u64)m, modM);

  std::vector<u64> B(J, 0);
  B[0] = 1;
  int Wcur = W;
  u64 mcur = modW;
  for (int n = 0; n < L; ++n) {
    if (n > 0) {
      std::vector<u64> shifted = Lz;
      shifted[0] = submod(shifted[0] % mcur, (u64)(n - 1) % mcur, mcur);
      for (auto& x : shifted) x %= mcur;
      std::vector<u64> tmp = zmul(B, shifted, J, mcur);
      int k = vp_int(n, p);
      u64 unit = (u64)n;
      for (int i = 0; i < k; ++i) unit /= p;
      u64 uinv = invmod(unit % mcur, mcur);
      if (k == 0) {
        for (auto& x : tmp) x = mulmod(mulmod(x, p, mcur), uinv, mcur);
      } else {
        u64 d = C.pow(k - 1);
        int Wn = Wcur - (k - 1);
        u64 mn = C.pow(Wn);
        for (auto& x : tmp) {
          if (x % d) fail(ErrorKind::Numerical, "automorphy factor: lost integrality");
          x = mulmod((x / d) % mn, uinv % mn, mn);
        }
        Wcur = Wn;
        mcur = mn;
      }
      B = tmp;
    }
    for (int i = 0; i < J; ++i) K->t[(std::size_t)i * L + n] = mulmod(B[i] % modM, om, modM);
  }
  if (Wcur < M) fail(ErrorKind::Numerical, "automorphy factor precision underflow");

  bool ok = true;
  for (int i = 0; i < J && ok; ++i)
    for (int n = 0; n < L; ++n) {
      u64 x = K->t[(std::size_t)i * L + n];
      if (!x) continue;
      i64 need = ((i64)i * ((i64)p - 2) + (i64)p - 2) / ((i64)p - 1);  // ceil(i c_p)
      if (vp_int((i64)x, p) < need) {
        ok = false;
        break;
      }
    }
  K->slope_certified = ok;
  return K;
}
}  // namespace

std::shared_ptr<const BivarSeries> automorphy_factor(u64 a, u64 c, int m,
                                                     const PrecisionProfile& prof) {
  const auto& C = PadicContext::get(prof.p);
  u64 modM = C.pow(prof.M);
  a %= modM;
  c %= modM;
  if (a % prof.p == 0) fail(ErrorKind::Validation, "automorphy factor: a is not a unit");
  if (c % prof.p != 0) fail(ErrorKind::Validation, "automorphy factor: c not divisible by p");
  FactorKey key{prof.p, a, c, m, prof.M, prof.J(), prof.L};
  {
    std::lock_guard<std::mutex> lock(factor_mu);
    auto it = factor_cache().find(key);
    if (it != factor_cache().end()) return it->second;
  }
  auto K = compute_factor(a, c, m, prof);
  std::lock_guard<std::mutex> lock(factor_mu);
  auto& cache = factor_cache();
  if (cache.size() > (1u << 16)) cache.clear();
  cache.emplace(key, K);
  return K;
}

int factor_tail_precision(u64 p, int L) {
  int best = PadicNum::kInf;
  int vf = 0;
  for (int n = 1; n < L; ++n) vf += vp_int(n, p);
  for (int n = L; n < L + 4 * (int)(p * p) + 8; ++n) {
    vf += vp_int(n, p);
    best = std::min(best, n - vf);
  }
  return best;
}

ZSeries specialize_factor(const BivarSeries& K, int k, int m) {
  u64 p = K.p;
  if (k < 0 || ((k - m) % (int)(p - 1)) != 0)
    fail(ErrorKind::Validation, "specialize_factor: weight not on the branch");
  const auto& C = PadicContext::get(p);
  u64 modM = C.pow(K.M), big = C.pow(K.M + 1);
  u64 wk = submod(powmod(1 + p, (u64)k, big), 1, big) / p % modM;
  PrecisionProfile prof(p, K.M, K.L);
  int tail = factor_tail_precision(p, K.L);
  ZSeries out;
  out.coeff.assign(K.J, 0);
  out.precision.assign(K.J, 0);
  for (int i = 0; i < K.J; ++i) {
    u64 s = 0;
    for (int n = K.L - 1; n >= 0; --n) s = addmod(mulmod(s, wk, modM), K.at(i, n), modM);
    out.precision[i] = std::min(prof.prec(i), tail);
    out.coeff[i] = s % C.pow(out.precision[i]);
  }
  return out;
}

// ---- action ----

ActionMatrix::ActionMatrix(const PrecisionProfile& prof) {
  J_ = prof.J();
  L_ = prof.L;
  mod_ = PadicContext::get(prof.p).pow(prof.M);
  A_.assign((std::size_t)J_ * J_ * L_, 0);
}

void ActionMatrix::add_scaled(const ActionMatrix& o, i64 c) {
  u64 cc = reduce_signed(c, mod_);
  for (std::size_t i = 0; i < A_.size(); ++i)
    A_[i] = addmod(A_[i], mulmod(o.A_[i], cc, mod_), mod_);
}

void ActionMatrix::add_product(const ActionMatrix& X, const ActionMatrix& Y, i64 c) {
  // (mu|X)|Y has matrix Y*X
  u64 cc = reduce_signed(c, mod_);
  std::vector<u128> acc(L_);
  for (int j = 0; j < J_; ++j)
    for (int i = 0; i < J_; ++i) {
      std::fill(acc.begin(), acc.end(), 0);
      for (int k = 0; k < J_; ++k) {
        const u64* y = Y.entry(j, k);
        const u64* x = X.entry(k, i);
        for (int n1 = 0; n1 < L_; ++n1) {
          if (!y[n1]) continue;
          for (int n2 = 0; n1 + n2 < L_; ++n2) {
            acc[n1 + n2] += (u128)y[n1] * x[n2];
            if (acc[n1 + n2] >> 120) acc[n1 + n2] %= mod_;
          }
        }
      }
      u64* e = entry(j, i);
      for (int n = 0; n < L_; ++n)
        e[n] = addmod(e[n], mulmod((u64)(acc[n] % mod_), cc, mod_), mod_);
    }
}

bool ActionMatrix::is_zero() const {
  for (u64 x : A_)
    if (x) return false;
  return true;
}

bool in_S0p(const Mat2& g, u64 p) {
  return reduce_signed(g.a, p) != 0 && reduce_signed(g.c, p) == 0 && g.det() != 0;
}

ActionMatrix action_matrix(const Mat2& g, int m, const PrecisionProfile& prof) {
  const u64 p = prof.p;
  if (!in_S0p(g, p)) fail(ErrorKind::Validation, "matrix not in S_0(p)");
  ActionMatrix A(prof);
  const int J = A.J(), L = A.L();
  const u64 mod = A.mod();
  u64 a = reduce_signed(g.a, mod), b = reduce_signed(g.b, mod), c = reduce_signed(g.c, mod),
      d = reduce_signed(g.d, mod);
  auto K = automorphy_factor(a, c, m, prof);
  // r(z) = (b + d z)/(a + c z)
  u64 ainv = invmod(a, mod);
  std::vector<u64> geo(J, 0), num(J, 0);
  u64 q = negmod(mulmod(c, ainv, mod), mod), t = ainv;
  for (int n = 0; n < J; ++n) {
    geo[n] = t;
    t = mulmod(t, q, mod);
  }
  num[0] = b;
  if (J > 1) num[1] = d;
  std::vector<u64> r = zmul(num, geo, J, mod);
  std::vector<u64> rp(J, 0);
  rp[0] = 1;
  std::vector<u128> acc(L);
  for (int j = 0; j < J; ++j) {
    for (int i = 0; i < J; ++i) {
      std::fill(acc.begin(), acc.end(), 0);
      for (int s = 0; s <= i; ++s) {
        u64 rv = rp[i - s];
        if (!rv) continue;
        const u64* k = &K->t[(std::size_t)s * L];
        for (int n = 0; n < L; ++n) {
          acc[n] += (u128)k[n] * rv;
          if (acc[n] >> 120) acc[n] %= mod;
        }
      }
      u64* e = A.entry(j, i);
      for (int n = 0; n < L; ++n) e[n] = (u64)(acc[n] % mod);
    }
    rp = zmul(rp, r, J, mod);
  }
  return A;
}

void apply_accumulate(const ActionMatrix& A, const FamilyDistribution& mu,
                      FamilyDistribution& out) {
  const int J = mu.J(), L = mu.L();
  if (A.J() != J || A.L() != L || out.J() != J)
    fail(ErrorKind::Validation, "action matrix shape mismatch");
  const u64 mod = A.mod();
  std::vector<u128> acc(L);
  for (int j = 0; j < J; ++j) {
    std::fill(acc.begin(), acc.end(), 0);
    for (int i = 0; i < J; ++i) {
      const u64* e = A.entry(j, i);
      const u64* x = mu.moment(i);
      for (int n1 = 0; n1 < L; ++n1) {
        if (!e[n1]) continue;
        for (int n2 = 0; n1 + n2 < L; ++n2) {
          acc[n1 + n2] += (u128)e[n1] * x[n2];
          if (acc[n1 + n2] >> 120) acc[n1 + n2] %= mod;
        }
      }
    }
    u64 mj = out.modulus(j);
    u64* o = out.moment(j);
    for (int n = 0; n < L; ++n) o[n] = addmod(o[n], (u64)(acc[n] % mod) % mj, mj);
  }
}

FamilyDistribution apply(const ActionMatrix& A, const FamilyDistribution& mu) {
  FamilyDistribution out(mu.profile());
  out.denom_shift = mu.denom_shift;
  apply_accumulate(A, mu, out);
  return out;
}

FamilyDistribution act(const FamilyDistribution& mu, const Mat2& g, int m) {
  return apply(action_matrix(g, m, mu.profile()), mu);
}

std::vector<u64> act_weight_k(const std::vector<u64>& moments, const Mat2& g, int k, u64 p,
                              int M) {
  const auto& C = PadicContext::get(p);
  const u64 mod = C.pow(M);
  const int J = (int)moments.size();
  u64 a = reduce_signed(g.a, mod), b = reduce_signed(g.b, mod), c = reduce_signed(g.c, mod),
      d = reduce_signed(g.d, mod);
  // (a + cz)^k
  std::vector<u64> lin(J, 0), fk(J, 0);
  lin[0] = a;
  if (J > 1) lin[1] = c;
  fk[0] = 1;
  for (int i = 0; i < k; ++i) fk = zmul(fk, lin, J, mod);
  u64 ainv = invmod(a, mod);
  std::vector<u64> geo(J, 0), num(J, 0);
  u64 q = negmod(mulmod(c, ainv, mod), mod), t = ainv;
  for (int n = 0; n < J; ++n) {
    geo[n] = t;
    t = mulmod(t, q, mod);
  }
  num[0] = b;
  if (J > 1) num[1] = d;
  std::vector<u64> r = zmul(num, geo, J, mod);
  std::vector<u64> out(J, 0), poly = fk;
  for (int j = 0; j < J; ++j) {
    u128 acc = 0;
    for (int i = 0; i < J; ++i) acc += (u128)poly[i] * moments[i] % mod;
    out[j] = (u64)(acc % mod);
    poly = zmul(poly, r, J, mod);
  }
  return out;
}

// ---- difference equation ----

int difference_scale(u64 p, int M) {
  // largest m with p^m <= M / c_p
  int m = 0;
  u128 pm = p;
  while (pm * (p - 2) <= (u128)M * (p - 1)) {
    ++m;
    pm *= p;
  }
  return m;
}

DifferenceSolution solve_difference(const FamilyDistribution& nu) {
  const PrecisionProfile& prof = nu.profile();
  const u64 p = prof.p;
  const int L = prof.L;
  for (int n = 0; n < L; ++n)
    if (nu.moment(0)[n] != 0)
      fail(ErrorKind::Numerical, "not in image of Delta: total measure is nonzero");
  DifferenceSolution sol;
  sol.m_scale = difference_scale(p, prof.M);
  PrecisionProfile out_prof = prof.lowered(1);
  sol.mu = FamilyDistribution(out_prof);
  sol.mu.denom_shift = nu.denom_shift;
  const int Jout = out_prof.J();
  const auto& C = PadicContext::get(p);
  const u64 modM = C.pow(prof.M);
  PadicNum scale = PadicNum::from_int(p, (i64)C.pow(sol.m_scale));
  for (int r = 0; r < Jout; ++r) {
    std::vector<u128> acc(L, 0);
    for (int j = 1; j <= r + 1 && j < nu.J(); ++j) {
      mpz_class bin;
      mpz_bin_uiui(bin.get_mpz_t(), (unsigned long)r, (unsigned long)(j - 1));
      PadicNum coef = scale * PadicNum::from_rational(p, bin.get_str(), "1") *
                      bernoulli(r + 1 - j, p) / PadicNum::from_int(p, j);
      if (coef.is_zero()) continue;
      if (coef.valuation() < 0)
        fail(ErrorKind::Numerical, "difference equation: non-integral coefficient");
      u64 cr = coef.residue_trunc(prof.M) % modM;
      const u64* x = nu.moment(j);
      for (int n = 0; n < L; ++n) {
        acc[n] += (u128)cr * x[n];
        if (acc[n] >> 120) acc[n] %= modM;
      }
    }
    for (int n = 0; n < L; ++n) sol.mu.moment(r)[n] = (u64)(acc[n] % modM) % sol.mu.modulus(r);
  }
  // residual: mu|[1,1;0,1] - mu = p^m nu in the lowered profile
  FamilyDistribution lhs = act(sol.mu, Mat2{1, 1, 0, 1}, 0) - sol.mu;
  FamilyDistribution rhs = nu.reduced(out_prof).scaled(C.pow(sol.m_scale));
  if (!(lhs == rhs)) fail(ErrorKind::Numerical, "difference equation residual is nonzero");
  return sol;
}

FamilyDistribution random_distribution(const PrecisionProfile& prof, u64 seed) {
  FamilyDistribution d(prof);
  std::mt19937_64 rng(seed);
  for (int j = 0; j < d.J(); ++j)
    for (int n = 0; n < prof.L; ++n) d.moment(j)[n] = rng() % d.modulus(j);
  return d;
}

}  // namespace hida
