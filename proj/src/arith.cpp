#include "hida/arith.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace hida {

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

u64 invmod(u64 a, u64 m) {
  i128 t = 0, nt = 1, r = m, nr = a % m;
  while (nr != 0) {
    i128 q = r / nr;
    i128 tmp = t - q * nt;
    t = nt;
    nt = tmp;
    tmp = r - q * nr;
    r = nr;
    nr = tmp;
  }
  if (r != 1) fail(ErrorKind::Numerical, "invmod: not a unit");
  if (t < 0) t += m;
  return (u64)t;
}

u64 reduce_signed(i64 a, u64 m) {
  i128 r = (i128)a % (i128)m;
  if (r < 0) r += m;
  return (u64)r;
}

i64 centered(u64 a, u64 m) { return a > m / 2 ? -(i64)(m - a) : (i64)a; }

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

int vp_int(i64 x, u64 p) {
  if (x == 0) return PadicNum::kInf;
  int v = 0;
  u64 y = x < 0 ? (u64)(-(i128)x) : (u64)x;
  while (y % p == 0) {
    y /= p;
    ++v;
  }
  return v;
}

// ---- context ----

PadicContext::PadicContext(u64 prime) : p(prime), log_gamma_(nullptr) {
  if (prime < 3 || !is_prime(prime))
    fail(ErrorKind::Validation, "p must be an odd prime");
  pw_.push_back(1);
  while ((u128)pw_.back() * p < ((u128)1 << 62)) pw_.push_back(pw_.back() * p);
  cap = (int)pw_.size() - 1;
}

PadicContext::~PadicContext() { delete log_gamma_; }

u64 PadicContext::pow(int e) const {
  if (e < 0 || e > cap) fail(ErrorKind::Numerical, "p-power out of range");
  return pw_[e];
}

const PadicContext& PadicContext::get(u64 p) {
  static std::mutex mu;
  static std::map<u64, std::unique_ptr<PadicContext>> table;
  std::lock_guard<std::mutex> lock(mu);
  auto it = table.find(p);
  if (it == table.end())
    it = table.emplace(p, std::make_unique<PadicContext>(p)).first;
  return *it->second;
}

const PadicNum& PadicContext::log_gamma() const {
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  if (!log_gamma_) {
    auto* self = const_cast<PadicContext*>(this);
    self->log_gamma_ = new PadicNum(padic_log(PadicNum::from_int(p, (i64)p + 1)));
  }
  return *log_gamma_;
}

// ---- PadicNum ----

PadicNum PadicNum::zero(u64 p, int abs_prec) {
  PadicNum z(p);
  z.v_ = std::min(abs_prec, kInf);
  return z;
}

PadicNum PadicNum::normalize(u64 p, int v, u64 x, int abs_prec) {
  if (abs_prec <= v || x == 0) return zero(p, abs_prec);
  const auto& C = PadicContext::get(p);
  int t = 0;
  while (x % p == 0) {
    x /= p;
    ++t;
  }
  PadicNum r(p);
  r.v_ = v + t;
  r.rp_ = abs_prec - r.v_;
  if (r.rp_ <= 0) return zero(p, abs_prec);
  r.u_ = x % C.pow(r.rp_);
  return r;
}

PadicNum PadicNum::from_int(u64 p, i64 x) {
  if (x == 0) return zero(p);
  const auto& C = PadicContext::get(p);
  int v = vp_int(x, p);
  i128 y = x;
  for (int i = 0; i < v; ++i) y /= (i128)p;
  PadicNum r(p);
  r.v_ = v;
  r.rp_ = C.cap;
  i128 m = C.pow(C.cap);
  i128 u = y % m;
  if (u < 0) u += m;
  r.u_ = (u64)u;
  return r;
}

PadicNum PadicNum::from_residue(u64 p, u64 x, int abs_prec) {
  const auto& C = PadicContext::get(p);
  if (abs_prec > C.cap) fail(ErrorKind::Numerical, "precision exceeds cap");
  return normalize(p, 0, x % C.pow(abs_prec), abs_prec);
}

PadicNum PadicNum::from_unit(u64 p, int val, u64 unit, int rel_prec) {
  const auto& C = PadicContext::get(p);
  if (rel_prec <= 0) return zero(p, val);
  rel_prec = std::min(rel_prec, C.cap);
  return normalize(p, val, unit % C.pow(rel_prec), val + rel_prec);
}

PadicNum PadicNum::from_rational(u64 p, const std::string& num,
                                 const std::string& den) {
  mpz_class n(num), d(den);
  if (d == 0) fail(ErrorKind::Numerical, "zero denominator");
  if (n == 0) return zero(p);
  const auto& C = PadicContext::get(p);
  mpz_class P((unsigned long)p);
  int v = 0;
  while (mpz_divisible_p(n.get_mpz_t(), P.get_mpz_t())) {
    n /= P;
    ++v;
  }
  while (mpz_divisible_p(d.get_mpz_t(), P.get_mpz_t())) {
    d /= P;
    --v;
  }
  mpz_class m(std::to_string(C.pow(C.cap)));
  mpz_class inv;
  mpz_invert(inv.get_mpz_t(), d.get_mpz_t(), m.get_mpz_t());
  mpz_class u = (n * inv) % m;
  if (u < 0) u += m;
  PadicNum r(p);
  r.v_ = v;
  r.rp_ = C.cap;
  r.u_ = std::stoull(u.get_str());
  return r;
}

PadicNum PadicNum::operator+(const PadicNum& o) const {
  if (p_ == 0) return o;
  if (o.p_ == 0) return *this;
  int A = std::min(abs_prec(), o.abs_prec());
  int v0 = std::min(v_, o.v_);
  if (v0 >= A) return zero(p_, A);
  const auto& C = PadicContext::get(p_);
  int n = A - v0;
  u64 m = C.pow(n);
  auto term = [&](const PadicNum& x) -> u64 {
    if (x.is_zero()) return 0;
    int e = x.v_ - v0;
    if (e >= n) return 0;
    return mulmod(x.u_ % C.pow(n - e), C.pow(e), m);
  };
  return normalize(p_, v0, addmod(term(*this), term(o), m), A);
}

PadicNum PadicNum::operator-() const {
  if (is_zero()) return *this;
  PadicNum r = *this;
  r.u_ = negmod(u_, PadicContext::get(p_).pow(rp_));
  return r;
}

PadicNum PadicNum::operator-(const PadicNum& o) const { return *this + (-o); }

PadicNum PadicNum::operator*(const PadicNum& o) const {
  if (p_ == 0) return *this;
  if (o.p_ == 0) return o;
  if (is_zero() || o.is_zero()) {
    i64 a = (i64)v_ + o.v_;
    return zero(p_, (int)std::min<i64>(a, kInf));
  }
  const auto& C = PadicContext::get(p_);
  PadicNum r(p_);
  r.v_ = v_ + o.v_;
  r.rp_ = std::min(rp_, o.rp_);
  u64 m = C.pow(r.rp_);
  r.u_ = mulmod(u_ % m, o.u_ % m, m);
  return r;
}

PadicNum PadicNum::inverse() const {
  if (is_zero()) fail(ErrorKind::Numerical, "division by a p-adic zero");
  PadicNum r = *this;
  r.v_ = -v_;
  r.u_ = invmod(u_, PadicContext::get(p_).pow(rp_));
  return r;
}

PadicNum PadicNum::operator/(const PadicNum& o) const { return *this * o.inverse(); }

PadicNum PadicNum::pow(i64 e) const {
  if (e < 0) return inverse().pow(-e);
  PadicNum r = from_int(p_, 1), b = *this;
  while (e) {
    if (e & 1) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

PadicNum PadicNum::shift(int k) const {
  PadicNum r = *this;
  if (v_ >= kInf) return r;
  r.v_ += k;
  return r;
}

PadicNum PadicNum::with_abs_prec(int a) const {
  if (a >= abs_prec()) return *this;
  if (is_zero() || a <= v_) return zero(p_, a);
  return normalize(p_, v_, u_ % PadicContext::get(p_).pow(a - v_), a);
}

u64 PadicNum::residue(int n) const {
  if (abs_prec() < n)
    fail(ErrorKind::Numerical, "insufficient p-adic precision for residue");
  return residue_trunc(n);
}

u64 PadicNum::residue_trunc(int n) const {
  const auto& C = PadicContext::get(p_);
  if (is_zero()) return 0;
  if (v_ < 0) fail(ErrorKind::Numerical, "residue of a non-integral p-adic number");
  if (v_ >= n) return 0;
  u64 m = C.pow(n);
  int keep = std::min(rp_, n - v_);
  return mulmod(u_ % C.pow(keep), C.pow(v_), m);
}

std::vector<int> PadicNum::digits(int n) const {
  u64 x = residue_trunc(n);
  std::vector<int> d(n);
  for (int i = 0; i < n; ++i) {
    d[i] = (int)(x % p_);
    x /= p_;
  }
  return d;
}

std::string PadicNum::str(int n) const {
  if (n < 0) n = std::min(abs_prec(), PadicContext::get(p_).cap);
  return padic_pretty(*this, n);
}

std::string padic_pretty(const PadicNum& x, int n) {
  std::ostringstream os;
  bool first = true;
  if (!x.is_zero()) {
    const auto& C = PadicContext::get(x.prime());
    int top = std::min(n, x.abs_prec());
    u64 u = x.unit();
    int v = x.valuation();
    for (int e = v; e < top && e - v < x.rel_prec(); ++e) {
      u64 d = u % C.p;
      u /= C.p;
      if (d == 0) continue;
      if (!first) os << " + ";
      first = false;
      if (e == 0) {
        os << d;
      } else {
        if (d != 1) os << d;
        os << "p";
        if (e != 1) os << "^" << e;
      }
    }
  }
  if (first) os << "0";
  return os.str();
}

// ---- special functions ----

PadicNum teichmuller(u64 a, u64 p) {
  if (a % p == 0) fail(ErrorKind::Validation, "teichmuller: argument divisible by p");
  const auto& C = PadicContext::get(p);
  u64 m = C.pow(C.cap);
  u64 x = a % m;
  for (int i = 0; i <= C.cap + 1; ++i) {
    u64 y = powmod(x, p, m);
    if (y == x) break;
    x = y;
  }
  return PadicNum::from_residue(p, x, C.cap);
}

PadicNum padic_log(const PadicNum& x) {
  u64 p = x.prime();
  if (x.is_zero() || x.valuation() != 0 || x.unit() % p != 1)
    fail(ErrorKind::Numerical, "padic_log: argument is not a 1-unit");
  PadicNum y = x - PadicNum::from_int(p, 1);
  if (y.is_zero()) return y;
  int A = y.abs_prec();
  int vy = y.valuation();
  PadicNum sum = PadicNum::zero(p), pw = y;
  for (i64 i = 1;; ++i) {
    if (i > 1) pw = pw * y;
    // remaining terms i' >= i have valuation >= i' vy - log_p(i')
    if ((i64)vy * i - vp_int(i, p) >= A) {
      bool done = true;
      for (i64 j = i; j < i + (i64)p * 4 + 8; ++j)
        if ((i64)vy * j - vp_int(j, p) < A) done = false;
      if (done) break;
    }
    PadicNum t = pw / PadicNum::from_int(p, i);
    sum = (i % 2) ? sum + t : sum - t;
  }
  return sum.with_abs_prec(A);
}

PadicNum padic_exp(const PadicNum& x) {
  u64 p = x.prime();
  if (x.is_zero()) return PadicNum::from_int(p, 1);
  if (x.valuation() < 1) fail(ErrorKind::Numerical, "padic_exp: argument outside domain");
  int A = x.abs_prec();
  PadicNum sum = PadicNum::from_int(p, 1), term = PadicNum::from_int(p, 1);
  int vfact = 0;
  for (i64 n = 1; n < 4 * (i64)A + 16; ++n) {
    term = term * x / PadicNum::from_int(p, n);
    vfact += vp_int(n, p);
    sum = sum + term;
  }
  return sum.with_abs_prec(A);
}

namespace {
std::mutex bern_mu;
std::vector<mpq_class>& bern_table() {
  static std::vector<mpq_class> t;
  return t;
}
const mpq_class& bern_q(int n) {
  std::lock_guard<std::mutex> lock(bern_mu);
  auto& t = bern_table();
  while ((int)t.size() <= n) {
    int m = (int)t.size();
    if (m == 0) {
      t.emplace_back(1);
      continue;
    }
    mpq_class s = 0;
    mpz_class binom = 1;  // binom(m+1, k)
    for (int k = 0; k < m; ++k) {
      s += binom * t[k];
      binom = binom * (m + 1 - k) / (k + 1);
    }
    mpq_class b = -s / mpq_class(m + 1);
    b.canonicalize();
    t.push_back(b);
  }
  return t[n];
}
}  // namespace

PadicNum bernoulli(int n, u64 p) {
  const mpq_class& b = bern_q(n);
  return PadicNum::from_rational(p, b.get_num().get_str(), b.get_den().get_str());
}

std::string bernoulli_rational(int n) { return bern_q(n).get_str(); }

// ---- QpSeries ----

QpSeries qp_mul(const QpSeries& a, const QpSeries& b, std::size_t n) {
  u64 p = !a.empty() ? a[0].prime() : (!b.empty() ? b[0].prime() : 0);
  QpSeries r(n, PadicNum::zero(p));
  for (std::size_t i = 0; i < a.size() && i < n; ++i) {
    if (a[i].is_zero() && a[i].valuation() >= PadicNum::kInf) continue;
    for (std::size_t j = 0; j < b.size() && i + j < n; ++j)
      r[i + j] = r[i + j] + a[i] * b[j];
  }
  return r;
}

QpSeries qp_add(const QpSeries& a, const QpSeries& b) {
  QpSeries r(std::max(a.size(), b.size()));
  u64 p = !a.empty() ? a[0].prime() : b[0].prime();
  for (std::size_t i = 0; i < r.size(); ++i) {
    PadicNum x = i < a.size() ? a[i] : PadicNum::zero(p);
    PadicNum y = i < b.size() ? b[i] : PadicNum::zero(p);
    r[i] = x + y;
  }
  return r;
}

QpSeries qp_scale(const QpSeries& a, const PadicNum& c) {
  QpSeries r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * c;
  return r;
}

QpSeries qp_compose(const QpSeries& a, const QpSeries& b, std::size_t n) {
  // a(b(x)) with b(0) = 0
  u64 p = a[0].prime();
  QpSeries r(n, PadicNum::zero(p)), pw(n, PadicNum::zero(p));
  pw[0] = PadicNum::from_int(p, 1);
  for (std::size_t i = 0; i < a.size() && i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) r[j] = r[j] + a[i] * pw[j];
    pw = qp_mul(pw, b, n);
  }
  return r;
}

QpSeries qp_derivative(const QpSeries& a) {
  if (a.size() <= 1) return {PadicNum::zero(a.empty() ? 3 : a[0].prime())};
  QpSeries r(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i)
    r[i - 1] = a[i] * PadicNum::from_int(a[i].prime(), (i64)i);
  return r;
}

PadicNum qp_eval(const QpSeries& a, const PadicNum& x) {
  PadicNum r = PadicNum::zero(x.prime());
  for (std::size_t i = a.size(); i-- > 0;) r = r * x + a[i];
  return r;
}

QpSeries log_gamma_series(const QpSeries& u, std::size_t n) {
  if (u.empty()) fail(ErrorKind::Validation, "log_gamma_series: empty series");
  u64 p = u[0].prime();
  const auto& C = PadicContext::get(p);
  PadicNum u0 = u[0];
  if (u0.is_zero() || u0.valuation() != 0 || u0.unit() % p != 1)
    fail(ErrorKind::Numerical, "log_gamma_series: constant term is not a 1-unit");
  PadicNum inv0 = u0.inverse();
  QpSeries f(n, PadicNum::zero(p));
  for (std::size_t i = 1; i < u.size() && i < n; ++i) f[i] = u[i] * inv0;
  QpSeries out(n, PadicNum::zero(p));
  if (n == 0) return out;
  out[0] = padic_log(u0);
  QpSeries pw = f;
  for (std::size_t i = 1; i < n; ++i) {
    PadicNum c = PadicNum::from_int(p, (i % 2) ? (i64)i : -(i64)i).inverse();
    for (std::size_t j = 0; j < n; ++j) out[j] = out[j] + pw[j] * c;
    pw = qp_mul(pw, f, n);
  }
  PadicNum lg = C.log_gamma().inverse();
  for (auto& c : out) c = c * lg;
  return out;
}

// ---- TruncSeries ----

TruncSeries::TruncSeries(u64 p, int M, int L) : p_(p), M_(M) {
  mod_ = PadicContext::get(p).pow(M);
  c_.assign(L, 0);
}

TruncSeries TruncSeries::constant(u64 p, int M, int L, i64 c) {
  TruncSeries r(p, M, L);
  if (L > 0) r.c_[0] = reduce_signed(c, r.mod_);
  return r;
}

TruncSeries TruncSeries::from_qp(const QpSeries& s, int M, int L) {
  if (s.empty()) fail(ErrorKind::Validation, "from_qp: empty series");
  TruncSeries r(s[0].prime(), M, L);
  for (int i = 0; i < L && i < (int)s.size(); ++i) r.c_[i] = s[i].residue(M);
  return r;
}

PadicNum TruncSeries::coeff(int n) const { return PadicNum::from_residue(p_, c_[n], M_); }

static void check_compat(const TruncSeries& a, const TruncSeries& b) {
  if (a.prime() != b.prime()) fail(ErrorKind::Validation, "TruncSeries prime mismatch");
}

TruncSeries TruncSeries::operator+(const TruncSeries& o) const {
  check_compat(*this, o);
  int M = std::min(M_, o.M_), L = std::min(this->L(), o.L());
  TruncSeries r(p_, M, L);
  for (int i = 0; i < L; ++i) r.c_[i] = (c_[i] % r.mod_ + o.c_[i] % r.mod_) % r.mod_;
  return r;
}

TruncSeries TruncSeries::operator-() const {
  TruncSeries r = *this;
  for (auto& x : r.c_) x = negmod(x, mod_);
  return r;
}

TruncSeries TruncSeries::operator-(const TruncSeries& o) const { return *this + (-o); }

TruncSeries TruncSeries::operator*(const TruncSeries& o) const {
  check_compat(*this, o);
  int M = std::min(M_, o.M_), L = std::min(this->L(), o.L());
  TruncSeries r(p_, M, L);
  u64 m = r.mod_;
  for (int n = 0; n < L; ++n) {
    u128 acc = 0;
    for (int i = 0; i <= n; ++i) {
      acc += (u128)(c_[i] % m) * (o.c_[n - i] % m);
      if (acc >> 126) acc %= m;
    }
    r.c_[n] = (u64)(acc % m);
  }
  return r;
}

TruncSeries TruncSeries::scaled(u64 c) const {
  TruncSeries r = *this;
  for (auto& x : r.c_) x = mulmod(x, c % mod_, mod_);
  return r;
}

bool TruncSeries::operator==(const TruncSeries& o) const {
  int M = std::min(M_, o.M_), L = std::min(this->L(), o.L());
  u64 m = PadicContext::get(p_).pow(M);
  for (int i = 0; i < L; ++i)
    if (c_[i] % m != o.c_[i] % m) return false;
  return true;
}

bool TruncSeries::is_zero() const {
  for (u64 x : c_)
    if (x) return false;
  return true;
}

int TruncSeries::valuation() const {
  int v = M_;
  for (u64 x : c_)
    if (x) v = std::min(v, vp_int((i64)x, p_));
  return v;
}

TruncSeries TruncSeries::reduced(int M, int L) const {
  M = std::min(M, M_);
  L = std::min(L, this->L());
  TruncSeries r(p_, M, L);
  for (int i = 0; i < L; ++i) r.c_[i] = c_[i] % r.mod_;
  return r;
}

TruncSeries TruncSeries::div_p(int k) const {
  if (k == 0) return *this;
  if (k > M_) fail(ErrorKind::Numerical, "div_p: shift exceeds precision");
  u64 pk = PadicContext::get(p_).pow(k);
  TruncSeries r(p_, M_ - k, L());
  for (int i = 0; i < L(); ++i) {
    if (c_[i] % pk) fail(ErrorKind::Numerical, "div_p: coefficient not divisible");
    r.c_[i] = (c_[i] / pk) % r.mod_;
  }
  return r;
}

TruncSeries TruncSeries::div_w() const {
  if (L() == 0) return *this;
  if (c_[0] != 0) fail(ErrorKind::Numerical, "div_w: constant term nonzero");
  TruncSeries r(p_, M_, L() - 1);
  for (int i = 1; i < L(); ++i) r.c_[i - 1] = c_[i];
  return r;
}

TruncSeries TruncSeries::derivative() const {
  TruncSeries r(p_, M_, std::max(0, L() - 1));
  for (int i = 1; i < L(); ++i) r.c_[i - 1] = mulmod(c_[i], (u64)i % mod_, mod_);
  return r;
}

u64 TruncSeries::eval_residue(u64 w0) const {
  u64 r = 0;
  for (int i = L() - 1; i >= 0; --i) r = addmod(mulmod(r, w0 % mod_, mod_), c_[i], mod_);
  return r;
}

PadicNum TruncSeries::eval(const PadicNum& w0) const {
  PadicNum r = PadicNum::zero(p_);
  for (int i = L() - 1; i >= 0; --i) r = r * w0 + coeff(i);
  int tail = w0.is_zero() ? M_ : (int)std::min<i64>((i64)L() * std::max(0, w0.valuation()), M_);
  return r.with_abs_prec(std::min(M_, tail));
}

bool TruncSeries::iwasawa_extendable() const {
  for (int n = 0; n < L(); ++n) {
    if (n >= M_) break;
    if (c_[n] == 0) continue;
    if (vp_int((i64)c_[n], p_) < n) return false;
  }
  return true;
}

QpSeries TruncSeries::to_qp() const {
  QpSeries r(L());
  for (int i = 0; i < L(); ++i) r[i] = coeff(i);
  return r;
}

std::string TruncSeries::str() const {
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < L(); ++i) {
    if (!c_[i]) continue;
    if (!first) os << " + ";
    first = false;
    std::string s = padic_pretty(coeff(i), M_);
    if (i == 0)
      os << s;
    else
      os << "(" << s << ")w" << (i > 1 ? "^" + std::to_string(i) : "");
  }
  if (first) os << "0";
  return os.str();
}

TruncSeries invert(const TruncSeries& f) {
  if (f.L() == 0) return f;
  if (!f.is_unit()) fail(ErrorKind::Numerical, "non-invertible in Lambda");
  u64 m = f.mod_;
  TruncSeries g(f.p_, f.M_, f.L());
  u64 g0 = invmod(f.c_[0], m);
  g.c_[0] = g0;
  for (int n = 1; n < f.L(); ++n) {
    u128 acc = 0;
    for (int i = 1; i <= n; ++i) {
      acc += (u128)f.c_[i] * g.c_[n - i];
      if (acc >> 126) acc %= m;
    }
    g.c_[n] = negmod(mulmod((u64)(acc % m), g0, m), m);
  }
  return g;
}

// ---- Weierstrass preparation ----

WeierstrassData weierstrass_prep(const QpSeries& f) {
  if (f.empty()) fail(ErrorKind::Numerical, "indeterminate Weierstrass data");
  u64 p = f[0].prime();
  int mu = PadicNum::kInf, lambda = -1;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!f[i].is_zero() && f[i].valuation() < mu) {
      mu = f[i].valuation();
      lambda = (int)i;
    }
  if (lambda < 0) fail(ErrorKind::Numerical, "indeterminate Weierstrass data");
  WeierstrassData wd;
  wd.mu = mu;
  wd.lambda = lambda;
  wd.certified = true;
  for (int i = 0; i < lambda; ++i)
    if (f[i].abs_prec() <= mu) wd.certified = false;
  std::size_t n = f.size();
  QpSeries g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = f[i].shift(-mu);
  QpSeries A(g.begin(), g.begin() + lambda);
  QpSeries B(g.begin() + lambda, g.end());
  std::size_t nb = B.size();
  // 1/B by recurrence
  QpSeries Binv(nb, PadicNum::zero(p));
  PadicNum b0inv = B[0].inverse();
  Binv[0] = b0inv;
  for (std::size_t k = 1; k < nb; ++k) {
    PadicNum s = PadicNum::zero(p);
    for (std::size_t i = 1; i <= k; ++i) s = s + B[i] * Binv[k - i];
    Binv[k] = -(s * b0inv);
  }
  QpSeries AB = qp_mul(A, Binv, n);
  auto tau = [&](const QpSeries& x) {
    QpSeries r(nb, PadicNum::zero(p));
    QpSeries prod = qp_mul(x, AB, n);
    for (std::size_t i = 0; i < nb && i + lambda < prod.size(); ++i) r[i] = prod[i + lambda];
    return r;
  };
  // Q = sum_k (-S)^k (1)
  QpSeries Q(nb, PadicNum::zero(p)), term(nb, PadicNum::zero(p));
  term[0] = PadicNum::from_int(p, 1);
  const int cap = PadicContext::get(p).cap;
  for (int it = 0; it < 4 * cap + 8; ++it) {
    Q = qp_add(Q, term);
    QpSeries nt = tau(term);
    bool allz = true;
    for (auto& c : nt) {
      c = -c;
      if (!c.is_zero()) allz = false;
    }
    term = nt;
    if (allz) break;
  }
  QpSeries q = qp_mul(Q, Binv, nb);
  QpSeries qg = qp_mul(q, g, (std::size_t)lambda + 1);
  wd.distinguished.assign(lambda + 1, PadicNum::zero(p));
  for (int i = 0; i < lambda; ++i) wd.distinguished[i] = qg[i];
  wd.distinguished[lambda] = PadicNum::from_int(p, 1);
  // unit = 1/q
  QpSeries qi(nb, PadicNum::zero(p));
  PadicNum q0inv = q[0].inverse();
  qi[0] = q0inv;
  for (std::size_t k = 1; k < nb; ++k) {
    PadicNum s = PadicNum::zero(p);
    for (std::size_t i = 1; i <= k; ++i) s = s + q[i] * qi[k - i];
    qi[k] = -(s * q0inv);
  }
  wd.unit = qi;
  return wd;
}

PadicNum newton_root(const QpSeries& f, const PadicNum& x0) {
  QpSeries df = qp_derivative(f);
  auto ev = [&](const QpSeries& s, const PadicNum& x) {
    PadicNum r = qp_eval(s, x);
    // unknown tail of an integral series truncated at degree s.size()
    if (x.valuation() > 0 && !x.is_zero())
      r = r.with_abs_prec((int)std::min<i64>((i64)s.size() * x.valuation(), PadicNum::kInf));
    return r;
  };
  PadicNum x = x0;
  PadicNum fx = ev(f, x), dfx = ev(df, x);
  if (dfx.is_zero()) fail(ErrorKind::Numerical, "no certified simple root");
  int v = dfx.valuation();
  if (!fx.is_zero() && fx.valuation() < 2 * v + 1)
    fail(ErrorKind::Numerical, "no certified simple root");
  for (int it = 0; it < 200; ++it) {
    if (fx.is_zero()) break;
    PadicNum nx = x - fx / dfx;
    if (nx.equals(x) && nx.abs_prec() <= x.abs_prec()) {
      x = nx;
      break;
    }
    x = nx;
    fx = ev(f, x);
    dfx = ev(df, x);
    if (dfx.is_zero()) fail(ErrorKind::Numerical, "no certified simple root");
  }
  // certified precision: v(f(x)) - v(f'(x))
  int prec = fx.is_zero() ? fx.abs_prec() - v : fx.valuation() - v;
  return x.with_abs_prec(prec);
}

QpSeries weight_series(u64 p, std::size_t n, int prec) {
  const auto& C = PadicContext::get(p);
  QpSeries r(n, PadicNum::zero(p));
  PadicNum lg = C.log_gamma();
  PadicNum term = PadicNum::from_int(p, 1);
  PadicNum pinv = PadicNum::from_int(p, (i64)p).inverse();
  for (std::size_t m = 1; m < n; ++m) {
    term = term * lg / PadicNum::from_int(p, (i64)m);
    r[m] = (term * pinv).with_abs_prec(prec);
  }
  return r;
}

TruncSeries substitute_weight(const TruncSeries& A) {
  u64 p = A.prime();
  int M = A.M(), L = A.L();
  QpSeries ws = weight_series(p, L, M + 2);
  TruncSeries w(p, M, L);
  for (int i = 1; i < L; ++i) w[i] = ws[i].residue(M);
  TruncSeries out(p, M, L), pw = TruncSeries::constant(p, M, L, 1);
  for (int j = 0; j < L; ++j) {
    out = out + pw.scaled(A[j]);
    pw = pw * w;
  }
  return out;
}

}  // namespace hida
