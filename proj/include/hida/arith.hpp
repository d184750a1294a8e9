// p-adic numbers with tracked precision and truncated Iwasawa-algebra series.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hida {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

enum class ErrorKind { Validation, Numerical, Fixture };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

// ---- plain modular helpers (modulus < 2^62) ----
inline u64 mulmod(u64 a, u64 b, u64 m) { return (u64)((u128)a * b % m); }
inline u64 addmod(u64 a, u64 b, u64 m) {
  u64 s = a + b;
  return s >= m ? s - m : s;
}
inline u64 submod(u64 a, u64 b, u64 m) { return a >= b ? a - b : a + m - b; }
inline u64 negmod(u64 a, u64 m) { return a == 0 ? 0 : m - a; }
u64 powmod(u64 a, u64 e, u64 m);
u64 invmod(u64 a, u64 m);  // a must be coprime to m
u64 reduce_signed(i64 a, u64 m);
i64 centered(u64 a, u64 m);
bool is_prime(u64 n);
int vp_int(i64 x, u64 p);  // valuation of a nonzero integer

// ---- context ----
class PadicNum;

class PadicContext {
 public:
  // Shared per-prime context; cap is the largest e with p^e < 2^62.
  static const PadicContext& get(u64 p);

  u64 p;
  int cap;
  u64 pow(int e) const;  // p^e, 0 <= e <= cap
  const PadicNum& log_gamma() const;
  // c_p = (p-2)/(p-1)
  i64 cp_num() const { return (i64)p - 2; }
  i64 cp_den() const { return (i64)p - 1; }

  explicit PadicContext(u64 prime);
  ~PadicContext();

 private:
  std::vector<u64> pw_;
  PadicNum* log_gamma_;
};

// Element of Q_p as p^valuation * unit, unit known modulo p^rel_prec.
// A zero known modulo p^a has rel_prec 0 and valuation a.
class PadicNum {
 public:
  static constexpr int kInf = 1 << 24;

  PadicNum() = default;
  explicit PadicNum(u64 p) : p_(p) {}

  static PadicNum zero(u64 p, int abs_prec = kInf);
  static PadicNum from_int(u64 p, i64 x);
  static PadicNum from_residue(u64 p, u64 x, int abs_prec);
  static PadicNum from_unit(u64 p, int val, u64 unit, int rel_prec);
  static PadicNum from_rational(u64 p, const std::string& num,
                                const std::string& den);

  u64 prime() const { return p_; }
  bool is_zero() const { return rp_ == 0; }
  int valuation() const { return v_; }
  int rel_prec() const { return rp_; }
  int abs_prec() const { return rp_ == 0 ? v_ : v_ + rp_; }
  u64 unit() const { return u_; }

  PadicNum operator+(const PadicNum& o) const;
  PadicNum operator-(const PadicNum& o) const;
  PadicNum operator-() const;
  PadicNum operator*(const PadicNum& o) const;
  PadicNum operator/(const PadicNum& o) const;
  PadicNum inverse() const;
  PadicNum pow(i64 e) const;
  PadicNum shift(int k) const;  // multiply by p^k
  PadicNum with_abs_prec(int a) const;  // lower the claimed precision

  // Residue mod p^n of an integral number; throws if v < 0 or abs_prec < n.
  u64 residue(int n) const;
  // Same, but only requires v >= 0; digits above abs_prec are zero.
  u64 residue_trunc(int n) const;
  // True if the difference is zero at the common precision.
  bool equals(const PadicNum& o) const { return (*this - o).is_zero(); }
  // Base-p digits of an integral value, least significant first.
  std::vector<int> digits(int n) const;
  std::string str(int n = -1) const;

 private:
  u64 p_ = 0;
  int v_ = kInf;
  int rp_ = 0;
  u64 u_ = 0;
  static PadicNum normalize(u64 p, int v, u64 x, int abs_prec);
};

PadicNum teichmuller(u64 a, u64 p);
PadicNum padic_log(const PadicNum& x);  // x a 1-unit
PadicNum padic_exp(const PadicNum& x);  // v(x) > 1/(p-1)
PadicNum bernoulli(int n, u64 p);       // b_1 = -1/2
std::string bernoulli_rational(int n);

// Power series with PadicNum coefficients (variable is context-dependent).
using QpSeries = std::vector<PadicNum>;
QpSeries qp_mul(const QpSeries& a, const QpSeries& b, std::size_t n);
QpSeries qp_add(const QpSeries& a, const QpSeries& b);
QpSeries qp_scale(const QpSeries& a, const PadicNum& c);
QpSeries qp_compose(const QpSeries& a, const QpSeries& b, std::size_t n);
QpSeries qp_derivative(const QpSeries& a);
PadicNum qp_eval(const QpSeries& a, const PadicNum& x);

// log_p(u)/log_p(gamma) truncated to degree < n; u(0) must be a 1-unit.
QpSeries log_gamma_series(const QpSeries& u, std::size_t n);

// Element of Z_p[[w]]/(p^M, w^L).
class TruncSeries {
 public:
  TruncSeries() = default;
  TruncSeries(u64 p, int M, int L);
  static TruncSeries constant(u64 p, int M, int L, i64 c);
  static TruncSeries from_qp(const QpSeries& s, int M, int L);

  u64 prime() const { return p_; }
  int M() const { return M_; }
  int L() const { return (int)c_.size(); }
  u64 modulus() const { return mod_; }
  u64 operator[](int n) const { return c_[n]; }
  u64& operator[](int n) { return c_[n]; }
  const std::vector<u64>& coeffs() const { return c_; }
  PadicNum coeff(int n) const;

  TruncSeries operator+(const TruncSeries& o) const;
  TruncSeries operator-(const TruncSeries& o) const;
  TruncSeries operator-() const;
  TruncSeries operator*(const TruncSeries& o) const;
  TruncSeries scaled(u64 c) const;
  bool operator==(const TruncSeries& o) const;
  bool operator!=(const TruncSeries& o) const { return !(*this == o); }

  bool is_zero() const;
  int valuation() const;  // min coefficient valuation, M if zero
  bool is_unit() const { return c_[0] % p_ != 0; }
  TruncSeries reduced(int M, int L) const;
  TruncSeries div_p(int k) const;  // exact division; precision drops by k
  TruncSeries div_w() const;       // exact division; L drops by one
  TruncSeries derivative() const;  // d/dw, L drops by one
  u64 eval_residue(u64 w0) const;  // Sum c_n w0^n mod p^M
  PadicNum eval(const PadicNum& w0) const;
  // True when v_p(coefficient of w^n) >= n wherever that is decidable.
  bool iwasawa_extendable() const;
  QpSeries to_qp() const;
  std::string str() const;

 private:
  u64 p_ = 0;
  int M_ = 0;
  u64 mod_ = 1;
  std::vector<u64> c_;
  friend TruncSeries invert(const TruncSeries& f);
};

TruncSeries invert(const TruncSeries& f);

struct WeierstrassData {
  int mu = 0;
  int lambda = 0;
  bool certified = false;
  QpSeries distinguished;  // monic of degree lambda
  QpSeries unit;
};

WeierstrassData weierstrass_prep(const QpSeries& f);
PadicNum newton_root(const QpSeries& f, const PadicNum& x0);

// Coefficients of w(k) = ((1+p)^k - 1)/p as a series in k, degree < n.
QpSeries weight_series(u64 p, std::size_t n, int prec);
// A(w) -> a(k) = A(((1+p)^k - 1)/p), mod (p^M, k^L).
TruncSeries substitute_weight(const TruncSeries& A);

// Pretty "a0 + a1 p + ..." form for a PadicNum (digits in 0..p-1).
std::string padic_pretty(const PadicNum& x, int n);

}  // namespace hida
