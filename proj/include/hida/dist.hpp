// Family distributions modulo the sloped filtration, and the S_0(p) action.
#pragma once

#include <memory>
#include <vector>

#include "hida/arith.hpp"

namespace hida {

struct Mat2 {
  i64 a = 1, b = 0, c = 0, d = 1;
  Mat2 operator*(const Mat2& o) const;  // throws on overflow
  Mat2 operator-() const { return {-a, -b, -c, -d}; }
  bool operator==(const Mat2& o) const = default;
  i64 det() const;
  Mat2 adjugate() const { return {d, -b, -c, a}; }
  Mat2 inverse() const;  // det must be +-1
};

struct PrecisionProfile {
  u64 p = 0;
  int M = 0;
  int L = 0;

  PrecisionProfile() = default;
  PrecisionProfile(u64 p_, int M_, int L_) : p(p_), M(M_), L(L_) {}
  int prec(int j) const;
  int J() const;
  PrecisionProfile lowered(int dM) const { return {p, M - dM, L}; }
  bool operator==(const PrecisionProfile& o) const = default;
};

class FamilyDistribution {
 public:
  FamilyDistribution() = default;
  explicit FamilyDistribution(const PrecisionProfile& prof);

  const PrecisionProfile& profile() const { return prof_; }
  int J() const { return J_; }
  int L() const { return prof_.L; }
  int denom_shift = 0;

  u64* moment(int j) { return &m_[(std::size_t)j * prof_.L]; }
  const u64* moment(int j) const { return &m_[(std::size_t)j * prof_.L]; }
  u64 modulus(int j) const { return mods_[j]; }
  TruncSeries moment_series(int j) const;
  void set_moment(int j, const TruncSeries& s);
  const std::vector<u64>& raw() const { return m_; }
  std::vector<u64>& raw() { return m_; }

  void normalize();
  FamilyDistribution operator+(const FamilyDistribution& o) const;
  FamilyDistribution operator-(const FamilyDistribution& o) const;
  FamilyDistribution operator-() const;
  FamilyDistribution scaled(u64 c) const;
  FamilyDistribution times(const TruncSeries& f) const;
  bool operator==(const FamilyDistribution& o) const;
  bool is_zero() const;
  // Largest e <= cap_e with every moment divisible by p^min(e, prec(j)).
  int common_p_power(int cap_e) const;
  FamilyDistribution div_p(int e) const;  // profile drops by e
  FamilyDistribution reduced(const PrecisionProfile& to) const;

 private:
  PrecisionProfile prof_;
  int J_ = 0;
  std::vector<u64> mods_;
  std::vector<u64> m_;
};

// Truncation of K_{a,c,m}(z,w): t[i*L + n] is the z^i w^n coefficient mod p^M.
struct BivarSeries {
  u64 p = 0;
  int M = 0, J = 0, L = 0;
  std::vector<u64> t;
  bool slope_certified = false;
  u64 at(int i, int n) const { return t[(std::size_t)i * L + n]; }
};

std::shared_ptr<const BivarSeries> automorphy_factor(u64 a, u64 c, int m,
                                                     const PrecisionProfile& prof);
// K at w = ((1+p)^k - 1)/p as a z-series, degree i known to precision[i].
struct ZSeries {
  std::vector<u64> coeff;
  std::vector<int> precision;
};
ZSeries specialize_factor(const BivarSeries& K, int k, int m);
// Lower bound on v_p of every dropped w^n term (n >= L) of K at weight k.
int factor_tail_precision(u64 p, int L);

// Linear map mu -> mu|g on moment vectors: entry (j,i) is a Lambda element.
class ActionMatrix {
 public:
  ActionMatrix() = default;
  ActionMatrix(const PrecisionProfile& prof);
  int J() const { return J_; }
  int L() const { return L_; }
  u64* entry(int j, int i) { return &A_[((std::size_t)j * J_ + i) * L_]; }
  const u64* entry(int j, int i) const { return &A_[((std::size_t)j * J_ + i) * L_]; }
  u64 mod() const { return mod_; }
  void add_scaled(const ActionMatrix& o, i64 c);
  void add_product(const ActionMatrix& X, const ActionMatrix& Y, i64 c);  // += c * (X then Y)
  bool is_zero() const;
  std::vector<u64>& raw() { return A_; }
  const std::vector<u64>& raw() const { return A_; }

 private:
  int J_ = 0, L_ = 0;
  u64 mod_ = 1;
  std::vector<u64> A_;
};

bool in_S0p(const Mat2& g, u64 p);
ActionMatrix action_matrix(const Mat2& g, int m, const PrecisionProfile& prof);
// out += A * mu (moments reduced at the end by the caller through normalize()).
void apply_accumulate(const ActionMatrix& A, const FamilyDistribution& mu,
                      FamilyDistribution& out);
FamilyDistribution apply(const ActionMatrix& A, const FamilyDistribution& mu);
FamilyDistribution act(const FamilyDistribution& mu, const Mat2& g, int m);

// Classical weight-k action on truncated moments mod p^M.
std::vector<u64> act_weight_k(const std::vector<u64>& moments, const Mat2& g, int k,
                              u64 p, int M);

int difference_scale(u64 p, int M);
struct DifferenceSolution {
  FamilyDistribution mu;
  int m_scale = 0;
};
DifferenceSolution solve_difference(const FamilyDistribution& nu);

FamilyDistribution random_distribution(const PrecisionProfile& prof, u64 seed);

}  // namespace hida
