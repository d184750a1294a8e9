// Eigenvalue series, q-expansions, L-invariants, two-variable p-adic
// L-functions and discriminants of Hecke polynomials.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hida/hecke.hpp"

namespace hida {

// The A with alpha(phi|T) = A alpha(phi). Throws when phi is not an eigensymbol.
TruncSeries eigenvalue(const FamilySymbol& phi, const HeckeOp& op, int* certified = nullptr);

struct EigenPacket {
  FamilySymbol symbol;
  std::map<u64, TruncSeries> eigenvalues;        // A_l(w)
  std::map<u64, TruncSeries> weight_expansions;  // a_l(k)
  std::map<u64, bool> iwasawa;                   // A_l in Z_p[[pw]]
  int certified = 0;
};
EigenPacket q_expansion(const FamilySymbol& phi, u64 prime_bound);
// a_n(w) for 1 <= n <= nmax from the prime eigenvalues via the Hecke recurrence.
std::vector<TruncSeries> qexp_coefficients(const EigenPacket& pk, int nmax);
// l^{k+1} on the branch of phi as a function of w.
TruncSeries weight_character(u64 ell, u64 p, int m, int M, int L);

// -2 a'(k0)/a(k0) for a series a in k.
PadicNum l_invariant(const TruncSeries& a_k, i64 k0);

struct AdjointReport {
  TruncSeries series_k;  // -2 d/dk log a(k), mod (p^M, k^(L-1))
  QpSeries series_W;     // same function in W = (1+p)^k - 1
  WeierstrassData wd;
  std::optional<PadicNum> root_W;
  std::optional<PadicNum> root_k;
};
AdjointReport adjoint_l_invariant_family(const TruncSeries& A_w);

// c_j^(n) for 0 <= j <= j_max: binom(log_gamma(1+y), n) = sum c_j y^j.
std::vector<PadicNum> cjn_coefficients(int n, int j_max, u64 p, int prec);

struct TwoVarL {
  u64 p = 0;
  std::vector<TruncSeries> a;  // F(T, w) = sum a[n](w) T^n, normalized
  std::vector<int> error_prec; // certified p-precision of a[n]
  std::vector<int> j_used;
  int norm_p = 0, norm_w = 0;  // first nonzero coefficient is p^norm_p w^norm_w (unit)
  bool norm_exact = true;      // lower w-terms of that coefficient vanished
};
// j_max < 0 uses every moment the profile carries.
TwoVarL two_var_L(const FamilySymbol& phi, const TruncSeries& alpha_p, int n_max, int j_max = -1);

// Coefficients of F in the variables (k, s) with w = ((1+p)^k - 1)/p and
// T = (1+p)^s - 1; entry [i][j] is the coefficient of k^i s^j, i + j < deg.
struct KSSeries {
  u64 p = 0;
  int deg = 0;
  std::vector<std::vector<PadicNum>> c;
  PadicNum at(int i, int j) const { return c[i][j]; }
};
KSSeries to_ks(const TwoVarL& F, int deg);
// G with F = (k - 2s) G; residual is the part of F not explained (zero if divisible).
KSSeries divide_k_minus_2s(const KSSeries& F, KSSeries* residual = nullptr);

struct GreenbergReport {
  bool has_factor = false;  // (1+T)^2 - (1+pw) divides F to precision
  int residual_val = 0;     // valuation of F(tau(w), w)
  int check_prec = 0;
  QpSeries restriction;     // in T: F_1 or F restricted to w = ((1+T)^2-1)/p
  int order_at_zero = 0;    // T-adic order of the restriction
  bool unit = false;        // restriction / T^order is a unit
  std::string str(int pdigits = 2, int tdeg = 2) const;
};
GreenbergReport greenberg_line_check(const TwoVarL& F, int tdeg = 4);

struct DiscriminantReport {
  TruncSeries d_w;     // tr^2 - 4 det in w
  QpSeries d_W;        // in W = pw
  bool zero = false;   // discriminant vanishes to precision
  WeierstrassData wd;
  std::optional<PadicNum> root;   // simple root (lambda = 1) or visible double root
  bool double_root = false;
  bool square_times_unit = false;
  std::string str(int terms = 3) const;
};
DiscriminantReport discriminant_analysis(const std::vector<TruncSeries>& cp);

// Series in w expressed in W = pw; coefficient n has precision M - n.
QpSeries to_W(const TruncSeries& f);

}  // namespace hida
