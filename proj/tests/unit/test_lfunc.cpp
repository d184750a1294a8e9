#include "doctest.h"
#include "hida/lfunc.hpp"
#include "hida/parallel.hpp"

#include <random>

using namespace hida;

namespace {
PadicNum P(u64 p, i64 x) { return PadicNum::from_int(p, x); }

FamilySymbol eisenstein(int M, int L) {
  BasisOptions opt;
  opt.target_rank = 1;
  opt.seed = 4;
  return build_basis(solve_manin(1, 5), PrecisionProfile(5, M, L), 0, opt)[0];
}
}  // namespace

TEST_CASE("c_j^(n) coefficients") {
  for (u64 p : {3ULL, 5ULL, 7ULL}) {
    const auto& C = PadicContext::get(p);
    auto c0 = cjn_coefficients(0, 6, p, 10);
    CHECK(c0[0].equals(P(p, 1)));
    for (int j = 1; j <= 6; ++j) CHECK(c0[j].is_zero());
    auto c1 = cjn_coefficients(1, 6, p, 10);
    CHECK(c1[0].is_zero());
    CHECK((c1[1] - C.log_gamma().inverse()).valuation() >= 8);
    for (int n = 1; n <= 6; ++n) {
      auto c = cjn_coefficients(n, 12, p, 12);
      CHECK(c[0].is_zero());
      for (int j = 1; j <= 12; ++j) {
        if (c[j].is_zero()) continue;
        int vf = 0;
        for (i64 q = (i64)p; q <= n; q *= (i64)p) vf += (int)(n / q);
        CHECK(c[j].valuation() + j >= j - n - vf - j / (int)p);
      }
    }
  }
}

TEST_CASE("Eisenstein eigenvalues match 1 + l^(k+1)") {
  const int M = 6, L = 5;
  auto phi = eisenstein(M, L);
  for (u64 l : {2ULL, 3ULL, 7ULL}) {
    TruncSeries chi = weight_character(l, 5, 0, M, L);
    CHECK(chi[0] == l);
    auto A = eigenvalue(phi, HeckeOp{'T', l});
    CHECK(A == TruncSeries::constant(5, M, L, 1) + chi);
  }
  auto pk = q_expansion(phi, 11);
  CHECK(pk.eigenvalues.at(5) == TruncSeries::constant(5, M, L, 1));
  for (auto& [l, ok] : pk.iwasawa) CHECK(ok);
  auto a = qexp_coefficients(pk, 12);
  TruncSeries c2 = weight_character(2, 5, 0, M, L), c3 = weight_character(3, 5, 0, M, L);
  TruncSeries one = TruncSeries::constant(5, M, L, 1);
  CHECK(a[4] == one + c2 + c2 * c2);
  CHECK(a[6] == a[2] * a[3]);
  CHECK(a[9] == one + c3 + c3 * c3);
  CHECK(a[10] == a[2]);
  CHECK(a[12] == a[4] * a[3]);
}

TEST_CASE("eigenvalue rejects non-eigensymbols") {
  auto md = solve_manin(1, 11);
  auto phi = random_symbol(md, PrecisionProfile(11, 4, 3), 0, 5);
  CHECK_THROWS_AS(eigenvalue(phi, HeckeOp{'T', 2}), Error);
}

TEST_CASE("L-invariant of a series in k") {
  const u64 p = 7;
  const int M = 8, L = 6;
  const u64 mod = PadicContext::get(p).pow(M);
  TruncSeries a(p, M, L);
  a[0] = 1;
  a[1] = p;
  // -2 a'(0) / a(0) = -2p
  PadicNum l0 = l_invariant(a, 0);
  CHECK((l0 - P(p, -2 * (i64)p)).valuation() >= l0.abs_prec());
  // scaling by a unit leaves it unchanged
  std::mt19937_64 rng(2);
  for (int t = 0; t < 5; ++t) {
    TruncSeries b(p, M, L);
    for (int n = 0; n < L; ++n) b[n] = (rng() % (mod / p)) * (n == 0 ? 1 : p);
    b[0] = (b[0] * p + 1) % mod;
    u64 u = (rng() % (mod / p)) * p + 3;
    PadicNum x = l_invariant(b, 0), y = l_invariant(b.scaled(u % mod), 0);
    CHECK((x - y).valuation() >= std::min(x.abs_prec(), y.abs_prec()));
  }
  TruncSeries nonunit(p, M, L);
  nonunit[0] = p;
  CHECK_THROWS_AS(l_invariant(nonunit, 0), Error);
}

TEST_CASE("division by k - 2s") {
  const u64 p = 5;
  const int deg = 6;
  std::mt19937_64 rng(7);
  KSSeries G;
  G.p = p;
  G.deg = deg - 1;
  G.c.assign(deg - 1, std::vector<PadicNum>(deg - 1, PadicNum::zero(p)));
  for (int i = 0; i < deg - 1; ++i)
    for (int j = 0; i + j < deg - 1; ++j) G.c[i][j] = P(p, (i64)(rng() % 10000));
  KSSeries F;
  F.p = p;
  F.deg = deg;
  F.c.assign(deg, std::vector<PadicNum>(deg, PadicNum::zero(p)));
  for (int i = 0; i < deg - 1; ++i)
    for (int j = 0; i + j < deg - 1; ++j) {
      F.c[i + 1][j] = F.c[i + 1][j] + G.c[i][j];
      F.c[i][j + 1] = F.c[i][j + 1] - P(p, 2) * G.c[i][j];
    }
  KSSeries R;
  KSSeries Q = divide_k_minus_2s(F, &R);
  for (int i = 0; i < deg - 1; ++i)
    for (int j = 0; i + j < deg - 1; ++j) CHECK(Q.c[i][j].equals(G.c[i][j]));
  for (auto& row : R.c)
    for (auto& x : row) CHECK(x.is_zero());
  F.c[0][3] = F.c[0][3] + P(p, 1);
  divide_k_minus_2s(F, &R);
  CHECK(!R.c[0][3].is_zero());
}

TEST_CASE("discriminant of a Hecke polynomial") {
  const u64 p = 5;
  const int M = 6, L = 5;
  // (x - a)^2: discriminant vanishes
  TruncSeries a(p, M, L);
  a[0] = 3;
  a[1] = 7;
  TruncSeries one = TruncSeries::constant(p, M, L, 1);
  auto rep = discriminant_analysis({a * a, -(a + a), one});
  CHECK(rep.zero);
  // x^2 - p^2 w^2: discriminant 4 W^2 has a double root at 0
  TruncSeries c0(p, M, L);
  c0[2] = PadicContext::get(p).pow(M) - 25;
  auto r2 = discriminant_analysis({c0, TruncSeries(p, M, L), one});
  CHECK(!r2.zero);
  CHECK(r2.wd.mu == 0);
  CHECK(r2.wd.lambda == 2);
  CHECK(r2.double_root);
  CHECK(r2.square_times_unit);
  REQUIRE(r2.root.has_value());
  CHECK(r2.root->valuation() >= 2);
  // x^2 - 2x + (1 - W): discriminant 4W, simple root at 0
  TruncSeries c1(p, M, L);
  c1[0] = 1;
  c1[1] = PadicContext::get(p).pow(M) - p;
  auto r3 = discriminant_analysis({c1, -(one + one), one});
  CHECK(r3.wd.lambda == 1);
  REQUIRE(r3.root.has_value());
  CHECK(r3.root->valuation() >= 4);
}

TEST_CASE("two-variable L is stable under precision changes") {
  auto lo = eisenstein(5, 4), hi = eisenstein(7, 4);
  TruncSeries one_lo = TruncSeries::constant(5, 5, 4, 1), one_hi = TruncSeries::constant(5, 7, 4, 1);
  auto Flo = two_var_L(lo, one_lo, 4), Fhi = two_var_L(hi, one_hi, 4);
  REQUIRE(!Flo.a.empty());
  CHECK(Flo.norm_p == Fhi.norm_p);
  CHECK(Flo.norm_w == Fhi.norm_w);
  for (std::size_t n = 0; n < Flo.a.size() && n < Fhi.a.size(); ++n) {
    int e = std::min(Flo.error_prec[n], Fhi.error_prec[n]);
    if (e <= 0) continue;
    int Lm = std::min(Flo.a[n].L(), Fhi.a[n].L());
    CHECK(Flo.a[n].reduced(e, Lm) == Fhi.a[n].reduced(e, Lm));
  }
  CHECK(Fhi.error_prec[0] >= Flo.error_prec[0]);
}

namespace {
FamilySymbol plus_11(int M, int L) {
  BasisOptions opt;
  opt.target_rank = 1;
  opt.ordinary_rank = 2;
  opt.sign = 1;
  opt.seed = 3;
  opt.spec = parse_killers("T2:-3,1");
  return build_basis(solve_manin(1, 11), PrecisionProfile(11, M, L), 0, opt)[0];
}

void check_same(const TwoVarL& x, const TwoVarL& y, int* compared) {
  CHECK(x.norm_p == y.norm_p);
  CHECK(x.norm_w == y.norm_w);
  for (std::size_t n = 0; n < x.a.size() && n < y.a.size(); ++n) {
    int e = std::min(x.error_prec[n], y.error_prec[n]);
    if (e <= 0) continue;
    int Lm = std::min(x.a[n].L(), y.a[n].L());
    CHECK(x.a[n].reduced(e, Lm) == y.a[n].reduced(e, Lm));
    ++*compared;
  }
}
}  // namespace

TEST_CASE("two-variable L: two more moments change nothing") {
  auto phi = plus_11(6, 5);
  auto alpha = eigenvalue(phi, HeckeOp{'U', 11});
  const int J = phi.profile.J();
  int compared = 0;
  for (int jm : {J - 5, J - 3}) {
    auto a = two_var_L(phi, alpha, 5, jm), b = two_var_L(phi, alpha, 5, jm + 2);
    check_same(a, b, &compared);
  }
  CHECK(compared > 0);
}

TEST_CASE("two-variable L at k = 0 matches the weight-2 specialization") {
  auto phi = plus_11(6, 5);
  auto alpha = eigenvalue(phi, HeckeOp{'U', 11});
  auto fam = two_var_L(phi, alpha, 5);
  // specialize first: w-precision 1 keeps the value at w = 0
  PrecisionProfile P0(11, 6, 1);
  auto fixed = two_var_L(phi.reduced(P0), alpha.reduced(6, 1), 5);
  // each side is normalized by its own unit, so compare up to a unit
  const std::size_t n = std::min(fam.a.size(), fixed.a.size());
  REQUIRE(n >= 3);
  std::vector<PadicNum> f, o;
  for (std::size_t i = 0; i < n; ++i) {
    f.push_back(fam.a[i].coeff(0).with_abs_prec(fam.error_prec[i]));
    o.push_back(fixed.a[i].coeff(0).with_abs_prec(fixed.error_prec[i]));
  }
  int vf = PadicNum::kInf, vo = PadicNum::kInf;
  for (std::size_t i = 0; i < n; ++i) {
    if (!f[i].is_zero()) vf = std::min(vf, f[i].valuation());
    if (!o[i].is_zero()) vo = std::min(vo, o[i].valuation());
  }
  CHECK(vf < 4);
  CHECK(vf == vo);
  int checked = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      PadicNum d = f[i] * o[j] - f[j] * o[i];
      CHECK(d.is_zero());
      ++checked;
    }
  CHECK(checked >= 3);
}

TEST_CASE("two-variable L does not depend on the thread count") {
  auto phi = plus_11(5, 4);
  auto alpha = eigenvalue(phi, HeckeOp{'U', 11});
  set_threads(1);
  auto a = two_var_L(phi, alpha, 4);
  set_threads(4);
  auto b = two_var_L(phi, alpha, 4);
  set_threads(1);
  REQUIRE(a.a.size() == b.a.size());
  for (std::size_t n = 0; n < a.a.size(); ++n) {
    CHECK(a.a[n] == b.a[n]);
    CHECK(a.error_prec[n] == b.error_prec[n]);
  }
}
