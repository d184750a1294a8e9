#include "doctest.h"
#include "hida/arith.hpp"

#include <random>

using namespace hida;

TEST_CASE("teichmuller lifts") {
  CHECK(teichmuller(1, 5).residue(10) == 1);
  const auto& C5 = PadicContext::get(5);
  CHECK(teichmuller(4, 5).residue(C5.cap) == C5.pow(C5.cap) - 1);
  CHECK(teichmuller(2, 5).residue(2) == 7);
  for (u64 p : {3, 5, 7, 11, 37}) {
    const auto& C = PadicContext::get(p);
    for (u64 a = 1; a < p; ++a) {
      PadicNum w = teichmuller(a, p);
      CHECK(w.pow(p - 1).equals(PadicNum::from_int(p, 1)));
      CHECK(w.residue(1) == a);
      CHECK(w.abs_prec() == C.cap);
    }
  }
  CHECK_THROWS_AS(teichmuller(10, 5), Error);
}

TEST_CASE("log of gamma has valuation one") {
  for (u64 p : {3, 5, 7, 11, 37}) {
    const auto& C = PadicContext::get(p);
    CHECK(C.log_gamma().valuation() == 1);
  }
}

TEST_CASE("log_gamma_series") {
  u64 p = 5;
  const auto& C = PadicContext::get(p);
  QpSeries one{PadicNum::from_int(p, 1)};
  auto z = log_gamma_series(one, 4);
  for (auto& c : z) CHECK(c.is_zero());
  QpSeries g{PadicNum::from_int(p, 6)};
  auto l = log_gamma_series(g, 1);
  CHECK(l[0].equals(PadicNum::from_int(p, 1)));

  QpSeries u{PadicNum::from_int(p, 1), PadicNum::from_int(p, 5)};
  auto s = log_gamma_series(u, 40);
  CHECK(s[1].equals(PadicNum::from_int(p, 5) / C.log_gamma()));
  for (i64 x : {1, 2, 7, 123, 3124}) {
    PadicNum X = PadicNum::from_int(p, x);
    PadicNum direct = padic_log(PadicNum::from_int(p, 1 + 5 * x)) / C.log_gamma();
    PadicNum viaseries = qp_eval(s, X);
    CHECK((direct - viaseries).with_abs_prec(6).is_zero());
  }
  QpSeries bad{PadicNum::from_int(p, 2)};
  CHECK_THROWS_AS(log_gamma_series(bad, 3), Error);
}

TEST_CASE("bernoulli numbers") {
  CHECK(bernoulli_rational(0) == "1");
  CHECK(bernoulli_rational(1) == "-1/2");
  CHECK(bernoulli_rational(2) == "1/6");
  CHECK(bernoulli_rational(3) == "0");
  CHECK(bernoulli_rational(12) == "-691/2730");
  for (u64 p : {3, 5, 7, 11}) {
    for (int n = 0; n < 60; ++n) {
      PadicNum b = bernoulli(n, p);
      if (!b.is_zero()) CHECK(b.valuation() >= -1);
    }
  }
}

TEST_CASE("truncated series ring") {
  std::mt19937_64 rng(7);
  u64 p = 5;
  int M = 8, L = 8;
  auto rnd = [&]() {
    TruncSeries f(p, M, L);
    for (int i = 0; i < L; ++i) f[i] = rng() % f.modulus();
    return f;
  };
  for (int it = 0; it < 20; ++it) {
    auto f = rnd(), g = rnd(), h = rnd();
    CHECK((f * g) * h == f * (g * h));
    CHECK(f * (g + h) == f * g + f * h);
    CHECK(f * g == g * f);
    if (f.is_unit()) {
      auto fi = invert(f);
      CHECK(f * fi == TruncSeries::constant(p, M, L, 1));
    }
  }
  auto one = TruncSeries::constant(p, M, L, 1);
  CHECK(invert(one) == one);
  auto opw = one;
  opw[1] = 1;
  auto inv = invert(opw);
  for (int i = 0; i < L; ++i) CHECK(inv[i] == ((i % 2) ? inv.modulus() - 1 : 1));
  auto nonunit = one.scaled(5);
  CHECK_THROWS_AS(invert(nonunit), Error);
}

TEST_CASE("weierstrass preparation") {
  u64 p = 5;
  auto P = [&](i64 x) { return PadicNum::from_int(p, x); };
  QpSeries f{P(5), P(1)};
  auto wd = weierstrass_prep(f);
  CHECK(wd.mu == 0);
  CHECK(wd.lambda == 1);
  QpSeries g{P(5), P(5)};
  auto wg = weierstrass_prep(g);
  CHECK(wg.mu == 1);
  CHECK(wg.lambda == 0);

  std::mt19937_64 rng(3);
  for (int it = 0; it < 10; ++it) {
    QpSeries h(10);
    int lam = (int)(rng() % 4);
    for (int i = 0; i < 10; ++i) {
      i64 x = (i64)(rng() % 100000);
      if (i < lam) x *= 5;
      if (i == lam && x % 5 == 0) x += 1;
      h[i] = P(x).shift(1).with_abs_prec(12);
    }
    auto w = weierstrass_prep(h);
    CHECK(w.mu == 1);
    CHECK(w.lambda == lam);
    CHECK(w.certified);
    auto rec = qp_mul(w.distinguished, w.unit, 10);
    for (int i = 0; i < 10 - lam; ++i) CHECK((rec[i].shift(1) - h[i]).is_zero());
  }
  QpSeries zero{PadicNum::zero(p, 5), PadicNum::zero(p, 5)};
  CHECK_THROWS_AS(weierstrass_prep(zero), Error);
}

TEST_CASE("newton root") {
  u64 p = 5;
  auto P = [&](i64 x) { return PadicNum::from_int(p, x); };
  QpSeries f{P(-3 * 5), P(1)};
  auto r = newton_root(f, P(0));
  CHECK(r.equals(P(15)));
  // (W - 10)(1 + W + 25 W^2)
  QpSeries a{P(-10), P(1)}, b{P(1), P(1), P(25)};
  auto prod = qp_mul(a, b, 4);
  auto r2 = newton_root(prod, P(5));
  CHECK((r2 - P(10)).with_abs_prec(8).is_zero());
  QpSeries sq{P(25), P(-10), P(1)};
  CHECK_THROWS_AS(newton_root(sq, P(0)), Error);
}

TEST_CASE("substitute weight") {
  u64 p = 5;
  int M = 8, L = 10;
  const auto& C = PadicContext::get(p);
  auto one = TruncSeries::constant(p, M, L, 1);
  CHECK(substitute_weight(one) == one);
  TruncSeries w(p, M, L);
  w[1] = 1;
  auto wk = substitute_weight(w);
  CHECK(wk[0] == 0);
  PadicNum c1 = wk.coeff(1);
  CHECK(c1.valuation() == 0);
  CHECK(c1.equals((C.log_gamma() / PadicNum::from_int(p, 5)).with_abs_prec(M)));

  std::mt19937_64 rng(11);
  for (int it = 0; it < 10; ++it) {
    TruncSeries A(p, M, L);
    for (int n = 0; n < L; ++n) A[n] = n < M ? (rng() % C.pow(M - n)) * C.pow(n) : 0;
    auto a = substitute_weight(A);
    i64 k0 = (i64)(rng() % 125);
    u64 big = C.pow(M + 1);
    u64 w0 = (powmod(1 + p, k0, big) + big - 1) % big / p;
    u64 lhs = a.eval_residue((u64)k0);
    u64 rhs = A.eval_residue(w0);
    int vf = 0;
    for (int i = 1; i <= L; ++i) vf += vp_int(i, p);
    int prec = std::min(M, L - vf);
    CHECK(lhs % C.pow(prec) == rhs % C.pow(prec));
  }
}

TEST_CASE("padic arithmetic basics") {
  u64 p = 7;
  auto a = PadicNum::from_int(p, 49 * 3), b = PadicNum::from_int(p, 7);
  CHECK((a / b).equals(PadicNum::from_int(p, 21)));
  CHECK((a / b).valuation() == 1);
  auto h = PadicNum::from_rational(p, "1", "14");
  CHECK(h.valuation() == -1);
  CHECK((h * PadicNum::from_int(p, 14)).equals(PadicNum::from_int(p, 1)));
  auto z = PadicNum::from_residue(p, 49, 2);
  CHECK(z.is_zero());
  CHECK(z.abs_prec() == 2);
  CHECK(padic_pretty(PadicNum::from_int(p, 3 + 4 * 7 + 49), 5) == "3 + 4p + p^2");
}
