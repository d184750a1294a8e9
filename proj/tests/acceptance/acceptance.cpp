// Acceptance run: one PASS/FAIL line per criterion.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <unistd.h>

#include "hida/driver.hpp"

using namespace hida;

namespace {

struct Outcome {
  std::vector<std::string> failures;
  std::vector<std::string> notes;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string g_cache;

JobConfig job(u64 p, u64 N, int sign, int M, int L, const std::string& killers = "", int m = 0) {
  JobConfig c;
  c.command = "family";
  c.p = p, c.N = N, c.sign = sign, c.M = M, c.L = L, c.m = m;
  c.killer_spec = killers;
  c.cache_dir = g_cache;
  return validated(c);
}

// Runs the named fixture sections through the same path as `verify-fixtures`.
void fixtures(Outcome& out, const std::vector<std::string>& names) {
  JobConfig base;
  base.command = "verify-fixtures";
  base.cache_dir = g_cache;
  bool ok = false;
  json rep = verify_fixtures(base, &ok, names);
  std::size_t seen = 0;
  for (auto& s : rep["sections"]) {
    ++seen;
    for (auto& m : s["mismatches"]) out.failures.push_back(s["section"].get<std::string>() + ": " + m.get<std::string>());
  }
  out.expect(seen == names.size(), "missing fixture sections");
}

PadicNum P(u64 p, i64 x) { return PadicNum::from_int(p, x); }

// w = ((1+p)^k - 1)/p as a p-adic number
PadicNum weight_point(u64 p, int k) {
  PadicNum g = P(p, 1 + (i64)p).pow(k) - P(p, 1);
  return g / P(p, (i64)p);
}

// A in Z_p[[pw]]: the dropped terms past w^L have valuation at least L.
PadicNum eval_iwasawa(const TruncSeries& A, const PadicNum& w0) {
  if (!A.iwasawa_extendable()) fail(ErrorKind::Numerical, "series is not in Z_p[[pw]]");
  PadicNum r = PadicNum::zero(A.prime());
  for (int i = A.L() - 1; i >= 0; --i) r = r * w0 + A.coeff(i);
  return r.with_abs_prec(std::min(A.M(), A.L()));
}

bool agrees(const PadicNum& a, const PadicNum& b, int n) {
  if (a.abs_prec() < n || b.abs_prec() < n) return false;
  return a.residue(n) == b.residue(n);
}

// Coefficients of q prod (1 - q^n)^24 up to q^nmax.
std::vector<i64> delta_coefficients(int nmax) {
  std::vector<i64> f(nmax + 1, 0);
  f[0] = 1;
  for (int n = 1; n <= nmax; ++n)
    for (int t = 0; t < 24; ++t)
      for (int i = nmax; i >= n; --i) f[i] -= f[i - n];
  std::vector<i64> tau(nmax + 2, 0);
  for (int i = 0; i + 1 <= nmax + 1 && i <= nmax; ++i) tau[i + 1] = f[i];
  return tau;
}

// Root of x^2 - a x + c with a a unit, by x <- a - c/x.
PadicNum unit_root(const PadicNum& a, const PadicNum& c, int iters) {
  PadicNum x = a;
  for (int i = 0; i < iters; ++i) x = a - c / x;
  return x;
}

Outcome criterion1() {
  Outcome out;
  const u64 p = 5;
  Family F = run_family(job(p, 1, 0, 9, 10));
  out.expect(F.basis.size() == 1, "Eisenstein family is not rank 1");
  auto pk = q_expansion(F.basis.at(0), 7);
  const int M = 9, D = 10;
  for (u64 l : {2ULL, 3ULL, 7ULL}) {
    const TruncSeries& a = pk.weight_expansions.at(l);
    out.expect(a.M() >= M && a.L() >= D, "a_" + std::to_string(l) + " computed to too little precision");
    PadicNum om = teichmuller(l, p);
    PadicNum br = P(p, (i64)l) / om;
    PadicNum lg = padic_log(br);
    PadicNum term = om * br, fact = P(p, 1);
    for (int n = 0; n < D && n < a.L(); ++n) {
      if (n > 0) {
        term = term * lg;
        fact = fact * P(p, n);
      }
      PadicNum want = term / fact + (n == 0 ? P(p, 1) : P(p, 0));
      out.expect(want.abs_prec() >= M, "oracle precision too low");
      if (want.residue(M) != a[n] % PadicContext::get(p).pow(M))
        out.failures.push_back("a_" + std::to_string(l) + " k^" + std::to_string(n) + ": got " +
                               a.coeff(n).str(M) + ", want " + want.str(M));
    }
  }
  const TruncSeries& a5 = pk.eigenvalues.at(5);
  out.expect(a5 == TruncSeries::constant(p, a5.M(), a5.L(), 1), "U_5 eigenvalue is not the constant 1");
  return out;
}

Outcome criterion2() {
  Outcome out;
  fixtures(out, {"qexp-11-1"});
  const u64 p = 11;
  Family F = run_family(job(p, 1, -1, 11, 12));
  auto pk = q_expansion(F.basis.at(0), 11);
  // X_0(11): a_2 = -2, a_3 = -1, a_5 = 1, a_7 = -2, a_11 = 1
  const std::map<u64, i64> e11 = {{2, -2}, {3, -1}, {5, 1}, {7, -2}, {11, 1}};
  auto tau = delta_coefficients(11);
  out.expect(tau[2] == -24 && tau[3] == 252, "Delta oracle");
  PadicNum w0 = P(p, 0), w10 = weight_point(p, 10);
  for (auto [l, v] : e11) {
    const TruncSeries& A = pk.eigenvalues.at(l);
    PadicNum at0 = A.eval(w0), at10 = eval_iwasawa(A, w10);
    out.expect(agrees(at0, P(p, v), 5), "a_" + std::to_string(l) + "(0) = " + at0.str(5));
    PadicNum want = l == p ? unit_root(P(p, tau[l]), P(p, (i64)p).pow(11), 8) : P(p, tau[l]);
    out.expect(agrees(at10, want, 5), "a_" + std::to_string(l) + "(10) = " + at10.str(5) + ", want " + want.str(5));
  }
  return out;
}

Outcome criterion3() {
  Outcome out;
  fixtures(out, {"qexp-5-3"});
  const u64 p = 5;
  Family F = run_family(job(p, 3, -1, 11, 12));
  auto A5 = eigenvalue(F.basis.at(0), HeckeOp{'U', 5});
  // weight 6, level 3 newform: a_5 = 6; the family passes through its unit root
  PadicNum want = unit_root(P(p, 6), P(p, 5).pow(5), 12);
  PadicNum got = eval_iwasawa(A5, weight_point(p, 4));
  out.expect(agrees(got, want, 10), "a_5(4) = " + got.str(10) + ", want " + want.str(10));
  return out;
}

Outcome criterion4() {
  Outcome out;
  Family F = run_family(job(5, 19, -1, 7, 8, "U5:-1,0,1"));
  out.expect(F.target_rank == 1 && F.basis.size() == 1,
             "localized minus component has rank " + std::to_string(F.target_rank));
  out.expect(F.ordinary_rank > 1, "killer did not cut anything");
  fixtures(out, {"qexp-5-19"});
  return out;
}

Outcome criterion5() {
  Outcome out;
  fixtures(out, {"linv-11-1", "linv-5-3", "linv-5-95", "linv-11-1-k10", "adjoint-11-1", "adjoint-5-3",
                 "adjoint-5-19", "adjoint-5-95"});
  struct Run {
    std::string name;
    JobConfig c;
    int mu, lambda;
  };
  const std::vector<Run> runs = {
      {"F11", job(11, 1, -1, 11, 12), 1, 0},
      {"F15", job(5, 3, -1, 11, 12), 1, 0},
      {"F19", job(5, 19, -1, 7, 8, "U5:-1,0,1"), 1, 0},
      {"F95", job(5, 19, -1, 6, 7, "U5:1,1;U5:-3,1;T61:-3,1"), 1, 1},
  };
  for (auto& r : runs) {
    Family F = run_family(r.c);
    auto rep = adjoint_l_invariant_family(eigenvalue(F.basis.at(0), HeckeOp{'U', r.c.p}));
    out.expect(rep.wd.mu == r.mu && rep.wd.lambda == r.lambda,
               r.name + ": (mu, lambda) = (" + std::to_string(rep.wd.mu) + ", " + std::to_string(rep.wd.lambda) + ")");
    if (r.lambda == 1) {
      out.expect(rep.root_W.has_value(), r.name + ": no root");
      if (rep.root_W)
        out.expect(agrees(*rep.root_W, P(5, 4 * 5 + 625), 5), r.name + ": root " + rep.root_W->str(5));
    }
  }
  return out;
}

Outcome criterion6() {
  Outcome out;
  fixtures(out, {"twovar-11-1", "twovar-5-37", "twovar-7-13"});
  return out;
}

// Roots of a monic polynomial over F_p with multiplicities.
std::map<u64, int> fp_roots(std::vector<u64> f, u64 p) {
  std::map<u64, int> out;
  for (u64 r = 0; r < p; ++r) {
    for (;;) {
      if (f.size() < 2) break;
      // synthetic division by x - r
      std::vector<u64> q(f.size() - 1);
      u64 acc = 0;
      for (int i = (int)f.size() - 1; i >= 1; --i) {
        acc = (acc * r + f[i]) % p;
        q[i - 1] = acc;
      }
      if ((acc * r + f[0]) % p != 0) break;
      f = q;
      ++out[r];
    }
  }
  return out;
}

Outcome criterion7() {
  Outcome out;
  // p = 3, N = 11: the discriminants of T_l share the simple root
  {
    Family F = run_family(job(3, 11, -1, 13, 8));
    out.expect(F.basis.size() == 2, "p = 3 family has rank " + std::to_string(F.basis.size()));
    fixtures(out, {"disc-3-11"});
    std::optional<PadicNum> ref;
    for (u64 l : {2ULL, 3ULL, 5ULL, 7ULL}) {
      auto rep = discriminant_analysis(charpoly(hecke_matrix(F.basis, hecke_at(*F.md, l)).a));
      std::string tag = "d_" + std::to_string(l);
      out.expect(!rep.zero && rep.wd.lambda == 1, tag + ": lambda " + std::to_string(rep.wd.lambda));
      if (!rep.root) {
        out.failures.push_back(tag + ": no root");
        continue;
      }
      if (!ref) {
        ref = rep.root;
        continue;
      }
      int n = std::min(ref->abs_prec(), rep.root->abs_prec());
      out.expect(n >= 1 && agrees(*ref, *rep.root, n), tag + ": root " + rep.root->str(n) + " vs " + ref->str(n));
      out.notes.push_back(tag + " root agrees mod 3^" + std::to_string(n));
    }
  }
  // p = 37, N = 1, m = 30: the killer is read off the classical T_2 polynomial
  {
    const u64 p = 37;
    auto md = solve_manin(1, p);
    ClassicalSpace S(md, 30);
    auto roots = fp_roots(S.ordinary_charpoly(HeckeOp{'T', 2}, 1), p);
    std::string killers;
    for (auto [r, mult] : roots)
      if (mult == 1) killers += (killers.empty() ? "" : ";") + std::string("T2:") + std::to_string(-(i64)r) + ",1";
    out.notes.push_back("p = 37 killer " + killers);
    out.expect(killers == "T2:-14,1", "unexpected killer " + killers);
    JobConfig c = job(p, 1, 1, 7, 7, killers, 30);
    Family F = run_family(c);
    out.expect(F.basis.size() == 2, "p = 37 family has rank " + std::to_string(F.basis.size()));
    fixtures(out, {"disc-37-1"});
    auto rep = discriminant_analysis(charpoly(hecke_matrix(F.basis, hecke_at(*F.md, 2)).a));
    out.expect(rep.wd.lambda == 2, "lambda(d_2) = " + std::to_string(rep.wd.lambda));
    out.expect(rep.double_root, "no visible double root");
    if (rep.root) {
      // W = (1+p)^(-1-k_z) - 1
      PadicNum kz = P(p, 13 + 20 * 37 + 30 * 37 * 37) + P(p, 8).shift(3) + P(p, 11).shift(4);
      PadicNum e = (P(p, -1) - kz) * padic_log(P(p, 1 + (i64)p));
      PadicNum Wz = padic_exp(e) - P(p, 1);
      out.expect(agrees(*rep.root, Wz, 6), "double root " + rep.root->str(6) + " vs " + Wz.str(6));
    } else {
      out.failures.push_back("no root reported");
    }
  }
  return out;
}

Mat2 random_S0p(std::mt19937_64& rng, u64 p) {
  for (;;) {
    i64 a = (i64)(rng() % 40) - 20, b = (i64)(rng() % 40) - 20;
    i64 c = ((i64)(rng() % 10) - 5) * (i64)p, d = (i64)(rng() % 40) - 20;
    Mat2 g{a, b, c, d};
    if (in_S0p(g, p)) return g;
  }
}

// Coefficient of w^n divisible by p^n.
FamilyDistribution iwasawa_random(const PrecisionProfile& prof, std::mt19937_64& rng) {
  FamilyDistribution mu(prof);
  const auto& C = PadicContext::get(prof.p);
  for (int j = 0; j < mu.J(); ++j)
    for (int n = 0; n < prof.L; ++n) {
      u64 pn = C.pow(std::min(n, prof.prec(j)));
      mu.moment(j)[n] = (rng() % mu.modulus(j)) * pn % mu.modulus(j);
    }
  return mu;
}

Outcome criterion8() {
  Outcome out;
  const u64 p = 5;
  const PrecisionProfile P8(p, 8, 8);
  const auto& C = PadicContext::get(p);
  std::mt19937_64 rng(8);

  // automorphy factor slopes
  for (int it = 0; it < 20; ++it) {
    u64 a = 1 + rng() % 2000;
    if (a % p == 0) ++a;
    u64 c = p * (rng() % 400);
    int m = (int)(rng() % (p - 1));
    auto K = automorphy_factor(a, c, m, P8);
    out.expect(K->slope_certified, "slope certificate missing");
    for (int i = 0; i < K->J; ++i)
      for (int n = 0; n < K->L; ++n)
        if (K->at(i, n))
          out.expect(vp_int((i64)K->at(i, n), p) * (int)(p - 1) >= i * (int)(p - 2),
                     "slope bound at z^" + std::to_string(i) + " w^" + std::to_string(n));
  }

  // specialization equivariance at 5 random weights
  const int tail = factor_tail_precision(p, P8.L);
  for (int it = 0; it < 5; ++it) {
    int k = (int)(p - 1) * (int)(rng() % 30);
    Mat2 g = random_S0p(rng, p);
    auto mu = iwasawa_random(P8, rng);
    auto lhs = act(mu, g, 0);
    u64 big = C.pow(P8.M + 1), mod = C.pow(P8.M);
    u64 wk = submod(powmod(1 + p, k, big), 1, big) / p % mod;
    std::vector<u64> spec(mu.J());
    for (int j = 0; j < mu.J(); ++j) spec[j] = mu.moment_series(j).eval_residue(wk);
    auto rhs = act_weight_k(spec, g, k, p, P8.M);
    for (int j = 0; j < mu.J(); ++j) {
      u64 q = C.pow(std::min(P8.prec(j), tail));
      out.expect(lhs.moment_series(j).eval_residue(wk) % q == rhs[j] % q,
                 "weight " + std::to_string(k) + " moment " + std::to_string(j));
    }
  }

  // difference equation on 20 random inputs
  for (int it = 0; it < 20; ++it) {
    auto nu = random_distribution(P8, rng());
    for (int n = 0; n < P8.L; ++n) nu.moment(0)[n] = 0;
    auto s = solve_difference(nu);
    auto lhs = act(s.mu, Mat2{1, 1, 0, 1}, 0) - s.mu;
    auto rhs = nu.reduced(P8.lowered(1)).scaled(C.pow(s.m_scale));
    out.expect(lhs == rhs, "difference equation residual");
  }

  // Hecke commutativity on a random symbol
  auto md = solve_manin(7, p);
  auto phi = random_symbol(md, P8, 0, 17);
  for (auto [x, y] : std::vector<std::pair<HeckeOp, HeckeOp>>{{{'T', 2}, {'T', 3}}, {{'T', 2}, {'U', 5}}, {{'U', 7}, {'T', 3}}}) {
    auto a = apply_hecke(apply_hecke(phi, x), y), b = apply_hecke(apply_hecke(phi, y), x);
    out.expect(a == b, x.name() + " and " + y.name() + " do not commute");
  }

  // ordinary basis: independence, Iwasawa membership, serialization
  Family F = run_family(job(p, 7, -1, 8, 8));
  std::vector<TotalMeasureVector> tm;
  for (auto& b : F.basis) tm.push_back(total_measures(b));
  out.expect((int)F.basis.size() == F.target_rank && reduction_rank(tm) == F.target_rank,
             "basis independence certificate");
  for (u64 l : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL}) {
    auto H = hecke_matrix(F.basis, hecke_at(*md, l));
    for (auto& c : charpoly(H.a)) out.expect(c.iwasawa_extendable(), "charpoly of T_" + std::to_string(l) + " leaves Z_p[[pw]]");
  }
  for (auto& b : F.basis) {
    std::stringstream ss;
    serialize(b, ss);
    FamilySymbol back = deserialize(ss);
    back.manin = b.manin;
    out.expect(back == b && back.m_scale == b.m_scale && back.sign == b.sign, "serialization round trip");
  }
  out.notes.push_back("ordinary rank " + std::to_string(F.target_rank) + " at level 7");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  namespace fs = std::filesystem;
  g_cache = (fs::temp_directory_path() / ("hida-acceptance-" + std::to_string(::getpid()))).string();
  if (argc > 1) g_cache = argv[1];
  fs::remove_all(g_cache);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 Eisenstein closed form, p = 5", criterion1},
      {"2 X_0(11) family, p = 11", criterion2},
      {"3 level 15 family, p = 5", criterion3},
      {"4 localization at level 19, p = 5", criterion4},
      {"5 L-invariants and adjoint series", criterion5},
      {"6 two-variable L-functions", criterion6},
      {"7 discriminants at p = 3 and p = 37", criterion7},
      {"8 property suites at (5, 8, 8)", criterion8},
  };
  int failed = 0;
  for (auto& [name, fn] : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out.failures.push_back(std::string("error: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = out.failures.empty();
    failed += !ok;
    std::printf("%s criterion %s (%.1fs)\n", ok ? "PASS" : "FAIL", name.c_str(), secs);
    for (auto& n : out.notes) std::printf("     %s\n", n.c_str());
    for (std::size_t i = 0; i < out.failures.size() && i < 20; ++i) std::printf("     - %s\n", out.failures[i].c_str());
    std::fflush(stdout);
  }
  fs::remove_all(g_cache);
  return failed ? 1 : 0;
}
