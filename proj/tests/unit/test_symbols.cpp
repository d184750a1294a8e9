#include "doctest.h"
#include "hida/symbols.hpp"

#include <numeric>
#include <random>
#include <sstream>

using namespace hida;

namespace {
Mat2 random_gamma0(std::mt19937_64& rng, i64 level) {
  for (;;) {
    i64 c = level * ((i64)(rng() % 7) - 3);
    i64 d = (i64)(rng() % 41) - 20;
    if (d == 0 || std::gcd(c, d) != 1) continue;
    // a d - b c = 1
    i64 a = 0, b = 0;
    for (a = -60; a <= 60; ++a) {
      i64 num = a * d - 1;
      if (c == 0) {
        if (a * d == 1) break;
        continue;
      }
      if (num % c == 0) {
        b = num / c;
        break;
      }
    }
    if (a > 60) continue;
    Mat2 g{a, b, c, d};
    if (g.det() == 1) return g;
  }
}

FamilySymbol quick_symbol(u64 N, u64 p, int M, int L, u64 seed) {
  return random_symbol(solve_manin(N, p), PrecisionProfile(p, M, L), 0, seed);
}
}  // namespace

TEST_CASE("continued fraction paths telescope") {
  std::mt19937_64 rng(1);
  for (int it = 0; it < 200; ++it) {
    i64 x = (i64)(rng() % 2001) - 1000, y = 1 + (i64)(rng() % 500);
    Cusp c = Cusp::make(x, y);
    auto path = cf_path(c);
    REQUIRE(!path.empty());
    CHECK(path.front() * Cusp::make(0, 1) == Cusp::inf());
    CHECK(path.back() * Cusp::inf() == c);
    for (std::size_t k = 0; k < path.size(); ++k) {
      CHECK(path[k].det() == 1);
      if (k + 1 < path.size()) CHECK(path[k] * Cusp::inf() == path[k + 1] * Cusp::make(0, 1));
    }
  }
  CHECK(cf_path(Cusp::inf()).empty());
}

TEST_CASE("coset counts and torsion") {
  CHECK(solve_manin(1, 11)->index() == 12);
  CHECK(solve_manin(11, 5)->index() == 72);
  CHECK(solve_manin(5, 11)->index() == 72);
  auto m37 = solve_manin(1, 37);
  CHECK(m37->index() == 38);
  CHECK(m37->num_torsion(2) == 2);
  CHECK(m37->num_torsion(3) == 2);
  auto m11 = solve_manin(1, 11);
  CHECK(m11->num_torsion(2) == 0);
  CHECK(m11->num_torsion(3) == 0);
  CHECK(m11->num_generators() == 3);
  // Gamma_0(5): genus 0, two cusps, two elliptic points of order 2
  CHECK(solve_manin(1, 5)->num_generators() == 3);
  CHECK(solve_manin(1, 5)->num_torsion(2) == 2);
  // Gamma_0(95): genus 9, four cusps
  CHECK(solve_manin(19, 5)->num_generators() == 21);
  CHECK_THROWS_AS(solve_manin(5, 5), Error);
  CHECK_THROWS_AS(solve_manin(1, 4), Error);
}

TEST_CASE("random symbols satisfy every relation") {
  struct Case {
    u64 N, p;
    int m;
  };
  for (Case c : {Case{1, 5, 0}, Case{1, 11, 0}, Case{3, 5, 0}, Case{1, 37, 0}, Case{11, 3, 0},
                 Case{1, 7, 2}, Case{1, 37, 30}, Case{19, 5, 0}}) {
    auto md = solve_manin(c.N, c.p);
    PrecisionProfile P(c.p, 5, 4);
    auto phi = random_symbol(md, P, c.m, 17);
    CHECK(phi.profile == P);
    CHECK(relations_hold(phi));
    CHECK(!phi.is_zero());
  }
}

TEST_CASE("random symbol determinism and zero input") {
  auto a = quick_symbol(1, 11, 6, 5, 3), b = quick_symbol(1, 11, 6, 5, 3);
  CHECK(a == b);
  auto c = quick_symbol(1, 11, 6, 5, 4);
  CHECK(!(a == c));
  auto md = solve_manin(1, 11);
  PrecisionProfile P(11, 6, 5);
  PrecisionProfile W = assemble_working_profile(*md, P, 0);
  std::vector<FamilyDistribution> fv(md->num_generators() - 1, FamilyDistribution(W));
  CHECK(assemble_symbol(md, P, 0, fv).is_zero());
  CHECK_THROWS_AS(random_symbol(md, P, 1, 1), Error);
}

TEST_CASE("evaluation is equivariant and additive") {
  std::mt19937_64 rng(5);
  for (auto [N, p] : {std::pair<u64, u64>{1, 11}, {3, 5}, {1, 37}}) {
    auto phi = quick_symbol(N, p, 5, 4, 99);
    const auto& md = *phi.manin;
    for (int i = 0; i < md.num_generators(); ++i) {
      auto [a, b] = md.generator_divisor(i);
      CHECK(eval_at_divisor(phi, a, b) == phi.values[i]);
    }
    for (int it = 0; it < 10; ++it) {
      int i = (int)(rng() % md.num_generators());
      auto [a, b] = md.generator_divisor(i);
      Mat2 g = random_gamma0(rng, (i64)md.level());
      auto lhs = eval_at_divisor(phi, g * a, g * b);
      auto rhs = act(phi.values[i], g.inverse(), phi.m);
      CHECK(lhs == rhs);
    }
    for (int it = 0; it < 5; ++it) {
      Cusp x = Cusp::make((i64)(rng() % 200) - 100, 1 + (i64)(rng() % 50));
      Cusp y = Cusp::make((i64)(rng() % 200) - 100, 1 + (i64)(rng() % 50));
      Cusp z = Cusp::make((i64)(rng() % 200) - 100, 1 + (i64)(rng() % 50));
      CHECK(eval_at_divisor(phi, x, y) + eval_at_divisor(phi, y, z) == eval_at_divisor(phi, x, z));
    }
    // {inf} - {0} under Delta
    auto x0 = eval_at_divisor(phi, Cusp::inf(), Cusp::make(0, 1));
    auto r = eval_at_divisor(phi, Cusp::make(0, 1), Cusp::make(1, 1));
    CHECK(act(x0, Mat2{1, 1, 0, 1}, 0) - x0 == -act(r, Mat2{1, 1, 0, 1}, 0));
  }
}

TEST_CASE("sign projection") {
  auto phi = quick_symbol(1, 11, 5, 4, 7);
  auto plus = sign_project(phi, 1), minus = sign_project(phi, -1);
  CHECK(plus + minus == phi);
  CHECK(sign_project(plus, 1) == plus);
  CHECK(sign_project(minus, -1) == minus);
  CHECK(sign_project(plus, -1).is_zero());
  CHECK(relations_hold(plus));
  CHECK(apply_iota(apply_iota(phi)) == phi);
}

TEST_CASE("serialization") {
  auto phi = quick_symbol(3, 5, 6, 5, 11);
  std::stringstream ss;
  serialize(phi, ss);
  std::string bytes = ss.str();
  std::istringstream in(bytes);
  auto back = deserialize(in);
  CHECK(back == phi);
  CHECK(back.seed == phi.seed);
  CHECK(back.m_scale == phi.m_scale);
  std::istringstream cut(bytes.substr(0, bytes.size() - 20));
  CHECK_THROWS_AS(deserialize(cut), Error);
  std::string flipped = bytes;
  flipped[40] ^= 1;
  std::istringstream bad(flipped);
  CHECK_THROWS_AS(deserialize(bad), Error);

  std::vector<Mat2> Up;
  for (i64 a = 0; a < 5; ++a) Up.push_back({1, a, 0, 5});
  SymbolOperator U(phi.manin, phi.profile, 0, Up);
  CHECK(U.apply(back) == U.apply(phi));
  CHECK(relations_hold(U.apply(phi)));
}
