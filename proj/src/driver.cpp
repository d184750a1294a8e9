#include "hida/driver.hpp"
#include "hida/parallel.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>

namespace hida {

const std::vector<std::string> kCommands = {"manin", "family",  "charpoly", "qexp",           "linv",
                                            "adjoint-linv", "twovarL", "hida-disc", "verify-fixtures"};

namespace {

struct Preset {
  u64 p, N;
  const char* command;  // nullptr matches any command
  int M, L;
  u64 bound;
};

// Working precisions of the reference runs.
const Preset kPresets[] = {
    {11, 1, "twovarL", 10, 9, 11}, {5, 37, nullptr, 8, 8, 11}, {7, 13, nullptr, 8, 8, 11},
    {11, 1, nullptr, 11, 12, 11},  {5, 3, nullptr, 11, 12, 11}, {5, 19, nullptr, 7, 8, 19},
    {3, 11, nullptr, 13, 8, 7},    {37, 1, nullptr, 7, 7, 7},   {5, 1, nullptr, 9, 10, 11},
};

std::vector<u64> primes_upto(u64 bound) {
  std::vector<u64> out;
  for (u64 l = 2; l <= bound; ++l)
    if (is_prime(l)) out.push_back(l);
  return out;
}

json config_json(const JobConfig& c) {
  return {{"command", c.command}, {"p", c.p},         {"N", c.N},
          {"m", c.m},             {"M", c.M},         {"L", c.L},
          {"sign", c.sign},       {"seed", c.seed},   {"primes_bound", c.primes_bound},
          {"killers", c.killer_spec}};
}

std::string pretty_series(const std::vector<std::string>& coeffs, const std::string& var) {
  std::string out;
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    const std::string& s = coeffs[n];
    if (s.empty() || s == "0") continue;
    std::string mono = n == 0 ? "" : (n == 1 ? var : var + "^" + std::to_string(n));
    std::string term;
    if (mono.empty())
      term = s;
    else if (s == "1")
      term = mono;
    else if (s.find('+') != std::string::npos)
      term = "(" + s + ")" + mono;
    else
      term = s + mono;
    out += (out.empty() ? "" : " + ") + term;
  }
  return out.empty() ? "0" : out;
}

std::string file_safe(std::string s) {
  for (char& ch : s)
    if (!std::isalnum((unsigned char)ch) && ch != '-') ch = '_';
  return s;
}

const FamilySymbol& eigen_symbol(const Family& F) {
  if (F.basis.size() != 1)
    fail(ErrorKind::Validation, "command needs a rank-1 localized family; got rank " +
                                    std::to_string(F.basis.size()) + " (add killers)");
  return F.basis[0];
}

TruncSeries up_eigenvalue(const Family& F) {
  const auto& phi = eigen_symbol(F);
  return eigenvalue(phi, hecke_at(*phi.manin, phi.profile.p));
}

json family_json(const Family& F) {
  json j = {{"target_rank", F.target_rank}, {"ordinary_rank", F.ordinary_rank}};
  auto U = hecke_matrix(F.basis, hecke_at(*F.md, F.md->prime()));
  json cp = json::array();
  for (auto& c : charpoly(U.a)) cp.push_back(series_json(c, "w"));
  j["Up_charpoly"] = cp;
  j["Up_certified"] = U.certified;
  bool rel = true;
  for (auto& b : F.basis) rel = rel && relations_hold(b);
  j["relations_hold"] = rel;
  return j;
}

json cmd_manin(const JobConfig& c) {
  auto md = solve_manin(c.N, c.p);
  return {{"level", md->level()},
          {"cosets", md->index()},
          {"generators", md->num_generators()},
          {"torsion_order_2", md->num_torsion(2)},
          {"torsion_order_3", md->num_torsion(3)}};
}

json cmd_charpoly(const JobConfig& c) {
  Family F = run_family(c);
  json out = json::object();
  for (u64 l : primes_upto(c.primes_bound)) {
    if (c.N % l == 0 && l != c.p) continue;
    auto op = hecke_at(*F.md, l);
    auto H = hecke_matrix(F.basis, op);
    json cp = json::array();
    bool iw = true;
    for (auto& s : charpoly(H.a)) {
      cp.push_back(series_json(s, "w"));
      iw = iw && s.iwasawa_extendable();
    }
    out[op.name()] = {{"coefficients", cp}, {"certified", H.certified}, {"iwasawa", iw}};
  }
  return out;
}

json cmd_qexp(const JobConfig& c) {
  Family F = run_family(c);
  auto pk = q_expansion(eigen_symbol(F), c.primes_bound);
  json ev = json::object();
  for (auto& [l, A] : pk.eigenvalues) {
    ev["a" + std::to_string(l)] = {{"w", series_json(A, "w")},
                                   {"k", series_json(pk.weight_expansions.at(l), "k")},
                                   {"iwasawa", pk.iwasawa.at(l)}};
  }
  json an = json::object();
  auto a = qexp_coefficients(pk, (int)c.primes_bound);
  for (int n = 1; n <= (int)c.primes_bound; ++n)
    an["a" + std::to_string(n)] = series_json(substitute_weight(a[n]), "k");
  return {{"certified", pk.certified}, {"eigenvalues", ev}, {"coefficients", an}};
}

json cmd_linv(const JobConfig& c) {
  Family F = run_family(c);
  TruncSeries ak = substitute_weight(up_eigenvalue(F));
  json out = {{"a_p", series_json(ak, "k")}};
  json vals = json::array();
  for (i64 k0 : {(i64)c.m, (i64)c.m + (i64)c.p - 1}) {
    PadicNum x = l_invariant(ak, k0);
    vals.push_back({{"k0", k0}, {"value", padic_json(x)}});
  }
  out["l_invariant"] = vals;
  return out;
}

json weierstrass_json(const WeierstrassData& wd) {
  return {{"mu", wd.mu}, {"lambda", wd.lambda}, {"certified", wd.certified}};
}

json cmd_adjoint(const JobConfig& c) {
  Family F = run_family(c);
  auto rep = adjoint_l_invariant_family(up_eigenvalue(F));
  json out = {{"series_k", series_json(rep.series_k, "k")},
              {"series_W", qp_series_json(rep.series_W, "W")},
              {"weierstrass", weierstrass_json(rep.wd)}};
  if (rep.root_W) out["root_W"] = padic_json(*rep.root_W);
  if (rep.root_k) out["root_k"] = padic_json(*rep.root_k);
  return out;
}

json ks_json(const KSSeries& G) {
  json terms = json::array();
  for (int d = 0; d < G.deg; ++d)
    for (int i = d; i >= 0; --i) {
      const PadicNum& x = G.c[i][d - i];
      if (x.is_zero()) continue;
      terms.push_back({{"k", i}, {"s", d - i}, {"value", padic_json(x)}});
    }
  return {{"total_degree_below", G.deg}, {"terms", terms}};
}

struct TwoVarRun {
  TwoVarL F;
  KSSeries ks, quotient, residual;
  bool divisible = false;
  GreenbergReport gb;
};

TwoVarRun two_var_run(const Family& Fam, int L) {
  TwoVarRun r;
  r.F = two_var_L(eigen_symbol(Fam), up_eigenvalue(Fam), L);
  r.ks = to_ks(r.F, std::max(1, L - 1));
  r.quotient = divide_k_minus_2s(r.ks, &r.residual);
  r.divisible = true;
  for (auto& row : r.residual.c)
    for (auto& x : row) r.divisible = r.divisible && x.is_zero();
  r.gb = greenberg_line_check(r.F, 4);
  return r;
}

json cmd_twovar(const JobConfig& c) {
  Family Fam = run_family(c);
  auto r = two_var_run(Fam, c.L);
  json T = json::array();
  for (std::size_t n = 0; n < r.F.a.size(); ++n)
    T.push_back({{"n", n}, {"precision", r.F.error_prec[n]}, {"w", series_json(r.F.a[n], "w")}});
  json out = {{"normalization", {{"p", r.F.norm_p}, {"w", r.F.norm_w}, {"exact", r.F.norm_exact}}},
              {"T_coefficients", T},
              {"ks", ks_json(r.ks)},
              {"divisible_by_k_minus_2s", r.divisible}};
  if (r.divisible) out["quotient"] = ks_json(r.quotient);
  out["greenberg"] = {{"has_factor", r.gb.has_factor},
                      {"residual_valuation", r.gb.residual_val},
                      {"check_precision", r.gb.check_prec},
                      {"order_at_zero", r.gb.order_at_zero},
                      {"unit", r.gb.unit},
                      {"restriction", qp_series_json(r.gb.restriction, "T")},
                      {"pretty", r.gb.str(2, 2)}};
  return out;
}

json cmd_disc(const JobConfig& c) {
  Family F = run_family(c);
  if (F.basis.size() != 2)
    fail(ErrorKind::Validation, "hida-disc needs a rank-2 localized family; got rank " +
                                    std::to_string(F.basis.size()));
  json out = json::object();
  for (u64 l : primes_upto(c.primes_bound)) {
    if (c.N % l == 0 && l != c.p) continue;
    auto op = hecke_at(*F.md, l);
    auto H = hecke_matrix(F.basis, op);
    auto rep = discriminant_analysis(charpoly(H.a));
    json d = {{"zero", rep.zero}, {"certified", H.certified}};
    if (!rep.zero) {
      d["d_W"] = qp_series_json(rep.d_W, "W");
      d["weierstrass"] = weierstrass_json(rep.wd);
      if (rep.root) d["root_W"] = padic_json(*rep.root);
      d["double_root"] = rep.double_root;
      d["square_times_unit"] = rep.square_times_unit;
    }
    out[op.name()] = d;
  }
  return out;
}

}  // namespace

JobConfig validated(JobConfig c) {
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end())
    fail(ErrorKind::Validation, "unknown command '" + c.command + "'");
  if (c.p == 0 && c.command == "verify-fixtures") return c;
  if (c.p < 3 || !is_prime(c.p)) fail(ErrorKind::Validation, "p must be an odd prime");
  if (c.N < 1) fail(ErrorKind::Validation, "N must be positive");
  if (std::gcd(c.N, c.p) != 1) fail(ErrorKind::Validation, "N must be prime to p");
  if (c.m < 0 || c.m > (int)c.p - 2) fail(ErrorKind::Validation, "m must lie in 0..p-2");
  if (c.sign < -1 || c.sign > 1) fail(ErrorKind::Validation, "sign must be -1, 0 or 1");
  if (c.threads < 1) fail(ErrorKind::Validation, "threads must be positive");
  if (c.M < 0 || c.L < 0) fail(ErrorKind::Validation, "M and L must be at least 1");
  if (c.M == 0 || c.L == 0 || c.primes_bound == 0) {
    int M = 8, L = 8;
    u64 bound = 11;
    for (auto& pr : kPresets)
      if (pr.p == c.p && pr.N == c.N && (!pr.command || c.command == pr.command)) {
        M = pr.M, L = pr.L, bound = pr.bound;
        break;
      }
    if (c.M == 0) c.M = M;
    if (c.L == 0) c.L = L;
    if (c.primes_bound == 0) c.primes_bound = bound;
  }
  if (c.M + 2 > PadicContext::get(c.p).cap)
    fail(ErrorKind::Validation, "M too large for 64-bit arithmetic at this p");
  if (!c.killer_spec.empty()) parse_killers(c.killer_spec);
  return c;
}

std::string resolve_cache_dir(const JobConfig& c) {
  if (!c.cache_dir.empty()) return c.cache_dir == "-" ? "" : c.cache_dir;
  if (const char* d = std::getenv("HIDA_CACHE_DIR"); d && *d) return d;
  return ".hida-cache";
}

std::string cache_key(const JobConfig& c) {
  std::string k = "p" + std::to_string(c.p) + "-N" + std::to_string(c.N) + "-m" + std::to_string(c.m) +
                  "-M" + std::to_string(c.M) + "-L" + std::to_string(c.L) + "-s" +
                  std::to_string(c.sign) + "-seed" + std::to_string(c.seed);
  if (!c.killer_spec.empty()) k += "-k" + file_safe(killers_str(parse_killers(c.killer_spec)));
  return k;
}

Family run_family(const JobConfig& c) {
  namespace fs = std::filesystem;
  Family F;
  F.md = solve_manin(c.N, c.p);
  const PrecisionProfile prof(c.p, c.M, c.L);
  const std::string dir = resolve_cache_dir(c);
  const std::string stem = dir.empty() ? "" : (fs::path(dir) / cache_key(c)).string();
  if (!stem.empty()) {
    std::ifstream meta(stem + ".meta");
    int count = 0;
    if (meta >> F.target_rank >> F.ordinary_rank >> count && count == F.target_rank) {
      for (int i = 0; i < count; ++i) {
        auto phi = load_symbol(stem + "-" + std::to_string(i) + ".sym");
        if (!(phi.profile == prof) || phi.m != c.m || phi.sign != c.sign)
          fail(ErrorKind::Validation, "cache entry " + stem + " does not match the job");
        phi.manin = F.md;
        F.basis.push_back(std::move(phi));
      }
      return F;
    }
  }
  MaximalIdealSpec spec = c.killer_spec.empty() ? MaximalIdealSpec{} : parse_killers(c.killer_spec);
  {
    ClassicalSpace S(F.md, c.m);
    F.ordinary_rank = S.ordinary_rank(c.sign);
    F.target_rank = S.localized_rank(spec, c.sign);
  }
  if (F.target_rank == 0) fail(ErrorKind::Numerical, "the localized ordinary space is zero");
  BasisOptions opt;
  opt.target_rank = F.target_rank;
  opt.ordinary_rank = F.ordinary_rank;
  opt.sign = c.sign;
  opt.seed = c.seed;
  opt.spec = spec;
  F.basis = build_basis(F.md, prof, c.m, opt);
  if (!stem.empty()) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < F.basis.size(); ++i)
      save_symbol(F.basis[i], stem + "-" + std::to_string(i) + ".sym");
    std::ofstream meta(stem + ".meta");
    meta << F.target_rank << " " << F.ordinary_rank << " " << F.basis.size() << "\n";
  }
  return F;
}

json padic_json(const PadicNum& x, int n) {
  if (n < 0) n = std::min(x.abs_prec(), PadicContext::get(x.prime()).cap);
  json j = {{"precision", n}};
  if (!x.is_zero() && x.valuation() < 0) {
    // p^v times an integral number
    j["scale"] = x.valuation();
    PadicNum y = x.shift(-x.valuation());
    j["digits"] = y.digits(n - x.valuation());
  } else {
    j["digits"] = x.digits(n);
  }
  j["pretty"] = x.is_zero() ? "0" : padic_pretty(x, n);
  return j;
}

json series_json(const TruncSeries& f, const std::string& var) {
  json cs = json::array();
  std::vector<std::string> pretty;
  for (int n = 0; n < f.L(); ++n) {
    PadicNum c = f.coeff(n);
    cs.push_back(c.digits(f.M()));
    pretty.push_back(c.is_zero() ? "0" : padic_pretty(c, f.M()));
  }
  return {{"var", var}, {"M", f.M()}, {"L", f.L()}, {"coefficients", cs},
          {"pretty", pretty_series(pretty, var)}};
}

json qp_series_json(const QpSeries& f, const std::string& var) {
  json cs = json::array();
  std::vector<std::string> pretty;
  for (auto& c : f) {
    cs.push_back(padic_json(c));
    pretty.push_back(c.is_zero() ? "0" : c.str());
  }
  return {{"var", var}, {"coefficients", cs}, {"pretty", pretty_series(pretty, var)}};
}

std::vector<std::string> compare_k_series(const SeriesTable& want, int P, int D,
                                          const TruncSeries& got) {
  std::vector<std::string> bad;
  if (got.M() < P || got.L() < D) {
    bad.push_back("computed to (p^" + std::to_string(got.M()) + ", deg " + std::to_string(got.L()) +
                  "), fixture needs (p^" + std::to_string(P) + ", deg " + std::to_string(D) + ")");
    return bad;
  }
  const u64 mod = PadicContext::get(got.prime()).pow(P);
  for (int i = 0; i < D; ++i) {
    auto it = want.find({i, 0});
    u64 w = it == want.end() ? 0 : it->second;
    if (got[i] % mod != w)
      bad.push_back("coefficient " + std::to_string(i) + ": got " +
                    padic_pretty(got.coeff(i), P) + ", want " +
                    padic_pretty(PadicNum::from_residue(got.prime(), w, P), P));
  }
  for (auto& [ij, c] : want)
    if (ij.second != 0 || ij.first >= D) bad.push_back("fixture term outside (p^P, deg D)");
  return bad;
}

std::vector<std::string> compare_ks(const SeriesTable& want, int P, int D, const KSSeries& got) {
  std::vector<std::string> bad;
  const u64 p = got.p;
  for (int d = 0; d < D; ++d)
    for (int i = 0; i <= d; ++i) {
      int j = d - i;
      auto it = want.find({i, j});
      u64 w = it == want.end() ? 0 : it->second;
      std::string at = "k^" + std::to_string(i) + " s^" + std::to_string(j);
      if (d >= got.deg || got.c[i][j].abs_prec() < P) {
        int have = d >= got.deg ? 0 : got.c[i][j].abs_prec();
        bad.push_back(at + ": computed only to p^" + std::to_string(have));
        continue;
      }
      if (got.c[i][j].residue(P) != w)
        bad.push_back(at + ": got " + padic_pretty(got.c[i][j], P) + ", want " +
                      padic_pretty(PadicNum::from_residue(p, w, P), P));
    }
  for (auto& [ij, c] : want)
    if (ij.first + ij.second >= D) bad.push_back("fixture term outside total degree D");
  return bad;
}

std::vector<std::string> compare_padic(const PadicNum& want, int P, const PadicNum& got) {
  if (got.abs_prec() < P)
    return {"computed only to p^" + std::to_string(got.abs_prec()) + ", fixture needs p^" +
            std::to_string(P)};
  if (got.valuation() < 0 || got.residue(P) != want.residue(P))
    return {"got " + got.str(P) + ", want " + want.str(P)};
  return {};
}

json verify_fixtures(const JobConfig& base, bool* ok, const std::vector<std::string>& only) {
  auto sections = load_fixtures();
  std::map<std::string, Family> families;
  auto job_for = [&](const FixtureSection& s) {
    JobConfig c = base;
    c.command = "family";
    c.p = (u64)s.get_int("p");
    c.N = (u64)s.get_int("N");
    c.sign = (int)s.get_int("sign");
    c.m = s.has("m") ? (int)s.get_int("m") : 0;
    c.killer_spec = s.has("killers") ? s.get("killers") : "";
    auto [M, L] = s.get_prec("run");
    c.M = M, c.L = L;
    c.primes_bound = 0;
    return validated(c);
  };
  auto family_for = [&](const JobConfig& c) -> const Family& {
    auto key = cache_key(c);
    auto it = families.find(key);
    if (it == families.end()) it = families.emplace(key, run_family(c)).first;
    return it->second;
  };

  json report = json::array();
  bool all_ok = true;
  for (auto& s : sections) {
    if (s.name.rfind("greenberg-", 0) == 0) continue;  // checked with its twovar section
    if (!only.empty() && std::find(only.begin(), only.end(), s.name) == only.end()) continue;
    std::vector<std::string> bad;
    int checked = 0;
    auto note = [&](const std::string& what, const std::vector<std::string>& b) {
      ++checked;
      for (auto& m : b) bad.push_back(what + ": " + m);
    };
    try {
      JobConfig c = job_for(s);
      const Family& F = family_for(c);
      const u64 p = c.p;
      if (s.name.rfind("qexp-", 0) == 0) {
        auto [P, D] = s.get_prec("prec");
        u64 bound = 0;
        for (auto& [k, v] : s.kv)
          if (k.size() > 1 && k[0] == 'a' && std::isdigit((unsigned char)k[1]))
            bound = std::max<u64>(bound, std::stoull(k.substr(1)));
        auto pk = q_expansion(eigen_symbol(F), bound);
        for (auto& [k, v] : s.kv) {
          if (k.size() < 2 || k[0] != 'a' || !std::isdigit((unsigned char)k[1])) continue;
          u64 l = std::stoull(k.substr(1));
          auto it = pk.weight_expansions.find(l);
          if (it == pk.weight_expansions.end()) {
            note(k, {"not computed"});
            continue;
          }
          note(k, compare_k_series(parse_series(v, p, P), P, D, it->second));
        }
      } else if (s.name.rfind("adjoint-", 0) == 0) {
        auto [P, D] = s.get_prec("prec");
        auto rep = adjoint_l_invariant_family(up_eigenvalue(F));
        note("L", compare_k_series(parse_series(s.get("L"), p, P), P, D, rep.series_k));
      } else if (s.name.rfind("linv-", 0) == 0) {
        int P = s.get_prec("prec").first;
        TruncSeries ak = substitute_weight(up_eigenvalue(F));
        note("value", compare_padic(parse_padic(s.get("value"), p, P), P, l_invariant(ak, s.get_int("k0"))));
      } else if (s.name.rfind("twovar-", 0) == 0) {
        auto [P, D] = s.get_prec("prec");
        auto r = two_var_run(F, c.L);
        note("L", compare_ks(parse_series(s.get("L"), p, P), P, D, r.ks));
        if (s.has("quotient")) {
          auto [Q, E] = s.get_prec("quotient-prec");
          if (!r.divisible) note("quotient", {"k - 2s does not divide"});
          note("quotient", compare_ks(parse_series(s.get("quotient"), p, Q), Q, E, r.quotient));
        }
        std::string gname = "greenberg-" + s.name.substr(7);
        const auto& g = find_section(sections, gname);
        auto want = parse_series(g.get("restriction"), p, 2);
        int order = (int)g.get_int("order");
        std::vector<std::string> gb;
        if (r.gb.order_at_zero != order)
          gb.push_back("order " + std::to_string(r.gb.order_at_zero) + ", want " + std::to_string(order));
        for (int e = 0; e < 2; ++e) {
          int idx = order + e;
          auto it = want.find({e, 0});
          PadicNum w = PadicNum::from_residue(p, it == want.end() ? 0 : it->second, 2);
          if (idx >= (int)r.gb.restriction.size()) {
            gb.push_back("restriction too short");
            continue;
          }
          for (auto& m : compare_padic(w, 2, r.gb.restriction[idx]))
            gb.push_back("T^" + std::to_string(e) + ": " + m);
        }
        note(gname, gb);
      } else if (s.name.rfind("disc-", 0) == 0) {
        if (F.basis.size() != 2) fail(ErrorKind::Numerical, "localized rank is not 2");
        auto rep = discriminant_analysis(charpoly(hecke_matrix(F.basis, hecke_at(*F.md, 2)).a));
        if (rep.zero || rep.d_W.size() < 2) {
          note("d", {"discriminant vanishes to precision"});
        } else {
          // leading coefficients are compared at the precision the run reaches
          for (int i = 0; i < 2; ++i) {
            std::string key = "d" + std::to_string(i);
            int P = std::min({(int)s.get_prec(key + "-prec").first, rep.d_W[i].abs_prec(),
                              PadicContext::get(p).cap});
            note(key, compare_padic(parse_padic(s.get(key), p, P), P, rep.d_W[i]));
          }
          int lam = (int)s.get_int("lambda");
          if (rep.wd.lambda != lam)
            note("lambda", {"got " + std::to_string(rep.wd.lambda) + ", want " + std::to_string(lam)});
          int R = s.get_prec("root-prec").first;
          if (!rep.root)
            note("root", {"no root found"});
          else
            note("root", compare_padic(parse_padic(s.get("root"), p, R), R, *rep.root));
        }
      } else {
        note("section", {"unknown section kind"});
      }
    } catch (const Error& e) {
      bad.push_back(e.what());
    }
    all_ok = all_ok && bad.empty();
    report.push_back({{"section", s.name}, {"checked", checked}, {"ok", bad.empty()}, {"mismatches", bad}});
  }
  *ok = all_ok;
  return {{"ok", all_ok}, {"sections", report}};
}

namespace {

void render_to(const json& j, int indent, std::string& out) {
  auto flat = [](const json& a) {
    for (auto& x : a)
      if (x.is_structured()) return false;
    return true;
  };
  std::string pad(indent + 1, ' ');
  if (j.is_object() && !j.empty()) {
    out += "{\n";
    std::size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) {
      out += pad + json(it.key()).dump() + ": ";
      render_to(it.value(), indent + 1, out);
      out += i + 1 < j.size() ? ",\n" : "\n";
    }
    out += std::string(indent, ' ') + "}";
  } else if (j.is_array() && !j.empty() && !flat(j)) {
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      out += pad;
      render_to(j[i], indent + 1, out);
      out += i + 1 < j.size() ? ",\n" : "\n";
    }
    out += std::string(indent, ' ') + "]";
  } else {
    out += j.dump();
  }
}

}  // namespace

std::string render(const json& doc) {
  std::string out;
  render_to(doc, 0, out);
  return out + "\n";
}

json run_command(const JobConfig& c0, bool* ok) {
  JobConfig c = validated(c0);
  set_threads(c.threads);
  json doc = {{"config", config_json(c)}};
  if (c.command == "verify-fixtures") {
    bool good = false;
    doc["result"] = verify_fixtures(c, &good);
    if (ok) *ok = good;
    return doc;
  }
  if (ok) *ok = true;
  if (c.command == "manin")
    doc["result"] = cmd_manin(c);
  else if (c.command == "family")
    doc["result"] = family_json(run_family(c));
  else if (c.command == "charpoly")
    doc["result"] = cmd_charpoly(c);
  else if (c.command == "qexp")
    doc["result"] = cmd_qexp(c);
  else if (c.command == "linv")
    doc["result"] = cmd_linv(c);
  else if (c.command == "adjoint-linv")
    doc["result"] = cmd_adjoint(c);
  else if (c.command == "twovarL")
    doc["result"] = cmd_twovar(c);
  else if (c.command == "hida-disc")
    doc["result"] = cmd_disc(c);
  return doc;
}

}  // namespace hida
