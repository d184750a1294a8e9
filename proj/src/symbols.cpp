#include "hida/symbols.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "hida/parallel.hpp"

namespace hida {

namespace {
i64 floordiv(i64 a, i64 b) {
  i64 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
i64 mod_nonneg(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}
const Mat2 kSigma{0, -1, 1, 0};
const Mat2 kTau{0, -1, 1, -1};
const Mat2 kTau2{-1, 1, -1, 0};
}  // namespace

// ---- cusps and paths ----

Cusp Cusp::make(i64 x, i64 y) {
  if (y == 0) {
    if (x == 0) fail(ErrorKind::Validation, "0/0 is not a cusp");
    return inf();
  }
  i64 g = std::gcd(x, y);
  x /= g;
  y /= g;
  if (y < 0) {
    x = -x;
    y = -y;
  }
  return {x, y};
}

Cusp operator*(const Mat2& g, const Cusp& c) {
  Mat2 col{c.x, 0, c.y, 0};
  Mat2 r = g * col;
  return Cusp::make(r.a, r.c);
}

std::vector<Mat2> cf_path(const Cusp& c) {
  std::vector<Mat2> out;
  if (c.y == 0) return out;
  i64 num = c.x, den = c.y;
  i64 pm = 1, qm = 0;
  i64 a = floordiv(num, den);
  i64 pk = a, qk = 1;
  i64 r = num - a * den;
  num = den;
  den = r;
  int k = 0;
  for (;;) {
    // det(p_k, p_{k-1}; q_k, q_{k-1}) = (-1)^(k-1)
    if (k % 2 == 1)
      out.push_back({pk, pm, qk, qm});
    else
      out.push_back({pk, -pm, qk, -qm});
    if (den == 0) break;
    a = num / den;
    r = num % den;
    num = den;
    den = r;
    i64 pn = a * pk + pm, qn = a * qk + qm;
    pm = pk;
    qm = qk;
    pk = pn;
    qk = qn;
    ++k;
  }
  return out;
}

// ---- Manin relations ----

ManinData::ManinData(u64 N, u64 p) : N_(N), p_(p), Np_(N * p) {
  if (N < 1) fail(ErrorKind::Validation, "tame level must be positive");
  if (p < 3 || !is_prime(p)) fail(ErrorKind::Validation, "p must be an odd prime");
  if (N % p == 0) fail(ErrorKind::Validation, "p must not divide the tame level");
  if (Np_ > 4000) fail(ErrorKind::Validation, "level N*p exceeds the supported bound 4000");
  const i64 n = (i64)Np_;
  table_.assign((std::size_t)(n * n), -1);
  std::vector<i64> units;
  for (i64 u = 1; u < n; ++u)
    if (std::gcd(u, n) == 1) units.push_back(u);
  int count = 0;
  for (i64 c = 0; c < n; ++c)
    for (i64 d = 0; d < n; ++d) {
      if (std::gcd(std::gcd(c, d), n) != 1 || table_[c * n + d] >= 0) continue;
      for (i64 u : units) table_[(u * c % n) * n + (u * d % n)] = count;
      ++count;
    }
  reps_.assign(count, Mat2{});
  sigma_.assign(count, -1);
  tau_.assign(count, -1);
  // class representatives for sigma/tau: any lift works since the class only
  // depends on the bottom row mod Np
  std::vector<std::pair<i64, i64>> rows(count);
  for (i64 c = 0; c < n; ++c)
    for (i64 d = 0; d < n; ++d) {
      int k = table_[c * n + d];
      if (k >= 0) rows[k] = {c, d};
    }
  for (int k = 0; k < count; ++k) {
    auto [c, d] = rows[k];
    sigma_[k] = coset(d, -c);
    tau_[k] = coset(d, -c - d);
  }

  std::vector<char> have(count, 0), paired(count, 0), visited(count, 0);
  struct Link {
    int e, f;  // e in parent triangle, f = sigma(e) in child
  };
  std::vector<int> order;         // triangle bases in BFS order
  std::vector<Link> parent_link;  // per entry of order
  auto set_triangle = [&](int f, const Mat2& gf) {
    reps_[f] = gf;
    have[f] = 1;
    visited[f] = 1;
    int t1 = tau_[f];
    if (t1 != f) {
      int t2 = tau_[t1];
      reps_[t1] = gf * kTau;
      reps_[t2] = gf * kTau2;
      have[t1] = have[t2] = 1;
      visited[t1] = visited[t2] = 1;
    }
  };
  const int root = coset(0, 1);
  if (root != 0) fail(ErrorKind::Numerical, "identity coset is not first");
  set_triangle(root, Mat2{});
  order.push_back(root);
  parent_link.push_back({-1, -1});
  for (std::size_t qi = 0; qi < order.size(); ++qi) {
    int base = order[qi];
    int edges[3] = {base, tau_[base], tau_[tau_[base]]};
    int ne = tau_[base] == base ? 1 : 3;
    for (int s = 0; s < ne; ++s) {
      int e = edges[s];
      if (paired[e]) continue;
      int f = sigma_[e];
      if (f == e) {
        Mat2 g = reps_[e] * kSigma * reps_[e].inverse();
        gens_.push_back({Generator::Tors2, e, -1, g.inverse()});
        paired[e] = 1;
      } else if (!visited[f]) {
        set_triangle(f, reps_[e] * kSigma);
        paired[e] = paired[f] = 1;
        order.push_back(f);
        parent_link.push_back({e, f});
        if (tau_[f] == f) {
          Mat2 g = reps_[f] * kTau * reps_[f].inverse();
          gens_.push_back({Generator::Tors3, f, -1, g.inverse()});
        }
      } else {
        Mat2 delta = reps_[e] * kSigma * reps_[f].inverse();
        gens_.push_back({e == root ? Generator::Root : Generator::Cotree, e, f, delta});
        paired[e] = paired[f] = 1;
      }
    }
  }
  for (int k = 0; k < count; ++k) {
    if (!have[k]) fail(ErrorKind::Numerical, "coset graph is not connected");
    Mat2 g = reps_[k];
    if (g.det() != 1 || coset(g.c, g.d) != k)
      fail(ErrorKind::Numerical, "coset representative mismatch");
  }
  for (auto& g : gens_) {
    Mat2 chk = g.kind == Generator::Root || g.kind == Generator::Cotree ? g.mat : g.mat.inverse();
    if (!in_gamma0(chk)) fail(ErrorKind::Numerical, "relation matrix not in Gamma_0");
  }
  if (gens_.empty() || gens_[0].kind != Generator::Root)
    fail(ErrorKind::Numerical, "root generator missing");

  std::vector<char> done(count, 0);
  for (int i = 0; i < (int)gens_.size(); ++i) {
    plan_.push_back({PlanStep::FromGen, gens_[i].edge, i});
    done[gens_[i].edge] = 1;
  }
  for (int i = 0; i < (int)gens_.size(); ++i)
    if (gens_[i].partner >= 0) {
      plan_.push_back({PlanStep::Partner, gens_[i].partner, i});
      done[gens_[i].partner] = 1;
    }
  for (std::size_t qi = order.size(); qi-- > 1;) {
    auto [e, f] = parent_link[qi];
    if (tau_[f] != f) {
      int t1 = tau_[f], t2 = tau_[t1];
      if (!done[t1] || !done[t2]) fail(ErrorKind::Numerical, "plan order violated");
      plan_.push_back({PlanStep::Triangle, f, t1, t2});
      done[f] = 1;
    }
    plan_.push_back({PlanStep::Negate, e, f});
    done[e] = 1;
  }
  for (int k = 0; k < count; ++k)
    if (!done[k]) fail(ErrorKind::Numerical, "plan leaves a coset undetermined");
}

int ManinData::coset(i64 c, i64 d) const {
  const i64 n = (i64)Np_;
  int k = table_[mod_nonneg(c, n) * n + mod_nonneg(d, n)];
  if (k < 0) fail(ErrorKind::Numerical, "bottom row is not primitive mod the level");
  return k;
}

int ManinData::num_torsion(int order) const {
  int n = 0;
  for (auto& g : gens_)
    if ((order == 2 && g.kind == Generator::Tors2) || (order == 3 && g.kind == Generator::Tors3))
      ++n;
  return n;
}

bool ManinData::in_gamma0(const Mat2& g) const {
  return g.det() == 1 && mod_nonneg(g.c, (i64)Np_) == 0;
}

std::vector<SymTerm> ManinData::decompose(const Cusp& a, const Cusp& b, const Mat2& h) const {
  std::vector<SymTerm> out;
  auto add = [&](const Cusp& c, int sign) {
    for (const Mat2& g : cf_path(h * c)) {
      int k = coset(g.c, g.d);
      Mat2 gi = reps_[k] * g.inverse();
      if (!in_gamma0(gi)) fail(ErrorKind::Numerical, "path piece outside its coset");
      out.push_back({k, gi * h, sign});
    }
  };
  add(a, 1);
  add(b, -1);
  return out;
}

std::pair<Cusp, Cusp> ManinData::generator_divisor(int i) const {
  const Mat2& g = reps_[gens_[i].edge];
  return {Cusp::make(g.a, g.c), Cusp::make(g.b, g.d)};
}

std::shared_ptr<const ManinData> solve_manin(u64 N, u64 p) {
  static std::mutex mu;
  static std::map<std::pair<u64, u64>, std::shared_ptr<const ManinData>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({N, p});
  if (it != cache.end()) return it->second;
  auto md = std::make_shared<const ManinData>(N, p);
  cache[{N, p}] = md;
  return md;
}

// ---- symbols ----

namespace {
void check_same(const FamilySymbol& a, const FamilySymbol& b) {
  if (a.manin != b.manin || !(a.profile == b.profile) || a.m != b.m)
    fail(ErrorKind::Validation, "symbol shape mismatch");
}
}  // namespace

FamilySymbol FamilySymbol::operator+(const FamilySymbol& o) const {
  check_same(*this, o);
  FamilySymbol r = *this;
  for (std::size_t i = 0; i < values.size(); ++i) r.values[i] = values[i] + o.values[i];
  return r;
}

FamilySymbol FamilySymbol::operator-(const FamilySymbol& o) const {
  check_same(*this, o);
  FamilySymbol r = *this;
  for (std::size_t i = 0; i < values.size(); ++i) r.values[i] = values[i] - o.values[i];
  return r;
}

FamilySymbol FamilySymbol::scaled(u64 c) const {
  FamilySymbol r = *this;
  for (auto& v : r.values) v = v.scaled(c);
  return r;
}

FamilySymbol FamilySymbol::times(const TruncSeries& f) const {
  FamilySymbol r = *this;
  for (auto& v : r.values) v = v.times(f);
  return r;
}

FamilySymbol FamilySymbol::reduced(const PrecisionProfile& to) const {
  FamilySymbol r = *this;
  r.profile = to;
  for (auto& v : r.values) v = v.reduced(to);
  return r;
}

int FamilySymbol::common_p_power() const {
  int e = profile.M;
  for (auto& v : values) e = std::min(e, v.common_p_power(profile.M));
  return e;
}

FamilySymbol FamilySymbol::div_p(int e) const {
  FamilySymbol r = *this;
  r.profile = profile.lowered(e);
  for (auto& v : r.values) v = v.div_p(e);
  return r;
}

bool FamilySymbol::is_zero() const {
  for (auto& v : values)
    if (!v.is_zero()) return false;
  return true;
}

bool FamilySymbol::operator==(const FamilySymbol& o) const {
  if (manin != o.manin || !(profile == o.profile) || m != o.m) return false;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!(values[i] == o.values[i])) return false;
  return true;
}

FamilySymbol zero_symbol(std::shared_ptr<const ManinData> manin, const PrecisionProfile& prof,
                         int m) {
  FamilySymbol s;
  s.manin = std::move(manin);
  s.profile = prof;
  s.m = m;
  s.values.assign(s.manin->num_generators(), FamilyDistribution(prof));
  return s;
}

std::vector<FamilyDistribution> expand(const FamilySymbol& phi) {
  const ManinData& md = *phi.manin;
  std::vector<FamilyDistribution> E(md.index());
  for (const PlanStep& st : md.plan()) {
    switch (st.kind) {
      case PlanStep::FromGen:
        E[st.edge] = phi.values[st.a];
        break;
      case PlanStep::Partner:
        E[st.edge] = -act(phi.values[st.a], md.generators()[st.a].mat, phi.m);
        break;
      case PlanStep::Triangle:
        E[st.edge] = -(E[st.a] + E[st.b]);
        break;
      case PlanStep::Negate:
        E[st.edge] = -E[st.a];
        break;
    }
  }
  return E;
}

FamilyDistribution eval_at_divisor(const FamilySymbol& phi, const Cusp& a, const Cusp& b) {
  auto E = expand(phi);
  FamilyDistribution out(phi.profile);
  for (const SymTerm& t : phi.manin->decompose(a, b, Mat2{})) {
    auto v = act(E[t.edge], t.beta, phi.m);
    out = t.sign > 0 ? out + v : out - v;
  }
  return out;
}

bool relations_hold(const FamilySymbol& phi) {
  const ManinData& md = *phi.manin;
  auto E = expand(phi);
  auto pulled = [&](int k, const Mat2& g) {
    // Phi(D_g) for g in coset k
    return act(E[k], md.rep(k) * g.inverse(), phi.m);
  };
  for (int c = 0; c < md.index(); ++c) {
    const Mat2& g = md.rep(c);
    if (!(E[c] + pulled(md.sigma(c), g * kSigma)).is_zero()) return false;
    if (!(E[c] + pulled(md.tau(c), g * kTau) + pulled(md.tau(md.tau(c)), g * kTau2)).is_zero())
      return false;
  }
  return true;
}

// ---- construction ----

namespace {
struct Slot {
  int gen = -1;
  int e = 0;
};

FamilyDistribution unit_moment(const PrecisionProfile& prof, int j) {
  FamilyDistribution d(prof);
  d.moment(j)[0] = 1 % d.modulus(j);
  return d;
}

// Generator values from free data: torsion slots become v|(1 - mat).
std::vector<FamilyDistribution> gen_values(const ManinData& md, int m,
                                           const std::vector<FamilyDistribution>& free_values,
                                           const PrecisionProfile& prof) {
  std::vector<FamilyDistribution> X(md.num_generators(), FamilyDistribution(prof));
  for (int i = 1; i < md.num_generators(); ++i) {
    const auto& v = free_values[i - 1];
    const Generator& g = md.generators()[i];
    if (g.kind == Generator::Tors2 || g.kind == Generator::Tors3)
      X[i] = v - act(v, g.mat, m);
    else
      X[i] = v;
  }
  return X;
}

// E_tau for given generator values; the root value does not enter.
FamilyDistribution root_remainder(const std::shared_ptr<const ManinData>& md, int m,
                                  const std::vector<FamilyDistribution>& X,
                                  const PrecisionProfile& prof) {
  FamilySymbol s;
  s.manin = md;
  s.profile = prof;
  s.m = m;
  s.values = X;
  return expand(s)[md->root_tau_edge()];
}

TruncSeries total_measure(const FamilyDistribution& d) { return d.moment_series(0); }

// Response of R(1) to putting mu_j (j = 1 when m = 0, else j = 0) in free slot i.
TruncSeries slot_response(const std::shared_ptr<const ManinData>& md, int m, int i,
                          const PrecisionProfile& prof) {
  std::vector<FamilyDistribution> fv(md->num_generators() - 1, FamilyDistribution(prof));
  fv[i - 1] = unit_moment(prof, m == 0 ? 1 : 0);
  auto X = gen_values(*md, m, fv, prof);
  return total_measure(root_remainder(md, m, X, prof));
}

Slot choose_slot(const std::shared_ptr<const ManinData>& md, int m) {
  const u64 p = md->prime();
  const auto& C = PadicContext::get(p);
  int M0 = std::min(C.cap - 2, 12);
  PrecisionProfile probe(p, M0, 3);
  Slot best;
  best.e = M0;
  for (int i = 1; i < md->num_generators(); ++i) {
    TruncSeries F = slot_response(md, m, i, probe);
    if (m == 0) {
      if (F[0] != 0) fail(ErrorKind::Numerical, "slot response does not vanish at w = 0");
      if (F[1] == 0) continue;
      int e = vp_int((i64)F[1], p);
      if (e < best.e) {
        best.gen = i;
        best.e = e;
      }
    } else if (F[0] % p != 0) {
      best.gen = i;
      best.e = 0;
      break;
    }
  }
  if (best.gen < 0) {
    if (m != 0)
      fail(ErrorKind::Numerical,
           "unhandled degenerate branch: no generator with a^m != 1 mod p");
    fail(ErrorKind::Numerical, "no generator can absorb the total measure");
  }
  return best;
}
}  // namespace

PrecisionProfile assemble_working_profile(const ManinData& manin, const PrecisionProfile& prof,
                                          int m) {
  auto md = solve_manin(manin.tame_level(), manin.prime());
  Slot s = choose_slot(md, m);
  if (m == 0) return {prof.p, prof.M + s.e + 1, prof.L + 1};
  return {prof.p, prof.M + 1, prof.L};
}

FamilySymbol assemble_symbol(std::shared_ptr<const ManinData> md, const PrecisionProfile& prof,
                             int m, const std::vector<FamilyDistribution>& free_values) {
  const u64 p = md->prime();
  if (prof.p != p) fail(ErrorKind::Validation, "profile prime differs from the level data");
  if (m < 0 || m > (int)p - 2 || m % 2 != 0)
    fail(ErrorKind::Validation, "branch m must be even and in 0..p-2");
  const auto& C = PadicContext::get(p);
  Slot slot = choose_slot(md, m);
  PrecisionProfile W = m == 0 ? PrecisionProfile(p, prof.M + slot.e + 1, prof.L + 1)
                              : PrecisionProfile(p, prof.M + 1, prof.L);
  if (W.M > C.cap) fail(ErrorKind::Validation, "working precision exceeds 64-bit capacity");
  if ((int)free_values.size() != md->num_generators() - 1)
    fail(ErrorKind::Validation, "wrong number of free values");
  for (auto& v : free_values)
    if (!(v.profile() == W)) fail(ErrorKind::Validation, "free values must use the working profile");

  auto X = gen_values(*md, m, free_values, W);
  PrecisionProfile W1 = W;
  TruncSeries t;
  TruncSeries R1 = total_measure(root_remainder(md, m, X, W));
  TruncSeries F = slot_response(md, m, slot.gen, W);
  if (m == 0) {
    u64 pe = C.pow(slot.e);
    for (auto& x : X) x = x.scaled(pe);
    R1 = R1.scaled(pe);
    if (R1[0] != 0) fail(ErrorKind::Numerical, "total measure does not vanish at w = 0");
    TruncSeries Fp = F.div_w();
    if (Fp.valuation() != slot.e || Fp[0] == 0 || vp_int((i64)Fp[0], p) != slot.e)
      fail(ErrorKind::Numerical, "slot response has unexpected valuation");
    t = -(R1.div_w().div_p(slot.e) * invert(Fp.div_p(slot.e)));
    W1 = PrecisionProfile(p, W.M - slot.e, W.L - 1);
  } else {
    t = -(R1 * invert(F));
  }
  for (auto& x : X) x = x.reduced(W1);
  {
    FamilyDistribution mu(W1);
    mu.set_moment(m == 0 ? 1 : 0, t.reduced(W1.prec(m == 0 ? 1 : 0), W1.L));
    const Generator& g = md->generators()[slot.gen];
    if (g.kind == Generator::Tors2 || g.kind == Generator::Tors3) mu = mu - act(mu, g.mat, m);
    X[slot.gen] = X[slot.gen] + mu;
  }
  FamilyDistribution R = root_remainder(md, m, X, W1);
  if (!total_measure(R).is_zero()) fail(ErrorKind::Numerical, "total-measure correction failed");
  // x_0|Delta = -R|T with T = [1,1;0,1]
  const Generator& root = md->generators()[0];
  Mat2 Tinv{1, -1, 0, 1};
  if (!(root.mat == Tinv || root.mat == -Tinv))
    fail(ErrorKind::Numerical, "unexpected root relation matrix");
  FamilyDistribution nu = -act(R, Mat2{1, 1, 0, 1}, m);
  DifferenceSolution sol = solve_difference(nu);
  PrecisionProfile W2 = sol.mu.profile();
  FamilySymbol out;
  out.manin = md;
  out.m = m;
  out.m_scale = sol.m_scale;
  out.profile = W2;
  out.values.resize(md->num_generators());
  out.values[0] = sol.mu;
  u64 ps = C.pow(sol.m_scale);
  for (int i = 1; i < md->num_generators(); ++i) out.values[i] = X[i].reduced(W2).scaled(ps);
  if (!(W2 == prof)) out = out.reduced(prof);
  if (!relations_hold(out)) fail(ErrorKind::Numerical, "assembled symbol violates Manin relations");
  return out;
}

FamilySymbol random_symbol(std::shared_ptr<const ManinData> md, const PrecisionProfile& prof,
                           int m, u64 seed) {
  PrecisionProfile W = assemble_working_profile(*md, prof, m);
  std::mt19937_64 rng(seed);
  std::vector<FamilyDistribution> fv;
  for (int i = 1; i < md->num_generators(); ++i) fv.push_back(random_distribution(W, rng()));
  FamilySymbol s = assemble_symbol(md, prof, m, fv);
  s.seed = seed;
  return s;
}

// ---- operators ----

SymbolOperator::SymbolOperator(std::shared_ptr<const ManinData> manin,
                               const PrecisionProfile& prof, int m, const std::vector<Mat2>& H)
    : manin_(std::move(manin)), prof_(prof), m_(m) {
  const int t = manin_->num_generators();
  terms_.resize(t);
  parallel_for(t, [&](int i) {
    auto [a, b] = manin_->generator_divisor(i);
    std::map<int, ActionMatrix> acc;
    for (const Mat2& h : H)
      for (const SymTerm& st : manin_->decompose(a, b, h)) {
        auto it = acc.find(st.edge);
        if (it == acc.end()) it = acc.emplace(st.edge, ActionMatrix(prof_)).first;
        it->second.add_scaled(action_matrix(st.beta, m_, prof_), st.sign);
      }
    for (auto& [k, A] : acc)
      if (!A.is_zero()) terms_[i].emplace_back(k, std::move(A));
  });
}

FamilySymbol SymbolOperator::apply(const FamilySymbol& phi) const {
  if (phi.manin != manin_ || !(phi.profile == prof_) || phi.m != m_)
    fail(ErrorKind::Validation, "operator built for a different symbol space");
  auto E = expand(phi);
  FamilySymbol out = phi;
  parallel_for((int)terms_.size(), [&](int i) {
    FamilyDistribution acc(prof_);
    for (auto& [k, A] : terms_[i]) apply_accumulate(A, E[k], acc);
    out.values[i] = acc;
  });
  return out;
}

FamilySymbol apply_iota(const FamilySymbol& phi) {
  SymbolOperator op(phi.manin, phi.profile, phi.m, {Mat2{1, 0, 0, -1}});
  return op.apply(phi);
}

FamilySymbol sign_project(const FamilySymbol& phi, int sign) {
  if (sign != 1 && sign != -1) fail(ErrorKind::Validation, "sign must be +1 or -1");
  const auto& C = PadicContext::get(phi.profile.p);
  u64 mod = C.pow(phi.profile.M);
  u64 half = invmod(2, mod);
  FamilySymbol io = apply_iota(phi);
  FamilySymbol r = sign > 0 ? phi + io : phi - io;
  r = r.scaled(half);
  r.sign = sign;
  return r;
}

// ---- serialization ----

namespace {
u64 fnv1a(const std::string& s) {
  u64 h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}
void put(std::string& s, u64 x, int bytes) {
  for (int i = 0; i < bytes; ++i) s.push_back((char)((x >> (8 * i)) & 0xff));
}
struct Reader {
  const std::string& s;
  std::size_t pos = 0;
  u64 get(int bytes) {
    if (pos + bytes > s.size()) fail(ErrorKind::Validation, "symbol stream truncated");
    u64 x = 0;
    for (int i = 0; i < bytes; ++i) x |= (u64)(unsigned char)s[pos + i] << (8 * i);
    pos += bytes;
    return x;
  }
  i64 geti32() { return (i64)(std::int32_t)(std::uint32_t)get(4); }
};
}  // namespace

void serialize(const FamilySymbol& phi, std::ostream& os) {
  std::string s = "HIDASYM";
  s.push_back('\0');
  put(s, kSymbolFormat, 4);
  put(s, phi.profile.p, 8);
  put(s, phi.manin->tame_level(), 8);
  put(s, (u64)(std::uint32_t)phi.m, 4);
  put(s, (u64)(std::uint32_t)phi.profile.M, 4);
  put(s, (u64)(std::uint32_t)phi.profile.L, 4);
  put(s, phi.seed, 8);
  put(s, (u64)(std::uint32_t)phi.sign, 4);
  put(s, (u64)(std::uint32_t)phi.m_scale, 4);
  put(s, phi.values.size(), 4);
  for (auto& v : phi.values) {
    put(s, (u64)(std::uint32_t)v.denom_shift, 4);
    put(s, v.raw().size(), 4);
    for (u64 x : v.raw()) put(s, x, 8);
  }
  put(s, fnv1a(s), 8);
  os.write(s.data(), (std::streamsize)s.size());
  if (!os) fail(ErrorKind::Validation, "failed to write symbol stream");
}

FamilySymbol deserialize(std::istream& is) {
  std::stringstream buf;
  buf << is.rdbuf();
  std::string s = buf.str();
  if (s.size() < 16 || s.compare(0, 8, std::string("HIDASYM\0", 8)) != 0)
    fail(ErrorKind::Validation, "not a symbol stream");
  std::string body = s.substr(0, s.size() - 8);
  Reader tail{s, s.size() - 8};
  if (tail.get(8) != fnv1a(body)) fail(ErrorKind::Validation, "symbol checksum mismatch");
  Reader r{body, 8};
  if (r.get(4) != kSymbolFormat) fail(ErrorKind::Validation, "symbol format version mismatch");
  u64 p = r.get(8), N = r.get(8);
  int m = (int)r.geti32(), M = (int)r.geti32(), L = (int)r.geti32();
  FamilySymbol phi;
  phi.seed = r.get(8);
  phi.sign = (int)r.geti32();
  phi.m_scale = (int)r.geti32();
  phi.manin = solve_manin(N, p);
  phi.profile = PrecisionProfile(p, M, L);
  phi.m = m;
  u64 t = r.get(4);
  if ((int)t != phi.manin->num_generators()) fail(ErrorKind::Validation, "generator count mismatch");
  for (u64 i = 0; i < t; ++i) {
    FamilyDistribution d(phi.profile);
    d.denom_shift = (int)r.geti32();
    u64 n = r.get(4);
    if (n != d.raw().size()) fail(ErrorKind::Validation, "moment array size mismatch");
    for (u64 k = 0; k < n; ++k) d.raw()[k] = r.get(8);
    phi.values.push_back(std::move(d));
  }
  if (r.pos != body.size()) fail(ErrorKind::Validation, "trailing bytes in symbol stream");
  return phi;
}

void save_symbol(const FamilySymbol& phi, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::Validation, "cannot open " + path + " for writing");
  serialize(phi, os);
}

FamilySymbol load_symbol(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::Validation, "cannot open " + path);
  return deserialize(is);
}

}  // namespace hida
