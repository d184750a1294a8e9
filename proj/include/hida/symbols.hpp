// Manin relations for Gamma_0(Np) and family-valued modular symbols.
#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "hida/dist.hpp"

namespace hida {

// Cusp x/y in lowest terms with y >= 0; infinity is (1, 0).
struct Cusp {
  i64 x = 1, y = 0;
  static Cusp make(i64 x, i64 y);
  static Cusp inf() { return {1, 0}; }
  bool operator==(const Cusp& o) const = default;
};
Cusp operator*(const Mat2& g, const Cusp& c);

// {x/y} - {inf} as unimodular pieces D_g = {g inf} - {g 0}.
std::vector<Mat2> cf_path(const Cusp& c);

struct Generator {
  enum Kind { Root, Cotree, Tors2, Tors3 };
  Kind kind = Root;
  int edge = 0;     // coset whose Manin symbol this generator is
  int partner = -1; // Root/Cotree: derived edge with E_partner = -x|mat
  Mat2 mat;         // Root/Cotree: that matrix; Tors: x|(1 + mat [+ mat^2]) = 0
};

// One step of expanding generator values to all coset symbols.
struct PlanStep {
  enum Kind { FromGen, Partner, Triangle, Negate };
  Kind kind;
  int edge;
  int a = -1, b = -1;  // FromGen/Partner: generator; Triangle: two edges; Negate: edge
};

// A unimodular piece of a decomposed divisor: sign * E_edge | beta.
struct SymTerm {
  int edge;
  Mat2 beta;
  int sign;
};

class ManinData {
 public:
  ManinData(u64 N, u64 p);

  u64 tame_level() const { return N_; }
  u64 prime() const { return p_; }
  u64 level() const { return Np_; }
  int index() const { return (int)reps_.size(); }
  int coset(i64 c, i64 d) const;
  const Mat2& rep(int i) const { return reps_[i]; }
  int sigma(int i) const { return sigma_[i]; }
  int tau(int i) const { return tau_[i]; }
  const std::vector<Generator>& generators() const { return gens_; }
  int num_generators() const { return (int)gens_.size(); }
  const std::vector<PlanStep>& plan() const { return plan_; }
  int root_tau_edge() const { return tau_[0]; }
  int num_torsion(int order) const;
  bool in_gamma0(const Mat2& g) const;

  // Terms with Phi(D)|h = sum sign * E_edge|beta for D = {a} - {b}.
  std::vector<SymTerm> decompose(const Cusp& a, const Cusp& b, const Mat2& h) const;
  // Divisor of generator i as a pair of cusps.
  std::pair<Cusp, Cusp> generator_divisor(int i) const;

 private:
  u64 N_, p_, Np_;
  std::vector<int> table_;  // (c mod Np, d mod Np) -> coset or -1
  std::vector<Mat2> reps_;
  std::vector<int> sigma_, tau_;
  std::vector<Generator> gens_;
  std::vector<PlanStep> plan_;
};

std::shared_ptr<const ManinData> solve_manin(u64 N, u64 p);

struct FamilySymbol {
  std::shared_ptr<const ManinData> manin;
  PrecisionProfile profile;
  int m = 0;
  int sign = 0;
  int m_scale = 0;
  u64 seed = 0;
  std::vector<FamilyDistribution> values;  // one per generator

  FamilySymbol operator+(const FamilySymbol& o) const;
  FamilySymbol operator-(const FamilySymbol& o) const;
  FamilySymbol scaled(u64 c) const;
  FamilySymbol times(const TruncSeries& f) const;
  FamilySymbol reduced(const PrecisionProfile& to) const;
  int common_p_power() const;
  FamilySymbol div_p(int e) const;
  bool is_zero() const;
  bool operator==(const FamilySymbol& o) const;
};

FamilySymbol zero_symbol(std::shared_ptr<const ManinData> manin, const PrecisionProfile& prof,
                         int m);
// Values on every coset symbol D_{g_c}.
std::vector<FamilyDistribution> expand(const FamilySymbol& phi);
FamilyDistribution eval_at_divisor(const FamilySymbol& phi, const Cusp& a, const Cusp& b);
// True when every sigma and tau relation between coset symbols vanishes.
bool relations_hold(const FamilySymbol& phi);

// Free data: one distribution per non-root generator (cotree value, or v with
// y = v|(1 - mat) for torsion generators).
FamilySymbol assemble_symbol(std::shared_ptr<const ManinData> manin, const PrecisionProfile& prof,
                             int m, const std::vector<FamilyDistribution>& free_values);
// Working profile needed so that assemble_symbol lands on prof.
PrecisionProfile assemble_working_profile(const ManinData& manin, const PrecisionProfile& prof,
                                          int m);
FamilySymbol random_symbol(std::shared_ptr<const ManinData> manin, const PrecisionProfile& prof,
                           int m, u64 seed);

// Sum over h in H of Phi(h D_i)|h, with action matrices precomputed per term.
class SymbolOperator {
 public:
  SymbolOperator(std::shared_ptr<const ManinData> manin, const PrecisionProfile& prof, int m,
                 const std::vector<Mat2>& H);
  FamilySymbol apply(const FamilySymbol& phi) const;
  const PrecisionProfile& profile() const { return prof_; }

 private:
  std::shared_ptr<const ManinData> manin_;
  PrecisionProfile prof_;
  int m_;
  std::vector<std::vector<std::pair<int, ActionMatrix>>> terms_;  // per generator
};

FamilySymbol apply_iota(const FamilySymbol& phi);
FamilySymbol sign_project(const FamilySymbol& phi, int sign);

constexpr std::uint32_t kSymbolFormat = 1;
void serialize(const FamilySymbol& phi, std::ostream& os);
FamilySymbol deserialize(std::istream& is);
void save_symbol(const FamilySymbol& phi, const std::string& path);
FamilySymbol load_symbol(const std::string& path);

}  // namespace hida
