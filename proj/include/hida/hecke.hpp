// Hecke operators, ordinary projection, localization and linear algebra over
// Z_p[[w]]/(p^M, w^L).
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hida/symbols.hpp"

namespace hida {

struct HeckeOp {
  char kind = 'T';  // 'T' for l not dividing Np, 'U' for l | Np
  u64 ell = 2;
  std::string name() const;
  static HeckeOp parse(const std::string& s);
  bool operator==(const HeckeOp& o) const = default;
};
// The natural operator at l for this level: U_l when l | Np, else T_l.
HeckeOp hecke_at(const ManinData& md, u64 ell);
std::vector<Mat2> hecke_cosets(const ManinData& md, const HeckeOp& op);

FamilySymbol apply_hecke(const FamilySymbol& phi, const HeckeOp& op);
FamilySymbol apply_Up(const FamilySymbol& phi);

using TotalMeasureVector = std::vector<TruncSeries>;
TotalMeasureVector total_measures(const FamilySymbol& phi);

struct LinearSolution {
  std::vector<TruncSeries> coeffs;
  int certified = 0;  // p-adic precision of the coefficients
};
// Coefficients a with sum a_i vs[i] = u mod (p^M, w^L).
LinearSolution solve_linear(const std::vector<TotalMeasureVector>& vs, const TotalMeasureVector& u);
// Rank over F_p of vectors reduced mod (p, w).
int reduction_rank(const std::vector<TotalMeasureVector>& vs);

struct KrylovResult {
  FamilySymbol phi;
  int iterations = 0;
  std::vector<TruncSeries> relation;  // phi = sum relation[i] op^{i+1}(phi)
};
using SymbolMap = std::function<FamilySymbol(const FamilySymbol&)>;
// Iterate op until phi lies in the span of op(phi), ..., op^d(phi), verified on
// the whole symbol.
KrylovResult krylov_project(const FamilySymbol& phi, const SymbolMap& op, int d, int max_iters);
KrylovResult ordinary_project(const FamilySymbol& phi, int rank_hint, int max_iters = -1);

struct Killer {
  HeckeOp op;
  std::vector<i64> poly;  // monic, lowest degree first
};
using MaximalIdealSpec = std::vector<Killer>;
MaximalIdealSpec parse_killers(const std::string& s);
std::string killers_str(const MaximalIdealSpec& spec);
FamilySymbol apply_killers(const FamilySymbol& phi, const MaximalIdealSpec& spec);
KrylovResult localize(const FamilySymbol& phi, const MaximalIdealSpec& spec, int rank_hint,
                      int max_iters = -1);

// Classical symbols with values in the weight-k moment module over F_p.
class ClassicalSpace {
 public:
  ClassicalSpace(std::shared_ptr<const ManinData> md, int k);
  int dim() const { return (int)basis_.size(); }
  // Matrix of an operator on the basis: column i is the image of basis vector i.
  std::vector<std::vector<u64>> op_matrix(const std::vector<Mat2>& H) const;
  int ordinary_rank(int sign) const;
  // Matrix of T on the ordinary sign part (column i is the image of basis vector i).
  std::vector<std::vector<u64>> ordinary_op(const HeckeOp& op, int sign) const;
  // Characteristic polynomial of T on the ordinary sign part, lowest first.
  std::vector<u64> ordinary_charpoly(const HeckeOp& op, int sign) const;
  // Dimension of the part of the ordinary sign space where every killer is invertible.
  int localized_rank(const MaximalIdealSpec& spec, int sign) const;

 private:
  std::shared_ptr<const ManinData> md_;
  int k_;
  u64 p_;
  std::vector<std::vector<u64>> basis_;  // over all (coset, moment) coordinates
  std::vector<int> free_cols_;
  std::vector<std::vector<u64>> sign_basis(int sign) const;
  std::vector<std::vector<u64>> ordinary_basis(int sign) const;
};
int classical_ordinary_rank(u64 N, u64 p, int k, int sign);

struct BasisOptions {
  int target_rank = 0;
  int ordinary_rank = 0;  // Krylov depth for the ordinary projection; 0 means target_rank
  int sign = 0;
  u64 seed = 1;
  MaximalIdealSpec spec;
  int max_attempts = 0;  // 0: 4 * target_rank + 4
  int max_iters = -1;
};
std::vector<FamilySymbol> build_basis(std::shared_ptr<const ManinData> md,
                                      const PrecisionProfile& prof, int m,
                                      const BasisOptions& opt);

struct HeckeMatrix {
  std::vector<std::vector<TruncSeries>> a;  // T phi_i = sum_j a[i][j] phi_j
  int certified = 0;
};
HeckeMatrix hecke_matrix(const std::vector<FamilySymbol>& basis, const HeckeOp& op);
// Monic characteristic polynomial, lowest degree first (division free).
std::vector<TruncSeries> charpoly(const std::vector<std::vector<TruncSeries>>& A);

// Polynomials over F_p, lowest degree first.
std::vector<u64> fp_charpoly(std::vector<std::vector<u64>> A, u64 p);
int fp_rank(std::vector<std::vector<u64>> rows, u64 p);

}  // namespace hida
