#pragma once

#include <optional>
#include <string>
#include <vector>

#include "patchlab/rings.hpp"

namespace patchlab {

// Which transform matrices a caller needs; untracked ones stay empty.
struct SnfNeeds {
  bool U = true, Uinv = true, V = true, Vinv = true;
  static SnfNeeds none() { return {false, false, false, false}; }
  static SnfNeeds solve() { return {true, false, true, false}; }
  static SnfNeeds kernel() { return {false, false, true, false}; }
  static SnfNeeds coords() { return {true, true, false, false}; }
};

// Smith normal form over the chain ring Z/p^m: U*A*V = D with U, V invertible
// and D diagonal with p-power entries in divisibility (ascending valuation)
// order; a valuation of m encodes the zero entry.
struct SnfResult {
  IMat U, Uinv, V, Vinv, D;
  std::vector<int> dvals;  // valuations of diagonal entries, length min(rows, cols)
  int rank = 0;            // entries with valuation < m
  Int p = 2;
  int m = 1;

  Int image_size_log() const;   // log_p |column span|
  Int kernel_size_log() const;  // log_p |kernel|
};

SnfResult smith_normal_form(const IMat& A, Int p, int m, SnfNeeds needs = {});

/// One solution x of A x = b (mod p^m), if any, reusing a computed SNF.
std::optional<IVec> solve_with_snf(const SnfResult& S, const IVec& b);

/// Generating set for ker(A) as columns (possibly empty matrix n x k).
IMat kernel_generators(const SnfResult& S);

struct KernelGens {
  IMat cols;
  std::vector<int> orders;  // order of column i is p^orders[i]
};
KernelGens kernel_generators_with_orders(const SnfResult& S);

/// Solve A X = B columnwise; nullopt if any column has no solution.
std::optional<IMat> solve_batch_with_snf(const SnfResult& S, const IMat& B);

/// Gaussian-elimination rank over F_p (independent oracle for tests).
int gauss_rank_mod_p(IMat A, Int p);

// Finitely generated module over Z/p^mm presented by invariant factors
// p^{e_1} >= ... >= p^{e_s} together with the matrices of ring-generator
// actions in that basis (entry (i,j) taken mod p^{e_i}).
struct FiniteModule {
  Int p = 2;
  int mm = 1;
  std::vector<int> factors;  // descending exponents, each in [1, mm]
  RingSpec ring;             // the acting ring
  std::vector<std::string> gen_names;
  std::vector<IMat> actions;

  Int num_gens() const { return static_cast<Int>(factors.size()); }
  Int size_log() const;
  Int length() const { return size_log(); }
  bool is_zero() const { return factors.empty(); }
  void validate() const;  // well-definedness + pairwise commutation
  bool same_factors(const FiniteModule& o) const { return factors == o.factors && p == o.p; }
  const IMat& action(const std::string& name) const;
};

/// Composition of action matrices respecting the row moduli.
IMat module_action_mul(const IMat& A, const IMat& B, const std::vector<int>& factors, Int p);
bool module_action_equal(const IMat& A, const IMat& B, const std::vector<int>& factors, Int p);
bool module_action_well_defined(const IMat& A, const std::vector<int>& factors, Int p);

// Subquotient span(K)/span(W) of the ambient free module (Z/p^mm)^n,
// with exact coordinates in an invariant-factor basis.
class Subquotient {
 public:
  Subquotient(IMat K, IMat W, Int p, int mm);

  const std::vector<int>& factors() const { return factors_; }
  Int num_factors() const { return static_cast<Int>(factors_.size()); }
  Int size_log() const;
  Int ambient_dim() const { return n_; }

  bool contains(const IVec& ambient) const;
  IVec coords(const IVec& ambient) const;  // length = num_factors()
  IVec lift(const IVec& h) const;          // a representative in the ambient module
  /// Matrix of an ambient endomorphism G (n x n) on the subquotient.
  /// G must preserve span(K) and span(W).
  IMat induced_action(const IMat& G) const;
  /// Relation matrix in K-coordinates (for diagnostics).
  const IMat& relations() const { return rel_; }

 private:
  Int p_;
  int mm_;
  Int n_, s_;
  bool identity_K_ = false;
  bool free_mode_ = false;  // K = identity, no relations: H = ambient
  bool diag_mode_ = false;  // K = identity, relations diagonal-like
  IMat K_;
  std::optional<SnfResult> Ksnf_;
  IMat rel_;
  std::optional<SnfResult> relsnf_;
  std::vector<int> factors_;
  std::vector<Int> retained_;  // rows of U_rel kept, aligned with factors_
};

/// Module = full ambient (Z/p^mm)^s with relations diag(p^{e_i}).
Subquotient module_ambient_subquotient(const FiniteModule& M);
IMat module_relation_matrix(const FiniteModule& M);

/// Kernel/image/quotient of an action matrix X on M, with induced actions.
FiniteModule module_kernel(const FiniteModule& M, const IMat& X);
FiniteModule module_image(const FiniteModule& M, const IMat& X);
FiniteModule module_quotient_by_image(const FiniteModule& M, const IMat& X);
Int module_kernel_size_log(const FiniteModule& M, const IMat& X);
Int module_image_size_log(const FiniteModule& M, const IMat& X);

/// The same subobjects as explicit subquotients (to induce extra operators).
Subquotient submodule_image_subquotient(const FiniteModule& M, const IMat& X);
Subquotient submodule_kernel_subquotient(const FiniteModule& M, const IMat& X);
/// Generators (ambient columns) of ker(X : M -> M).
IMat module_kernel_columns(const FiniteModule& M, const IMat& X);
/// Rebuild a FiniteModule from a subquotient of M, inducing M's ring actions.
FiniteModule module_from_subquotient(const Subquotient& sq, const FiniteModule& parent);

struct KernelImageCokernel {
  FiniteModule kernel, image, cokernel;
};

/// A over a chain ring, viewed as a map (Z/p^m)^cols -> (Z/p^m)^rows.
KernelImageCokernel kernel_image_cokernel(const IMat& A, Int p, int m);

/// Block matrix over Z/p^m of an S-linear map between free S-modules,
/// blocks = regular representations of the entries.  Functorial.
IMat underlying_abelian(const Ring& R, const RingMatrix& A);
/// Underlying abelian coordinates of a free-module vector (length rank*B).
IVec underlying_vector(const Ring& R, const std::vector<RingElement>& v);

/// Abelian matrix of a ring map applied coordinatewise on free modules:
/// (S_src)^rank -> (S_dst)^rank.
IMat underlying_map_matrix(const RingMap& f, Int rank);

}  // namespace patchlab
