#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patchlab/rings.hpp"

namespace patchlab {

// Exact homological algebra over F_p[x_1..x_q], graded, degrevlex order,
// position-over-term for free modules.

struct Mono {
  std::vector<int> e;
  int deg() const;
  static Mono one(int q);
  bool divides(const Mono& o) const;
  Mono operator*(const Mono& o) const;
  Mono quotient(const Mono& o) const;  // this / o, assumes divisibility
  bool operator==(const Mono& o) const { return e == o.e; }
};

/// degrevlex: higher degree first; ties broken by the last nonzero entry of
/// a - b being negative.
int mono_cmp(const Mono& a, const Mono& b);

struct GTerm {
  Int c = 0;  // in [1, p)
  Mono m;
  int pos = 0;  // free-module component
  bool operator==(const GTerm& o) const { return c == o.c && m == o.m && pos == o.pos; }
};

/// position-over-term: lower position wins, then degrevlex on monomials.
int term_cmp(const GTerm& a, const GTerm& b);

// Element of a graded free module F = (+)_i R(-shift_i); terms sorted
// descending, coefficients reduced mod p and nonzero.
struct GVec {
  std::vector<GTerm> t;
  bool zero() const { return t.empty(); }
  const GTerm& lead() const;
};

struct FreeSlots {
  Int p = 2;
  int q = 1;
  std::vector<int> shifts;  // generator degrees of the free module

  int rank() const { return static_cast<int>(shifts.size()); }
};

GVec gvec_normalize(const FreeSlots& F, std::vector<GTerm> terms);
GVec gvec_add(const FreeSlots& F, const GVec& a, const GVec& b);
GVec gvec_scale(const FreeSlots& F, Int c, const GVec& a);
GVec gvec_mono_mul(const FreeSlots& F, Int c, const Mono& m, const GVec& a);
/// Total degree if homogeneous (term degree + slot shift); nullopt for 0.
std::optional<int> gvec_degree(const FreeSlots& F, const GVec& a);
void require_homogeneous(const FreeSlots& F, const GVec& a);

struct GroebnerBasis {
  FreeSlots F;
  std::vector<GVec> elems;  // reduced, monic, sorted by leading term
};

GroebnerBasis buchberger(const FreeSlots& F, std::vector<GVec> gens);
GVec normal_form(const GroebnerBasis& gb, GVec v);
bool submodule_contains(const GroebnerBasis& gb, const GVec& v);

/// Syzygy module of the given generators (not of their GB), computed by the
/// elimination embedding into F (+) R^s.  gen_shifts[i] must be the degree of
/// gens[i] (free choice for zero generators).
std::vector<GVec> syzygies_with_shifts(const FreeSlots& F, const std::vector<GVec>& gens,
                                       const std::vector<int>& gen_shifts,
                                       FreeSlots* syz_slots = nullptr);
/// Convenience wrapper deriving shifts from degrees (rejects zero generators).
std::vector<GVec> syzygies(const FreeSlots& F, const std::vector<GVec>& gens,
                           FreeSlots* syz_slots = nullptr);

/// Minimal generating set (drops members lying in the span of the others).
std::vector<GVec> minimal_generators(const FreeSlots& F, std::vector<GVec> gens);

// Graded module = coker(relations) on a free module with the given shifts.
// Over a graded quotient ring, the defining relations are adjoined.
struct GradedModule {
  RingSpec ring;  // GradedQuotient kind (relations possibly empty = polynomial ring)
  FreeSlots F;
  std::vector<GVec> relations;

  void validate() const;
};

/// Presentation with the ring's defining relations adjoined (internal form).
std::vector<GVec> effective_relations(const GradedModule& M);

struct HilbertData {
  std::vector<Int> values;  // HF(0..D)
  int dim = 0;              // Krull dimension
  Int multiplicity = 0;
  int bound = 0;
};

int default_degree_bound(const GradedModule& M);
HilbertData hilbert_data(const GradedModule& M, int D);
/// Hilbert function of the submodule (span(gens) + relations)/relations of N.
std::vector<Int> submodule_hilbert(const GradedModule& N, const std::vector<GVec>& gens, int D);

struct Resolution {
  std::vector<FreeSlots> frees;         // F_0, F_1, ...
  std::vector<std::vector<GVec>> maps;  // maps[i]: columns of F_{i+1} -> F_i
  bool minimal = true;

  int length() const { return static_cast<int>(frees.size()) - 1; }
  std::vector<Int> ranks() const;
};

Resolution minimal_free_resolution(const GradedModule& M);

struct HomologicalReport {
  int depth = 0;
  int proj_dim = 0;
  int krull_dim = 0;
  std::vector<Int> hilbert;
  Int multiplicity = 0;
  int regular_sequence_found = -1;  // linear-form oracle lower bound, -1 when skipped
};

/// depth via Auslander-Buchsbaum (q - pd), with an optional exhaustive
/// linear-form regular-sequence cross-check at small scale.
HomologicalReport depth_pd(const GradedModule& M, bool run_regular_sequence_oracle = false);

/// Exhaustive-linear-form regular sequence search (lower bound for depth).
int linear_regular_sequence_length(const GradedModule& M, int D);

struct DepthBoundVerdict {
  int depth_N = 0;
  int dim_M = 0;
  bool holds = false;  // dim(M) >= depth(N)
};

/// Lemma check: for 0 != M <= N, dim(M) >= depth(N).
DepthBoundVerdict check_depth_bound(const GradedModule& N, const std::vector<GVec>& M_gens);

// Complexes of graded free modules (cochain, degrees lo..hi).
struct GradedComplex {
  RingSpec ring;
  int lo = 0;
  std::vector<FreeSlots> frees;
  std::vector<std::vector<GVec>> diffs;  // diffs[k]: columns map F_k -> F_{k+1}

  int hi() const { return lo + static_cast<int>(frees.size()) - 1; }
  void validate() const;  // shapes, homogeneity, d o d = 0
};

/// H^degree as an abstract graded module (generators = kernel syzygies).
GradedModule graded_cohomology(const GradedComplex& P, int degree);

struct LengthCriterionReport {
  int l0 = 0;
  int codim = -1;           // q - max dim H^i; -1 when all cohomology vanishes
  bool codim_at_most_l0 = true;
  bool equality = false;
  // conclusions checked when equality holds:
  bool lower_vanishing = false;  // H^i = 0 for i < l0
  bool resolution_of_top = false;
  int top_depth = -1;
  int top_pd = -1;
  bool conclusions_hold = false;
};

/// Lemma check: codim H^*(P) <= l0; on equality, P resolves H^{l0} which has
/// depth q - l0 and projective dimension l0.
LengthCriterionReport check_length_criterion(const GradedComplex& P, int l0);

struct NearlyFaithfulVerdict {
  bool nearly_faithful = false;
  std::vector<GVec> annihilator;          // generators of Ann(M) in the ambient ring
  std::vector<int> failing_primes;        // indices of primes not containing Ann
};

/// Ann(M) nilpotent <=> Ann(M) contained in every declared minimal prime.
NearlyFaithfulVerdict nearly_faithful(const GradedModule& M,
                                      const std::vector<std::vector<GVec>>& minimal_primes);

/// Ideal of annihilators of coker presentation (in the ambient polynomial ring,
/// containing the ring's defining relations).
std::vector<GVec> annihilator_ideal(const GradedModule& M);

/// Koszul cochain complex on the given linear forms (subset of variables),
/// placed in degrees 0..l (top cohomology = R/(forms)).
GradedComplex koszul_complex(const RingSpec& ring, const std::vector<int>& var_indices);

GVec gvec_from_raw(const FreeSlots& F, const RawPoly& poly, int pos = 0);

}  // namespace patchlab
