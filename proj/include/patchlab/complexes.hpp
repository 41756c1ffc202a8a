#pragma once

#include <map>
#include <string>
#include <vector>

#include "patchlab/linalg.hpp"

namespace patchlab {

// Bounded cochain complex of finite free modules over a finite local ring.
// diffs[k] is d^{lo+k} : rank lo+k -> rank lo+k+1 (rows = target rank).
struct Complex {
  RingSpec ring;
  int lo = 0;
  std::vector<Int> ranks;
  std::vector<RingMatrix> diffs;

  int hi() const { return lo + static_cast<int>(ranks.size()) - 1; }
  Int rank_at(int degree) const;
  bool has_degree(int degree) const { return degree >= lo && degree <= hi(); }
  /// d^degree, or empty view when out of range / top degree.
  const RingMatrix* diff_at(int degree) const;
  void validate_shape() const;  // ranks/diffs sizes agree, rings agree
  Int euler_characteristic() const;
};

struct ComplexValidity {
  bool valid = true;
  std::vector<std::pair<int, std::string>> failures;  // degree, message
};

ComplexValidity check_complex(const Complex& C);

Complex base_change(const Complex& C, const RingMap& f);

/// H^degree(C) with the ring-generator actions attached.
FiniteModule cohomology(const Complex& C, int degree);

/// Cohomology together with induced matrices of extra degreewise endomorphisms
/// (each must commute with the differential in/out of this degree).
struct CohomologyWithOperators {
  FiniteModule H;
  std::vector<IMat> induced;
};
CohomologyWithOperators cohomology_with_operators(const Complex& C, int degree,
                                                  const std::vector<RingMatrix>& extra);

/// Cohomology with coordinate access into the ambient underlying module
/// (rank * basis coordinates over Z/p^m); sq is empty for the zero module.
struct CohomologyPresentation {
  FiniteModule H;
  std::optional<Subquotient> sq;
  Int rank = 0;
};
CohomologyPresentation cohomology_presentation(const Complex& C, int degree);

struct MinimalityCertificate {
  std::vector<bool> diff_in_max_ideal;  // one flag per differential
  bool minimal = true;
};

MinimalityCertificate minimality_certificate(const Complex& C);

/// Split off all unit pivots (Nakayama): returns a complex with the same
/// cohomology whose differentials vanish modulo the maximal ideal.
/// Deterministic: scans degrees ascending, entries row-major.
std::pair<Complex, MinimalityCertificate> minimize(const Complex& C);

enum class HomologyVerdict { Isomorphic, EquivalentInvariants, Distinct };

struct DegreeComparison {
  int degree;
  HomologyVerdict verdict;
  std::string detail;
};

struct HomologyComparison {
  HomologyVerdict verdict = HomologyVerdict::Isomorphic;
  std::vector<DegreeComparison> degrees;
};

struct SameHomologyConfig {
  Int exhaustive_size_cap = Int{1} << 12;   // |H| cap for the exhaustive tier
  Int enumeration_cap = Int{1} << 16;       // Hom-space enumeration cap
};

/// Per-degree comparison of cohomology: exhaustive equivariant-isomorphism
/// search when small, an invariant battery otherwise.
HomologyComparison same_homology(const Complex& C1, const Complex& C2,
                                 const SameHomologyConfig& cfg = {});

/// Isomorphism battery for one pair of modules (used by same_homology).
struct ModuleIsoReport {
  HomologyVerdict verdict;
  std::string detail;
};
ModuleIsoReport module_isomorphic(const FiniteModule& A, const FiniteModule& B,
                                  const SameHomologyConfig& cfg = {});

/// dim_k H^degree(C (x) k) for every degree (Nakayama ranks).
std::vector<Int> residual_cohomology_dims(const Complex& C);

}  // namespace patchlab
