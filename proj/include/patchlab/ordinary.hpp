#pragma once

#include "patchlab/complexes.hpp"

namespace patchlab {

// Commuting operator on a finite module, given in its invariant-factor basis.
struct ModuleOperator {
  IMat matrix;
  void validate_against(const FiniteModule& M) const;  // well-defined + commutes with ring action
};

struct FittingResult {
  FiniteModule ordinary;   // T acts invertibly here
  FiniteModule nilpotent;  // T is nilpotent here
  IMat idempotent;         // e: projection onto the ordinary part, e^2 = e, eT = Te
  int stabilization_index = 0;
};

/// M = e M (+) ker-part: the finite-length realization of lim T^n M.
FittingResult fitting_decomposition(const FiniteModule& M, const ModuleOperator& T);

// Chain-map operator on a complex: one ring matrix per degree.
struct ComplexOperator {
  RingSpec ring;
  int lo = 0;
  std::vector<RingMatrix> mats;  // square, size = rank per degree

  const RingMatrix* at_degree(int degree) const;
  void validate_against(const Complex& C) const;  // shapes + chain-map property
};

ComplexOperator identity_operator(const Complex& C);
ComplexOperator operator_sub_scalar(const Complex& C, const ComplexOperator& T, const RingElement& eta);
ComplexOperator operator_compose(const Complex& C, const ComplexOperator& A, const ComplexOperator& B);
bool operators_commute(const Complex& C, const ComplexOperator& A, const ComplexOperator& B);

struct OrdinaryPartResult {
  Complex complex;              // the direct summand C_T
  int stabilization_index = 0;
  bool homology_verified = false;  // H^*(C_T) matches the ordinary part of H^*(C)
  std::vector<std::pair<int, std::string>> degree_reports;
};

/// C_T = stabilized image of T, extracted with an explicit free basis.
OrdinaryPartResult ordinary_part_complex(const Complex& C, const ComplexOperator& T);

/// Composite projector prod(pi_x) o prod(T_x - eta_x); all operators must
/// commute pairwise (checked).
ComplexOperator localization_projector(const Complex& C,
                                       const std::vector<std::pair<ComplexOperator, RingElement>>& ops,
                                       const std::vector<ComplexOperator>& pis);

}  // namespace patchlab
