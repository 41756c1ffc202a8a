#pragma once

#include <vector>

#include "patchlab/common.hpp"

namespace patchlab {

// Closed-form arithmetic for the defect/degree bookkeeping of deformation
// problems attached to GL(n) over a number field of signature (r1, r2).

struct SignatureInput {
  Int n = 1;   // representation dimension
  Int r1 = 0;  // real places
  Int r2 = 0;  // complex places

  Int field_degree() const { return r1 + 2 * r2; }
  void validate() const;
};

struct Invariants {
  Int l0 = 0;
  Int q0 = 0;
  Int dimY = 0;    // 2*q0 + l0, dimension of the locally symmetric space
  Int h0sum = 0;   // sum over infinite places of dim H^0(F_v, ad^0 V)
};

Invariants invariants(const SignatureInput& s);

struct InfinityIdentity {
  Int lhs = 0;
  Int rhs = 0;
  bool equal = false;
};

/// lhs = sum_{v|infty} dim H^0(F_v, ad^0 V); rhs = [F:Q] n(n-1)/2 + l0.
InfinityIdentity check_infinity_identity(const SignatureInput& s);

/// Odd means every complex-conjugation trace lies in {-1, 0, 1}; traces must
/// satisfy |t| <= n and t = n (mod 2).
bool oddness(Int n, const std::vector<Int>& traces);

struct SelmerInput {
  Int h1_dual = 0;    // dim of the dual Selmer group
  Int h0_ad = 0;      // h^0(G_F, ad^0)
  Int h0_ad1 = 0;     // h^0(G_F, ad^0(1))
  std::vector<Int> local_terms;      // dim L_v - h^0(G_v, ad^0) for v in S_a u Q
  std::vector<Int> h0_T_and_infty;   // h^0(G_v, ad^0) for v in T u {v | infty}
  void validate() const;
};

/// h^1_{L,T} = h^1_dual + h^0(ad^0) - h^0(ad^0(1)) + sum local - sum h^0 over T,infty.
Int selmer_difference(const SelmerInput& inp);

struct TwGeneratorCount {
  Int value = 0;
  bool negative = false;  // reported as-is; flags inconsistent configurations
};

/// q + |T| - 1 - [F:Q] n(n-1)/2 - l0.
TwGeneratorCount tw_generator_count(Int q, Int T_size, const SignatureInput& s);

/// 1 + |S_p u R| (n^2 - 1) + [F:Q] n(n-1)/2.
Int rloc_dimension(Int n, Int SpR_size, const SignatureInput& s);

/// Helper for tower configuration: j = n^2 |T| - 1.
Int framing_variable_count(Int n, Int T_size);

}  // namespace patchlab
