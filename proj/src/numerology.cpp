#include "patchlab/numerology.hpp"

namespace patchlab {

void SignatureInput::validate() const {
  if (n < 1) fail("ERR_SIGNATURE", "representation dimension must be >= 1");
  if (r1 < 0 || r2 < 0 || r1 + 2 * r2 < 1) fail("ERR_SIGNATURE", "need [F:Q] = r1 + 2 r2 >= 1");
}

Invariants invariants(const SignatureInput& s) {
  s.validate();
  const Int n = s.n;
  Invariants out;
  if (n % 2 == 1) {
    out.l0 = s.r1 * ((n - 1) / 2) + s.r2 * (n - 1);
    out.h0sum = s.r1 * ((n * n + 1) / 2 - 1) + s.r2 * (n * n - 1);
  } else {
    out.l0 = s.r1 * ((n - 2) / 2) + s.r2 * (n - 1);
    out.h0sum = s.r1 * (n * n / 2 - 1) + s.r2 * (n * n - 1);
  }
  out.dimY = s.r1 * (n * n - 1 - n * (n - 1) / 2) + s.r2 * (n * n - 1);
  const Int twice_q0 = out.dimY - out.l0;
  if (twice_q0 % 2 != 0) fail("ERR_NUMEROLOGY", "q0 failed to be an integer (internal error)");
  out.q0 = twice_q0 / 2;
  return out;
}

InfinityIdentity check_infinity_identity(const SignatureInput& s) {
  Invariants inv = invariants(s);
  InfinityIdentity out;
  out.lhs = inv.h0sum;
  out.rhs = s.field_degree() * s.n * (s.n - 1) / 2 + inv.l0;
  out.equal = out.lhs == out.rhs;
  return out;
}

bool oddness(Int n, const std::vector<Int>& traces) {
  for (Int t : traces) {
    if (t > n || t < -n) fail("ERR_ODDNESS", "involution trace exceeds the dimension");
    if (((t % 2) + 2) % 2 != ((n % 2) + 2) % 2)
      fail("ERR_ODDNESS", "involution trace must be congruent to n mod 2");
  }
  for (Int t : traces)
    if (t < -1 || t > 1) return false;
  return true;
}

void SelmerInput::validate() const {
  auto nonneg = [](Int v) { return v >= 0; };
  if (!nonneg(h1_dual) || !nonneg(h0_ad) || !nonneg(h0_ad1))
    fail("ERR_SELMER", "Selmer inputs must be nonnegative");
  for (Int v : local_terms)
    if (v < 0) fail("ERR_SELMER", "local terms must be nonnegative");
  for (Int v : h0_T_and_infty)
    if (v < 0) fail("ERR_SELMER", "h0 contributions must be nonnegative");
}

Int selmer_difference(const SelmerInput& inp) {
  inp.validate();
  Int sum_local = 0;
  for (Int v : inp.local_terms) sum_local += v;
  Int sum_h0 = 0;
  for (Int v : inp.h0_T_and_infty) sum_h0 += v;
  return inp.h1_dual + inp.h0_ad - inp.h0_ad1 + sum_local - sum_h0;
}

TwGeneratorCount tw_generator_count(Int q, Int T_size, const SignatureInput& s) {
  Invariants inv = invariants(s);
  TwGeneratorCount out;
  out.value = q + T_size - 1 - s.field_degree() * s.n * (s.n - 1) / 2 - inv.l0;
  out.negative = out.value < 0;
  return out;
}

Int rloc_dimension(Int n, Int SpR_size, const SignatureInput& s) {
  s.validate();
  return 1 + SpR_size * (n * n - 1) + s.field_degree() * n * (n - 1) / 2;
}

Int framing_variable_count(Int n, Int T_size) { return n * n * T_size - 1; }

}  // namespace patchlab
