#pragma once

#include <optional>
#include <string>
#include <vector>

#include "patchlab/common.hpp"

namespace patchlab {

// A raw polynomial over F_p in q variables: list of (coefficient, exponent vector).
// Only used to carry graded-poly-quotient relations; graded.hpp owns the arithmetic.
using RawTerm = std::pair<Int, std::vector<int>>;
using RawPoly = std::vector<RawTerm>;

enum class RingKind { Chain, PrimeField, GroupAlgebra, TruncExt, GradedQuotient };

// Presentation of a coefficient/level ring.  The finite local kinds are all of
// the shape (Z/p^m)[(Z/p^N)^q][z_1..z_j]/(z_i^t), with a distinguished monomial
// basis {gamma^a z^b : a_i in [0,p^N), b_i in [0,t)}.
struct RingSpec {
  RingKind kind = RingKind::Chain;
  Int p = 2;
  int m = 1;  // coefficients live in Z/p^m
  int q = 0;  // group-algebra generator count
  int N = 0;  // group is (Z/p^N)^q
  int j = 0;  // truncated variables z_1..z_j
  int t = 1;  // z_i^t = 0
  std::vector<RawPoly> relations;  // GradedQuotient only (homogeneous, degrevlex order fixed)

  static RingSpec chain(Int p, int m);
  static RingSpec prime_field(Int p);
  static RingSpec group_algebra(Int p, int m, int q, int N);
  static RingSpec trunc_ext(const RingSpec& base, int j, int t);
  static RingSpec graded_quotient(Int p, int q, std::vector<RawPoly> relations);

  void validate() const;
  bool finite_local() const { return kind != RingKind::GradedQuotient; }

  bool operator==(const RingSpec& o) const;
  bool operator!=(const RingSpec& o) const { return !(*this == o); }
  // Same underlying arithmetic (chain(p,1) and prime-field(p) are interchangeable).
  bool same_arithmetic(const RingSpec& o) const;

  std::string describe() const;
};

struct RingElement {
  RingSpec ring;
  IVec coords;  // length = basis size, entries in [0, p^m)
};

// Handle over a finite local RingSpec: cached basis enumeration, arithmetic,
// residue functional and maximal-ideal generators.
class Ring {
 public:
  explicit Ring(RingSpec spec);

  const RingSpec& spec() const { return spec_; }
  Int basis_size() const { return basis_; }
  Int modulus() const { return modulus_; }  // p^m
  Int p() const { return spec_.p; }
  int m() const { return spec_.m; }

  // basis index <-> mixed-radix digits (q group exponents, then j z-exponents)
  std::vector<int> basis_digits(Int idx) const;
  Int digits_index(const std::vector<int>& digits) const;
  // product of two basis elements: index, or nullopt when killed by z^t = 0
  std::optional<Int> mul_basis(Int a, Int b) const;

  RingElement zero() const;
  RingElement one() const;
  RingElement scalar(Int c) const;
  RingElement gamma(int i) const;  // i in [0, q)
  RingElement zvar(int i) const;   // i in [0, j)
  RingElement basis_element(Int idx) const;

  RingElement add(const RingElement& a, const RingElement& b) const;
  RingElement sub(const RingElement& a, const RingElement& b) const;
  RingElement neg(const RingElement& a) const;
  RingElement mul(const RingElement& a, const RingElement& b) const;
  RingElement scalar_mul(Int c, const RingElement& a) const;

  /// Residue functional S -> F_p: gamma^a -> 1, z^b -> 0 (b != 0), coefficient mod p.
  Int residue(const RingElement& a) const;
  bool is_unit(const RingElement& a) const;
  /// Inverse of a unit (Newton/geometric series on the nilpotent part).
  RingElement inverse(const RingElement& a) const;

  /// Maximal-ideal generators in fixed order: pi, gamma_i - 1, z_i.
  std::vector<std::pair<std::string, RingElement>> maximal_ideal_generators() const;
  /// Ring generators used for module actions, same order/names as above
  /// but with gamma_i themselves (not gamma_i - 1).
  std::vector<std::pair<std::string, RingElement>> action_generators() const;

  /// Regular-representation matrix of x on the monomial basis, over Z/p^m.
  IMat regular_representation(const RingElement& x) const;

  static Int max_basis_cap();  // configurable via PATCHLAB_MAX_BASIS

 private:
  void check_element(const RingElement& a) const;

  RingSpec spec_;
  Int basis_ = 1;
  Int modulus_ = 2;
  Int group_digit_base_ = 1;  // p^N
  std::vector<Int> strides_;  // mixed-radix strides, length q + j
};

enum class MapKind { ReduceLevel, ModPower, Augment, KillVars, Inclusion, TruncVars };

// Structure maps between ring presentations.  All are local homomorphisms.
struct RingMap {
  MapKind kind;
  RingSpec src, dst;
  int param = 0;  // new N (ReduceLevel), new m (ModPower), new t (TruncVars)

  static RingMap reduce_level(const RingSpec& src, int new_N);
  static RingMap mod_power(const RingSpec& src, int new_m);
  static RingMap augment(const RingSpec& src);
  static RingMap kill_vars(const RingSpec& src);
  static RingMap inclusion(const RingSpec& src, const RingSpec& dst);
  static RingMap trunc_vars(const RingSpec& src, int new_t);

  std::string describe() const;
};

RingElement apply_map(const RingMap& f, const RingElement& x);
/// Two maps compose when the first one's dst matches the second one's src.
bool composable(const RingMap& f, const RingMap& g);

struct IdealSpec {
  RingSpec ring;
  std::vector<RingElement> generators;
};

/// Exact membership test: x in the ideal generated by gens (S-span), via
/// underlying-abelian linear algebra.
bool ideal_contains(const Ring& R, const IdealSpec& ideal, const RingElement& x);

// Dense matrix over a finite local ring, row-major entries.
struct RingMatrix {
  RingSpec ring;
  Int rows = 0, cols = 0;
  std::vector<IVec> ent;  // rows*cols coordinate vectors

  const IVec& at(Int r, Int c) const { return ent[r * cols + c]; }
  IVec& at(Int r, Int c) { return ent[r * cols + c]; }
};

RingMatrix ring_matrix_zero(const Ring& R, Int rows, Int cols);
RingMatrix ring_matrix_identity(const Ring& R, Int n);
RingMatrix ring_matrix_scalar(const Ring& R, Int n, const RingElement& c);
RingMatrix ring_matrix_mul(const Ring& R, const RingMatrix& A, const RingMatrix& B);
RingMatrix ring_matrix_add(const Ring& R, const RingMatrix& A, const RingMatrix& B);
RingMatrix ring_matrix_sub(const Ring& R, const RingMatrix& A, const RingMatrix& B);
bool ring_matrix_is_zero(const RingMatrix& A);
bool ring_matrix_equal(const RingMatrix& A, const RingMatrix& B);
RingMatrix ring_matrix_apply_map(const RingMap& f, const RingMatrix& A);
/// Matrix of x . (column vector of ring elements), i.e. apply a row of scalars.
RingElement ring_matrix_entry_dot(const Ring& R, const RingMatrix& A, Int row,
                                  const std::vector<RingElement>& xs);

}  // namespace patchlab
