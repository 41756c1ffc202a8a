#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "patchlab/complexes.hpp"

using namespace patchlab;

namespace {

RingMatrix one_by_one(const Ring& R, const RingElement& e) {
  RingMatrix M = ring_matrix_zero(R, 1, 1);
  M.at(0, 0) = e.coords;
  return M;
}

// [S --(x)--> S] in degrees 0,1
Complex two_term(const Ring& R, const RingElement& x) {
  Complex C;
  C.ring = R.spec();
  C.lo = 0;
  C.ranks = {1, 1};
  C.diffs = {one_by_one(R, x)};
  return C;
}

Complex random_conjugate(std::mt19937_64& rng, const Ring& R, const Complex& C) {
  // conjugate by random invertible upper/lower triangular-ish matrices per degree
  auto random_invertible = [&](Int n) {
    RingMatrix M = ring_matrix_identity(R, n);
    for (int ops = 0; ops < 3 * n; ++ops) {
      Int i = static_cast<Int>(rng() % n), jj = static_cast<Int>(rng() % n);
      if (i == jj) continue;
      RingElement c = R.zero();
      for (Int b = 0; b < R.basis_size(); ++b) c.coords[b] = static_cast<Int>(rng() % R.modulus());
      // row_i += c * row_jj ; to invert later we only need invertibility, not the inverse
      for (Int col = 0; col < n; ++col)
        M.at(i, col) =
            R.add(RingElement{R.spec(), M.at(i, col)},
                  R.mul(c, RingElement{R.spec(), M.at(jj, col)}))
                .coords;
    }
    return M;
  };
  auto invert = [&](const RingMatrix& M) {
    // Gauss-Jordan over the local ring (pivots are units)
    Int n = M.rows;
    RingMatrix A = M;
    RingMatrix I = ring_matrix_identity(R, n);
    for (Int col = 0; col < n; ++col) {
      Int piv = -1;
      for (Int i = col; i < n; ++i)
        if (R.is_unit(RingElement{R.spec(), A.at(i, col)})) {
          piv = i;
          break;
        }
      REQUIRE(piv >= 0);
      for (Int jj = 0; jj < n; ++jj) {
        std::swap(A.at(col, jj), A.at(piv, jj));
        std::swap(I.at(col, jj), I.at(piv, jj));
      }
      RingElement inv = R.inverse(RingElement{R.spec(), A.at(col, col)});
      for (Int jj = 0; jj < n; ++jj) {
        A.at(col, jj) = R.mul(inv, RingElement{R.spec(), A.at(col, jj)}).coords;
        I.at(col, jj) = R.mul(inv, RingElement{R.spec(), I.at(col, jj)}).coords;
      }
      for (Int i = 0; i < n; ++i) {
        if (i == col) continue;
        RingElement f{R.spec(), A.at(i, col)};
        if (f.coords.isZero()) continue;
        for (Int jj = 0; jj < n; ++jj) {
          A.at(i, jj) = R.sub(RingElement{R.spec(), A.at(i, jj)},
                              R.mul(f, RingElement{R.spec(), A.at(col, jj)}))
                            .coords;
          I.at(i, jj) = R.sub(RingElement{R.spec(), I.at(i, jj)},
                              R.mul(f, RingElement{R.spec(), I.at(col, jj)}))
                            .coords;
        }
      }
    }
    return I;
  };

  std::vector<RingMatrix> g, ginv;
  for (Int r : C.ranks) {
    RingMatrix M = random_invertible(r);
    g.push_back(M);
    ginv.push_back(invert(M));
  }
  Complex out = C;
  for (size_t k = 0; k < out.diffs.size(); ++k)
    out.diffs[k] = ring_matrix_mul(R, ring_matrix_mul(R, g[k + 1], out.diffs[k]), ginv[k]);
  return out;
}

}  // namespace

TEST_CASE("single module with no differential is a valid complex") {
  Ring R(RingSpec::chain(3, 1));
  Complex C;
  C.ring = R.spec();
  C.lo = 0;
  C.ranks = {2};
  CHECK(check_complex(C).valid);
}

TEST_CASE("d = x twice over F_2[x]/x^2 = F_2[Z/2] is valid; units are not") {
  Ring R(RingSpec::group_algebra(2, 1, 1, 1));
  RingElement x = R.sub(R.gamma(0), R.one());  // g - 1, squares to zero
  Complex C;
  C.ring = R.spec();
  C.lo = 0;
  C.ranks = {1, 1, 1};
  C.diffs = {one_by_one(R, x), one_by_one(R, x)};
  CHECK(check_complex(C).valid);

  Complex Bad = C;
  Bad.diffs = {one_by_one(R, R.one()), one_by_one(R, R.one())};
  auto rep = check_complex(Bad);
  CHECK_FALSE(rep.valid);
  REQUIRE(rep.failures.size() == 1);
  CHECK(rep.failures[0].first == 0);
}

TEST_CASE("base change along augment sends gamma-1 to 0") {
  Ring R(RingSpec::group_algebra(3, 1, 1, 1));
  Complex C = two_term(R, R.sub(R.gamma(0), R.one()));
  Complex D = base_change(C, RingMap::augment(R.spec()));
  CHECK(ring_matrix_is_zero(D.diffs[0]));
}

TEST_CASE("cohomology of [R --(g-1)--> R] over F_3[Z/3] is F_3 in both degrees") {
  Ring R(RingSpec::group_algebra(3, 1, 1, 1));
  Complex C = two_term(R, R.sub(R.gamma(0), R.one()));
  FiniteModule H0 = cohomology(C, 0);
  FiniteModule H1 = cohomology(C, 1);
  CHECK(H0.factors == std::vector<int>{1});
  CHECK(H1.factors == std::vector<int>{1});
  H0.validate();
  H1.validate();
  // gamma acts trivially on both (fixed part / coinvariants)
  CHECK(H0.action("g1")(0, 0) == 1);
  CHECK(H1.action("g1")(0, 0) == 1);
}

TEST_CASE("cohomology of [Z/4 --2--> Z/4]") {
  Ring R(RingSpec::chain(2, 2));
  Complex C = two_term(R, R.scalar(2));
  CHECK(cohomology(C, 0).factors == std::vector<int>{1});
  CHECK(cohomology(C, 1).factors == std::vector<int>{1});
  CHECK(cohomology(C, 5).factors.empty());
}

TEST_CASE("unit differential has vanishing cohomology and minimizes to zero") {
  Ring R(RingSpec::group_algebra(3, 2, 1, 1));
  Complex C = two_term(R, R.one());
  CHECK(cohomology(C, 0).is_zero());
  CHECK(cohomology(C, 1).is_zero());
  auto [M, cert] = minimize(C);
  CHECK(M.ranks.empty());
  CHECK(cert.minimal);
}

TEST_CASE("minimize diag(u, p) over Z/p^2 leaves the [p] block") {
  Ring R(RingSpec::chain(3, 2));
  Complex C;
  C.ring = R.spec();
  C.lo = 0;
  C.ranks = {2, 2};
  RingMatrix d = ring_matrix_zero(R, 2, 2);
  d.at(0, 0) = R.scalar(1).coords;
  d.at(1, 1) = R.scalar(3).coords;
  C.diffs = {d};
  auto [M, cert] = minimize(C);
  CHECK(M.ranks == std::vector<Int>{1, 1});
  CHECK(cert.minimal);
  CHECK(M.diffs[0].at(0, 0)[0] == 3);
  // cohomology preserved
  CHECK(cohomology(M, 0).factors == cohomology(C, 0).factors);
  CHECK(cohomology(M, 1).factors == cohomology(C, 1).factors);
}

TEST_CASE("already-minimal complex is returned unchanged") {
  Ring R(RingSpec::group_algebra(3, 1, 1, 1));
  Complex C = two_term(R, R.sub(R.gamma(0), R.one()));
  auto [M, cert] = minimize(C);
  CHECK(cert.minimal);
  CHECK(M.ranks == C.ranks);
  CHECK(ring_matrix_equal(M.diffs[0], C.diffs[0]));
}

TEST_CASE("minimize is idempotent and preserves cohomology and Euler characteristic") {
  std::mt19937_64 rng(4242);
  Ring R(RingSpec::group_algebra(2, 2, 1, 1));
  RingElement x = R.sub(R.gamma(0), R.one());
  // seed: [S -> S -> S] with d = g-1, norm: (g-1)(g+1) = g^2-1 = 0
  RingElement norm = R.add(R.one(), R.gamma(0));
  Complex C;
  C.ring = R.spec();
  C.lo = 0;
  C.ranks = {2, 2, 2};
  RingMatrix d0 = ring_matrix_zero(R, 2, 2), d1 = ring_matrix_zero(R, 2, 2);
  d0.at(0, 0) = x.coords;
  d0.at(1, 1) = R.one().coords;  // acyclic piece to strip
  d1.at(0, 0) = norm.coords;
  C.diffs = {d0, d1};
  REQUIRE(check_complex(C).valid);
  for (int trial = 0; trial < 10; ++trial) {
    Complex rc = random_conjugate(rng, R, C);
    REQUIRE(check_complex(rc).valid);
    auto [M1, cert1] = minimize(rc);
    auto [M2, cert2] = minimize(M1);
    CHECK(cert1.minimal);
    CHECK(M2.ranks == M1.ranks);
    for (size_t k = 0; k < M1.diffs.size(); ++k)
      CHECK(ring_matrix_equal(M2.diffs[k], M1.diffs[k]));
    for (int deg = rc.lo; deg <= rc.hi(); ++deg)
      CHECK(cohomology(M1, deg).factors == cohomology(rc, deg).factors);
    // Nakayama: rank_n(minimize) = dim_k H^n(C (x) k)
    auto dims = residual_cohomology_dims(rc);
    for (int deg = rc.lo; deg <= rc.hi(); ++deg) {
      Int want = dims[static_cast<size_t>(deg - rc.lo)];
      CHECK(M1.rank_at(deg) == want);
    }
    CHECK(M1.euler_characteristic() == rc.euler_characteristic());
  }
}

TEST_CASE("same_homology: complex vs its minimization is isomorphic") {
  Ring R(RingSpec::group_algebra(3, 1, 1, 1));
  Complex C = two_term(R, R.sub(R.gamma(0), R.one()));
  // pad with an acyclic summand
  Complex P = C;
  P.ranks = {2, 2};
  RingMatrix d = ring_matrix_zero(R, 2, 2);
  d.at(0, 0) = R.sub(R.gamma(0), R.one()).coords;
  d.at(1, 1) = R.one().coords;
  P.diffs = {d};
  auto [M, cert] = minimize(P);
  auto cmp = same_homology(P, M);
  CHECK(cmp.verdict == HomologyVerdict::Isomorphic);
  auto cmp2 = same_homology(C, C);
  CHECK(cmp2.verdict == HomologyVerdict::Isomorphic);
}

TEST_CASE("same_homology distinguishes module structure beyond abelian factors") {
  Ring R(RingSpec::group_algebra(3, 1, 1, 1));
  // [R --(g-1)--> R]: H^0 = H^1 = F_3 with trivial action
  Complex C = two_term(R, R.sub(R.gamma(0), R.one()));
  // zero differential rank-1: H^0 = H^1 = R itself (F_3[Z/3], factors 1,1,1)
  Complex Z;
  Z.ring = R.spec();
  Z.lo = 0;
  Z.ranks = {1, 1};
  Z.diffs = {ring_matrix_zero(R, 1, 1)};
  auto cmp = same_homology(C, Z);
  CHECK(cmp.verdict == HomologyVerdict::Distinct);
}

TEST_CASE("same_homology flags nontrivially isomorphic pairs") {
  Ring R(RingSpec::group_algebra(2, 1, 1, 1));
  RingElement x = R.sub(R.gamma(0), R.one());
  Complex A = two_term(R, x);
  // conjugated copy
  std::mt19937_64 rng(11);
  Complex B = random_conjugate(rng, R, A);
  auto cmp = same_homology(A, B);
  CHECK(cmp.verdict == HomologyVerdict::Isomorphic);
}

TEST_CASE("cohomology ring mismatch errors") {
  Ring R(RingSpec::group_algebra(3, 1, 1, 1));
  Ring R2(RingSpec::group_algebra(3, 1, 1, 2));
  Complex C = two_term(R, R.sub(R.gamma(0), R.one()));
  Complex D = two_term(R2, R2.sub(R2.gamma(0), R2.one()));
  CHECK_THROWS_AS(same_homology(C, D), Error);
}
