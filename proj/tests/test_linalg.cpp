#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "patchlab/linalg.hpp"

using namespace patchlab;

namespace {

IMat random_matrix(std::mt19937_64& rng, Int r, Int c, Int mod) {
  IMat A(r, c);
  for (Int i = 0; i < r; ++i)
    for (Int jj = 0; jj < c; ++jj) A(i, jj) = static_cast<Int>(rng() % mod);
  return A;
}

void check_snf_contract(const IMat& A, Int p, int m) {
  const Int mod = pow_int(p, m);
  SnfResult S = smith_normal_form(A, p, m);
  auto modeq = [&](const IMat& X, const IMat& Y) {
    REQUIRE(X.rows() == Y.rows());
    REQUIRE(X.cols() == Y.cols());
    for (Int i = 0; i < X.rows(); ++i)
      for (Int jj = 0; jj < X.cols(); ++jj)
        if (mod_reduce(X(i, jj) - Y(i, jj), mod) != 0) return false;
    return true;
  };
  CHECK(modeq(S.U * A * S.V, S.D));
  CHECK(modeq(S.Uinv * S.D * S.Vinv, A));
  CHECK(modeq(S.U * S.Uinv, IMat::Identity(A.rows(), A.rows())));
  CHECK(modeq(S.V * S.Vinv, IMat::Identity(A.cols(), A.cols())));
  // diagonal, p-power entries, ascending valuation
  for (Int i = 0; i < S.D.rows(); ++i)
    for (Int jj = 0; jj < S.D.cols(); ++jj)
      if (i != jj) CHECK(S.D(i, jj) == 0);
  for (size_t i = 0; i < S.dvals.size(); ++i) {
    Int d = S.D(static_cast<Int>(i), static_cast<Int>(i));
    CHECK(d == (S.dvals[i] >= m ? 0 : pow_int(p, S.dvals[i])));
    if (i > 0) CHECK(S.dvals[i] >= S.dvals[i - 1]);
  }
}

}  // namespace

TEST_CASE("SNF of identity over Z/4 is the identity") {
  IMat A = IMat::Identity(2, 2);
  SnfResult S = smith_normal_form(A, 2, 2);
  CHECK(S.D == A);
  CHECK(S.dvals == std::vector<int>{0, 0});
}

TEST_CASE("SNF reorders diag(2,1) over Z/4 to diag(1,2)") {
  IMat A(2, 2);
  A << 2, 0, 0, 1;
  SnfResult S = smith_normal_form(A, 2, 2);
  CHECK(S.D(0, 0) == 1);
  CHECK(S.D(1, 1) == 2);
  check_snf_contract(A, 2, 2);
}

TEST_CASE("SNF of [[2,2],[2,2]] over Z/4 is diag(2,0)") {
  IMat A(2, 2);
  A << 2, 2, 2, 2;
  SnfResult S = smith_normal_form(A, 2, 2);
  CHECK(S.D(0, 0) == 2);
  CHECK(S.D(1, 1) == 0);
  CHECK(S.dvals == std::vector<int>{1, 2});
  check_snf_contract(A, 2, 2);
}

TEST_CASE("SNF contract holds on random chain-ring matrices") {
  std::mt19937_64 rng(42);
  for (Int p : {2, 3, 5})
    for (int m : {1, 2, 3})
      for (int trial = 0; trial < 40; ++trial) {
        Int r = 1 + static_cast<Int>(rng() % 6), c = 1 + static_cast<Int>(rng() % 6);
        IMat A = random_matrix(rng, r, c, pow_int(p, m));
        check_snf_contract(A, p, m);
      }
}

TEST_CASE("solve_with_snf finds solutions exactly when they exist") {
  std::mt19937_64 rng(99);
  const Int p = 3;
  const int m = 2;
  const Int mod = 9;
  for (int trial = 0; trial < 60; ++trial) {
    IMat A = random_matrix(rng, 4, 3, mod);
    SnfResult S = smith_normal_form(A, p, m);
    IVec x = IVec::Zero(3);
    for (Int i = 0; i < 3; ++i) x[i] = static_cast<Int>(rng() % mod);
    IVec b = A * x;
    for (Int i = 0; i < b.size(); ++i) b[i] = mod_reduce(b[i], mod);
    auto sol = solve_with_snf(S, b);
    REQUIRE(sol.has_value());
    IVec check = A * (*sol);
    for (Int i = 0; i < check.size(); ++i) CHECK(mod_reduce(check[i] - b[i], mod) == 0);
  }
}

TEST_CASE("kernel generators span the kernel") {
  IMat A(1, 1);
  A << 2;
  SnfResult S = smith_normal_form(A, 2, 2);
  IMat K = kernel_generators(S);
  REQUIRE(K.cols() == 1);
  CHECK(mod_reduce(K(0, 0), 4) == 2);
}

TEST_CASE("kernel/image/cokernel of the zero and unit maps") {
  IMat Z = IMat::Zero(2, 2);
  auto kic = kernel_image_cokernel(Z, 3, 1);
  CHECK(kic.kernel.factors == std::vector<int>{1, 1});
  CHECK(kic.image.factors.empty());
  CHECK(kic.cokernel.factors == std::vector<int>{1, 1});

  IMat U(1, 1);
  U << 1;
  auto kic2 = kernel_image_cokernel(U, 5, 2);
  CHECK(kic2.kernel.factors.empty());
  CHECK(kic2.cokernel.factors.empty());
  CHECK(kic2.image.factors == std::vector<int>{2});
}

TEST_CASE("multiplication by 2 on Z/4: ker = im = coker = Z/2") {
  IMat A(1, 1);
  A << 2;
  auto kic = kernel_image_cokernel(A, 2, 2);
  CHECK(kic.kernel.factors == std::vector<int>{1});
  CHECK(kic.image.factors == std::vector<int>{1});
  CHECK(kic.cokernel.factors == std::vector<int>{1});
}

TEST_CASE("|ker| * |im| = |ring|^cols on random matrices") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Int p = std::vector<Int>{2, 3, 5}[rng() % 3];
    int m = 1 + static_cast<int>(rng() % 3);
    Int r = 1 + static_cast<Int>(rng() % 5), c = 1 + static_cast<Int>(rng() % 5);
    IMat A = random_matrix(rng, r, c, pow_int(p, m));
    auto kic = kernel_image_cokernel(A, p, m);
    CHECK(kic.kernel.size_log() + kic.image.size_log() == static_cast<Int>(m) * c);
  }
}

TEST_CASE("SNF rank equals Gaussian rank over prime fields") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    Int p = std::vector<Int>{2, 3, 5}[rng() % 3];
    Int r = 1 + static_cast<Int>(rng() % 6), c = 1 + static_cast<Int>(rng() % 6);
    IMat A = random_matrix(rng, r, c, p);
    SnfResult S = smith_normal_form(A, p, 1);
    CHECK(S.rank == gauss_rank_mod_p(A, p));
  }
}

TEST_CASE("underlying abelian: gamma on F_3[Z/3] is the cyclic permutation") {
  Ring R(RingSpec::group_algebra(3, 1, 1, 1));
  IMat G = R.regular_representation(R.gamma(0));
  IMat expect(3, 3);
  expect << 0, 0, 1, 1, 0, 0, 0, 1, 0;
  CHECK(G == expect);
  IMat Gm1 = G - IMat::Identity(3, 3);
  for (Int i = 0; i < 3; ++i)
    for (Int jj = 0; jj < 3; ++jj) Gm1(i, jj) = mod_reduce(Gm1(i, jj), 3);
  CHECK(gauss_rank_mod_p(Gm1, 3) == 2);
}

TEST_CASE("underlying abelian is functorial: respects products") {
  std::mt19937_64 rng(5150);
  Ring R(RingSpec::group_algebra(2, 2, 1, 1));
  const Int mod = 4;
  for (int trial = 0; trial < 20; ++trial) {
    RingMatrix A = ring_matrix_zero(R, 2, 3), B = ring_matrix_zero(R, 3, 2);
    for (auto* M : {&A, &B})
      for (auto& e : M->ent)
        for (Int i = 0; i < R.basis_size(); ++i) e[i] = static_cast<Int>(rng() % mod);
    IMat lhs = underlying_abelian(R, ring_matrix_mul(R, A, B));
    IMat rhs = underlying_abelian(R, A) * underlying_abelian(R, B);
    for (Int i = 0; i < lhs.rows(); ++i)
      for (Int jj = 0; jj < lhs.cols(); ++jj) CHECK(mod_reduce(lhs(i, jj) - rhs(i, jj), mod) == 0);
  }
}

TEST_CASE("|ker(AB)| <= |ker A| * |ker B| spot checks") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 25; ++trial) {
    IMat A = random_matrix(rng, 3, 3, 9), B = random_matrix(rng, 3, 3, 9);
    IMat AB = A * B;
    for (Int i = 0; i < 3; ++i)
      for (Int jj = 0; jj < 3; ++jj) AB(i, jj) = mod_reduce(AB(i, jj), 9);
    auto ka = kernel_image_cokernel(A, 3, 2).kernel.size_log();
    auto kb = kernel_image_cokernel(B, 3, 2).kernel.size_log();
    auto kab = kernel_image_cokernel(AB, 3, 2).kernel.size_log();
    CHECK(kab <= ka + kb);
  }
}

TEST_CASE("subquotient computes Z/2 from ker/im of multiplication by 2 on Z/4") {
  // H = ker(2)/im(2) inside Z/4: both are 2Z/4, so H = 0; and ker(2)/0 = Z/2.
  IMat K(1, 1);
  K << 2;
  Subquotient h0(K, IMat::Zero(1, 0), 2, 2);
  CHECK(h0.factors() == std::vector<int>{1});
  Subquotient h(K, K, 2, 2);
  CHECK(h.factors().empty());
}

TEST_CASE("subquotient coordinates round-trip through lift") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 25; ++trial) {
    IMat K = random_matrix(rng, 4, 3, 27);
    Subquotient sq(K, IMat::Zero(4, 0), 3, 3);
    for (Int g = 0; g < sq.num_factors(); ++g) {
      IVec e = IVec::Zero(sq.num_factors());
      e[g] = 1;
      IVec z = sq.lift(e);
      CHECK(sq.coords(z) == e);
    }
  }
}

TEST_CASE("module kernel/image/quotient sizes are consistent") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    FiniteModule M;
    M.p = 2;
    M.mm = 3;
    M.factors = {3, 2, 1};
    M.ring = RingSpec::chain(2, 3);
    M.gen_names = {};
    M.actions = {};
    // random well-defined endomorphism
    IMat X(3, 3);
    for (Int i = 0; i < 3; ++i)
      for (Int jj = 0; jj < 3; ++jj) {
        int need = std::max(0, M.factors[i] - M.factors[jj]);
        X(i, jj) = pow_int(2, need) * static_cast<Int>(rng() % 4);
      }
    Int k = module_kernel(M, X).size_log();
    Int im = module_image(M, X).size_log();
    Int ck = module_quotient_by_image(M, X).size_log();
    CHECK(k + im == M.size_log());
    CHECK(ck == M.size_log() - im);
  }
}
