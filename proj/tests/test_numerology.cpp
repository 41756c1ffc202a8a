#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "patchlab/numerology.hpp"

using namespace patchlab;

TEST_CASE("imaginary quadratic, n = 2: l0 = 1, q0 = 1") {
  auto inv = invariants({2, 0, 1});
  CHECK(inv.l0 == 1);
  CHECK(inv.q0 == 1);
  CHECK(inv.dimY == 3);
}

TEST_CASE("rational field, n = 2: l0 = 0, q0 = 1, dimY = 2") {
  auto inv = invariants({2, 1, 0});
  CHECK(inv.l0 == 0);
  CHECK(inv.q0 == 1);
  CHECK(inv.dimY == 2);
}

TEST_CASE("mixed signature, n = 3: l0 = 3, dimY = 13, q0 = 5") {
  auto inv = invariants({3, 1, 1});
  CHECK(inv.l0 == 3);
  CHECK(inv.dimY == 13);
  CHECK(inv.q0 == 5);
}

TEST_CASE("infinity identity on the worked examples") {
  auto a = check_infinity_identity({2, 1, 0});
  CHECK(a.lhs == 1);
  CHECK(a.rhs == 1);
  CHECK(a.equal);
  auto b = check_infinity_identity({3, 1, 1});
  CHECK(b.lhs == 12);
  CHECK(b.rhs == 12);
  CHECK(b.equal);
  auto c = check_infinity_identity({1, 2, 3});
  CHECK(c.lhs == 0);
  CHECK(c.rhs == 0);
  CHECK(c.equal);
}

TEST_CASE("infinity identity and q0 integrality, exhaustive grid") {
  for (Int n = 1; n <= 200; ++n)
    for (Int r1 = 0; r1 <= 20; ++r1)
      for (Int r2 = 0; r2 <= 20; ++r2) {
        if (r1 + 2 * r2 < 1) continue;
        SignatureInput s{n, r1, r2};
        auto inv = invariants(s);  // throws if q0 fails integrality
        auto id = check_infinity_identity(s);
        REQUIRE(id.equal);
        REQUIRE((inv.dimY - inv.l0) % 2 == 0);
      }
}

TEST_CASE("l0 = 0 iff (r2 = 0 and n <= 2) or n = 1") {
  for (Int n = 1; n <= 60; ++n)
    for (Int r1 = 0; r1 <= 8; ++r1)
      for (Int r2 = 0; r2 <= 8; ++r2) {
        if (r1 + 2 * r2 < 1) continue;
        auto inv = invariants({n, r1, r2});
        bool expect = (r2 == 0 && n <= 2) || n == 1;
        CHECK((inv.l0 == 0) == expect);
      }
}

TEST_CASE("oddness") {
  CHECK(oddness(2, {0}));
  CHECK(oddness(3, {1}));
  CHECK(oddness(3, {-1}));
  CHECK_FALSE(oddness(3, {3}));
  CHECK(oddness(4, {0}));
  CHECK_FALSE(oddness(4, {2}));
  CHECK(oddness(2, {}));
  CHECK_THROWS_AS(oddness(3, {2}), Error);   // parity violation
  CHECK_THROWS_AS(oddness(2, {4}), Error);   // exceeds dimension
}

TEST_CASE("selmer difference") {
  CHECK(selmer_difference({0, 0, 0, {}, {}}) == 0);
  // |Q| ones as local terms: difference = |Q|
  CHECK(selmer_difference({0, 0, 0, {1, 1, 1}, {}}) == 3);
  CHECK(selmer_difference({2, 1, 0, {1, 1, 1}, {1, 3}}) == 2);
  CHECK_THROWS_AS(selmer_difference({-1, 0, 0, {}, {}}), Error);
}

TEST_CASE("Taylor-Wiles generator counts") {
  CHECK(tw_generator_count(1, 1, {2, 1, 0}).value == 0);
  CHECK(tw_generator_count(3, 2, {2, 0, 1}).value == 1);
  CHECK(tw_generator_count(0, 1, {1, 1, 0}).value == 0);
  auto neg = tw_generator_count(0, 0, {2, 0, 1});
  CHECK(neg.negative);
}

TEST_CASE("R_loc dimension formula") {
  CHECK(rloc_dimension(2, 1, {2, 1, 0}) == 5);
  CHECK(rloc_dimension(1, 0, {1, 1, 0}) == 1);
  CHECK(rloc_dimension(2, 2, {2, 0, 1}) == 9);
  CHECK(framing_variable_count(2, 1) == 3);
}
