#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "patchlab/graded.hpp"

using namespace patchlab;

namespace {

RawPoly raw(std::initializer_list<std::pair<Int, std::vector<int>>> terms) {
  RawPoly p;
  for (auto& t : terms) p.push_back(t);
  return p;
}

GradedModule quotient_module(Int p, int q, std::vector<RawPoly> ideal_gens) {
  GradedModule M;
  M.ring = RingSpec::graded_quotient(p, q, {});
  M.F = FreeSlots{p, q, {0}};
  for (auto& g : ideal_gens) M.relations.push_back(gvec_from_raw(M.F, g));
  return M;
}

// brute-force: monomial not divisible by any monomial ideal generator
std::vector<Int> monomial_oracle_hf(Int p, int q, const std::vector<std::vector<int>>& gens,
                                    int D) {
  std::vector<Int> hf(static_cast<size_t>(D + 1), 0);
  std::vector<int> cur(static_cast<size_t>(q), 0);
  // enumerate all monomials of each degree
  std::function<void(int, int)> rec = [&](int var, int left) {
    if (var == q - 1) {
      cur[static_cast<size_t>(var)] = left;
      bool standard = true;
      for (const auto& g : gens) {
        bool div = true;
        for (int v = 0; v < q; ++v)
          if (g[static_cast<size_t>(v)] > cur[static_cast<size_t>(v)]) div = false;
        if (div) standard = false;
      }
      if (standard) {
        int d = 0;
        for (int v = 0; v < q; ++v) d += cur[static_cast<size_t>(v)];
        hf[static_cast<size_t>(d)] += 1;
      }
      return;
    }
    for (int d = 0; d <= left; ++d) {
      cur[static_cast<size_t>(var)] = d;
      rec(var + 1, left - d);
    }
  };
  for (int d = 0; d <= D; ++d) rec(0, d);
  // rec() with fixed total degree handled per d; redo cleanly
  std::fill(hf.begin(), hf.end(), 0);
  std::function<void(int, int, int)> rec2 = [&](int var, int left, int total) {
    if (var == q - 1) {
      cur[static_cast<size_t>(var)] = left;
      bool standard = true;
      for (const auto& g : gens) {
        bool div = true;
        for (int v = 0; v < q; ++v)
          if (g[static_cast<size_t>(v)] > cur[static_cast<size_t>(v)]) div = false;
        if (div) standard = false;
      }
      if (standard) hf[static_cast<size_t>(total)] += 1;
      return;
    }
    for (int d = 0; d <= left; ++d) {
      cur[static_cast<size_t>(var)] = d;
      rec2(var + 1, left - d, total);
    }
  };
  for (int d = 0; d <= D; ++d) rec2(0, d, d);
  return hf;
}

}  // namespace

TEST_CASE("degrevlex orders x^2 above xy in two variables") {
  Mono x2{{2, 0}}, xy{{1, 1}}, y2{{0, 2}};
  CHECK(mono_cmp(x2, xy) > 0);
  CHECK(mono_cmp(xy, y2) > 0);
  CHECK(mono_cmp(x2, x2) == 0);
}

TEST_CASE("a monomial ideal is its own Groebner basis") {
  FreeSlots F{2, 2, {0}};
  std::vector<GVec> gens = {gvec_from_raw(F, raw({{1, {2, 0}}})),
                            gvec_from_raw(F, raw({{1, {1, 1}}}))};
  GroebnerBasis gb = buchberger(F, gens);
  REQUIRE(gb.elems.size() == 2);
  CHECK(gb.elems[0].t.size() == 1);
  CHECK(gb.elems[1].t.size() == 1);
}

TEST_CASE("GB of (x^2 - xy, xy) in F_2[x,y] is {x^2, xy}") {
  FreeSlots F{2, 2, {0}};
  std::vector<GVec> gens = {gvec_from_raw(F, raw({{1, {2, 0}}, {1, {1, 1}}})),
                            gvec_from_raw(F, raw({{1, {1, 1}}}))};
  GroebnerBasis gb = buchberger(F, gens);
  REQUIRE(gb.elems.size() == 2);
  for (const auto& e : gb.elems) {
    CHECK(e.t.size() == 1);  // reduced to monomials
    CHECK(e.lead().m.deg() == 2);
  }
}

TEST_CASE("a principal ideal is generated by itself") {
  FreeSlots F{3, 2, {0}};
  GVec f = gvec_from_raw(F, raw({{1, {2, 0}}, {2, {0, 2}}}));
  GroebnerBasis gb = buchberger(F, {f});
  REQUIRE(gb.elems.size() == 1);
  CHECK(gb.elems[0].t.size() == 2);
}

TEST_CASE("inhomogeneous input is rejected") {
  FreeSlots F{2, 2, {0}};
  CHECK_THROWS_AS(buchberger(F, {gvec_from_raw(F, raw({{1, {2, 0}}, {1, {1, 0}}}))}), Error);
}

TEST_CASE("Hilbert data of the free rank-1 module over F_p[x,y]") {
  GradedModule M = quotient_module(3, 2, {});
  HilbertData hd = hilbert_data(M, default_degree_bound(M));
  CHECK(hd.dim == 2);
  for (int d = 0; d <= 4; ++d) CHECK(hd.values[static_cast<size_t>(d)] == d + 1);
}

TEST_CASE("Hilbert data of F_p[x,y]/(x)") {
  GradedModule M = quotient_module(3, 2, {raw({{1, {1, 0}}})});
  HilbertData hd = hilbert_data(M, default_degree_bound(M));
  CHECK(hd.dim == 1);
  CHECK(hd.multiplicity == 1);
  for (int d = 0; d <= 4; ++d) CHECK(hd.values[static_cast<size_t>(d)] == 1);
}

TEST_CASE("Hilbert data of F_p[x,y]/(x^2, xy): values 1,2,1,1,... dim 1") {
  GradedModule M = quotient_module(2, 2, {raw({{1, {2, 0}}}), raw({{1, {1, 1}}})});
  HilbertData hd = hilbert_data(M, default_degree_bound(M));
  CHECK(hd.dim == 1);
  CHECK(hd.values[0] == 1);
  CHECK(hd.values[1] == 2);
  CHECK(hd.values[2] == 1);
  CHECK(hd.values[3] == 1);
}

TEST_CASE("bound-too-small is rejected") {
  GradedModule M = quotient_module(2, 2, {raw({{1, {4, 0}}})});
  CHECK_THROWS_AS(hilbert_data(M, 5), Error);
}

TEST_CASE("minimal free resolution of the residue field over F_p[x,y] is Koszul 1,2,1") {
  GradedModule M = quotient_module(5, 2, {raw({{1, {1, 0}}}), raw({{1, {0, 1}}})});
  Resolution res = minimal_free_resolution(M);
  CHECK(res.ranks() == std::vector<Int>{1, 2, 1});
}

TEST_CASE("minimal free resolution of F_p[x,y]/(x) has ranks 1,1") {
  GradedModule M = quotient_module(3, 2, {raw({{1, {1, 0}}})});
  Resolution res = minimal_free_resolution(M);
  CHECK(res.ranks() == std::vector<Int>{1, 1});
}

TEST_CASE("minimal free resolution of F_p[x,y]/(x^2, xy) has ranks 1,2,1") {
  GradedModule M = quotient_module(2, 2, {raw({{1, {2, 0}}}), raw({{1, {1, 1}}})});
  Resolution res = minimal_free_resolution(M);
  CHECK(res.ranks() == std::vector<Int>{1, 2, 1});
}

TEST_CASE("depth/pd of the spec examples") {
  GradedModule k = quotient_module(3, 2, {raw({{1, {1, 0}}}), raw({{1, {0, 1}}})});
  auto rk = depth_pd(k, true);
  CHECK(rk.depth == 0);
  CHECK(rk.proj_dim == 2);
  CHECK(rk.krull_dim == 0);
  CHECK(rk.regular_sequence_found == 0);

  GradedModule Rx = quotient_module(3, 2, {raw({{1, {1, 0}}})});
  auto rx = depth_pd(Rx, true);
  CHECK(rx.depth == 1);
  CHECK(rx.proj_dim == 1);
  CHECK(rx.krull_dim == 1);
  CHECK(rx.regular_sequence_found == 1);

  GradedModule Rsoc = quotient_module(2, 2, {raw({{1, {2, 0}}}), raw({{1, {1, 1}}})});
  auto rs = depth_pd(Rsoc, true);
  CHECK(rs.depth == 0);
  CHECK(rs.proj_dim == 2);
  CHECK(rs.regular_sequence_found == 0);
}

TEST_CASE("check_depth_bound on the spec examples") {
  // N free rank 1 over F_p[x,y], M = (x): depth 2, dim 2
  GradedModule N = quotient_module(3, 2, {});
  auto v1 = check_depth_bound(N, {gvec_from_raw(N.F, raw({{1, {1, 0}}}))});
  CHECK(v1.depth_N == 2);
  CHECK(v1.dim_M == 2);
  CHECK(v1.holds);

  // N = F_p[x,y]/(x), M = (y)N: depth 1, dim 1
  GradedModule N2 = quotient_module(3, 2, {raw({{1, {1, 0}}})});
  auto v2 = check_depth_bound(N2, {gvec_from_raw(N2.F, raw({{1, {0, 1}}}))});
  CHECK(v2.depth_N == 1);
  CHECK(v2.dim_M == 1);
  CHECK(v2.holds);

  // N = k (depth 0): any nonzero M works
  GradedModule N3 = quotient_module(3, 2, {raw({{1, {1, 0}}}), raw({{1, {0, 1}}})});
  GVec one;
  one.t.push_back(GTerm{1, Mono::one(2), 0});
  auto v3 = check_depth_bound(N3, {one});
  CHECK(v3.depth_N == 0);
  CHECK(v3.holds);

  // zero submodule rejected
  CHECK_THROWS_AS(check_depth_bound(N2, {gvec_from_raw(N2.F, raw({{1, {1, 0}}}))}), Error);
}

TEST_CASE("Koszul complex K(x,y) over F_p[x,y] satisfies the length criterion with equality") {
  RingSpec ring = RingSpec::graded_quotient(3, 2, {});
  GradedComplex K = koszul_complex(ring, {0, 1});
  auto rep = check_length_criterion(K, 2);
  CHECK(rep.codim == 2);
  CHECK(rep.equality);
  CHECK(rep.lower_vanishing);
  CHECK(rep.resolution_of_top);
  CHECK(rep.top_depth == 0);
  CHECK(rep.top_pd == 2);
  CHECK(rep.conclusions_hold);
}

TEST_CASE("K(x) over F_p[x,y] in degrees 0..1: equality, depth 1 = q - l0") {
  RingSpec ring = RingSpec::graded_quotient(3, 2, {});
  GradedComplex K = koszul_complex(ring, {0});
  auto rep = check_length_criterion(K, 1);
  CHECK(rep.equality);
  CHECK(rep.top_depth == 1);
  CHECK(rep.top_pd == 1);
  CHECK(rep.conclusions_hold);
}

TEST_CASE("[R --0--> R] with l0 = 1: codim 0 < 1, no conclusions asserted") {
  RingSpec ring = RingSpec::graded_quotient(3, 2, {});
  GradedComplex P;
  P.ring = ring;
  P.lo = 0;
  P.frees = {FreeSlots{3, 2, {0}}, FreeSlots{3, 2, {0}}};
  P.diffs.push_back({GVec{}});  // zero column
  auto rep = check_length_criterion(P, 1);
  CHECK(rep.codim == 0);
  CHECK(rep.codim_at_most_l0);
  CHECK_FALSE(rep.equality);
}

TEST_CASE("nearly faithful: R itself is nearly faithful over R = F_p[x,y]/(xy)") {
  RingSpec ring = RingSpec::graded_quotient(3, 2, {raw({{1, {1, 1}}})});
  GradedModule M;
  M.ring = ring;
  M.F = FreeSlots{3, 2, {0}};
  FreeSlots ideal{3, 2, {0}};
  std::vector<std::vector<GVec>> primes = {{gvec_from_raw(ideal, raw({{1, {1, 0}}}))},
                                           {gvec_from_raw(ideal, raw({{1, {0, 1}}}))}};
  auto v = nearly_faithful(M, primes);
  CHECK(v.nearly_faithful);
}

TEST_CASE("nearly faithful: R/(x) over F_p[x,y]/(xy) fails at the prime (y)") {
  RingSpec ring = RingSpec::graded_quotient(3, 2, {raw({{1, {1, 1}}})});
  GradedModule M;
  M.ring = ring;
  M.F = FreeSlots{3, 2, {0}};
  M.relations.push_back(gvec_from_raw(M.F, raw({{1, {1, 0}}})));
  FreeSlots ideal{3, 2, {0}};
  std::vector<std::vector<GVec>> primes = {{gvec_from_raw(ideal, raw({{1, {1, 0}}}))},
                                           {gvec_from_raw(ideal, raw({{1, {0, 1}}}))}};
  auto v = nearly_faithful(M, primes);
  CHECK_FALSE(v.nearly_faithful);
  REQUIRE(v.failing_primes.size() == 1);
  CHECK(v.failing_primes[0] == 1);
}

TEST_CASE("nearly faithful: R/(x) (+) R/(y) over F_p[x,y]/(xy) has Ann = (xy) = 0 in R") {
  RingSpec ring = RingSpec::graded_quotient(3, 2, {raw({{1, {1, 1}}})});
  GradedModule M;
  M.ring = ring;
  M.F = FreeSlots{3, 2, {0, 0}};
  M.relations.push_back(gvec_from_raw(M.F, raw({{1, {1, 0}}}), 0));
  M.relations.push_back(gvec_from_raw(M.F, raw({{1, {0, 1}}}), 1));
  FreeSlots ideal{3, 2, {0}};
  std::vector<std::vector<GVec>> primes = {{gvec_from_raw(ideal, raw({{1, {1, 0}}}))},
                                           {gvec_from_raw(ideal, raw({{1, {0, 1}}}))}};
  auto v = nearly_faithful(M, primes);
  CHECK(v.nearly_faithful);
  CHECK_THROWS_AS(nearly_faithful(M, {}), Error);
}

TEST_CASE("Auslander-Buchsbaum and syzygy bound on random monomial quotients") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    Int p = std::vector<Int>{2, 3, 5}[rng() % 3];
    int q = 1 + static_cast<int>(rng() % 3);
    int ngens = 1 + static_cast<int>(rng() % 3);
    std::vector<RawPoly> gens;
    std::vector<std::vector<int>> gen_exps;
    for (int g = 0; g < ngens; ++g) {
      std::vector<int> e(static_cast<size_t>(q), 0);
      int deg = 1 + static_cast<int>(rng() % 4);
      for (int d = 0; d < deg; ++d) e[static_cast<size_t>(rng() % q)] += 1;
      gens.push_back(raw({{1, e}}));
      gen_exps.push_back(e);
    }
    GradedModule M = quotient_module(p, q, gens);
    auto rep = depth_pd(M, true);
    CHECK(rep.depth + rep.proj_dim == q);
    CHECK(rep.proj_dim <= q);
    CHECK(rep.depth <= rep.krull_dim);
    CHECK(rep.regular_sequence_found <= rep.depth);
    // dimension agrees with the divisibility oracle
    auto oracle = monomial_oracle_hf(p, q, gen_exps, default_degree_bound(M));
    CHECK(oracle == rep.hilbert);
  }
}

TEST_CASE("length criterion on all Koszul subsets for q <= 4") {
  for (int q = 1; q <= 4; ++q) {
    RingSpec ring = RingSpec::graded_quotient(2, q, {});
    for (unsigned mask = 1; mask < (1u << q); ++mask) {
      std::vector<int> vars;
      for (int v = 0; v < q; ++v)
        if (mask & (1u << v)) vars.push_back(v);
      const int l = static_cast<int>(vars.size());
      GradedComplex K = koszul_complex(ring, vars);
      auto rep = check_length_criterion(K, l);
      CHECK(rep.equality);
      CHECK(rep.conclusions_hold);
      CHECK(rep.top_depth == q - l);
    }
  }
}
