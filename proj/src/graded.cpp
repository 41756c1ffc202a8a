#include "patchlab/graded.hpp"

#include "patchlab/linalg.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <tuple>

namespace patchlab {

int Mono::deg() const { return std::accumulate(e.begin(), e.end(), 0); }

Mono Mono::one(int q) { return Mono{std::vector<int>(static_cast<size_t>(q), 0)}; }

bool Mono::divides(const Mono& o) const {
  for (size_t i = 0; i < e.size(); ++i)
    if (e[i] > o.e[i]) return false;
  return true;
}

Mono Mono::operator*(const Mono& o) const {
  Mono r = *this;
  for (size_t i = 0; i < e.size(); ++i) r.e[i] += o.e[i];
  return r;
}

Mono Mono::quotient(const Mono& o) const {
  Mono r = *this;
  for (size_t i = 0; i < e.size(); ++i) r.e[i] -= o.e[i];
  return r;
}

int mono_cmp(const Mono& a, const Mono& b) {
  const int da = a.deg(), db = b.deg();
  if (da != db) return da < db ? -1 : 1;
  // degrevlex: a > b iff the last nonzero entry of a - b is negative
  for (size_t i = a.e.size(); i-- > 0;) {
    const int d = a.e[i] - b.e[i];
    if (d != 0) return d < 0 ? 1 : -1;
  }
  return 0;
}

int term_cmp(const GTerm& a, const GTerm& b) {
  if (a.pos != b.pos) return a.pos < b.pos ? 1 : -1;  // lower position wins
  return mono_cmp(a.m, b.m);
}

const GTerm& GVec::lead() const {
  if (t.empty()) fail("ERR_GRADED", "lead of the zero element");
  return t.front();
}

GVec gvec_normalize(const FreeSlots& F, std::vector<GTerm> terms) {
  std::sort(terms.begin(), terms.end(), [](const GTerm& a, const GTerm& b) {
    return term_cmp(a, b) > 0;
  });
  GVec out;
  for (auto& tm : terms) {
    tm.c = mod_reduce(tm.c, F.p);
    if (tm.c == 0) continue;
    if (!out.t.empty() && out.t.back().pos == tm.pos && out.t.back().m == tm.m) {
      out.t.back().c = mod_reduce(out.t.back().c + tm.c, F.p);
      if (out.t.back().c == 0) out.t.pop_back();
    } else {
      out.t.push_back(tm);
    }
  }
  return out;
}

GVec gvec_add(const FreeSlots& F, const GVec& a, const GVec& b) {
  std::vector<GTerm> terms = a.t;
  terms.insert(terms.end(), b.t.begin(), b.t.end());
  return gvec_normalize(F, std::move(terms));
}

GVec gvec_scale(const FreeSlots& F, Int c, const GVec& a) {
  c = mod_reduce(c, F.p);
  GVec out;
  if (c == 0) return out;
  for (auto tm : a.t) {
    tm.c = mod_reduce(tm.c * c, F.p);
    if (tm.c != 0) out.t.push_back(tm);
  }
  return out;
}

GVec gvec_mono_mul(const FreeSlots& F, Int c, const Mono& m, const GVec& a) {
  c = mod_reduce(c, F.p);
  GVec out;
  if (c == 0) return out;
  for (auto tm : a.t) {
    tm.c = mod_reduce(tm.c * c, F.p);
    tm.m = tm.m * m;
    if (tm.c != 0) out.t.push_back(tm);
  }
  // multiplying by a monomial preserves the term order
  return out;
}

std::optional<int> gvec_degree(const FreeSlots& F, const GVec& a) {
  std::optional<int> deg;
  for (const auto& tm : a.t) {
    const int d = tm.m.deg() + F.shifts[static_cast<size_t>(tm.pos)];
    if (!deg) deg = d;
    if (*deg != d) fail("ERR_INHOMOGENEOUS", "element is not homogeneous");
  }
  return deg;
}

void require_homogeneous(const FreeSlots& F, const GVec& a) { (void)gvec_degree(F, a); }

// ---------------------------------------------------------------------------
// Division and Buchberger

namespace {

GVec reduce_full(const FreeSlots& F, const std::vector<GVec>& basis, GVec v) {
  std::vector<GTerm> remainder;
  while (!v.zero()) {
    const GTerm t = v.lead();
    const GVec* red = nullptr;
    for (const auto& g : basis) {
      if (g.zero()) continue;
      const GTerm& lg = g.lead();
      if (lg.pos == t.pos && lg.m.divides(t.m)) {
        red = &g;
        break;
      }
    }
    if (red == nullptr) {
      remainder.push_back(t);
      GVec rest;
      rest.t.assign(v.t.begin() + 1, v.t.end());
      v = rest;
      continue;
    }
    const GTerm& lg = red->lead();
    const Int coef = mod_reduce(t.c * inv_unit_mod(lg.c, F.p), F.p);
    v = gvec_add(F, v, gvec_mono_mul(F, -coef, t.m.quotient(lg.m), *red));
  }
  return gvec_normalize(F, std::move(remainder));
}

Mono mono_lcm(const Mono& a, const Mono& b) {
  Mono r = a;
  for (size_t i = 0; i < r.e.size(); ++i) r.e[i] = std::max(a.e[i], b.e[i]);
  return r;
}

bool mono_coprime(const Mono& a, const Mono& b) {
  for (size_t i = 0; i < a.e.size(); ++i)
    if (a.e[i] > 0 && b.e[i] > 0) return false;
  return true;
}

GVec make_monic(const FreeSlots& F, const GVec& v) {
  if (v.zero()) return v;
  return gvec_scale(F, inv_unit_mod(v.lead().c, F.p), v);
}

}  // namespace

GroebnerBasis buchberger(const FreeSlots& F, std::vector<GVec> gens) {
  std::vector<GVec> basis;
  for (auto& g : gens) {
    require_homogeneous(F, g);
    if (!g.zero()) basis.push_back(make_monic(F, gvec_normalize(F, std::move(g.t))));
  }
  // pair queue sorted by (lcm degree, i, j) for the normal selection strategy
  using Pair = std::tuple<int, size_t, size_t>;
  std::set<Pair> queue;
  auto push_pairs = [&](size_t jnew) {
    for (size_t i = 0; i < jnew; ++i) {
      if (basis[i].lead().pos != basis[jnew].lead().pos) continue;
      const Mono l = mono_lcm(basis[i].lead().m, basis[jnew].lead().m);
      queue.emplace(l.deg() + F.shifts[static_cast<size_t>(basis[jnew].lead().pos)], i, jnew);
    }
  };
  for (size_t jj = 0; jj < basis.size(); ++jj) push_pairs(jj);

  while (!queue.empty()) {
    auto [deg, i, jj] = *queue.begin();
    queue.erase(queue.begin());
    (void)deg;
    const GVec& f = basis[i];
    const GVec& g = basis[jj];
    const Mono& lf = f.lead().m;
    const Mono& lg = g.lead().m;
    if (F.rank() == 1 && mono_coprime(lf, lg)) continue;  // product criterion (ideal case)
    const Mono l = mono_lcm(lf, lg);
    GVec s = gvec_add(F, gvec_mono_mul(F, 1, l.quotient(lf), f),
                      gvec_mono_mul(F, -1, l.quotient(lg), g));
    GVec h = reduce_full(F, basis, s);
    if (!h.zero()) {
      basis.push_back(make_monic(F, h));
      push_pairs(basis.size() - 1);
    }
  }

  // autoreduce to the canonical reduced basis
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < basis.size(); ++i) {
      std::vector<GVec> others;
      for (size_t k = 0; k < basis.size(); ++k)
        if (k != i) others.push_back(basis[k]);
      GVec h = reduce_full(F, others, basis[i]);
      if (h.zero()) {
        basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
      h = make_monic(F, h);
      if (!(h.t == basis[i].t)) {
        basis[i] = h;
        changed = true;
      }
    }
  }
  std::sort(basis.begin(), basis.end(),
            [](const GVec& a, const GVec& b) { return term_cmp(a.lead(), b.lead()) > 0; });
  return GroebnerBasis{F, std::move(basis)};
}

GVec normal_form(const GroebnerBasis& gb, GVec v) { return reduce_full(gb.F, gb.elems, std::move(v)); }

bool submodule_contains(const GroebnerBasis& gb, const GVec& v) {
  return normal_form(gb, v).zero();
}

std::vector<GVec> syzygies_with_shifts(const FreeSlots& F, const std::vector<GVec>& gens,
                                       const std::vector<int>& gen_shifts, FreeSlots* syz_slots) {
  const int r = F.rank();
  const int s = static_cast<int>(gens.size());
  FreeSlots big{F.p, F.q, F.shifts};
  for (int i = 0; i < s; ++i) big.shifts.push_back(gen_shifts[static_cast<size_t>(i)]);
  std::vector<GVec> tagged;
  for (int i = 0; i < s; ++i) {
    GVec g = gens[static_cast<size_t>(i)];
    g.t.push_back(GTerm{1, Mono::one(F.q), r + i});
    tagged.push_back(gvec_normalize(big, std::move(g.t)));
  }
  GroebnerBasis gb = buchberger(big, tagged);
  std::vector<GVec> out;
  for (const auto& e : gb.elems) {
    if (e.zero() || e.lead().pos < r) continue;
    GVec s_elem;
    for (auto tm : e.t) {
      tm.pos -= r;
      s_elem.t.push_back(tm);
    }
    out.push_back(s_elem);
  }
  if (syz_slots != nullptr) *syz_slots = FreeSlots{F.p, F.q, gen_shifts};
  return out;
}

std::vector<GVec> syzygies(const FreeSlots& F, const std::vector<GVec>& gens,
                           FreeSlots* syz_slots) {
  std::vector<int> shifts;
  for (const auto& g : gens) {
    auto d = gvec_degree(F, g);
    if (!d) fail("ERR_GRADED", "syzygies of a zero generator need an explicit shift");
    shifts.push_back(*d);
  }
  return syzygies_with_shifts(F, gens, shifts, syz_slots);
}

std::vector<GVec> minimal_generators(const FreeSlots& F, std::vector<GVec> gens) {
  std::vector<GVec> alive;
  for (auto& g : gens) {
    GVec n = gvec_normalize(F, std::move(g.t));
    if (!n.zero()) alive.push_back(n);
  }
  // drop members lying in the span of the others, highest degree first
  std::stable_sort(alive.begin(), alive.end(), [&](const GVec& a, const GVec& b) {
    return *gvec_degree(F, a) > *gvec_degree(F, b);
  });
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < alive.size(); ++i) {
      std::vector<GVec> others;
      for (size_t k = 0; k < alive.size(); ++k)
        if (k != i) others.push_back(alive[k]);
      if (submodule_contains(buchberger(F, others), alive[i])) {
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  // canonical order: ascending degree, then term order
  std::stable_sort(alive.begin(), alive.end(), [&](const GVec& a, const GVec& b) {
    const int da = *gvec_degree(F, a), db = *gvec_degree(F, b);
    if (da != db) return da < db;
    return term_cmp(a.lead(), b.lead()) > 0;
  });
  return alive;
}

// ---------------------------------------------------------------------------
// Graded modules and Hilbert data

void GradedModule::validate() const {
  if (ring.kind != RingKind::GradedQuotient) fail("ERR_GRADED", "module needs a graded quotient ring");
  if (F.p != ring.p || F.q != ring.q) fail("ERR_GRADED", "free module slots do not match the ring");
  for (const auto& r : relations) require_homogeneous(F, r);
}

GVec gvec_from_raw(const FreeSlots& F, const RawPoly& poly, int pos) {
  std::vector<GTerm> terms;
  for (const auto& [c, e] : poly) {
    if (static_cast<int>(e.size()) != F.q) fail("ERR_GRADED", "exponent vector length mismatch");
    terms.push_back(GTerm{c, Mono{e}, pos});
  }
  return gvec_normalize(F, std::move(terms));
}

std::vector<GVec> effective_relations(const GradedModule& M) {
  std::vector<GVec> rels = M.relations;
  for (const auto& rel : M.ring.relations)
    for (int pos = 0; pos < M.F.rank(); ++pos) rels.push_back(gvec_from_raw(M.F, rel, pos));
  return rels;
}

namespace {

void enumerate_monomials(int q, int deg, std::vector<int>& cur, int var,
                         const std::function<void(const Mono&)>& emit) {
  if (var == q - 1) {
    cur[static_cast<size_t>(var)] = deg;
    emit(Mono{cur});
    return;
  }
  for (int d = 0; d <= deg; ++d) {
    cur[static_cast<size_t>(var)] = d;
    enumerate_monomials(q, deg - d, cur, var + 1, emit);
  }
}

void for_each_monomial(int q, int deg, const std::function<void(const Mono&)>& emit) {
  if (deg < 0) return;
  std::vector<int> cur(static_cast<size_t>(q), 0);
  enumerate_monomials(q, deg, cur, 0, emit);
}

// leading monomials of the GB grouped per position
std::vector<std::vector<Mono>> lead_monomials_by_pos(const GroebnerBasis& gb) {
  std::vector<std::vector<Mono>> leads(static_cast<size_t>(gb.F.rank()));
  for (const auto& g : gb.elems)
    leads[static_cast<size_t>(g.lead().pos)].push_back(g.lead().m);
  return leads;
}

bool is_standard(const Mono& m, const std::vector<Mono>& leads) {
  for (const auto& l : leads)
    if (l.divides(m)) return false;
  return true;
}

std::vector<Int> standard_monomial_counts(const GroebnerBasis& gb, int D) {
  auto leads = lead_monomials_by_pos(gb);
  std::vector<Int> counts(static_cast<size_t>(D + 1), 0);
  for (int pos = 0; pos < gb.F.rank(); ++pos) {
    const int shift = gb.F.shifts[static_cast<size_t>(pos)];
    for (int d = 0; d <= D; ++d) {
      const int k = d - shift;
      if (k < 0) continue;
      Int c = 0;
      for_each_monomial(gb.F.q, k, [&](const Mono& m) {
        if (is_standard(m, leads[static_cast<size_t>(pos)])) ++c;
      });
      counts[static_cast<size_t>(d)] += c;
    }
  }
  return counts;
}

struct DimMult {
  int dim;
  Int mult;
};

// dimension and multiplicity from the stabilized tail of HF values
DimMult dim_mult_from_values(const std::vector<Int>& values, int q) {
  const int W = q + 2;  // window size
  if (static_cast<int>(values.size()) < W + q + 1)
    fail("ERR_HILBERT_BOUND", "bound too small for dimension detection");
  auto window_constant = [&](const std::vector<Int>& seq) -> std::optional<Int> {
    const size_t n = seq.size();
    const Int v = seq[n - 1];
    for (int i = 2; i <= W; ++i)
      if (seq[n - static_cast<size_t>(i)] != v) return std::nullopt;
    return v;
  };
  std::vector<Int> seq = values;
  for (int r = 0; r <= q; ++r) {
    auto c = window_constant(seq);
    if (c) {
      if (*c == 0) {
        if (r == 0) {
          // finite length: multiplicity = total dimension
          Int total = std::accumulate(values.begin(), values.end(), Int{0});
          return {0, total};
        }
        // differences vanish: previous level was the constant one
        fail("ERR_HILBERT_BOUND", "difference sequence vanished unexpectedly");
      }
      return {r + 1, *c};
    }
    std::vector<Int> next;
    for (size_t i = 1; i < seq.size(); ++i) next.push_back(seq[i] - seq[i - 1]);
    seq = next;
  }
  fail("ERR_HILBERT_BOUND", "Hilbert function not stabilized at this bound");
}

}  // namespace

int default_degree_bound(const GradedModule& M) {
  int maxrel = 0;
  for (const auto& r : effective_relations(M)) {
    auto d = gvec_degree(M.F, r);
    if (d) maxrel = std::max(maxrel, *d);
  }
  int maxshift = 0;
  for (int s : M.F.shifts) maxshift = std::max(maxshift, s);
  return 2 * maxrel + M.F.q + maxshift + M.F.q + 3;
}

HilbertData hilbert_data(const GradedModule& M, int D) {
  M.validate();
  int maxrel = 0;
  for (const auto& r : effective_relations(M)) {
    auto d = gvec_degree(M.F, r);
    if (d) maxrel = std::max(maxrel, *d);
  }
  if (D < 2 * maxrel + M.F.q)
    fail("ERR_HILBERT_BOUND", "bound too small: need at least 2*maxdeg + q = " +
                                  std::to_string(2 * maxrel + M.F.q));
  GroebnerBasis gb = buchberger(M.F, effective_relations(M));
  HilbertData out;
  out.bound = D;
  out.values = standard_monomial_counts(gb, D);
  DimMult dm = dim_mult_from_values(out.values, M.F.q);
  out.dim = dm.dim;
  out.multiplicity = dm.mult;
  return out;
}

std::vector<Int> submodule_hilbert(const GradedModule& N, const std::vector<GVec>& gens, int D) {
  N.validate();
  std::vector<GVec> W = effective_relations(N);
  std::vector<GVec> UW = W;
  UW.insert(UW.end(), gens.begin(), gens.end());
  auto counts_W = standard_monomial_counts(buchberger(N.F, W), D);
  auto counts_UW = standard_monomial_counts(buchberger(N.F, UW), D);
  std::vector<Int> hf;
  for (size_t i = 0; i < counts_W.size(); ++i) hf.push_back(counts_W[i] - counts_UW[i]);
  return hf;
}

// ---------------------------------------------------------------------------
// Resolutions

std::vector<Int> Resolution::ranks() const {
  std::vector<Int> r;
  for (const auto& f : frees) r.push_back(f.rank());
  return r;
}

namespace {

// Remove slots made redundant by relations with a constant term.
void minimalize_presentation(FreeSlots& F, std::vector<GVec>& rels) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t ri = 0; ri < rels.size() && !changed; ++ri) {
      const GVec& r = rels[ri];
      for (const auto& tm : r.t) {
        if (tm.m.deg() != 0) continue;
        // slot tm.pos = -c^{-1} * (rest); substitute everywhere and drop the slot
        const int dead = tm.pos;
        const Int cinv = inv_unit_mod(tm.c, F.p);
        GVec rest;
        for (const auto& o : r.t)
          if (!(o.pos == dead && o.m.deg() == 0)) rest.t.push_back(o);
        GVec subst = gvec_scale(F, mod_reduce(-cinv, F.p), rest);
        std::vector<GVec> out;
        for (size_t k = 0; k < rels.size(); ++k) {
          if (k == ri) continue;
          GVec nv;
          for (const auto& o : rels[k].t) {
            if (o.pos == dead) {
              GVec add = gvec_mono_mul(F, o.c, o.m, subst);
              for (const auto& a : add.t) nv.t.push_back(a);
            } else {
              nv.t.push_back(o);
            }
          }
          out.push_back(gvec_normalize(F, std::move(nv.t)));
        }
        // reindex positions above `dead`
        FreeSlots nf{F.p, F.q, {}};
        for (int pos = 0; pos < F.rank(); ++pos)
          if (pos != dead) nf.shifts.push_back(F.shifts[static_cast<size_t>(pos)]);
        for (auto& v : out)
          for (auto& o : v.t)
            if (o.pos > dead) o.pos -= 1;
        F = nf;
        std::vector<GVec> cleaned;
        for (auto& v : out)
          if (!v.zero()) cleaned.push_back(v);
        rels = cleaned;
        changed = true;
        break;
      }
    }
  }
}

}  // namespace

Resolution minimal_free_resolution(const GradedModule& M) {
  M.validate();
  Resolution res;
  FreeSlots F = M.F;
  std::vector<GVec> rels = effective_relations(M);
  for (auto& r : rels) r = gvec_normalize(F, std::move(r.t));
  minimalize_presentation(F, rels);
  res.frees.push_back(F);

  FreeSlots cur = F;
  std::vector<GVec> current = rels;
  const int cap = M.F.q + 1;
  for (int step = 0; step <= cap; ++step) {
    std::vector<GVec> gens = minimal_generators(cur, current);
    if (gens.empty()) break;
    if (step == cap)
      fail("ERR_SYZYGY", "resolution exceeds the Hilbert syzygy bound");
    FreeSlots next;
    std::vector<GVec> syz = syzygies(cur, gens, &next);
    res.maps.push_back(gens);
    res.frees.push_back(next);
    cur = next;
    current = std::move(syz);
  }

  // minimality: no constant terms in any map column
  for (const auto& cols : res.maps)
    for (const auto& c : cols)
      for (const auto& tm : c.t)
        if (tm.m.deg() == 0) fail("ERR_RESOLUTION", "minimal resolution has a unit entry");
  // composites vanish
  for (size_t i = 0; i + 1 < res.maps.size(); ++i) {
    const auto& outer = res.maps[i];
    for (const auto& col : res.maps[i + 1]) {
      GVec image;
      for (const auto& tm : col.t) {
        GVec add = gvec_mono_mul(res.frees[i], tm.c, tm.m, outer[static_cast<size_t>(tm.pos)]);
        image.t.insert(image.t.end(), add.t.begin(), add.t.end());
      }
      if (!gvec_normalize(res.frees[i], std::move(image.t)).zero())
        fail("ERR_RESOLUTION", "resolution composite is nonzero");
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Depth / dimension

namespace {

bool is_zero_module(const GradedModule& M) {
  GroebnerBasis gb = buchberger(M.F, effective_relations(M));
  for (int pos = 0; pos < M.F.rank(); ++pos) {
    GVec e;
    e.t.push_back(GTerm{1, Mono::one(M.F.q), pos});
    if (!submodule_contains(gb, e)) return false;
  }
  return true;
}

// standard monomial basis of each graded piece, as (mono, pos) pairs
std::vector<std::pair<Mono, int>> graded_piece_basis(const GroebnerBasis& gb, int d) {
  auto leads = lead_monomials_by_pos(gb);
  std::vector<std::pair<Mono, int>> basis;
  for (int pos = 0; pos < gb.F.rank(); ++pos) {
    const int k = d - gb.F.shifts[static_cast<size_t>(pos)];
    if (k < 0) continue;
    for_each_monomial(gb.F.q, k, [&](const Mono& m) {
      if (is_standard(m, leads[static_cast<size_t>(pos)])) basis.emplace_back(m, pos);
    });
  }
  return basis;
}

// multiplication by a linear form is injective on all graded pieces up to D?
bool linear_form_regular(const GradedModule& M, const GroebnerBasis& gb,
                         const std::vector<Int>& coeffs, int D) {
  for (int d = 0; d <= D - 1; ++d) {
    auto src = graded_piece_basis(gb, d);
    if (src.empty()) continue;
    auto dst = graded_piece_basis(gb, d + 1);
    std::map<std::pair<std::vector<int>, int>, Int> index;
    for (size_t i = 0; i < dst.size(); ++i) index[{dst[i].first.e, dst[i].second}] = static_cast<Int>(i);
    IMat A = IMat::Zero(static_cast<Int>(dst.size()), static_cast<Int>(src.size()));
    for (size_t c = 0; c < src.size(); ++c) {
      // ell * (mono, pos), reduced to normal form
      std::vector<GTerm> terms;
      for (int v = 0; v < M.F.q; ++v) {
        if (coeffs[static_cast<size_t>(v)] == 0) continue;
        Mono m = src[c].first;
        m.e[static_cast<size_t>(v)] += 1;
        terms.push_back(GTerm{coeffs[static_cast<size_t>(v)], m, src[c].second});
      }
      GVec nf = normal_form(gb, gvec_normalize(M.F, std::move(terms)));
      for (const auto& tm : nf.t) {
        auto it = index.find({tm.m.e, tm.pos});
        if (it == index.end()) fail("ERR_GRADED", "normal form escaped the standard basis");
        A(it->second, static_cast<Int>(c)) = tm.c;
      }
    }
    if (gauss_rank_mod_p(A, M.F.p) < static_cast<int>(src.size())) return false;
  }
  return true;
}

}  // namespace

int linear_regular_sequence_length(const GradedModule& M, int D) {
  if (is_zero_module(M)) return 0;
  GroebnerBasis gb = buchberger(M.F, effective_relations(M));
  // enumerate nonzero linear forms with first nonzero coefficient 1
  std::vector<std::vector<Int>> forms;
  std::vector<Int> cur(static_cast<size_t>(M.F.q), 0);
  const Int total = pow_int(M.F.p, M.F.q);
  for (Int code = 1; code < total; ++code) {
    Int x = code;
    for (int v = 0; v < M.F.q; ++v) {
      cur[static_cast<size_t>(v)] = x % M.F.p;
      x /= M.F.p;
    }
    int first = -1;
    for (int v = 0; v < M.F.q; ++v)
      if (cur[static_cast<size_t>(v)] != 0) {
        first = v;
        break;
      }
    if (first >= 0 && cur[static_cast<size_t>(first)] == 1) forms.push_back(cur);
  }
  for (const auto& ell : forms) {
    if (linear_form_regular(M, gb, ell, D)) {
      GradedModule q = M;
      for (int pos = 0; pos < M.F.rank(); ++pos) {
        std::vector<GTerm> terms;
        for (int v = 0; v < M.F.q; ++v) {
          if (ell[static_cast<size_t>(v)] == 0) continue;
          Mono m = Mono::one(M.F.q);
          m.e[static_cast<size_t>(v)] = 1;
          terms.push_back(GTerm{ell[static_cast<size_t>(v)], m, pos});
        }
        q.relations.push_back(gvec_normalize(M.F, std::move(terms)));
      }
      return 1 + linear_regular_sequence_length(q, D);
    }
  }
  return 0;
}

HomologicalReport depth_pd(const GradedModule& M, bool run_regular_sequence_oracle) {
  M.validate();
  HomologicalReport out;
  Resolution res = minimal_free_resolution(M);
  out.proj_dim = res.length();
  out.depth = M.F.q - out.proj_dim;  // Auslander-Buchsbaum over the polynomial ring
  const int D = default_degree_bound(M);
  if (is_zero_module(M)) {
    out.krull_dim = -1;
    out.multiplicity = 0;
    out.hilbert.assign(static_cast<size_t>(D + 1), 0);
    return out;
  }
  HilbertData hd = hilbert_data(M, D);
  out.krull_dim = hd.dim;
  out.multiplicity = hd.multiplicity;
  out.hilbert = hd.values;
  if (out.depth > out.krull_dim) fail("ERR_DEPTH", "depth exceeds dimension (internal error)");
  if (run_regular_sequence_oracle && M.F.p <= 5 && M.F.q <= 3) {
    out.regular_sequence_found = linear_regular_sequence_length(M, D);
    if (out.regular_sequence_found > out.depth)
      fail("ERR_DEPTH", "regular-sequence oracle exceeds Auslander-Buchsbaum depth");
  }
  return out;
}

DepthBoundVerdict check_depth_bound(const GradedModule& N, const std::vector<GVec>& M_gens) {
  N.validate();
  GroebnerBasis gbN = buchberger(N.F, effective_relations(N));
  bool all_zero = true;
  for (const auto& g : M_gens)
    if (!submodule_contains(gbN, g)) all_zero = false;
  if (M_gens.empty() || all_zero) fail("ERR_ZERO_SUBMODULE", "the lemma requires 0 != M");
  DepthBoundVerdict out;
  out.depth_N = depth_pd(N).depth;
  const int D = default_degree_bound(N) + 2;
  std::vector<Int> hf = submodule_hilbert(N, M_gens, D);
  DimMult dm = dim_mult_from_values(hf, N.F.q);
  out.dim_M = dm.dim;
  out.holds = out.dim_M >= out.depth_N;
  return out;
}

// ---------------------------------------------------------------------------
// Graded complexes and the length criterion

void GradedComplex::validate() const {
  if (ring.kind != RingKind::GradedQuotient) fail("ERR_GRADED", "graded complex needs a graded ring");
  if (frees.empty()) return;
  if (diffs.size() + 1 != frees.size()) fail("ERR_COMPLEX", "need one differential per adjacent pair");
  for (size_t k = 0; k < diffs.size(); ++k) {
    if (static_cast<int>(diffs[k].size()) != frees[k].rank())
      fail("ERR_COMPLEX", "one column per source slot required");
    for (int i = 0; i < frees[k].rank(); ++i) {
      const GVec& col = diffs[k][static_cast<size_t>(i)];
      auto d = gvec_degree(frees[k + 1], col);
      if (d && *d != frees[k].shifts[static_cast<size_t>(i)])
        fail("ERR_COMPLEX", "differential column degree mismatch");
    }
  }
  // d o d = 0
  for (size_t k = 0; k + 1 < diffs.size(); ++k)
    for (int i = 0; i < frees[k].rank(); ++i) {
      GVec img;
      for (const auto& tm : diffs[k][static_cast<size_t>(i)].t) {
        GVec add = gvec_mono_mul(frees[k + 2], tm.c, tm.m, diffs[k + 1][static_cast<size_t>(tm.pos)]);
        img.t.insert(img.t.end(), add.t.begin(), add.t.end());
      }
      if (!gvec_normalize(frees[k + 2], std::move(img.t)).zero())
        fail("ERR_COMPLEX", "graded complex composite nonzero at degree " +
                                std::to_string(lo + static_cast<int>(k)));
    }
}

GradedModule graded_cohomology(const GradedComplex& P, int degree) {
  if (!P.ring.relations.empty())
    fail("ERR_GRADED", "graded cohomology is computed over the polynomial ring only");
  const int k = degree - P.lo;
  GradedModule H;
  H.ring = P.ring;
  H.F = FreeSlots{P.ring.p, P.ring.q, {}};
  if (k < 0 || k >= static_cast<int>(P.frees.size())) return H;  // zero module
  const FreeSlots& Fk = P.frees[static_cast<size_t>(k)];

  // kernel generators of the outgoing map
  std::vector<GVec> S;
  std::vector<int> S_shifts;
  if (k + 1 < static_cast<int>(P.frees.size())) {
    FreeSlots syzsl;
    S = syzygies_with_shifts(P.frees[static_cast<size_t>(k) + 1], P.diffs[static_cast<size_t>(k)],
                             Fk.shifts, &syzsl);
    for (const auto& s : S) S_shifts.push_back(*gvec_degree(Fk, s));
  } else {
    for (int i = 0; i < Fk.rank(); ++i) {
      GVec e;
      e.t.push_back(GTerm{1, Mono::one(Fk.q), i});
      S.push_back(e);
      S_shifts.push_back(Fk.shifts[static_cast<size_t>(i)]);
    }
  }
  if (S.empty()) return H;  // zero module

  // relations: {w : S w in im(d^{k-1})}, via combined syzygies projected to S
  std::vector<GVec> combined = S;
  std::vector<int> combined_shifts = S_shifts;
  if (k - 1 >= 0) {
    const FreeSlots& Fprev = P.frees[static_cast<size_t>(k) - 1];
    for (int i = 0; i < Fprev.rank(); ++i) {
      combined.push_back(P.diffs[static_cast<size_t>(k) - 1][static_cast<size_t>(i)]);
      combined_shifts.push_back(Fprev.shifts[static_cast<size_t>(i)]);
    }
  }
  std::vector<GVec> syz = syzygies_with_shifts(Fk, combined, combined_shifts, nullptr);
  const int s = static_cast<int>(S.size());
  std::vector<GVec> rels;
  for (const auto& w : syz) {
    GVec proj;
    for (const auto& tm : w.t)
      if (tm.pos < s) proj.t.push_back(tm);
    if (!proj.zero()) rels.push_back(proj);
  }
  H.F = FreeSlots{P.ring.p, P.ring.q, S_shifts};
  H.relations = std::move(rels);
  return H;
}

LengthCriterionReport check_length_criterion(const GradedComplex& P, int l0) {
  P.validate();
  if (P.lo < 0 || P.hi() > l0) fail("ERR_DEGREE_WINDOW", "complex must live in degrees 0..l0");
  LengthCriterionReport out;
  out.l0 = l0;
  const int q = P.ring.q;
  int maxdim = -1;
  std::vector<GradedModule> H;
  std::vector<bool> H_zero;
  for (int deg = 0; deg <= l0; ++deg) {
    GradedModule h = graded_cohomology(P, deg);
    bool zero = h.F.rank() == 0 || is_zero_module(h);
    if (!zero) {
      HilbertData hd = hilbert_data(h, default_degree_bound(h));
      maxdim = std::max(maxdim, hd.dim);
    }
    H.push_back(std::move(h));
    H_zero.push_back(zero);
  }
  if (maxdim < 0) {
    out.codim = -1;  // all cohomology vanishes; the bound holds vacuously
    out.codim_at_most_l0 = true;
    out.equality = false;
    return out;
  }
  out.codim = q - maxdim;
  out.codim_at_most_l0 = out.codim <= l0;
  out.equality = out.codim == l0;
  if (out.equality) {
    out.lower_vanishing = true;
    for (int deg = 0; deg < l0; ++deg) out.lower_vanishing = out.lower_vanishing && H_zero[static_cast<size_t>(deg)];
    out.resolution_of_top = out.lower_vanishing && !H_zero[static_cast<size_t>(l0)];
    if (!H_zero[static_cast<size_t>(l0)]) {
      HomologicalReport rep = depth_pd(H[static_cast<size_t>(l0)]);
      out.top_depth = rep.depth;
      out.top_pd = rep.proj_dim;
    }
    out.conclusions_hold =
        out.resolution_of_top && out.top_depth == q - l0 && out.top_pd == l0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Annihilators and near-faithfulness

namespace {

// colon ideal (span(rels) : e_pos) inside the ambient free module
std::vector<GVec> colon_ideal(const FreeSlots& F, const std::vector<GVec>& rels, int pos) {
  std::vector<GVec> combined = rels;
  std::vector<int> shifts;
  for (const auto& r : rels) shifts.push_back(*gvec_degree(F, r));
  GVec e;
  e.t.push_back(GTerm{1, Mono::one(F.q), pos});
  combined.push_back(e);
  shifts.push_back(F.shifts[static_cast<size_t>(pos)]);
  std::vector<GVec> syz = syzygies_with_shifts(F, combined, shifts, nullptr);
  const int last = static_cast<int>(rels.size());
  std::vector<GVec> out;
  FreeSlots ideal_slots{F.p, F.q, {F.shifts[static_cast<size_t>(pos)]}};
  for (const auto& w : syz) {
    GVec f;
    for (const auto& tm : w.t)
      if (tm.pos == last) f.t.push_back(GTerm{tm.c, tm.m, 0});
    if (!f.zero()) out.push_back(gvec_normalize(ideal_slots, std::move(f.t)));
  }
  return out;
}

// intersection of two homogeneous ideals (rank-1 shift-0 elements)
std::vector<GVec> ideal_intersection(Int p, int q, const std::vector<GVec>& I,
                                     const std::vector<GVec>& J) {
  FreeSlots F2{p, q, {0, 0}};
  std::vector<GVec> gens;
  std::vector<int> shifts;
  GVec diag;
  diag.t.push_back(GTerm{1, Mono::one(q), 0});
  diag.t.push_back(GTerm{1, Mono::one(q), 1});
  gens.push_back(gvec_normalize(F2, std::move(diag.t)));
  shifts.push_back(0);
  for (const auto& f : I) {
    GVec g;
    for (const auto& tm : f.t) g.t.push_back(GTerm{mod_reduce(-tm.c, p), tm.m, 0});
    gens.push_back(gvec_normalize(F2, std::move(g.t)));
    shifts.push_back(*gvec_degree(F2, gens.back()));
  }
  for (const auto& f : J) {
    GVec g;
    for (const auto& tm : f.t) g.t.push_back(GTerm{mod_reduce(-tm.c, p), tm.m, 1});
    gens.push_back(gvec_normalize(F2, std::move(g.t)));
    shifts.push_back(*gvec_degree(F2, gens.back()));
  }
  std::vector<GVec> syz = syzygies_with_shifts(F2, gens, shifts, nullptr);
  FreeSlots ideal_slots{p, q, {0}};
  std::vector<GVec> out;
  for (const auto& w : syz) {
    GVec f;
    for (const auto& tm : w.t)
      if (tm.pos == 0) f.t.push_back(tm);
    if (!f.zero()) out.push_back(gvec_normalize(ideal_slots, std::move(f.t)));
  }
  return out;
}

}  // namespace

std::vector<GVec> annihilator_ideal(const GradedModule& M) {
  M.validate();
  std::vector<GVec> rels = effective_relations(M);
  for (auto& r : rels) r = gvec_normalize(M.F, std::move(r.t));
  std::vector<GVec> nonzero;
  for (auto& r : rels)
    if (!r.zero()) nonzero.push_back(r);
  std::optional<std::vector<GVec>> ann;
  for (int pos = 0; pos < M.F.rank(); ++pos) {
    std::vector<GVec> colon = colon_ideal(M.F, nonzero, pos);
    if (!ann) {
      ann = colon;
    } else {
      ann = ideal_intersection(M.F.p, M.F.q, *ann, colon);
    }
  }
  if (!ann) fail("ERR_GRADED", "annihilator of a module on zero slots");
  FreeSlots ideal_slots{M.F.p, M.F.q, {0}};
  GroebnerBasis gb = buchberger(ideal_slots, *ann);
  return gb.elems;
}

NearlyFaithfulVerdict nearly_faithful(const GradedModule& M,
                                      const std::vector<std::vector<GVec>>& minimal_primes) {
  if (minimal_primes.empty()) fail("ERR_EMPTY_PRIMES", "caller must supply the minimal primes");
  NearlyFaithfulVerdict out;
  out.annihilator = annihilator_ideal(M);
  FreeSlots ideal_slots{M.F.p, M.F.q, {0}};
  out.nearly_faithful = true;
  for (size_t pi = 0; pi < minimal_primes.size(); ++pi) {
    GroebnerBasis gb = buchberger(ideal_slots, minimal_primes[pi]);
    bool contained = true;
    for (const auto& a : out.annihilator)
      if (!submodule_contains(gb, a)) contained = false;
    if (!contained) {
      out.nearly_faithful = false;
      out.failing_primes.push_back(static_cast<int>(pi));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Koszul complexes

GradedComplex koszul_complex(const RingSpec& ring, const std::vector<int>& var_indices) {
  if (ring.kind != RingKind::GradedQuotient) fail("ERR_GRADED", "Koszul complex needs a graded ring");
  const int l = static_cast<int>(var_indices.size());
  const int q = ring.q;
  GradedComplex P;
  P.ring = ring;
  P.lo = 0;
  // subsets of {0..l-1} of size i, in increasing bitmask order
  std::vector<std::vector<unsigned>> masks(static_cast<size_t>(l) + 1);
  for (unsigned mask = 0; mask < (1u << l); ++mask)
    masks[static_cast<size_t>(__builtin_popcount(mask))].push_back(mask);
  std::vector<std::map<unsigned, int>> index(static_cast<size_t>(l) + 1);
  for (int i = 0; i <= l; ++i) {
    FreeSlots F{ring.p, q, {}};
    for (size_t s = 0; s < masks[static_cast<size_t>(i)].size(); ++s) {
      F.shifts.push_back(l - i);  // degree-preserving differentials, top slot in shift 0
      index[static_cast<size_t>(i)][masks[static_cast<size_t>(i)][s]] = static_cast<int>(s);
    }
    P.frees.push_back(F);
  }
  for (int i = 0; i < l; ++i) {
    std::vector<GVec> cols;
    for (unsigned mask : masks[static_cast<size_t>(i)]) {
      GVec col;
      for (int k = 0; k < l; ++k) {
        if (mask & (1u << k)) continue;
        int sign_count = 0;
        for (int s = 0; s < k; ++s)
          if (mask & (1u << s)) ++sign_count;
        const Int c = sign_count % 2 == 0 ? 1 : mod_reduce(-1, ring.p);
        Mono m = Mono::one(q);
        m.e[static_cast<size_t>(var_indices[static_cast<size_t>(k)])] += 1;
        col.t.push_back(GTerm{c, m, index[static_cast<size_t>(i) + 1].at(mask | (1u << k))});
      }
      cols.push_back(gvec_normalize(P.frees[static_cast<size_t>(i) + 1], std::move(col.t)));
    }
    P.diffs.push_back(std::move(cols));
  }
  P.validate();
  return P;
}

}  // namespace patchlab
