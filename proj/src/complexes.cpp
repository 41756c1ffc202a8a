#include "patchlab/complexes.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace patchlab {

Int Complex::rank_at(int degree) const {
  if (!has_degree(degree)) return 0;
  return ranks[degree - lo];
}

const RingMatrix* Complex::diff_at(int degree) const {
  const int k = degree - lo;
  if (k < 0 || k >= static_cast<int>(diffs.size())) return nullptr;
  return &diffs[k];
}

void Complex::validate_shape() const {
  if (ranks.empty()) {
    if (!diffs.empty()) fail("ERR_COMPLEX", "zero complex cannot carry differentials");
    return;
  }
  if (diffs.size() + 1 != ranks.size()) fail("ERR_COMPLEX", "need one differential per adjacent pair");
  for (size_t k = 0; k < diffs.size(); ++k) {
    if (!diffs[k].ring.same_arithmetic(ring)) fail("ERR_COMPLEX", "differential over wrong ring");
    if (diffs[k].cols != ranks[k] || diffs[k].rows != ranks[k + 1])
      fail("ERR_COMPLEX", "differential shape mismatch at degree " + std::to_string(lo + (int)k));
  }
  for (Int r : ranks)
    if (r < 0) fail("ERR_COMPLEX", "negative rank");
}

Int Complex::euler_characteristic() const {
  Int chi = 0;
  for (size_t k = 0; k < ranks.size(); ++k) chi += ((lo + (int)k) % 2 == 0 ? 1 : -1) * ranks[k];
  return chi;
}

ComplexValidity check_complex(const Complex& C) {
  C.validate_shape();
  ComplexValidity out;
  if (C.ranks.empty()) return out;
  Ring R(C.ring);
  for (size_t k = 0; k + 1 < C.diffs.size(); ++k) {
    RingMatrix comp = ring_matrix_mul(R, C.diffs[k + 1], C.diffs[k]);
    if (!ring_matrix_is_zero(comp)) {
      out.valid = false;
      std::ostringstream os;
      os << "d^" << C.lo + (int)k + 1 << " o d^" << C.lo + (int)k << " != 0";
      out.failures.emplace_back(C.lo + (int)k, os.str());
    }
  }
  return out;
}

Complex base_change(const Complex& C, const RingMap& f) {
  if (!C.ring.same_arithmetic(f.src)) fail("ERR_RING_MISMATCH", "complex not over source of map");
  Complex out;
  out.ring = f.dst;
  out.lo = C.lo;
  out.ranks = C.ranks;
  for (const auto& d : C.diffs) out.diffs.push_back(ring_matrix_apply_map(f, d));
  return out;
}

namespace {

IMat ambient_generator_action(const Ring& R, const RingElement& x, Int rank) {
  const Int B = R.basis_size();
  IMat block = R.regular_representation(x);
  IMat M = IMat::Zero(rank * B, rank * B);
  for (Int i = 0; i < rank; ++i) M.block(i * B, i * B, B, B) = block;
  return M;
}

FiniteModule zero_module(const Ring& R) {
  FiniteModule M;
  M.p = R.p();
  M.mm = R.m();
  M.ring = R.spec();
  for (const auto& [name, elem] : R.action_generators()) {
    M.gen_names.push_back(name);
    M.actions.push_back(IMat::Zero(0, 0));
    (void)elem;
  }
  return M;
}

}  // namespace

CohomologyPresentation cohomology_presentation(const Complex& C, int degree) {
  C.validate_shape();
  if (!C.ring.finite_local()) fail("ERR_GRADED_KIND", "cohomology over finite local rings only");
  Ring R(C.ring);
  const Int r = C.rank_at(degree);
  if (r == 0) return CohomologyPresentation{zero_module(R), std::nullopt, 0};
  const Int B = R.basis_size();
  const Int n = r * B;

  IMat K;
  const RingMatrix* d_out = C.diff_at(degree);
  if (d_out != nullptr && C.rank_at(degree + 1) > 0) {
    IMat A = underlying_abelian(R, *d_out);
    K = kernel_generators(smith_normal_form(A, R.p(), R.m(), SnfNeeds::kernel()));
  } else {
    K = IMat::Identity(n, n);
  }
  IMat W = IMat::Zero(n, 0);
  const RingMatrix* d_in = degree - 1 >= C.lo ? C.diff_at(degree - 1) : nullptr;
  if (d_in != nullptr && C.rank_at(degree - 1) > 0) W = underlying_abelian(R, *d_in);

  CohomologyPresentation out;
  out.rank = r;
  out.sq.emplace(K, W, R.p(), R.m());
  out.H.p = R.p();
  out.H.mm = R.m();
  out.H.ring = C.ring;
  out.H.factors = out.sq->factors();
  for (const auto& [name, elem] : R.action_generators()) {
    out.H.gen_names.push_back(name);
    out.H.actions.push_back(out.sq->induced_action(ambient_generator_action(R, elem, r)));
  }
  return out;
}

CohomologyWithOperators cohomology_with_operators(const Complex& C, int degree,
                                                  const std::vector<RingMatrix>& extra) {
  CohomologyPresentation pres = cohomology_presentation(C, degree);
  Ring R(C.ring);
  CohomologyWithOperators out{std::move(pres.H), {}};
  for (const auto& T : extra) {
    if (!pres.sq) {
      out.induced.push_back(IMat::Zero(0, 0));
    } else {
      out.induced.push_back(pres.sq->induced_action(underlying_abelian(R, T)));
    }
  }
  return out;
}

FiniteModule cohomology(const Complex& C, int degree) {
  return cohomology_presentation(C, degree).H;
}

std::vector<Int> residual_cohomology_dims(const Complex& C) {
  Complex D = C;
  if (D.ring.kind == RingKind::TruncExt) D = base_change(D, RingMap::kill_vars(D.ring));
  if (D.ring.q > 0 || D.ring.kind == RingKind::GroupAlgebra)
    D = base_change(D, RingMap::augment(D.ring));
  if (D.ring.m > 1) D = base_change(D, RingMap::mod_power(D.ring, 1));
  std::vector<Int> dims;
  for (int deg = C.lo; deg <= C.hi(); ++deg)
    dims.push_back(cohomology(D, deg).num_gens());
  return dims;
}

MinimalityCertificate minimality_certificate(const Complex& C) {
  MinimalityCertificate cert;
  Ring R(C.ring);
  for (const auto& d : C.diffs) {
    bool in_m = true;
    for (const auto& e : d.ent)
      if (R.is_unit(RingElement{C.ring, e})) {
        in_m = false;
        break;
      }
    cert.diff_in_max_ideal.push_back(in_m);
    cert.minimal = cert.minimal && in_m;
  }
  return cert;
}

namespace {

// Split off the acyclic summand R[deg] -> R[deg+1] at a unit pivot (row, col)
// of the differential with index k.  Mutates the complex in place.
void split_unit_pivot(Ring& R, Complex& C, size_t k, Int row, Int col) {
  RingMatrix& d = C.diffs[k];
  const RingElement u{C.ring, d.at(row, col)};
  const RingElement uinv = R.inverse(u);

  // column operations: clear row `row` outside the pivot column
  std::vector<RingElement> colcoef(static_cast<size_t>(d.cols), R.zero());
  for (Int c2 = 0; c2 < d.cols; ++c2) {
    if (c2 == col || d.at(row, c2).isZero()) continue;
    RingElement coef = R.mul(uinv, RingElement{C.ring, d.at(row, c2)});
    colcoef[static_cast<size_t>(c2)] = coef;
    for (Int i = 0; i < d.rows; ++i) {
      RingElement v = R.sub(RingElement{C.ring, d.at(i, c2)},
                            R.mul(RingElement{C.ring, d.at(i, col)}, coef));
      d.at(i, c2) = v.coords;
    }
  }
  // mirror on the incoming differential: row_col += sum coef_{c2} * row_{c2}
  if (k > 0) {
    RingMatrix& din = C.diffs[k - 1];
    for (Int c2 = 0; c2 < d.cols; ++c2) {
      const RingElement& coef = colcoef[static_cast<size_t>(c2)];
      if (coef.coords.size() == 0 || coef.coords.isZero()) continue;
      for (Int jj = 0; jj < din.cols; ++jj) {
        RingElement v = R.add(RingElement{C.ring, din.at(col, jj)},
                              R.mul(coef, RingElement{C.ring, din.at(c2, jj)}));
        din.at(col, jj) = v.coords;
      }
    }
  }

  // row operations: clear column `col` outside the pivot row
  std::vector<RingElement> rowcoef(static_cast<size_t>(d.rows), R.zero());
  for (Int r2 = 0; r2 < d.rows; ++r2) {
    if (r2 == row || d.at(r2, col).isZero()) continue;
    RingElement coef = R.mul(RingElement{C.ring, d.at(r2, col)}, uinv);
    rowcoef[static_cast<size_t>(r2)] = coef;
    for (Int jj = 0; jj < d.cols; ++jj) {
      RingElement v = R.sub(RingElement{C.ring, d.at(r2, jj)},
                            R.mul(coef, RingElement{C.ring, d.at(row, jj)}));
      d.at(r2, jj) = v.coords;
    }
  }
  // mirror on the outgoing differential: col_row += sum coef_{r2} * col_{r2}
  if (k + 1 < C.diffs.size()) {
    RingMatrix& dout = C.diffs[k + 1];
    for (Int r2 = 0; r2 < d.rows; ++r2) {
      const RingElement& coef = rowcoef[static_cast<size_t>(r2)];
      if (coef.coords.size() == 0 || coef.coords.isZero()) continue;
      for (Int i = 0; i < dout.rows; ++i) {
        RingElement v = R.add(RingElement{C.ring, dout.at(i, row)},
                              R.mul(RingElement{C.ring, dout.at(i, r2)}, coef));
        dout.at(i, row) = v.coords;
      }
    }
  }

  // the split-off summand's complements must already be zero (d o d = 0)
  if (k > 0)
    for (Int jj = 0; jj < C.diffs[k - 1].cols; ++jj)
      if (!C.diffs[k - 1].at(col, jj).isZero()) fail("ERR_MINIMIZE", "incoming row not cleared");
  if (k + 1 < C.diffs.size())
    for (Int i = 0; i < C.diffs[k + 1].rows; ++i)
      if (!C.diffs[k + 1].at(i, row).isZero()) fail("ERR_MINIMIZE", "outgoing column not cleared");

  auto drop_col = [](RingMatrix& M, Int c2) {
    RingMatrix out{M.ring, M.rows, M.cols - 1, {}};
    out.ent.reserve(static_cast<size_t>(out.rows * out.cols));
    for (Int i = 0; i < M.rows; ++i)
      for (Int jj = 0; jj < M.cols; ++jj)
        if (jj != c2) out.ent.push_back(M.at(i, jj));
    M = std::move(out);
  };
  auto drop_row = [](RingMatrix& M, Int r2) {
    RingMatrix out{M.ring, M.rows - 1, M.cols, {}};
    out.ent.reserve(static_cast<size_t>(out.rows * out.cols));
    for (Int i = 0; i < M.rows; ++i) {
      if (i == r2) continue;
      for (Int jj = 0; jj < M.cols; ++jj) out.ent.push_back(M.at(i, jj));
    }
    M = std::move(out);
  };

  drop_row(C.diffs[k], row);
  drop_col(C.diffs[k], col);
  if (k > 0) drop_row(C.diffs[k - 1], col);
  if (k + 1 < C.diffs.size()) drop_col(C.diffs[k + 1], row);
  C.ranks[k] -= 1;
  C.ranks[k + 1] -= 1;
}

void trim_zero_ends(Complex& C) {
  while (!C.ranks.empty() && C.ranks.front() == 0) {
    C.ranks.erase(C.ranks.begin());
    if (!C.diffs.empty()) C.diffs.erase(C.diffs.begin());
    C.lo += 1;
  }
  while (!C.ranks.empty() && C.ranks.back() == 0) {
    C.ranks.pop_back();
    if (!C.diffs.empty()) C.diffs.pop_back();
  }
  if (C.ranks.empty()) {
    C.lo = 0;
    C.diffs.clear();
  }
}

}  // namespace

std::pair<Complex, MinimalityCertificate> minimize(const Complex& C) {
  C.validate_shape();
  Ring R(C.ring);
  Complex out = C;
  bool again = true;
  while (again) {
    again = false;
    for (size_t k = 0; k < out.diffs.size() && !again; ++k) {
      const RingMatrix& d = out.diffs[k];
      for (Int i = 0; i < d.rows && !again; ++i)
        for (Int jj = 0; jj < d.cols && !again; ++jj)
          if (R.is_unit(RingElement{out.ring, d.at(i, jj)})) {
            split_unit_pivot(R, out, k, i, jj);
            again = true;
          }
    }
  }
  trim_zero_ends(out);
  return {out, minimality_certificate(out)};
}

// ---------------------------------------------------------------------------
// Cohomology comparison

namespace {

std::vector<std::pair<std::string, IMat>> maximal_ideal_actions(const FiniteModule& M) {
  std::vector<std::pair<std::string, IMat>> out;
  const Int s = M.num_gens();
  for (size_t g = 0; g < M.gen_names.size(); ++g) {
    IMat A = M.actions[g];
    if (M.gen_names[g].rfind("g", 0) == 0) A -= IMat::Identity(s, s);  // gamma_i - 1
    out.emplace_back(M.gen_names[g], A);
  }
  return out;
}

// Isomorphism-invariant battery: invariant factors of H, of H/xH for each
// maximal-ideal generator x, and the kernel-size ladder of powers of x.
std::string battery(const FiniteModule& M) {
  std::ostringstream os;
  os << "factors:";
  for (int e : M.factors) os << e << ",";
  for (const auto& [name, X] : maximal_ideal_actions(M)) {
    FiniteModule Q = module_quotient_by_image(M, X);
    os << "|" << name << ":quot:";
    for (int e : Q.factors) os << e << ",";
    os << ":ker:";
    Int prev = -1;
    IMat P = X;
    for (int t = 1; t <= M.size_log() + 1; ++t) {
      Int kl = module_kernel_size_log(M, P);
      if (kl == prev) break;
      os << kl << ",";
      prev = kl;
      P = module_action_mul(P, X, M.factors, M.p);
    }
  }
  return os.str();
}

struct IsoSearchOutcome {
  enum { Found, ExhaustedNoIso, TooBig } status;
};

IsoSearchOutcome search_equivariant_iso(const FiniteModule& A, const FiniteModule& B,
                                        const SameHomologyConfig& cfg) {
  const Int s1 = A.num_gens(), s2 = B.num_gens();
  const int mm = std::max(A.mm, B.mm);
  const Int p = A.p;
  const Int mod = pow_int(p, mm);
  const Int nunk = s1 * s2;  // unknown a_{i,k}: F(i,k) = p^{max(0, f_i - e_k)} a_{i,k}
  auto shift = [&](Int i, Int k) { return std::max(0, B.factors[i] - A.factors[k]); };
  auto unk = [&](Int i, Int k) { return k * s2 + i; };

  std::vector<IVec> rows;
  for (size_t g = 0; g < A.gen_names.size(); ++g) {
    const IMat& A1 = A.actions[g];
    const IMat& A2 = B.actions[g];
    for (Int i = 0; i < s2; ++i) {
      const Int scale = pow_int(p, mm - B.factors[i]);
      for (Int jj = 0; jj < s1; ++jj) {
        IVec row = IVec::Zero(nunk);
        for (Int k = 0; k < s1; ++k)
          row[unk(i, k)] =
              mod_reduce(row[unk(i, k)] + pow_int(p, shift(i, k)) * A1(k, jj) * scale, mod);
        for (Int k = 0; k < s2; ++k)
          row[unk(k, jj)] =
              mod_reduce(row[unk(k, jj)] - A2(i, k) * pow_int(p, shift(k, jj)) * scale, mod);
        if (!row.isZero()) rows.push_back(row);
      }
    }
  }
  IMat Eq = IMat::Zero(static_cast<Int>(rows.size()), nunk);
  for (size_t i = 0; i < rows.size(); ++i) Eq.row(static_cast<Int>(i)) = rows[i];
  SnfResult snf = smith_normal_form(Eq, p, mm);
  KernelGens kg = kernel_generators_with_orders(snf);

  double combos = 1;
  for (int o : kg.orders) {
    combos *= static_cast<double>(pow_int(p, o));
    if (combos > static_cast<double>(cfg.enumeration_cap)) return {IsoSearchOutcome::TooBig};
  }

  const Int ngen = kg.cols.cols();
  std::vector<Int> counter(static_cast<size_t>(ngen), 0);
  std::set<std::vector<Int>> seen;
  while (true) {
    IVec a = IVec::Zero(nunk);
    for (Int g = 0; g < ngen; ++g)
      if (counter[static_cast<size_t>(g)] != 0)
        a += counter[static_cast<size_t>(g)] * kg.cols.col(g);
    // assemble F and test
    IMat F = IMat::Zero(s2, s1);
    std::vector<Int> key(static_cast<size_t>(nunk));
    for (Int i = 0; i < s2; ++i)
      for (Int k = 0; k < s1; ++k) {
        Int val = mod_reduce(pow_int(p, shift(i, k)) * a[unk(i, k)], pow_int(p, B.factors[i]));
        F(i, k) = val;
        key[static_cast<size_t>(unk(i, k))] = val;
      }
    if (seen.insert(key).second) {
      // surjective (hence bijective, sizes equal)?
      IMat relcheck = IMat::Zero(s2, s2 + s1);
      for (Int i = 0; i < s2; ++i) relcheck(i, i) = pow_int(p, B.factors[i]);
      relcheck.rightCols(s1) = F;
      SnfResult s = smith_normal_form(relcheck, p, mm);
      bool onto = static_cast<Int>(s.dvals.size()) >= s2;
      for (Int i = 0; i < std::min<Int>(s2, static_cast<Int>(s.dvals.size())); ++i)
        onto = onto && s.dvals[i] == 0;
      if (onto) return {IsoSearchOutcome::Found};
    }
    // advance mixed-radix counter
    Int g = 0;
    for (; g < ngen; ++g) {
      counter[static_cast<size_t>(g)] += 1;
      if (counter[static_cast<size_t>(g)] < pow_int(p, kg.orders[static_cast<size_t>(g)])) break;
      counter[static_cast<size_t>(g)] = 0;
    }
    if (g == ngen) break;
  }
  return {IsoSearchOutcome::ExhaustedNoIso};
}

}  // namespace

ModuleIsoReport module_isomorphic(const FiniteModule& A, const FiniteModule& B,
                                  const SameHomologyConfig& cfg) {
  if (A.p != B.p || !A.same_factors(B))
    return {HomologyVerdict::Distinct, "abelian invariant factors differ"};
  if (A.factors.empty()) return {HomologyVerdict::Isomorphic, "both zero"};
  if (A.gen_names != B.gen_names)
    return {HomologyVerdict::Distinct, "acting generator sets differ"};
  if (battery(A) != battery(B)) return {HomologyVerdict::Distinct, "invariant battery differs"};
  double size = static_cast<double>(A.size_log()) * std::log2(static_cast<double>(A.p));
  if (size <= std::log2(static_cast<double>(cfg.exhaustive_size_cap))) {
    auto res = search_equivariant_iso(A, B, cfg);
    if (res.status == IsoSearchOutcome::Found)
      return {HomologyVerdict::Isomorphic, "equivariant isomorphism found by exhaustive search"};
    if (res.status == IsoSearchOutcome::ExhaustedNoIso)
      return {HomologyVerdict::Distinct, "exhaustive search found no equivariant isomorphism"};
  }
  return {HomologyVerdict::EquivalentInvariants, "battery equal; size above exhaustive cap"};
}

HomologyComparison same_homology(const Complex& C1, const Complex& C2,
                                 const SameHomologyConfig& cfg) {
  if (!C1.ring.same_arithmetic(C2.ring)) fail("ERR_RING_MISMATCH", "complexes over different rings");
  HomologyComparison out;
  const int lo = std::min(C1.ranks.empty() ? 0 : C1.lo, C2.ranks.empty() ? 0 : C2.lo);
  const int hi = std::max(C1.ranks.empty() ? -1 : C1.hi(), C2.ranks.empty() ? -1 : C2.hi());
  for (int deg = lo; deg <= hi; ++deg) {
    FiniteModule H1 = cohomology(C1, deg);
    FiniteModule H2 = cohomology(C2, deg);
    ModuleIsoReport rep = module_isomorphic(H1, H2, cfg);
    out.degrees.push_back({deg, rep.verdict, rep.detail});
    if (rep.verdict == HomologyVerdict::Distinct) out.verdict = HomologyVerdict::Distinct;
    else if (rep.verdict == HomologyVerdict::EquivalentInvariants &&
             out.verdict == HomologyVerdict::Isomorphic)
      out.verdict = HomologyVerdict::EquivalentInvariants;
  }
  return out;
}

}  // namespace patchlab
