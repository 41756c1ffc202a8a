#include "patchlab/patching.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

namespace patchlab {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::LimitConsistent: return "limit-consistent";
    case Verdict::Unverified: return "unverified-at-truncation";
    case Verdict::Fail: return "fail";
  }
  return "?";
}

bool VerificationReport::all_pass() const {
  auto ok = [](const ConclusionReport& c) {
    return c.verdict == Verdict::Pass || c.verdict == Verdict::LimitConsistent;
  };
  return ok(resolution) && ok(actions) && ok(depth) && ok(top_iso);
}

// ---------------------------------------------------------------------------
// Tower configuration

void TowerConfig::validate() const {
  if (!is_prime(p)) fail("ERR_TOWER", "p must be prime");
  if (m < 1 || q < 0 || j < 0 || l0 < 0 || levels < 1) fail("ERR_TOWER", "tower parameters out of range");
  if (q + j < l0) fail("ERR_TOWER", "need q + j >= l0");
  if (rinf.declared_dim != 1 + j + q - l0)
    fail("ERR_TOWER", "declared Krull dimension of R_inf must be 1 + j + q - l0");
  if (static_cast<int>(T_dims.size()) != l0 + 1)
    fail("ERR_TOWER", "T must be given in degrees 0..l0");
  switch (kind) {
    case Kind::Free:
      if (l0 != 0) fail("ERR_TOWER", "the free tower has l0 = 0");
      break;
    case Kind::Augmentation:
      if (q != 1 || j != 0 || l0 != 1) fail("ERR_TOWER", "the augmentation tower has q=1, j=0, l0=1");
      break;
    case Kind::Explicit:
      if (static_cast<int>(supplied_complexes.size()) < levels)
        fail("ERR_TOWER", "explicit tower must supply D_M for every level");
      if (static_cast<int>(supplied_psi.size()) < levels)
        fail("ERR_TOWER", "explicit tower must supply psi for every level");
      break;
  }
}

RingSpec TowerConfig::coeff_ring() const { return RingSpec::chain(p, m); }

RingSpec TowerConfig::level_ring(int N) const {
  return RingSpec::group_algebra(p, coeff_exponent(N), q, N);
}

RingSpec TowerConfig::level_ring_square(int N) const {
  RingSpec base = level_ring(N);
  return j > 0 ? RingSpec::trunc_ext(base, j, N) : base;
}

Complex TowerConfig::complex_at(int M) const {
  if (M < 1 || M > levels) fail("ERR_LEVELS", "tower missing level " + std::to_string(M));
  RingSpec SM = RingSpec::group_algebra(p, m, q, M);
  Ring R(SM);
  switch (kind) {
    case Kind::Free: {
      Complex C;
      C.ring = SM;
      C.lo = 0;
      C.ranks = {1};
      return C;
    }
    case Kind::Augmentation: {
      Complex C;
      C.ring = SM;
      C.lo = 0;
      C.ranks = {1, 1};
      RingMatrix d = ring_matrix_zero(R, 1, 1);
      d.at(0, 0) = R.sub(R.gamma(0), R.one()).coords;
      C.diffs = {d};
      return C;
    }
    case Kind::Explicit: {
      const Complex& C = supplied_complexes[static_cast<size_t>(M) - 1];
      if (!C.ring.same_arithmetic(SM)) fail("ERR_TOWER", "supplied complex over the wrong level ring");
      auto rep = check_complex(C);
      if (!rep.valid) fail("ERR_TOWER", "supplied complex is not a complex");
      return C;
    }
  }
  fail("ERR_TOWER", "unreachable");
}

TowerConfig free_tower(Int p, int m, int q, int j, int levels) {
  TowerConfig t;
  t.kind = TowerConfig::Kind::Free;
  t.p = p;
  t.m = m;
  t.q = q;
  t.j = j;
  t.l0 = 0;
  t.levels = levels;
  t.T_dims = {1};
  t.rinf.declared_dim = 1 + j + q;
  t.rinf.formally_smooth = true;
  t.rinf.p_torsion_free = true;
  for (int i = 0; i < q + j; ++i) t.rinf.generator_names.push_back("y" + std::to_string(i + 1));
  t.validate();
  return t;
}

TowerConfig augmentation_tower(Int p, int m, int levels) {
  TowerConfig t;
  t.kind = TowerConfig::Kind::Augmentation;
  t.p = p;
  t.m = m;
  t.q = 1;
  t.j = 0;
  t.l0 = 1;
  t.levels = levels;
  t.T_dims = {1, 1};
  t.rinf.declared_dim = 1;  // R_inf = O
  t.rinf.formally_smooth = true;
  t.rinf.p_torsion_free = true;
  t.validate();
  return t;
}

// ---------------------------------------------------------------------------
// Patching data

namespace {

// H / pi^n as a finite module over the chain ring (towers keep H = O^fam)
FiniteModule target_H_mod(const TowerConfig& tower, int n) {
  const int c = std::min(n, tower.m);
  FiniteModule H;
  H.p = tower.p;
  H.mm = c;
  H.factors = {c};
  H.ring = RingSpec::chain(tower.p, c);
  H.gen_names = {"pi"};
  IMat P(1, 1);
  P << mod_reduce(tower.p, pow_int(tower.p, c));
  H.actions = {P};
  return H;
}

std::string ivec_str(const IVec& v) {
  std::ostringstream os;
  os << "[";
  for (Int i = 0; i < v.size(); ++i) os << v[i] << (i + 1 < v.size() ? "," : "");
  os << "]";
  return os.str();
}

std::string imat_str(const IMat& M) {
  std::ostringstream os;
  os << "[";
  for (Int i = 0; i < M.rows(); ++i) {
    os << "[";
    for (Int jj = 0; jj < M.cols(); ++jj) os << M(i, jj) << (jj + 1 < M.cols() ? "," : "");
    os << "]";
  }
  os << "]";
  return os.str();
}

// reduction chain between level rings (without the z part)
std::vector<RingMap> level_stage_maps(const TowerConfig& tower, int N2, int N1) {
  std::vector<RingMap> maps;
  RingSpec cur = tower.level_ring(N2);
  if (N1 < N2) {
    maps.push_back(RingMap::reduce_level(cur, N1));
    cur = maps.back().dst;
  }
  if (tower.coeff_exponent(N1) < tower.coeff_exponent(N2)) {
    maps.push_back(RingMap::mod_power(cur, tower.coeff_exponent(N1)));
    cur = maps.back().dst;
  }
  return maps;
}

// reduction chain between square rings (with z truncation)
std::vector<RingMap> square_stage_maps(const TowerConfig& tower, int N2, int N1) {
  std::vector<RingMap> maps;
  RingSpec cur = tower.level_ring_square(N2);
  if (N1 < N2 && (tower.q > 0 || true)) {
    maps.push_back(RingMap::reduce_level(cur, N1));
    cur = maps.back().dst;
  }
  if (tower.coeff_exponent(N1) < tower.coeff_exponent(N2)) {
    maps.push_back(RingMap::mod_power(cur, tower.coeff_exponent(N1)));
    cur = maps.back().dst;
  }
  if (tower.j > 0 && N1 < N2) {
    maps.push_back(RingMap::trunc_vars(cur, N1));
    cur = maps.back().dst;
  }
  if (!cur.same_arithmetic(tower.level_ring_square(N1)))
    fail("ERR_INTERNAL", "square reduction stages do not land in the target ring");
  return maps;
}

IMat composite_underlying(const std::vector<RingMap>& stages, Int rank) {
  if (stages.empty()) fail("ERR_INTERNAL", "empty stage list");
  IMat M = underlying_map_matrix(stages.front(), rank);
  for (size_t i = 1; i < stages.size(); ++i) M = underlying_map_matrix(stages[i], rank) * M;
  return M;
}

Complex base_change_chain(const Complex& C, const std::vector<RingMap>& stages) {
  Complex out = C;
  for (const auto& f : stages) out = base_change(out, f);
  return out;
}

// complex over O/pi^n obtained by killing z's, group elements and precision
Complex bar_complex(const TowerConfig& tower, const Complex& P, int n) {
  Complex out = P;
  if (out.ring.kind == RingKind::TruncExt) out = base_change(out, RingMap::kill_vars(out.ring));
  if (out.ring.kind == RingKind::GroupAlgebra) out = base_change(out, RingMap::augment(out.ring));
  if (out.ring.m > n) out = base_change(out, RingMap::mod_power(out.ring, n));
  return out;
}

bool psi_matrix_bijective(const IMat& psi, const std::vector<int>& src, const std::vector<int>& dst,
                          Int p, int mm) {
  if (src != dst) return false;  // invariant factors must agree for an isomorphism
  if (psi.rows() != static_cast<Int>(dst.size()) || psi.cols() != static_cast<Int>(src.size()))
    return false;
  const Int s = psi.rows();
  if (s == 0) return true;
  IMat rel = IMat::Zero(s, 2 * s);
  for (Int i = 0; i < s; ++i) rel(i, i) = pow_int(p, dst[static_cast<size_t>(i)]);
  rel.rightCols(s) = psi;
  SnfResult snf = smith_normal_form(rel, p, mm, SnfNeeds::none());
  if (static_cast<Int>(snf.dvals.size()) < s) return false;
  for (Int i = 0; i < s; ++i)
    if (snf.dvals[static_cast<size_t>(i)] != 0) return false;
  return true;
}

}  // namespace

std::string datum_fingerprint(const PatchingDatum& d) {
  std::ostringstream os;
  os << "level=" << d.level << ";ring=" << d.ring.describe() << ";P:lo=" << d.P.lo << ";ranks=[";
  for (Int r : d.P.ranks) os << r << ",";
  os << "];diffs=[";
  for (const auto& diff : d.P.diffs) {
    os << "{";
    for (const auto& e : diff.ent) os << ivec_str(e) << ";";
    os << "}";
  }
  os << "];phi=[";
  for (const auto& img : d.phi_images) os << ivec_str(img) << ";";
  os << "];psi:src=[";
  for (int f : d.psi_src_factors) os << f << ",";
  os << "];dst=[";
  for (int f : d.psi_dst_factors) os << f << ",";
  os << "];mat=" << imat_str(d.psi);
  return os.str();
}

PatchingDatum make_datum(const TowerConfig& tower, int M, int N) {
  tower.validate();
  if (!(M >= N && N >= 1)) fail("ERR_LEVEL_ORDER", "need M >= N >= 1");
  Complex D = tower.complex_at(M);
  Complex X = D;
  if (N < M) X = base_change(X, RingMap::reduce_level(X.ring, N));
  const int cN = tower.coeff_exponent(N);
  if (X.ring.m > cN) X = base_change(X, RingMap::mod_power(X.ring, cN));
  auto [P, cert] = minimize(X);

  // condition (a): P (x) k has the dimensions of T
  for (int deg = 0; deg <= tower.l0; ++deg)
    if (P.rank_at(deg) != tower.T_dims[static_cast<size_t>(deg)])
      fail("ERR_CONDITION_A", "minimized complex does not reduce to T at degree " +
                                  std::to_string(deg));
  if (!P.ranks.empty() && (P.lo < 0 || P.hi() > tower.l0))
    fail("ERR_CONDITION_A", "complex not concentrated in degrees 0..l0");

  PatchingDatum d;
  d.level = N;
  d.ring = tower.level_ring(N);
  d.P = P;

  // phi: R_inf -> R/d_N; synthetic towers kill every named generator
  const Int modc = pow_int(tower.p, cN);
  for (size_t g = 0; g < tower.rinf.generator_names.size(); ++g) {
    IVec img = IVec::Zero(1);
    d.phi_images.push_back(img);
  }
  (void)modc;

  // psi: H^{l0}(P (x) O/pi^cN) -> H/pi^cN
  Complex Pbar = bar_complex(tower, P, cN);
  FiniteModule Hsrc = cohomology(Pbar, tower.l0);
  FiniteModule Htgt = target_H_mod(tower, cN);
  d.psi_src_factors = Hsrc.factors;
  d.psi_dst_factors = Htgt.factors;
  if (tower.kind == TowerConfig::Kind::Explicit) {
    d.psi = tower.supplied_psi[static_cast<size_t>(N) - 1];
    // reduce entries into the target factors
    for (Int i = 0; i < d.psi.rows(); ++i)
      for (Int jj = 0; jj < d.psi.cols(); ++jj)
        d.psi(i, jj) = mod_reduce(d.psi(i, jj),
                                  pow_int(tower.p, Htgt.factors[static_cast<size_t>(i)]));
  } else {
    if (Hsrc.factors != Htgt.factors)
      fail("ERR_PSI", "top cohomology does not match H at level " + std::to_string(N));
    d.psi = IMat::Identity(static_cast<Int>(Hsrc.factors.size()),
                           static_cast<Int>(Hsrc.factors.size()));
  }
  if (tower.corrupt_psi_at_level == N) {
    d.psi *= tower.p;  // fault injection: no longer an isomorphism
    for (Int i = 0; i < d.psi.rows(); ++i)
      for (Int jj = 0; jj < d.psi.cols(); ++jj)
        d.psi(i, jj) = mod_reduce(d.psi(i, jj),
                                  pow_int(tower.p, Htgt.factors[static_cast<size_t>(i)]));
    d.psi_corrupted = true;
  } else {
    if (!psi_matrix_bijective(d.psi, d.psi_src_factors, d.psi_dst_factors, tower.p, cN))
      fail("ERR_PSI", "psi is not an isomorphism at level " + std::to_string(N));
    // intertwines the pi action (R_inf acts through scalars on both sides here)
    IMat lhs = module_action_mul(d.psi, Hsrc.action("pi"), Htgt.factors, tower.p);
    IMat rhs = module_action_mul(Htgt.action("pi"), d.psi, Htgt.factors, tower.p);
    if (!module_action_equal(lhs, rhs, Htgt.factors, tower.p))
      fail("ERR_PSI", "psi does not intertwine the coefficient action");
  }
  d.fingerprint = datum_fingerprint(d);
  return d;
}

PatchingDatum reduce_datum(const TowerConfig& tower, const PatchingDatum& d, int new_level) {
  if (new_level < 1 || new_level > d.level) fail("ERR_LEVEL_ORDER", "need 1 <= N' <= N");
  if (new_level == d.level) {
    PatchingDatum out = d;
    out.fingerprint = datum_fingerprint(out);
    return out;
  }
  PatchingDatum out;
  out.level = new_level;
  out.ring = tower.level_ring(new_level);
  Complex X = base_change_chain(d.P, level_stage_maps(tower, d.level, new_level));
  auto [P, cert] = minimize(X);
  out.P = P;
  const int c = tower.coeff_exponent(new_level);
  const Int modc = pow_int(tower.p, c);
  for (const auto& img : d.phi_images) {
    IVec v = img;
    for (Int i = 0; i < v.size(); ++i) v[i] = mod_reduce(v[i], modc);
    out.phi_images.push_back(v);
  }
  // psi reduced mod pi^c: invariant factors truncate to min(f, c)
  auto reduce_factors = [&](const std::vector<int>& f) {
    std::vector<int> out_f;
    for (int e : f)
      if (std::min(e, c) > 0) out_f.push_back(std::min(e, c));
    return out_f;
  };
  out.psi_src_factors = reduce_factors(d.psi_src_factors);
  out.psi_dst_factors = reduce_factors(d.psi_dst_factors);
  out.psi = d.psi;
  for (Int i = 0; i < out.psi.rows(); ++i)
    for (Int jj = 0; jj < out.psi.cols(); ++jj)
      out.psi(i, jj) = mod_reduce(
          out.psi(i, jj),
          pow_int(tower.p, i < static_cast<Int>(out.psi_dst_factors.size())
                               ? out.psi_dst_factors[static_cast<size_t>(i)]
                               : 1));
  out.psi_corrupted = d.psi_corrupted;
  out.fingerprint = datum_fingerprint(out);
  return out;
}

// ---------------------------------------------------------------------------
// The pigeonhole engine

PatchedResult patch(const TowerConfig& tower, int L) {
  tower.validate();
  if (L < 1 || L > tower.levels)
    fail("ERR_LEVELS", "requested chain length exceeds the supplied tower levels");
  std::ostringstream log;

  // all data D_{M,N} with N <= L
  std::map<std::pair<int, int>, PatchingDatum> data;
  for (int N = 1; N <= L; ++N)
    for (int M = N; M <= tower.levels; ++M) data.emplace(std::make_pair(M, N), make_datum(tower, M, N));
  log << "data built for levels N <= " << L << ", M <= " << tower.levels << "; ";

  // lexicographically least increasing (M_1..M_L), N_i = i, glued by fingerprints
  std::vector<int> Ms(static_cast<size_t>(L), 0);
  std::function<bool(int, int)> search = [&](int i, int minM) -> bool {
    if (i > L) return true;
    for (int M = std::max(minM, i); M <= tower.levels; ++M) {
      if (i > 1) {
        const PatchingDatum& prev = data.at({Ms[static_cast<size_t>(i) - 2], i - 1});
        PatchingDatum red = reduce_datum(tower, data.at({M, i}), i - 1);
        if (red.fingerprint != prev.fingerprint) continue;
      }
      Ms[static_cast<size_t>(i) - 1] = M;
      if (search(i + 1, M)) return true;
    }
    return false;
  };
  if (!search(1, 1))
    fail("ERR_PIGEONHOLE",
         "no compatible chain of length " + std::to_string(L) +
             " within the supplied levels; tower too shallow");

  PatchedResult r;
  for (int i = 1; i <= L; ++i) {
    r.selected.emplace_back(Ms[static_cast<size_t>(i) - 1], i);
    r.chain.push_back(data.at({Ms[static_cast<size_t>(i) - 1], i}));
  }
  log << "chain";
  for (auto& [M, N] : r.selected) log << " (" << M << "," << N << ")";
  r.engine_log = log.str();
  return r;
}

// ---------------------------------------------------------------------------
// Verification of the four conclusions

namespace {

Complex square_complex(const TowerConfig& tower, const PatchingDatum& d) {
  if (tower.j == 0) return d.P;
  return base_change(d.P, RingMap::inclusion(d.P.ring, tower.level_ring_square(d.level)));
}

// transition tau: H^deg(src square complex) -> H^deg(dst square complex)
// where dst = src reduced along the stage maps (entrywise equal complexes).
IMat induced_transition(const CohomologyPresentation& src, const CohomologyPresentation& dst,
                        const IMat& underlying_map) {
  const Int s_src = src.H.num_gens();
  const Int s_dst = dst.H.num_gens();
  IMat out = IMat::Zero(s_dst, s_src);
  if (s_src == 0 || s_dst == 0) return out;
  for (Int g = 0; g < s_src; ++g) {
    IVec e = IVec::Zero(s_src);
    e[g] = 1;
    IVec img = underlying_map * src.sq->lift(e);
    const Int mod = pow_int(dst.H.p, dst.H.mm);
    for (Int i = 0; i < img.size(); ++i) img[i] = mod_reduce(img[i], mod);
    out.col(g) = dst.sq->coords(img);
  }
  return out;
}

// cross-module induced map after quotienting both sides
IMat cross_induced(const Subquotient& sq_dst, const Subquotient& sq_src, const IMat& tau,
                   const std::vector<int>& dst_factors, Int p) {
  const Int f_src = sq_src.num_factors();
  const Int f_dst = sq_dst.num_factors();
  IMat out = IMat::Zero(f_dst, f_src);
  for (Int g = 0; g < f_src; ++g) {
    IVec e = IVec::Zero(f_src);
    e[g] = 1;
    IVec img = tau * sq_src.lift(e);
    IVec h = sq_dst.coords(img);
    out.col(g) = h;
  }
  (void)dst_factors;
  (void)p;
  return out;
}

bool matrix_zero_mod_factors(const IMat& M, const std::vector<int>& factors, Int p) {
  for (Int i = 0; i < M.rows(); ++i) {
    const Int mod = pow_int(p, factors[static_cast<size_t>(i)]);
    for (Int jj = 0; jj < M.cols(); ++jj)
      if (mod_reduce(M(i, jj), mod) != 0) return false;
  }
  return true;
}

}  // namespace

VerificationReport verify_conclusions(const PatchedResult& r, const TowerConfig& tower) {
  tower.validate();
  VerificationReport rep;
  const int t = static_cast<int>(r.chain.size());
  if (t == 0) fail("ERR_VERIFY", "empty patched result");

  // square complexes, cohomology presentations, and transitions
  std::vector<Complex> squares;
  for (const auto& d : r.chain) squares.push_back(square_complex(tower, d));
  std::vector<std::vector<RingMap>> stages;  // between consecutive selected levels
  for (int i = 0; i + 1 < t; ++i) {
    // the reduced complex must coincide with the selected lower datum
    PatchingDatum red = reduce_datum(tower, r.chain[static_cast<size_t>(i) + 1],
                                     r.chain[static_cast<size_t>(i)].level);
    if (red.fingerprint != r.chain[static_cast<size_t>(i)].fingerprint)
      fail("ERR_VERIFY", "selected chain is not glued by fingerprints");
    stages.push_back(square_stage_maps(tower, r.chain[static_cast<size_t>(i) + 1].level,
                                       r.chain[static_cast<size_t>(i)].level));
  }

  // ---- (i) minimal resolution concentrated at l0
  {
    ConclusionReport& c = rep.resolution;
    c.verdict = Verdict::Pass;
    for (int i = 0; i < t; ++i) {
      auto cert = minimality_certificate(r.chain[static_cast<size_t>(i)].P);
      if (!cert.minimal) {
        c.verdict = Verdict::Fail;
        c.notes.push_back("differentials not minimal at level " +
                          std::to_string(r.chain[static_cast<size_t>(i)].level));
      }
    }
    FiniteModule Htop = cohomology(squares.back(), tower.l0);
    if (Htop.is_zero()) {
      c.verdict = Verdict::Fail;
      c.notes.push_back("top-degree cohomology vanishes at the highest truncation");
    }
    for (int deg = 0; deg < tower.l0; ++deg) {
      std::vector<CohomologyPresentation> pres;
      bool all_zero = true;
      for (int i = 0; i < t; ++i) {
        pres.push_back(cohomology_presentation(squares[static_cast<size_t>(i)], deg));
        all_zero = all_zero && pres.back().H.is_zero();
      }
      if (all_zero) {
        c.notes.push_back("H^" + std::to_string(deg) + " = 0 at every truncation");
        continue;
      }
      if (t < 2) {
        c.verdict = c.verdict == Verdict::Fail ? Verdict::Fail : Verdict::Unverified;
        c.notes.push_back("H^" + std::to_string(deg) +
                          " nonzero with a single truncation: unverified");
        continue;
      }
      // composite transition from the top truncation down to the lowest
      IMat comp;
      for (int i = t - 2; i >= 0; --i) {
        IMat tau = induced_transition(pres[static_cast<size_t>(i) + 1], pres[static_cast<size_t>(i)],
                                      composite_underlying(stages[static_cast<size_t>(i)],
                                                           squares[static_cast<size_t>(i) + 1]
                                                               .rank_at(deg)));
        comp = comp.size() == 0 ? tau : IMat(tau * comp);
      }
      bool dies = matrix_zero_mod_factors(comp, pres.front().H.factors, tower.p);
      if (dies) {
        if (c.verdict == Verdict::Pass) c.verdict = Verdict::LimitConsistent;
        c.notes.push_back("H^" + std::to_string(deg) +
                          " truncations shrink to 0 in the limit (limit-consistent)");
      } else {
        // stable nonvanishing cohomology below l0 contradicts the conclusion
        bool stable = true;
        for (int i = 0; i + 1 < t; ++i)
          if (pres[static_cast<size_t>(i)].H.factors != pres[static_cast<size_t>(i) + 1].H.factors)
            stable = false;
        c.verdict = stable ? Verdict::Fail : Verdict::Unverified;
        c.notes.push_back("H^" + std::to_string(deg) + " does not vanish under the transitions");
      }
    }
  }

  // ---- (ii) commuting R_inf x S_inf action on the top cohomology
  {
    ConclusionReport& c = rep.actions;
    c.verdict = Verdict::Pass;
    for (int i = 0; i < t; ++i) {
      FiniteModule H = cohomology(squares[static_cast<size_t>(i)], tower.l0);
      try {
        H.validate();
      } catch (const Error& e) {
        c.verdict = Verdict::Fail;
        c.notes.push_back(std::string("action failure at level ") +
                          std::to_string(r.chain[static_cast<size_t>(i)].level) + ": " + e.what());
      }
    }
    if (c.verdict == Verdict::Pass) {
      c.notes.push_back("S-generator actions commute at every truncation; finite as R_inf-module");
      c.notes.push_back(tower.kind == TowerConfig::Kind::Explicit
                            ? "image-of-S condition sampled on supplied actions"
                            : "R_inf action realized through the S action (by construction)");
    }
  }

  // ---- (iii) depth certificate
  {
    ConclusionReport& c = rep.depth;
    const int target = 1 + tower.j + tower.q - tower.l0;
    std::vector<std::string> seq;
    seq.push_back("pi");
    for (int i = 0; i < tower.j; ++i) seq.push_back("z" + std::to_string(i + 1));
    for (int i = 0; i < tower.q - tower.l0; ++i) seq.push_back("g" + std::to_string(i + 1));
    if (static_cast<int>(seq.size()) != target)
      fail("ERR_INTERNAL", "depth candidate sequence has the wrong length");

    std::vector<FiniteModule> mods;
    std::vector<std::optional<Subquotient>> module_sqs;  // unused placeholder
    std::vector<CohomologyPresentation> pres;
    for (int i = 0; i < t; ++i)
      pres.push_back(cohomology_presentation(squares[static_cast<size_t>(i)], tower.l0));
    for (auto& pr : pres) mods.push_back(pr.H);
    std::vector<IMat> taus;
    for (int i = 0; i + 1 < t; ++i)
      taus.push_back(induced_transition(
          pres[static_cast<size_t>(i) + 1], pres[static_cast<size_t>(i)],
          composite_underlying(stages[static_cast<size_t>(i)],
                               squares[static_cast<size_t>(i) + 1].rank_at(tower.l0))));

    if (t < 2) {
      c.verdict = Verdict::Unverified;
      c.notes.push_back("depth certificate needs at least two truncations");
    } else {
      c.verdict = Verdict::Pass;
      int certified = 0;
      for (const auto& name : seq) {
        // action of the maximal-ideal element on each module
        std::vector<IMat> X;
        for (int i = 0; i < t; ++i) {
          const FiniteModule& M = mods[static_cast<size_t>(i)];
          IMat A = M.action(name);
          if (name.rfind("g", 0) == 0) A -= IMat::Identity(M.num_gens(), M.num_gens());
          X.push_back(A);
        }
        // kernel must die under every transition
        bool ok = true;
        for (int i = 0; i + 1 < t && ok; ++i) {
          IMat K = module_kernel_columns(mods[static_cast<size_t>(i) + 1],
                                         X[static_cast<size_t>(i) + 1]);
          IMat img = taus[static_cast<size_t>(i)] * K;
          if (!matrix_zero_mod_factors(img, mods[static_cast<size_t>(i)].factors, tower.p)) {
            ok = false;
            c.verdict = Verdict::Fail;
            c.notes.push_back("element " + name + " fails regularity between levels " +
                              std::to_string(r.chain[static_cast<size_t>(i) + 1].level) + " -> " +
                              std::to_string(r.chain[static_cast<size_t>(i)].level));
          }
        }
        if (!ok) break;
        ++certified;
        // quotient every module and transition by the element
        std::vector<FiniteModule> newmods;
        std::vector<Subquotient> sqs;
        for (int i = 0; i < t; ++i) {
          const FiniteModule& M = mods[static_cast<size_t>(i)];
          IMat R = module_relation_matrix(M);
          IMat W = IMat::Zero(M.num_gens(), 2 * M.num_gens());
          W.leftCols(M.num_gens()) = X[static_cast<size_t>(i)];
          W.rightCols(M.num_gens()) = R;
          sqs.emplace_back(IMat::Identity(M.num_gens(), M.num_gens()), W, M.p, M.mm);
          newmods.push_back(module_from_subquotient(sqs.back(), M));
        }
        std::vector<IMat> newtaus;
        for (int i = 0; i + 1 < t; ++i)
          newtaus.push_back(cross_induced(sqs[static_cast<size_t>(i)], sqs[static_cast<size_t>(i) + 1],
                                          taus[static_cast<size_t>(i)],
                                          newmods[static_cast<size_t>(i)].factors, tower.p));
        mods = std::move(newmods);
        taus = std::move(newtaus);
      }
      if (c.verdict == Verdict::Pass) {
        c.notes.push_back("regular sequence (" + [&] {
          std::string s;
          for (size_t i = 0; i < seq.size(); ++i) s += seq[i] + (i + 1 < seq.size() ? ", " : "");
          return s;
        }() + ") certified on the truncations; depth >= " + std::to_string(target) +
                          " = 1 + j + q - l0");
      }
      if (certified < target && c.verdict == Verdict::Pass) c.verdict = Verdict::Unverified;
    }
    // optional graded-shadow cross-check
    if (tower.rinf.has_shadow && tower.rinf.shadow_expected_depth >= 0) {
      HomologicalReport hrep = depth_pd(tower.rinf.shadow_module);
      if (hrep.depth == tower.rinf.shadow_expected_depth) {
        c.notes.push_back("graded shadow depth " + std::to_string(hrep.depth) + " matches");
      } else {
        c.verdict = Verdict::Fail;
        c.notes.push_back("graded shadow depth " + std::to_string(hrep.depth) +
                          " != declared " + std::to_string(tower.rinf.shadow_expected_depth));
      }
    }
  }

  // ---- (iv) psi_infinity bijective mod (a + pi^n) for every available n
  {
    ConclusionReport& c = rep.top_iso;
    c.verdict = Verdict::Pass;
    for (int i = 0; i < t; ++i) {
      const PatchingDatum& d = r.chain[static_cast<size_t>(i)];
      const int cN = tower.coeff_exponent(d.level);
      for (int n = 1; n <= cN; ++n) {
        Complex Pbar = bar_complex(tower, d.P, n);
        FiniteModule Hn = cohomology(Pbar, tower.l0);
        FiniteModule Htgt = target_H_mod(tower, n);
        // psi mod pi^n in the truncated invariant-factor coordinates
        auto truncf = [&](const std::vector<int>& f) {
          std::vector<int> o;
          for (int e : f)
            if (std::min(e, n) > 0) o.push_back(std::min(e, n));
          return o;
        };
        std::vector<int> src_f = truncf(d.psi_src_factors);
        std::vector<int> dst_f = truncf(d.psi_dst_factors);
        IMat psi_n = d.psi;
        for (Int a = 0; a < psi_n.rows(); ++a)
          for (Int b = 0; b < psi_n.cols(); ++b)
            psi_n(a, b) = mod_reduce(psi_n(a, b),
                                     pow_int(tower.p, a < static_cast<Int>(dst_f.size())
                                                          ? dst_f[static_cast<size_t>(a)]
                                                          : 1));
        bool ok = Hn.factors == src_f && Htgt.factors == dst_f &&
                  psi_matrix_bijective(psi_n, src_f, dst_f, tower.p, n);
        if (!ok) {
          c.verdict = Verdict::Fail;
          c.notes.push_back("psi fails to be an isomorphism at level " + std::to_string(d.level) +
                            ", n = " + std::to_string(n));
        }
      }
    }
    if (c.verdict == Verdict::Pass)
      c.notes.push_back("psi bijective mod (a + pi^n) at every available truncation");
  }

  return rep;
}

// ---------------------------------------------------------------------------
// Faithfulness

FaithfulnessVerdict faithfulness_check(const PatchedResult& r, const TowerConfig& tower) {
  tower.validate();
  FaithfulnessVerdict out;
  if (tower.rinf.formally_smooth && tower.rinf.p_torsion_free) {
    // H^{l0} truncations free over the R_inf truncations by size accounting
    const Int mu = tower.T_dims[static_cast<size_t>(tower.l0)];  // Nakayama generator count
    bool ok = true;
    for (const auto& d : r.chain) {
      Complex sq = square_complex(tower, d);
      FiniteModule H = cohomology(sq, tower.l0);
      Int rtrunc_log = 0;
      switch (tower.kind) {
        case TowerConfig::Kind::Free: {
          Ring R(tower.level_ring_square(d.level));
          rtrunc_log = static_cast<Int>(tower.coeff_exponent(d.level)) * R.basis_size();
          break;
        }
        case TowerConfig::Kind::Augmentation:
          rtrunc_log = tower.coeff_exponent(d.level);
          break;
        case TowerConfig::Kind::Explicit:
          rtrunc_log = tower.coeff_exponent(d.level);  // R_inf = O desk model
          break;
      }
      if (H.size_log() != mu * rtrunc_log) {
        ok = false;
        out.notes.push_back("size accounting fails at level " + std::to_string(d.level) + ": |H| = p^" +
                            std::to_string(H.size_log()) + " vs rank * p^" +
                            std::to_string(rtrunc_log));
      }
    }
    // H itself free of the same rank over R = O: |H/pi^n| = mu * |O/pi^n|
    for (int n = 1; n <= tower.m; ++n) {
      FiniteModule Hn = target_H_mod(tower, n);
      if (Hn.size_log() != mu * std::min(n, tower.m)) ok = false;
    }
    out.kind = ok ? FaithfulnessVerdict::Kind::Free : FaithfulnessVerdict::Kind::Inconclusive;
    out.rank = mu;
    if (ok) out.notes.push_back("H free of rank " + std::to_string(mu) + " by size accounting");
    return out;
  }
  if (tower.rinf.has_shadow && !tower.rinf.shadow_minimal_primes.empty()) {
    NearlyFaithfulVerdict v =
        nearly_faithful(tower.rinf.shadow_module, tower.rinf.shadow_minimal_primes);
    out.kind = v.nearly_faithful ? FaithfulnessVerdict::Kind::NearlyFaithful
                                 : FaithfulnessVerdict::Kind::NotNearlyFaithful;
    if (!v.nearly_faithful) {
      std::string s = "support misses minimal prime(s):";
      for (int pi : v.failing_primes) s += " " + std::to_string(pi);
      out.notes.push_back(s + " (component criterion)");
    } else {
      out.notes.push_back("annihilator contained in every declared minimal prime");
    }
    return out;
  }
  out.kind = FaithfulnessVerdict::Kind::Inconclusive;
  out.notes.push_back("no regularity/irreducibility/component data declared");
  return out;
}

// ---------------------------------------------------------------------------
// Simultaneous patching

PairResult patch_pair(const TowerConfig& t1, const TowerConfig& t2, const PairLink& link, int L) {
  t1.validate();
  t2.validate();
  if (t1.p != t2.p || t1.q != t2.q || t1.j != t2.j || t1.l0 != t2.l0 || t1.T_dims != t2.T_dims)
    fail("ERR_PAIR", "towers are not comparable mod pi");
  if (L < 1 || L > std::min(t1.levels, t2.levels)) fail("ERR_LEVELS", "chain length exceeds towers");

  const Int p = t1.p;
  const Int topdim = t1.T_dims[static_cast<size_t>(t1.l0)];
  std::vector<IMat> top_iso;
  IMat H_iso;
  if (link.identity || link.top_iso_mod_p.empty()) {
    for (int N = 1; N <= L; ++N) top_iso.push_back(IMat::Identity(topdim, topdim));
    H_iso = IMat::Identity(1, 1);
  } else {
    top_iso = link.top_iso_mod_p;
    H_iso = link.H_iso_mod_p;
  }
  if (link.corrupt_square_at_level >= 1 &&
      link.corrupt_square_at_level <= static_cast<int>(top_iso.size())) {
    IMat& M = top_iso[static_cast<size_t>(link.corrupt_square_at_level) - 1];
    M = M + IMat::Identity(M.rows(), M.cols());  // fault injection: breaks the square
    for (Int i = 0; i < M.rows(); ++i)
      for (Int jj = 0; jj < M.cols(); ++jj) M(i, jj) = mod_reduce(M(i, jj), p);
  }

  // build data for both towers, validate the commuting squares mod pi
  std::map<std::pair<int, int>, PatchingDatum> d1, d2;
  for (int N = 1; N <= L; ++N) {
    for (int M = N; M <= std::min(t1.levels, t2.levels); ++M) {
      d1.emplace(std::make_pair(M, N), make_datum(t1, M, N));
      d2.emplace(std::make_pair(M, N), make_datum(t2, M, N));
    }
    // square: H_iso o (psi^1 mod pi) == (psi^2 mod pi) o top_iso_N
    const PatchingDatum& a = d1.at({N, N});
    const PatchingDatum& b = d2.at({N, N});
    auto modp = [&](IMat M) {
      for (Int i = 0; i < M.rows(); ++i)
        for (Int jj = 0; jj < M.cols(); ++jj) M(i, jj) = mod_reduce(M(i, jj), p);
      return M;
    };
    IMat lhs = modp(IMat(H_iso * modp(a.psi)));
    IMat rhs = modp(IMat(modp(b.psi) * top_iso[static_cast<size_t>(N) - 1]));
    if (lhs != rhs)
      fail("ERR_LINK_SQUARE", "link square fails to commute at level " + std::to_string(N));
  }

  // paired pigeonhole on concatenated fingerprints
  auto link_bytes = [&](int N) {
    return imat_str(top_iso[static_cast<size_t>(N) - 1]) + "|" + imat_str(H_iso);
  };
  auto pair_fp = [&](int M, int N) {
    return d1.at({M, N}).fingerprint + "||" + d2.at({M, N}).fingerprint + "||" + link_bytes(N);
  };
  auto pair_fp_reduced = [&](int M, int N, int N1) {
    return reduce_datum(t1, d1.at({M, N}), N1).fingerprint + "||" +
           reduce_datum(t2, d2.at({M, N}), N1).fingerprint + "||" + link_bytes(N1);
  };
  const int maxM = std::min(t1.levels, t2.levels);
  std::vector<int> Ms(static_cast<size_t>(L), 0);
  std::function<bool(int, int)> search = [&](int i, int minM) -> bool {
    if (i > L) return true;
    for (int M = std::max(minM, i); M <= maxM; ++M) {
      if (i > 1 &&
          pair_fp_reduced(M, i, i - 1) != pair_fp(Ms[static_cast<size_t>(i) - 2], i - 1))
        continue;
      Ms[static_cast<size_t>(i) - 1] = M;
      if (search(i + 1, M)) return true;
    }
    return false;
  };
  if (!search(1, 1)) fail("ERR_PIGEONHOLE", "no simultaneous chain of length " + std::to_string(L));

  PairResult out;
  for (int i = 1; i <= L; ++i) {
    out.first.selected.emplace_back(Ms[static_cast<size_t>(i) - 1], i);
    out.first.chain.push_back(d1.at({Ms[static_cast<size_t>(i) - 1], i}));
    out.second.selected.emplace_back(Ms[static_cast<size_t>(i) - 1], i);
    out.second.chain.push_back(d2.at({Ms[static_cast<size_t>(i) - 1], i}));
  }
  out.first.engine_log = "paired chain";
  out.second.engine_log = "paired chain";

  // comparison isomorphism mod (a + pi) and its square
  out.comparison_iso = top_iso[0];
  out.square_commutes = true;
  for (int i = 0; i < L; ++i) {
    const PatchingDatum& a = out.first.chain[static_cast<size_t>(i)];
    const PatchingDatum& b = out.second.chain[static_cast<size_t>(i)];
    auto modp = [&](IMat M) {
      for (Int r2 = 0; r2 < M.rows(); ++r2)
        for (Int c2 = 0; c2 < M.cols(); ++c2) M(r2, c2) = mod_reduce(M(r2, c2), p);
      return M;
    };
    IMat lhs = modp(IMat(H_iso * modp(a.psi)));
    IMat rhs = modp(IMat(modp(b.psi) * top_iso[static_cast<size_t>(a.level) - 1]));
    if (lhs != rhs) out.square_commutes = false;
  }
  return out;
}

}  // namespace patchlab
