#include "patchlab/ordinary.hpp"

#include <sstream>

namespace patchlab {

void ModuleOperator::validate_against(const FiniteModule& M) const {
  if (matrix.rows() != M.num_gens() || matrix.cols() != M.num_gens())
    fail("ERR_OPERATOR", "operator shape does not match module");
  if (!module_action_well_defined(matrix, M.factors, M.p))
    fail("ERR_OPERATOR", "operator violates invariant-factor divisibility");
  for (size_t g = 0; g < M.actions.size(); ++g) {
    IMat TA = module_action_mul(matrix, M.actions[g], M.factors, M.p);
    IMat AT = module_action_mul(M.actions[g], matrix, M.factors, M.p);
    if (!module_action_equal(TA, AT, M.factors, M.p))
      fail("ERR_OPERATOR", "operator does not commute with the action of " + M.gen_names[g]);
  }
}

FittingResult fitting_decomposition(const FiniteModule& M, const ModuleOperator& T) {
  T.validate_against(M);
  const Int s = M.num_gens();
  const Int length = M.size_log();

  // stabilize images/kernels of T^t; k = first t with T^t M = T^{t+1} M
  IMat power = IMat::Identity(s, s);
  Int prev_im = M.size_log();
  int k = 0;
  IMat stabilized = power;
  for (int t = 1; t <= length + 1; ++t) {
    power = module_action_mul(power, T.matrix, M.factors, M.p);
    Int im = module_image_size_log(M, power);
    if (im == prev_im) {
      k = t - 1;
      break;
    }
    prev_im = im;
    stabilized = power;
    k = t;
  }
  IMat Xk = k == 0 ? IMat(IMat::Identity(s, s)) : stabilized;

  Subquotient sq_ord = submodule_image_subquotient(M, Xk);
  Subquotient sq_nil = submodule_kernel_subquotient(M, Xk);
  FittingResult out;
  out.stabilization_index = k;
  out.ordinary = module_from_subquotient(sq_ord, M);
  out.nilpotent = module_from_subquotient(sq_nil, M);

  // T restricted to both parts
  IMat T_ord = sq_ord.induced_action(T.matrix);
  IMat T_nil = sq_nil.induced_action(T.matrix);
  if (module_kernel_size_log(out.ordinary, T_ord) != 0)
    fail("ERR_FITTING", "operator not invertible on the stabilized image");
  IMat nil_pow = IMat::Identity(out.nilpotent.num_gens(), out.nilpotent.num_gens());
  bool nilpotent_ok = out.nilpotent.is_zero();
  for (Int t = 1; t <= out.nilpotent.size_log() && !nilpotent_ok; ++t) {
    nil_pow = module_action_mul(nil_pow, T_nil, out.nilpotent.factors, M.p);
    nilpotent_ok = nil_pow.isZero();
  }
  if (!nilpotent_ok) fail("ERR_FITTING", "operator not nilpotent on the kernel part");
  if (out.ordinary.size_log() + out.nilpotent.size_log() != M.size_log())
    fail("ERR_FITTING", "Fitting parts do not fill the module");

  // idempotent witness: decompose each generator as (image part) + (kernel part)
  IMat KG = module_kernel_columns(M, Xk);
  IMat R = module_relation_matrix(M);
  IMat solve_mat = IMat::Zero(s, s + KG.cols() + s);
  solve_mat.leftCols(s) = Xk;
  solve_mat.block(0, s, s, KG.cols()) = KG;
  solve_mat.rightCols(s) = R;
  SnfResult snf = smith_normal_form(solve_mat, M.p, M.mm);
  auto sol = solve_batch_with_snf(snf, IMat::Identity(s, s));
  if (!sol) fail("ERR_FITTING", "generator decomposition unsolvable");
  IMat e = IMat::Zero(s, s);
  const Int mod = pow_int(M.p, M.mm);
  for (Int c = 0; c < s; ++c) {
    IVec u = Xk * sol->col(c).head(s);
    for (Int i = 0; i < s; ++i) e(i, c) = mod_reduce(u[i], pow_int(M.p, M.factors[i]));
  }
  (void)mod;
  IMat ee = module_action_mul(e, e, M.factors, M.p);
  if (!module_action_equal(ee, e, M.factors, M.p)) fail("ERR_FITTING", "witness not idempotent");
  IMat eT = module_action_mul(e, T.matrix, M.factors, M.p);
  IMat Te = module_action_mul(T.matrix, e, M.factors, M.p);
  if (!module_action_equal(eT, Te, M.factors, M.p))
    fail("ERR_FITTING", "witness does not commute with the operator");
  out.idempotent = e;
  return out;
}

// ---------------------------------------------------------------------------
// Complex operators

const RingMatrix* ComplexOperator::at_degree(int degree) const {
  const int k = degree - lo;
  if (k < 0 || k >= static_cast<int>(mats.size())) return nullptr;
  return &mats[k];
}

void ComplexOperator::validate_against(const Complex& C) const {
  if (!ring.same_arithmetic(C.ring)) fail("ERR_OPERATOR", "operator over wrong ring");
  if (lo != C.lo || mats.size() != C.ranks.size())
    fail("ERR_OPERATOR", "operator degree range does not match complex");
  Ring R(C.ring);
  for (size_t k = 0; k < mats.size(); ++k)
    if (mats[k].rows != C.ranks[k] || mats[k].cols != C.ranks[k])
      fail("ERR_OPERATOR", "operator block shape mismatch");
  for (size_t k = 0; k + 1 < mats.size(); ++k) {
    RingMatrix lhs = ring_matrix_mul(R, C.diffs[k], mats[k]);
    RingMatrix rhs = ring_matrix_mul(R, mats[k + 1], C.diffs[k]);
    if (!ring_matrix_equal(lhs, rhs))
      fail("ERR_OPERATOR", "not a chain map at degree " + std::to_string(C.lo + (int)k));
  }
}

ComplexOperator identity_operator(const Complex& C) {
  Ring R(C.ring);
  ComplexOperator T{C.ring, C.lo, {}};
  for (Int r : C.ranks) T.mats.push_back(ring_matrix_identity(R, r));
  return T;
}

ComplexOperator operator_sub_scalar(const Complex& C, const ComplexOperator& T,
                                    const RingElement& eta) {
  Ring R(C.ring);
  ComplexOperator out = T;
  for (size_t k = 0; k < out.mats.size(); ++k)
    out.mats[k] = ring_matrix_sub(R, out.mats[k], ring_matrix_scalar(R, C.ranks[k], eta));
  return out;
}

ComplexOperator operator_compose(const Complex& C, const ComplexOperator& A,
                                 const ComplexOperator& B) {
  Ring R(C.ring);
  ComplexOperator out{C.ring, C.lo, {}};
  for (size_t k = 0; k < A.mats.size(); ++k)
    out.mats.push_back(ring_matrix_mul(R, A.mats[k], B.mats[k]));
  return out;
}

bool operators_commute(const Complex& C, const ComplexOperator& A, const ComplexOperator& B) {
  Ring R(C.ring);
  for (size_t k = 0; k < A.mats.size(); ++k) {
    RingMatrix ab = ring_matrix_mul(R, A.mats[k], B.mats[k]);
    RingMatrix ba = ring_matrix_mul(R, B.mats[k], A.mats[k]);
    if (!ring_matrix_equal(ab, ba)) return false;
  }
  return true;
}

OrdinaryPartResult ordinary_part_complex(const Complex& C, const ComplexOperator& T) {
  T.validate_against(C);
  Ring R(C.ring);
  const Int B = R.basis_size();
  const size_t degrees = C.ranks.size();

  // uniform stabilization index across degrees
  std::vector<RingMatrix> power, stabilized;
  for (size_t k = 0; k < degrees; ++k) power.push_back(ring_matrix_identity(R, C.ranks[k]));
  stabilized = power;
  std::vector<Int> prev_im(degrees);
  Int total_length = 0;
  for (size_t k = 0; k < degrees; ++k) {
    prev_im[k] = static_cast<Int>(R.m()) * B * C.ranks[k];
    total_length += prev_im[k];
  }
  int kstab = 0;
  for (int t = 1; t <= total_length + 1; ++t) {
    bool stable = true;
    for (size_t k = 0; k < degrees; ++k) {
      power[k] = ring_matrix_mul(R, power[k], T.mats[k]);
      Int im = smith_normal_form(underlying_abelian(R, power[k]), R.p(), R.m()).image_size_log();
      if (im != prev_im[k]) stable = false;
      prev_im[k] = im;
    }
    if (stable) break;
    stabilized = power;
    kstab = t;
  }
  // free S-basis of im(T^k) per degree: columns of T^k whose residues are
  // independent over the residue field (Nakayama basis of a free summand)
  Complex CT;
  CT.ring = C.ring;
  CT.lo = C.lo;
  std::vector<RingMatrix> basis;  // r_k x g_k
  for (size_t k = 0; k < degrees; ++k) {
    const RingMatrix& Xuse = stabilized[k];  // T^kstab (identity when kstab = 0)
    const Int r = C.ranks[k];
    IMat residues = IMat::Zero(r, r);
    for (Int i = 0; i < r; ++i)
      for (Int c = 0; c < r; ++c)
        residues(i, c) = R.residue(RingElement{C.ring, Xuse.at(i, c)});
    std::vector<Int> chosen;
    IMat acc = IMat::Zero(r, 0);
    for (Int c = 0; c < r; ++c) {
      IMat trial = IMat::Zero(r, acc.cols() + 1);
      trial.leftCols(acc.cols()) = acc;
      trial.col(acc.cols()) = residues.col(c);
      if (gauss_rank_mod_p(trial, R.p()) > gauss_rank_mod_p(acc, R.p())) {
        acc = trial;
        chosen.push_back(c);
      }
    }
    RingMatrix G{C.ring, r, static_cast<Int>(chosen.size()), {}};
    for (Int i = 0; i < r; ++i)
      for (Int c : chosen) G.ent.push_back(Xuse.at(i, c));
    basis.push_back(std::move(G));
    CT.ranks.push_back(static_cast<Int>(chosen.size()));
  }

  // differentials in the new bases: solve G_{k+1} * d' = d * G_k over S
  for (size_t k = 0; k + 1 < degrees; ++k) {
    const RingMatrix& Gs = basis[k];
    const RingMatrix& Gt = basis[k + 1];
    RingMatrix rhs = ring_matrix_mul(R, C.diffs[k], Gs);
    RingMatrix dprime{C.ring, Gt.cols, Gs.cols, {}};
    dprime.ent.assign(static_cast<size_t>(Gt.cols * Gs.cols), IVec::Zero(B));
    if (Gt.cols > 0 && Gs.cols > 0) {
      IMat A = underlying_abelian(R, Gt);
      SnfResult snf = smith_normal_form(A, R.p(), R.m());
      IMat rhs_ab = IMat::Zero(C.ranks[k + 1] * B, Gs.cols);
      for (Int c = 0; c < Gs.cols; ++c)
        for (Int i = 0; i < C.ranks[k + 1]; ++i) rhs_ab.col(c).segment(i * B, B) = rhs.at(i, c);
      auto sol = solve_batch_with_snf(snf, rhs_ab);
      if (!sol) fail("ERR_ORDINARY", "differential does not preserve the stabilized image");
      for (Int c = 0; c < Gs.cols; ++c)
        for (Int a = 0; a < Gt.cols; ++a) dprime.at(a, c) = sol->col(c).segment(a * B, B);
    } else if (Gs.cols > 0 && !ring_matrix_is_zero(rhs)) {
      fail("ERR_ORDINARY", "image of differential escapes the zero summand");
    }
    CT.diffs.push_back(std::move(dprime));
  }

  auto validity = check_complex(CT);
  if (!validity.valid) fail("ERR_ORDINARY", "extracted summand is not a complex");

  OrdinaryPartResult out;
  out.stabilization_index = kstab;
  out.homology_verified = true;
  // verify H^*(C_T) against the Fitting ordinary part of H^*(C)
  for (int deg = C.lo; deg <= C.hi(); ++deg) {
    auto cw = cohomology_with_operators(C, deg, {T.mats[static_cast<size_t>(deg - C.lo)]});
    FiniteModule H_CT = cohomology(CT, deg);
    std::vector<int> ord_factors;
    if (cw.H.is_zero()) {
      ord_factors = {};
    } else {
      ModuleOperator TH{cw.induced[0]};
      FittingResult fit = fitting_decomposition(cw.H, TH);
      ord_factors = fit.ordinary.factors;
    }
    std::ostringstream os;
    bool match = ord_factors == H_CT.factors;
    os << (match ? "match" : "MISMATCH") << " at degree " << deg;
    out.degree_reports.emplace_back(deg, os.str());
    out.homology_verified = out.homology_verified && match;
  }
  out.complex = std::move(CT);
  return out;
}

ComplexOperator localization_projector(
    const Complex& C, const std::vector<std::pair<ComplexOperator, RingElement>>& ops,
    const std::vector<ComplexOperator>& pis) {
  std::vector<const ComplexOperator*> all;
  for (const auto& [T, eta] : ops) {
    T.validate_against(C);
    all.push_back(&T);
    (void)eta;
  }
  for (const auto& P : pis) {
    P.validate_against(C);
    all.push_back(&P);
  }
  for (size_t a = 0; a < all.size(); ++a)
    for (size_t b = a + 1; b < all.size(); ++b)
      if (!operators_commute(C, *all[a], *all[b]))
        fail("ERR_NONCOMMUTING", "operators " + std::to_string(a) + " and " + std::to_string(b) +
                                     " do not commute");
  ComplexOperator result = identity_operator(C);
  for (const auto& [T, eta] : ops)
    result = operator_compose(C, operator_sub_scalar(C, T, eta), result);
  for (const auto& P : pis) result = operator_compose(C, P, result);
  return result;
}

}  // namespace patchlab
