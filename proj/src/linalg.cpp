#include "patchlab/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace patchlab {

namespace {

// Elimination context with lazy nonzero bookkeeping: row_nz/col_nz hold
// candidate positions (may contain stale zeros and duplicates; ops dedupe
// via the mark scratch arrays, and never miss a live nonzero).
struct OpContext {
  IMat A, U, Uinv, V, Vinv;
  Int mod;
  SnfNeeds needs;
  std::vector<std::vector<Int>> row_nz, col_nz;
  std::vector<char> row_mark, col_mark;

  void init_nonzeros() {
    row_nz.assign(static_cast<size_t>(A.rows()), {});
    col_nz.assign(static_cast<size_t>(A.cols()), {});
    row_mark.assign(static_cast<size_t>(A.rows()), 0);
    col_mark.assign(static_cast<size_t>(A.cols()), 0);
    for (Int i = 0; i < A.rows(); ++i)
      for (Int jj = 0; jj < A.cols(); ++jj)
        if (A(i, jj) != 0) {
          row_nz[static_cast<size_t>(i)].push_back(jj);
          col_nz[static_cast<size_t>(jj)].push_back(i);
        }
  }

  void note_entry(Int i, Int jj) {
    row_nz[static_cast<size_t>(i)].push_back(jj);
    col_nz[static_cast<size_t>(jj)].push_back(i);
  }

  // deduped snapshot of the live nonzero columns of row s
  std::vector<Int> live_row(Int s) {
    std::vector<Int> out;
    auto& lst = row_nz[static_cast<size_t>(s)];
    for (Int jj : lst) {
      if (col_mark[static_cast<size_t>(jj)] || A(s, jj) == 0) continue;
      col_mark[static_cast<size_t>(jj)] = 1;
      out.push_back(jj);
    }
    for (Int jj : out) col_mark[static_cast<size_t>(jj)] = 0;
    lst = out;
    return out;
  }
  std::vector<Int> live_col(Int s) {
    std::vector<Int> out;
    auto& lst = col_nz[static_cast<size_t>(s)];
    for (Int i : lst) {
      if (row_mark[static_cast<size_t>(i)] || A(i, s) == 0) continue;
      row_mark[static_cast<size_t>(i)] = 1;
      out.push_back(i);
    }
    for (Int i : out) row_mark[static_cast<size_t>(i)] = 0;
    lst = out;
    return out;
  }

  void reduce(IMat& M) {
    for (Int i = 0; i < M.rows(); ++i)
      for (Int jj = 0; jj < M.cols(); ++jj) M(i, jj) = mod_reduce(M(i, jj), mod);
  }

  void swap_rows(Int a, Int b) {
    if (a == b) return;
    A.row(a).swap(A.row(b));
    std::swap(row_nz[static_cast<size_t>(a)], row_nz[static_cast<size_t>(b)]);
    for (Int cl : {a, b})
      for (Int jj : row_nz[static_cast<size_t>(cl)]) col_nz[static_cast<size_t>(jj)].push_back(cl);
    if (needs.U) U.row(a).swap(U.row(b));
    if (needs.Uinv) Uinv.col(a).swap(Uinv.col(b));
  }
  void swap_cols(Int a, Int b) {
    if (a == b) return;
    A.col(a).swap(A.col(b));
    std::swap(col_nz[static_cast<size_t>(a)], col_nz[static_cast<size_t>(b)]);
    for (Int cl : {a, b})
      for (Int i : col_nz[static_cast<size_t>(cl)]) row_nz[static_cast<size_t>(i)].push_back(cl);
    if (needs.V) V.col(a).swap(V.col(b));
    if (needs.Vinv) Vinv.row(a).swap(Vinv.row(b));
  }
  // row_i += c * row_s
  void add_row(Int i, Int s, Int c) {
    c = mod_reduce(c, mod);
    if (c == 0) return;
    for (Int jj : live_row(s)) {
      const bool was_zero = A(i, jj) == 0;
      A(i, jj) = mod_reduce(A(i, jj) + c * A(s, jj), mod);
      if (was_zero && A(i, jj) != 0) note_entry(i, jj);
    }
    if (needs.U)
      for (Int jj = 0; jj < U.cols(); ++jj) U(i, jj) = mod_reduce(U(i, jj) + c * U(s, jj), mod);
    if (needs.Uinv)
      for (Int r = 0; r < Uinv.rows(); ++r)
        Uinv(r, s) = mod_reduce(Uinv(r, s) - c * Uinv(r, i), mod);
  }
  // col_j += c * col_s
  void add_col(Int jj, Int s, Int c) {
    c = mod_reduce(c, mod);
    if (c == 0) return;
    for (Int i : live_col(s)) {
      const bool was_zero = A(i, jj) == 0;
      A(i, jj) = mod_reduce(A(i, jj) + c * A(i, s), mod);
      if (was_zero && A(i, jj) != 0) note_entry(i, jj);
    }
    if (needs.V)
      for (Int i = 0; i < V.rows(); ++i) V(i, jj) = mod_reduce(V(i, jj) + c * V(i, s), mod);
    if (needs.Vinv)
      for (Int cc = 0; cc < Vinv.cols(); ++cc)
        Vinv(s, cc) = mod_reduce(Vinv(s, cc) - c * Vinv(jj, cc), mod);
  }
  void scale_row(Int i, Int u, Int uinv) {
    for (Int jj : live_row(i)) A(i, jj) = mod_reduce(A(i, jj) * u, mod);
    if (needs.U)
      for (Int jj = 0; jj < U.cols(); ++jj) U(i, jj) = mod_reduce(U(i, jj) * u, mod);
    if (needs.Uinv)
      for (Int r = 0; r < Uinv.rows(); ++r) Uinv(r, i) = mod_reduce(Uinv(r, i) * uinv, mod);
  }
};

}  // namespace

Int SnfResult::image_size_log() const {
  Int s = 0;
  for (int v : dvals) s += m - v;
  return s;
}

Int SnfResult::kernel_size_log() const {
  Int s = 0;
  for (int v : dvals) s += v;
  s += static_cast<Int>(m) * (D.cols() - static_cast<Int>(dvals.size()));
  return s;
}

SnfResult smith_normal_form(const IMat& A, Int p, int m, SnfNeeds needs) {
  const Int mod = pow_int(p, m);
  const Int r = A.rows(), c = A.cols();
  OpContext ctx{A,
                needs.U ? IMat(IMat::Identity(r, r)) : IMat(),
                needs.Uinv ? IMat(IMat::Identity(r, r)) : IMat(),
                needs.V ? IMat(IMat::Identity(c, c)) : IMat(),
                needs.Vinv ? IMat(IMat::Identity(c, c)) : IMat(),
                mod,
                needs,
                {},
                {}};
  ctx.reduce(ctx.A);
  ctx.init_nonzeros();

  std::vector<int> dvals;
  const Int steps = std::min(r, c);
  for (Int s = 0; s < steps; ++s) {
    // pivot of minimal p-adic valuation in A[s.., s..], via the nonzero lists
    int best_v = m;
    Int bi = -1, bj = -1;
    for (Int i = s; i < r && best_v > 0; ++i) {
      for (Int jj : ctx.live_row(i)) {
        if (jj < s) continue;
        const int v = padic_valuation(ctx.A(i, jj), p, m);
        if (v < best_v) {
          best_v = v;
          bi = i;
          bj = jj;
        }
      }
    }
    if (bi < 0) break;  // all zero
    ctx.swap_rows(s, bi);
    ctx.swap_cols(s, bj);
    const int v = best_v;
    const Int pv = pow_int(p, v);
    const Int u0 = ctx.A(s, s) / pv;
    const Int w = inv_unit_mod(u0, mod);
    ctx.scale_row(s, w, u0);
    // eliminate the pivot column, then the pivot row
    for (Int i : ctx.live_col(s))
      if (i > s && ctx.A(i, s) != 0) ctx.add_row(i, s, -(ctx.A(i, s) / pv));
    for (Int jj : ctx.live_row(s))
      if (jj > s && ctx.A(s, jj) != 0) ctx.add_col(jj, s, -(ctx.A(s, jj) / pv));
    dvals.push_back(v);
  }
  while (static_cast<Int>(dvals.size()) < steps) dvals.push_back(m);

  SnfResult res;
  res.U = std::move(ctx.U);
  res.Uinv = std::move(ctx.Uinv);
  res.V = std::move(ctx.V);
  res.Vinv = std::move(ctx.Vinv);
  res.D = std::move(ctx.A);
  res.dvals = std::move(dvals);
  res.p = p;
  res.m = m;
  res.rank = 0;
  for (int v : res.dvals)
    if (v < m) ++res.rank;
  return res;
}

std::optional<IVec> solve_with_snf(const SnfResult& S, const IVec& b) {
  const Int mod = pow_int(S.p, S.m);
  const Int r = S.D.rows(), c = S.D.cols();
  IVec y = S.U * b;
  for (Int i = 0; i < r; ++i) y[i] = mod_reduce(y[i], mod);
  IVec x = IVec::Zero(c);
  const Int k = std::min(r, c);
  for (Int i = 0; i < k; ++i) {
    const int v = S.dvals[i];
    if (v >= S.m) {
      if (y[i] != 0) return std::nullopt;
      continue;
    }
    const Int pv = pow_int(S.p, v);
    if (y[i] % pv != 0) return std::nullopt;
    x[i] = y[i] / pv;
  }
  for (Int i = k; i < r; ++i)
    if (y[i] != 0) return std::nullopt;
  IVec sol = S.V * x;
  for (Int i = 0; i < c; ++i) sol[i] = mod_reduce(sol[i], mod);
  return sol;
}

KernelGens kernel_generators_with_orders(const SnfResult& S) {
  const Int mod = pow_int(S.p, S.m);
  const Int c = S.D.cols();
  const Int k = std::min(S.D.rows(), c);
  std::vector<Int> cols;
  std::vector<int> orders;
  for (Int i = 0; i < k; ++i)
    if (S.dvals[i] > 0) {
      cols.push_back(i);
      orders.push_back(S.dvals[i]);
    }
  for (Int i = k; i < c; ++i) {
    cols.push_back(i);
    orders.push_back(S.m);
  }
  IMat K = IMat::Zero(c, static_cast<Int>(cols.size()));
  for (Int idx = 0; idx < static_cast<Int>(cols.size()); ++idx) {
    const Int i = cols[idx];
    const Int scale = pow_int(S.p, S.m - orders[idx]);
    for (Int row = 0; row < c; ++row) K(row, idx) = mod_reduce(S.V(row, i) * scale, mod);
  }
  return {std::move(K), std::move(orders)};
}

IMat kernel_generators(const SnfResult& S) { return kernel_generators_with_orders(S).cols; }

std::optional<IMat> solve_batch_with_snf(const SnfResult& S, const IMat& B) {
  const Int mod = pow_int(S.p, S.m);
  const Int r = S.D.rows(), c = S.D.cols();
  IMat Y = S.U * B;
  for (Int i = 0; i < Y.rows(); ++i)
    for (Int jj = 0; jj < Y.cols(); ++jj) Y(i, jj) = mod_reduce(Y(i, jj), mod);
  IMat X = IMat::Zero(c, B.cols());
  const Int k = std::min(r, c);
  for (Int i = 0; i < k; ++i) {
    const int v = S.dvals[i];
    const Int pv = pow_int(S.p, v);
    for (Int jj = 0; jj < B.cols(); ++jj) {
      if (v >= S.m) {
        if (Y(i, jj) != 0) return std::nullopt;
      } else {
        if (Y(i, jj) % pv != 0) return std::nullopt;
        X(i, jj) = Y(i, jj) / pv;
      }
    }
  }
  for (Int i = k; i < r; ++i)
    for (Int jj = 0; jj < B.cols(); ++jj)
      if (Y(i, jj) != 0) return std::nullopt;
  IMat sol = S.V * X;
  for (Int i = 0; i < sol.rows(); ++i)
    for (Int jj = 0; jj < sol.cols(); ++jj) sol(i, jj) = mod_reduce(sol(i, jj), mod);
  return sol;
}

int gauss_rank_mod_p(IMat A, Int p) {
  const Int r = A.rows(), c = A.cols();
  for (Int i = 0; i < r; ++i)
    for (Int jj = 0; jj < c; ++jj) A(i, jj) = mod_reduce(A(i, jj), p);
  int rank = 0;
  Int row = 0;
  for (Int col = 0; col < c && row < r; ++col) {
    Int pr = -1;
    for (Int i = row; i < r; ++i)
      if (A(i, col) != 0) {
        pr = i;
        break;
      }
    if (pr < 0) continue;
    A.row(row).swap(A.row(pr));
    const Int inv = inv_unit_mod(A(row, col), p);
    for (Int jj = col; jj < c; ++jj) A(row, jj) = mod_reduce(A(row, jj) * inv, p);
    for (Int i = 0; i < r; ++i) {
      if (i == row || A(i, col) == 0) continue;
      const Int f = A(i, col);
      for (Int jj = col; jj < c; ++jj) A(i, jj) = mod_reduce(A(i, jj) - f * A(row, jj), p);
    }
    ++row;
    ++rank;
  }
  return rank;
}

// ---------------------------------------------------------------------------
// FiniteModule

Int FiniteModule::size_log() const { return std::accumulate(factors.begin(), factors.end(), Int{0}); }

const IMat& FiniteModule::action(const std::string& name) const {
  for (size_t i = 0; i < gen_names.size(); ++i)
    if (gen_names[i] == name) return actions[i];
  fail("ERR_ACTION", "no action named " + name);
}

bool module_action_well_defined(const IMat& A, const std::vector<int>& factors, Int p) {
  const Int s = static_cast<Int>(factors.size());
  for (Int i = 0; i < s; ++i)
    for (Int jj = 0; jj < s; ++jj) {
      const int need = std::max(0, factors[i] - factors[jj]);
      if (need > 0 && mod_reduce(A(i, jj), pow_int(p, need)) != 0) return false;
    }
  return true;
}

IMat module_action_mul(const IMat& A, const IMat& B, const std::vector<int>& factors, Int p) {
  const Int s = static_cast<Int>(factors.size());
  IMat C = IMat::Zero(s, s);
  for (Int i = 0; i < s; ++i) {
    const Int mod = pow_int(p, factors[i]);
    for (Int jj = 0; jj < s; ++jj) {
      Int acc = 0;
      for (Int k = 0; k < s; ++k) acc = mod_reduce(acc + A(i, k) * B(k, jj), mod);
      C(i, jj) = acc;
    }
  }
  return C;
}

bool module_action_equal(const IMat& A, const IMat& B, const std::vector<int>& factors, Int p) {
  const Int s = static_cast<Int>(factors.size());
  for (Int i = 0; i < s; ++i) {
    const Int mod = pow_int(p, factors[i]);
    for (Int jj = 0; jj < s; ++jj)
      if (mod_reduce(A(i, jj) - B(i, jj), mod) != 0) return false;
  }
  return true;
}

void FiniteModule::validate() const {
  for (size_t i = 1; i < factors.size(); ++i)
    if (factors[i] > factors[i - 1]) fail("ERR_MODULE", "invariant factors not descending");
  for (int e : factors)
    if (e < 1 || e > mm) fail("ERR_MODULE", "invariant factor exponent out of range");
  for (const auto& A : actions) {
    if (A.rows() != num_gens() || A.cols() != num_gens()) fail("ERR_MODULE", "action shape mismatch");
    if (!module_action_well_defined(A, factors, p))
      fail("ERR_MODULE", "action matrix violates invariant-factor divisibility");
  }
  for (size_t a = 0; a < actions.size(); ++a)
    for (size_t b = a + 1; b < actions.size(); ++b) {
      IMat AB = module_action_mul(actions[a], actions[b], factors, p);
      IMat BA = module_action_mul(actions[b], actions[a], factors, p);
      if (!module_action_equal(AB, BA, factors, p))
        fail("ERR_MODULE", "action matrices " + gen_names[a] + ", " + gen_names[b] + " do not commute");
    }
}

// ---------------------------------------------------------------------------
// Subquotient

Subquotient::Subquotient(IMat K, IMat W, Int p, int mm)
    : p_(p), mm_(mm), n_(K.rows()), s_(K.cols()), K_(std::move(K)) {
  const Int mod = pow_int(p_, mm_);
  identity_K_ = (n_ == s_) && K_.isIdentity();
  free_mode_ = identity_K_ && W.cols() == 0;
  if (free_mode_) {
    factors_.assign(static_cast<size_t>(s_), mm_);
    for (Int i = 0; i < s_; ++i) retained_.push_back(i);
    rel_ = IMat::Zero(s_, 0);
    return;
  }

  if (identity_K_) {
    // relations are just the W columns themselves
    rel_ = W;
    for (Int i = 0; i < rel_.rows(); ++i)
      for (Int jj = 0; jj < rel_.cols(); ++jj) rel_(i, jj) = mod_reduce(rel_(i, jj), mod);
    // diagonal-like relation set: every column has at most one nonzero entry
    bool diag = true;
    for (Int jj = 0; jj < rel_.cols() && diag; ++jj) {
      int nz = 0;
      for (Int i = 0; i < rel_.rows(); ++i)
        if (rel_(i, jj) != 0) ++nz;
      if (nz > 1) diag = false;
    }
    if (diag) {
      diag_mode_ = true;
      std::vector<int> evec(static_cast<size_t>(s_), mm_);
      for (Int jj = 0; jj < rel_.cols(); ++jj)
        for (Int i = 0; i < rel_.rows(); ++i)
          if (rel_(i, jj) != 0)
            evec[static_cast<size_t>(i)] = std::min(
                evec[static_cast<size_t>(i)], padic_valuation(rel_(i, jj), p_, mm_));
      std::vector<std::pair<int, Int>> fr;
      for (Int i = 0; i < s_; ++i)
        if (evec[static_cast<size_t>(i)] > 0) fr.emplace_back(evec[static_cast<size_t>(i)], i);
      std::stable_sort(fr.begin(), fr.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      for (auto& [e, row] : fr) {
        factors_.push_back(e);
        retained_.push_back(row);
      }
      return;
    }
  } else {
    Ksnf_ = smith_normal_form(K_, p_, mm_, SnfNeeds::solve());
    // Relations on the K-generators: first s rows of ker([K | -W]).
    IMat comb = IMat::Zero(n_, s_ + W.cols());
    comb.leftCols(s_) = K_;
    for (Int jj = 0; jj < W.cols(); ++jj)
      for (Int i = 0; i < n_; ++i) comb(i, s_ + jj) = mod_reduce(-W(i, jj), mod);
    SnfResult comb_snf = smith_normal_form(comb, p_, mm_, SnfNeeds::kernel());
    rel_ = kernel_generators(comb_snf).topRows(s_);
    // span(W) must lie in span(K)
    if (W.cols() > 0 && !solve_batch_with_snf(*Ksnf_, W))
      fail("ERR_SUBQUOTIENT", "denominator not inside numerator span");
  }
  relsnf_ = smith_normal_form(rel_, p_, mm_, SnfNeeds::coords());

  const Int k = std::min<Int>(s_, rel_.cols());
  std::vector<std::pair<int, Int>> fr;  // (factor exponent, row of U_rel)
  for (Int i = 0; i < k; ++i)
    if (relsnf_->dvals[i] > 0) fr.emplace_back(relsnf_->dvals[i], i);
  for (Int i = k; i < s_; ++i) fr.emplace_back(mm_, i);
  std::stable_sort(fr.begin(), fr.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (auto& [e, row] : fr) {
    factors_.push_back(e);
    retained_.push_back(row);
  }
}

Int Subquotient::size_log() const { return std::accumulate(factors_.begin(), factors_.end(), Int{0}); }

bool Subquotient::contains(const IVec& ambient) const {
  if (identity_K_) return true;
  return solve_with_snf(*Ksnf_, ambient).has_value();
}

IVec Subquotient::coords(const IVec& ambient) const {
  if (free_mode_) {
    IVec h = ambient;
    const Int mod = pow_int(p_, mm_);
    for (Int i = 0; i < h.size(); ++i) h[i] = mod_reduce(h[i], mod);
    return h;
  }
  if (diag_mode_) {
    IVec h = IVec::Zero(num_factors());
    for (Int i = 0; i < num_factors(); ++i)
      h[i] = mod_reduce(ambient[retained_[i]], pow_int(p_, factors_[i]));
    return h;
  }
  IVec w;
  if (identity_K_) {
    w = ambient;
  } else {
    auto sol = solve_with_snf(*Ksnf_, ambient);
    if (!sol) fail("ERR_SUBQUOTIENT", "vector not in numerator span");
    w = *sol;
  }
  IVec h = IVec::Zero(num_factors());
  for (Int i = 0; i < num_factors(); ++i) {
    const Int row = retained_[i];
    Int acc = 0;
    const Int mod = pow_int(p_, factors_[i]);
    for (Int jj = 0; jj < s_; ++jj) acc = mod_reduce(acc + relsnf_->U(row, jj) * w[jj], mod);
    h[i] = acc;
  }
  return h;
}

IVec Subquotient::lift(const IVec& h) const {
  if (free_mode_) return h;
  if (diag_mode_) {
    IVec z = IVec::Zero(s_);
    for (Int i = 0; i < num_factors(); ++i) z[retained_[i]] = h[i];
    return z;
  }
  IVec padded = IVec::Zero(s_);
  for (Int i = 0; i < num_factors(); ++i) padded[retained_[i]] = h[i];
  IVec w = relsnf_->Uinv * padded;
  IVec z = identity_K_ ? IVec(w) : IVec(K_ * w);
  const Int mod = pow_int(p_, mm_);
  for (Int i = 0; i < z.size(); ++i) z[i] = mod_reduce(z[i], mod);
  return z;
}

IMat Subquotient::induced_action(const IMat& G) const {
  const Int mod = pow_int(p_, mm_);
  if (free_mode_) {
    IMat M = G;
    for (Int i = 0; i < M.rows(); ++i)
      for (Int jj = 0; jj < M.cols(); ++jj) M(i, jj) = mod_reduce(M(i, jj), mod);
    return M;
  }
  const Int f = num_factors();
  if (diag_mode_) {
    IMat M = IMat::Zero(f, f);
    for (Int i = 0; i < f; ++i) {
      const Int mi = pow_int(p_, factors_[i]);
      for (Int jj = 0; jj < f; ++jj) M(i, jj) = mod_reduce(G(retained_[i], retained_[jj]), mi);
    }
    return M;
  }
  // batched: lift all generators, push through G, solve back, take relation coords
  IMat padded = IMat::Zero(s_, f);
  for (Int i = 0; i < f; ++i) padded(retained_[i], i) = 1;
  IMat Wm = relsnf_->Uinv * padded;
  IMat amb = identity_K_ ? Wm : IMat(K_ * Wm);
  IMat img = G * amb;
  for (Int i = 0; i < img.rows(); ++i)
    for (Int jj = 0; jj < img.cols(); ++jj) img(i, jj) = mod_reduce(img(i, jj), mod);
  IMat wsol;
  if (identity_K_) {
    wsol = img;
  } else {
    auto sol = solve_batch_with_snf(*Ksnf_, img);
    if (!sol) fail("ERR_SUBQUOTIENT", "endomorphism does not preserve the subquotient");
    wsol = *sol;
  }
  IMat hall = relsnf_->U * wsol;  // s x f
  IMat M = IMat::Zero(f, f);
  for (Int i = 0; i < f; ++i) {
    const Int mi = pow_int(p_, factors_[i]);
    for (Int jj = 0; jj < f; ++jj) M(i, jj) = mod_reduce(hall(retained_[i], jj), mi);
  }
  return M;
}

// ---------------------------------------------------------------------------
// Module-level operations built on subquotients

IMat module_relation_matrix(const FiniteModule& M) {
  IMat R = IMat::Zero(M.num_gens(), M.num_gens());
  for (Int i = 0; i < M.num_gens(); ++i) R(i, i) = pow_int(M.p, M.factors[i]);
  return R;
}

Subquotient module_ambient_subquotient(const FiniteModule& M) {
  return Subquotient(IMat::Identity(M.num_gens(), M.num_gens()), module_relation_matrix(M), M.p, M.mm);
}

namespace {

FiniteModule from_subquotient(const Subquotient& sq, const FiniteModule& parent,
                              const std::vector<IMat>& parent_actions) {
  FiniteModule out;
  out.p = parent.p;
  out.mm = parent.mm;
  out.factors = sq.factors();
  out.ring = parent.ring;
  out.gen_names = parent.gen_names;
  for (const auto& A : parent_actions) out.actions.push_back(sq.induced_action(A));
  return out;
}

// Kernel generators of the action X on M, as ambient columns.
IMat kernel_preimage_columns(const FiniteModule& M, const IMat& X) {
  const Int s = M.num_gens();
  const IMat R = module_relation_matrix(M);
  IMat comb = IMat::Zero(s, 2 * s);
  comb.leftCols(s) = X;
  const Int mod = pow_int(M.p, M.mm);
  for (Int i = 0; i < s; ++i)
    for (Int jj = 0; jj < s; ++jj) comb(i, s + jj) = mod_reduce(-R(i, jj), mod);
  SnfResult snf = smith_normal_form(comb, M.p, M.mm);
  IMat KG = kernel_generators(snf).topRows(s);
  return KG;
}

}  // namespace

FiniteModule module_kernel(const FiniteModule& M, const IMat& X) {
  IMat KG = kernel_preimage_columns(M, X);
  Subquotient sq(KG, module_relation_matrix(M), M.p, M.mm);
  return from_subquotient(sq, M, M.actions);
}

FiniteModule module_image(const FiniteModule& M, const IMat& X) {
  const Int s = M.num_gens();
  IMat R = module_relation_matrix(M);
  IMat K = IMat::Zero(s, 2 * s);
  K.leftCols(s) = X;
  K.rightCols(s) = R;
  Subquotient sq(K, R, M.p, M.mm);
  return from_subquotient(sq, M, M.actions);
}

Subquotient submodule_image_subquotient(const FiniteModule& M, const IMat& X) {
  const Int s = M.num_gens();
  IMat R = module_relation_matrix(M);
  IMat K = IMat::Zero(s, 2 * s);
  K.leftCols(s) = X;
  K.rightCols(s) = R;
  return Subquotient(K, R, M.p, M.mm);
}

Subquotient submodule_kernel_subquotient(const FiniteModule& M, const IMat& X) {
  return Subquotient(kernel_preimage_columns(M, X), module_relation_matrix(M), M.p, M.mm);
}

IMat module_kernel_columns(const FiniteModule& M, const IMat& X) {
  return kernel_preimage_columns(M, X);
}

FiniteModule module_from_subquotient(const Subquotient& sq, const FiniteModule& parent) {
  return from_subquotient(sq, parent, parent.actions);
}

FiniteModule module_quotient_by_image(const FiniteModule& M, const IMat& X) {
  const Int s = M.num_gens();
  IMat R = module_relation_matrix(M);
  IMat W = IMat::Zero(s, 2 * s);
  W.leftCols(s) = X;
  W.rightCols(s) = R;
  Subquotient sq(IMat::Identity(s, s), W, M.p, M.mm);
  return from_subquotient(sq, M, M.actions);
}

Int module_kernel_size_log(const FiniteModule& M, const IMat& X) {
  IMat KG = kernel_preimage_columns(M, X);
  Subquotient sq(KG, module_relation_matrix(M), M.p, M.mm);
  return sq.size_log();
}

Int module_image_size_log(const FiniteModule& M, const IMat& X) {
  return M.size_log() - module_kernel_size_log(M, X);
}

KernelImageCokernel kernel_image_cokernel(const IMat& A, Int p, int m) {
  const Int rows = A.rows(), cols = A.cols();
  RingSpec chain = m == 1 ? RingSpec::chain(p, 1) : RingSpec::chain(p, m);
  auto abelian = [&](const Subquotient& sq, Int ambient) {
    FiniteModule M;
    M.p = p;
    M.mm = m;
    M.factors = sq.factors();
    M.ring = chain;
    M.gen_names = {"pi"};
    IMat P = IMat::Identity(ambient, ambient) * p;
    M.actions = {sq.induced_action(P)};
    return M;
  };
  SnfResult snf = smith_normal_form(A, p, m);
  KernelImageCokernel out;
  {
    IMat K = kernel_generators(snf);
    Subquotient sq(K, IMat::Zero(cols, 0), p, m);
    out.kernel = abelian(sq, cols);
  }
  {
    Subquotient sq(A, IMat::Zero(rows, 0), p, m);
    out.image = abelian(sq, rows);
  }
  {
    Subquotient sq(IMat::Identity(rows, rows), A, p, m);
    out.cokernel = abelian(sq, rows);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Underlying abelian functor

IMat underlying_abelian(const Ring& R, const RingMatrix& A) {
  if (!A.ring.same_arithmetic(R.spec())) fail("ERR_RING_MISMATCH", "matrix over a different ring");
  const Int B = R.basis_size();
  IMat M = IMat::Zero(A.rows * B, A.cols * B);
  for (Int i = 0; i < A.rows; ++i)
    for (Int jj = 0; jj < A.cols; ++jj) {
      const IVec& e = A.at(i, jj);
      if (e.isZero()) continue;
      M.block(i * B, jj * B, B, B) = R.regular_representation(RingElement{R.spec(), e});
    }
  return M;
}

IVec underlying_vector(const Ring& R, const std::vector<RingElement>& v) {
  const Int B = R.basis_size();
  IVec out = IVec::Zero(static_cast<Int>(v.size()) * B);
  for (size_t i = 0; i < v.size(); ++i) out.segment(static_cast<Int>(i) * B, B) = v[i].coords;
  return out;
}

IMat underlying_map_matrix(const RingMap& f, Int rank) {
  Ring src(f.src), dst(f.dst);
  const Int Bs = src.basis_size(), Bd = dst.basis_size();
  IMat block = IMat::Zero(Bd, Bs);
  for (Int b = 0; b < Bs; ++b) {
    RingElement e = src.basis_element(b);
    block.col(b) = apply_map(f, e).coords;
  }
  IMat M = IMat::Zero(rank * Bd, rank * Bs);
  for (Int i = 0; i < rank; ++i) M.block(i * Bd, i * Bs, Bd, Bs) = block;
  return M;
}

// ---------------------------------------------------------------------------
// Ideal membership (declared in rings.hpp)

bool ideal_contains(const Ring& R, const IdealSpec& ideal, const RingElement& x) {
  if (!ideal.ring.same_arithmetic(R.spec())) fail("ERR_RING_MISMATCH", "ideal over different ring");
  const Int B = R.basis_size();
  if (ideal.generators.empty()) return x.coords.isZero();
  IMat G = IMat::Zero(B, B * static_cast<Int>(ideal.generators.size()));
  for (size_t g = 0; g < ideal.generators.size(); ++g)
    G.block(0, static_cast<Int>(g) * B, B, B) = R.regular_representation(ideal.generators[g]);
  SnfResult snf = smith_normal_form(G, R.p(), R.m());
  return solve_with_snf(snf, x.coords).has_value();
}

}  // namespace patchlab
