#include "patchlab/rings.hpp"

#include <cstdlib>
#include <sstream>

namespace patchlab {

RingSpec RingSpec::chain(Int p, int m) {
  RingSpec s;
  s.kind = RingKind::Chain;
  s.p = p;
  s.m = m;
  s.validate();
  return s;
}

RingSpec RingSpec::prime_field(Int p) {
  RingSpec s;
  s.kind = RingKind::PrimeField;
  s.p = p;
  s.m = 1;
  s.validate();
  return s;
}

RingSpec RingSpec::group_algebra(Int p, int m, int q, int N) {
  RingSpec s;
  s.kind = RingKind::GroupAlgebra;
  s.p = p;
  s.m = m;
  s.q = q;
  s.N = N;
  s.validate();
  return s;
}

RingSpec RingSpec::trunc_ext(const RingSpec& base, int j, int t) {
  if (base.kind != RingKind::GroupAlgebra && base.kind != RingKind::Chain &&
      base.kind != RingKind::PrimeField)
    fail("ERR_RING_SPEC", "trunc-ext base must be a chain ring or group algebra");
  RingSpec s = base;
  s.kind = RingKind::TruncExt;
  s.j = j;
  s.t = t;
  s.validate();
  return s;
}

RingSpec RingSpec::graded_quotient(Int p, int q, std::vector<RawPoly> relations) {
  RingSpec s;
  s.kind = RingKind::GradedQuotient;
  s.p = p;
  s.m = 1;
  s.q = q;
  s.relations = std::move(relations);
  s.validate();
  return s;
}

void RingSpec::validate() const {
  if (!is_prime(p)) fail("ERR_RING_SPEC", "p = " + std::to_string(p) + " is not prime");
  if (m < 1 || q < 0 || N < 0 || j < 0 || t < 1) fail("ERR_RING_SPEC", "ring parameters out of range");
  switch (kind) {
    case RingKind::Chain:
      if (q != 0 || j != 0) fail("ERR_RING_SPEC", "chain ring has no group/z part");
      break;
    case RingKind::PrimeField:
      if (m != 1 || q != 0 || j != 0) fail("ERR_RING_SPEC", "prime field must have m=1 and no group/z part");
      break;
    case RingKind::GroupAlgebra:
      if (j != 0) fail("ERR_RING_SPEC", "group algebra carries no z variables");
      break;
    case RingKind::TruncExt:
      if (j < 1) fail("ERR_RING_SPEC", "trunc-ext needs at least one z variable");
      break;
    case RingKind::GradedQuotient:
      if (q < 1) fail("ERR_RING_SPEC", "graded quotient needs at least one variable");
      for (const auto& rel : relations) {
        int deg = -1;
        for (const auto& [c, e] : rel) {
          if ((int)e.size() != q) fail("ERR_RING_SPEC", "relation exponent length != q");
          int d = 0;
          for (int x : e) {
            if (x < 0) fail("ERR_RING_SPEC", "negative exponent");
            d += x;
          }
          if (deg < 0) deg = d;
          if (d != deg) fail("ERR_RING_SPEC", "graded quotient relation is not homogeneous");
          (void)c;
        }
      }
      break;
  }
}

bool RingSpec::operator==(const RingSpec& o) const {
  return kind == o.kind && p == o.p && m == o.m && q == o.q && N == o.N && j == o.j && t == o.t &&
         relations == o.relations;
}

bool RingSpec::same_arithmetic(const RingSpec& o) const {
  if (*this == o) return true;
  auto flat = [](const RingSpec& s) {
    RingSpec f = s;
    if (f.kind == RingKind::PrimeField) f.kind = RingKind::Chain;
    return f;
  };
  return flat(*this) == flat(o);
}

std::string RingSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case RingKind::Chain: os << "Z/" << p << "^" << m; break;
    case RingKind::PrimeField: os << "F_" << p; break;
    case RingKind::GroupAlgebra:
      os << "(Z/" << p << "^" << m << ")[(Z/" << p << "^" << N << ")^" << q << "]";
      break;
    case RingKind::TruncExt:
      os << "(Z/" << p << "^" << m << ")[(Z/" << p << "^" << N << ")^" << q << "][z_1..z_" << j
         << "]/(z^" << t << ")";
      break;
    case RingKind::GradedQuotient:
      os << "F_" << p << "[x_1..x_" << q << "]/(" << relations.size() << " relations)";
      break;
  }
  return os.str();
}

Int Ring::max_basis_cap() {
  if (const char* env = std::getenv("PATCHLAB_MAX_BASIS")) {
    Int cap = std::atoll(env);
    if (cap > 0) return cap;
  }
  return Int{1} << 16;
}

Ring::Ring(RingSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  if (!spec_.finite_local())
    fail("ERR_GRADED_KIND", "graded polynomial quotients have no finite monomial basis");
  modulus_ = pow_int(spec_.p, spec_.m);
  group_digit_base_ = pow_int(spec_.p, spec_.N);
  basis_ = 1;
  strides_.assign(spec_.q + spec_.j, 1);
  // row-major mixed radix: group digits first, then z digits
  for (int i = spec_.q + spec_.j - 1; i >= 0; --i) {
    strides_[i] = basis_;
    Int radix = i < spec_.q ? group_digit_base_ : spec_.t;
    if (radix > 0 && basis_ > max_basis_cap() / std::max<Int>(radix, 1))
      fail("ERR_BASIS_CAP", "ring basis exceeds configured cap (" + std::to_string(max_basis_cap()) + ")");
    basis_ *= radix;
  }
  if (basis_ == 0) fail("ERR_BASIS_CAP", "empty basis (N = 0 with q > 0 gives basis 1, not 0)");
}

std::vector<int> Ring::basis_digits(Int idx) const {
  std::vector<int> d(spec_.q + spec_.j, 0);
  for (int i = 0; i < spec_.q + spec_.j; ++i) {
    Int radix = i < spec_.q ? group_digit_base_ : spec_.t;
    d[i] = static_cast<int>((idx / strides_[i]) % radix);
  }
  return d;
}

Int Ring::digits_index(const std::vector<int>& digits) const {
  Int idx = 0;
  for (int i = 0; i < spec_.q + spec_.j; ++i) idx += strides_[i] * digits[i];
  return idx;
}

std::optional<Int> Ring::mul_basis(Int a, Int b) const {
  Int idx = 0;
  for (int i = 0; i < spec_.q + spec_.j; ++i) {
    Int radix = i < spec_.q ? group_digit_base_ : spec_.t;
    Int da = (a / strides_[i]) % radix;
    Int db = (b / strides_[i]) % radix;
    if (i < spec_.q) {
      idx += strides_[i] * ((da + db) % group_digit_base_);
    } else {
      Int s = da + db;
      if (s >= spec_.t) return std::nullopt;  // z^t = 0
      idx += strides_[i] * s;
    }
  }
  return idx;
}

RingElement Ring::zero() const { return {spec_, IVec::Zero(basis_)}; }

RingElement Ring::one() const {
  RingElement e = zero();
  e.coords[0] = 1;
  return e;
}

RingElement Ring::scalar(Int c) const {
  RingElement e = zero();
  e.coords[0] = mod_reduce(c, modulus_);
  return e;
}

RingElement Ring::basis_element(Int idx) const {
  RingElement e = zero();
  e.coords[idx] = 1;
  return e;
}

RingElement Ring::gamma(int i) const {
  if (i < 0 || i >= spec_.q) fail("ERR_RING_GEN", "gamma index out of range");
  if (spec_.N == 0) return one();
  std::vector<int> d(spec_.q + spec_.j, 0);
  d[i] = 1;
  return basis_element(digits_index(d));
}

RingElement Ring::zvar(int i) const {
  if (i < 0 || i >= spec_.j) fail("ERR_RING_GEN", "z index out of range");
  std::vector<int> d(spec_.q + spec_.j, 0);
  d[spec_.q + i] = 1;
  return basis_element(digits_index(d));
}

void Ring::check_element(const RingElement& a) const {
  if (!a.ring.same_arithmetic(spec_) || a.coords.size() != basis_)
    fail("ERR_RING_MISMATCH", "element does not belong to " + spec_.describe());
}

RingElement Ring::add(const RingElement& a, const RingElement& b) const {
  check_element(a);
  check_element(b);
  RingElement r{spec_, a.coords + b.coords};
  for (Int i = 0; i < basis_; ++i) r.coords[i] = mod_reduce(r.coords[i], modulus_);
  return r;
}

RingElement Ring::sub(const RingElement& a, const RingElement& b) const { return add(a, neg(b)); }

RingElement Ring::neg(const RingElement& a) const {
  check_element(a);
  RingElement r{spec_, IVec::Zero(basis_)};
  for (Int i = 0; i < basis_; ++i) r.coords[i] = mod_reduce(-a.coords[i], modulus_);
  return r;
}

RingElement Ring::mul(const RingElement& a, const RingElement& b) const {
  check_element(a);
  check_element(b);
  RingElement r = zero();
  for (Int i = 0; i < basis_; ++i) {
    if (a.coords[i] == 0) continue;
    for (Int k = 0; k < basis_; ++k) {
      if (b.coords[k] == 0) continue;
      if (auto idx = mul_basis(i, k))
        r.coords[*idx] = mod_reduce(r.coords[*idx] + a.coords[i] * b.coords[k], modulus_);
    }
  }
  return r;
}

RingElement Ring::scalar_mul(Int c, const RingElement& a) const {
  check_element(a);
  RingElement r{spec_, IVec::Zero(basis_)};
  c = mod_reduce(c, modulus_);
  for (Int i = 0; i < basis_; ++i) r.coords[i] = mod_reduce(c * a.coords[i], modulus_);
  return r;
}

Int Ring::residue(const RingElement& a) const {
  check_element(a);
  Int s = 0;
  for (Int i = 0; i < basis_; ++i) {
    if (a.coords[i] == 0) continue;
    // z-monomials die; group monomials map to 1
    bool has_z = false;
    for (int d = spec_.q; d < spec_.q + spec_.j; ++d)
      if ((i / strides_[d]) % spec_.t != 0) {
        has_z = true;
        break;
      }
    if (!has_z) s += a.coords[i];
  }
  return mod_reduce(s, spec_.p);
}

bool Ring::is_unit(const RingElement& a) const { return residue(a) != 0; }

RingElement Ring::inverse(const RingElement& a) const {
  if (!is_unit(a)) fail("ERR_NOT_UNIT", "element lies in the maximal ideal");
  // a = u(1 - n) with u the residue lift and n nilpotent; invert by geometric series.
  // Nilpotency order is bounded by m * basis-ish; iterate until a * inv == 1.
  RingElement inv = scalar(inv_unit_mod(residue(a), modulus_));
  for (int iter = 0; iter < 64; ++iter) {
    RingElement err = sub(one(), mul(a, inv));  // 1 - a*inv, nilpotent
    if (err.coords.isZero()) return inv;
    inv = mul(inv, add(one(), err));  // Newton: inv *= (1 + err)
  }
  fail("ERR_INVERSE", "inverse iteration failed to converge");
}

std::vector<std::pair<std::string, RingElement>> Ring::maximal_ideal_generators() const {
  std::vector<std::pair<std::string, RingElement>> gens;
  gens.emplace_back("pi", scalar(spec_.p));
  for (int i = 0; i < spec_.q; ++i)
    gens.emplace_back("g" + std::to_string(i + 1) + "-1", sub(gamma(i), one()));
  for (int i = 0; i < spec_.j; ++i) gens.emplace_back("z" + std::to_string(i + 1), zvar(i));
  return gens;
}

std::vector<std::pair<std::string, RingElement>> Ring::action_generators() const {
  std::vector<std::pair<std::string, RingElement>> gens;
  gens.emplace_back("pi", scalar(spec_.p));
  for (int i = 0; i < spec_.q; ++i) gens.emplace_back("g" + std::to_string(i + 1), gamma(i));
  for (int i = 0; i < spec_.j; ++i) gens.emplace_back("z" + std::to_string(i + 1), zvar(i));
  return gens;
}

IMat Ring::regular_representation(const RingElement& x) const {
  check_element(x);
  IMat M = IMat::Zero(basis_, basis_);
  for (Int i = 0; i < basis_; ++i) {
    if (x.coords[i] == 0) continue;
    // multiplication by basis element i is a (partial) permutation of the basis
    for (Int b = 0; b < basis_; ++b) {
      if (auto idx = mul_basis(i, b))
        M(*idx, b) = mod_reduce(M(*idx, b) + x.coords[i], modulus_);
    }
  }
  return M;
}

// ---------------------------------------------------------------------------
// Ring maps

static void require_group_part(const RingSpec& s, const char* what) {
  if (s.kind != RingKind::GroupAlgebra && s.kind != RingKind::TruncExt)
    fail("ERR_MAP_SPEC", std::string(what) + " needs a group-algebra part");
}

RingMap RingMap::reduce_level(const RingSpec& src, int new_N) {
  require_group_part(src, "reduce-level");
  if (new_N > src.N || new_N < 0) fail("ERR_MAP_SPEC", "reduce-level requires 0 <= N' <= N");
  RingSpec dst = src;
  dst.N = new_N;
  return {MapKind::ReduceLevel, src, dst, new_N};
}

RingMap RingMap::mod_power(const RingSpec& src, int new_m) {
  if (!src.finite_local()) fail("ERR_GRADED_KIND", "mod-power undefined for graded kinds");
  if (new_m > src.m || new_m < 1) fail("ERR_MAP_SPEC", "mod-power requires 1 <= n <= m");
  RingSpec dst = src;
  dst.m = new_m;
  if (dst.kind == RingKind::PrimeField) dst.kind = RingKind::Chain;  // stays chain(p,1)
  return {MapKind::ModPower, src, dst, new_m};
}

RingMap RingMap::augment(const RingSpec& src) {
  require_group_part(src, "augment");
  RingSpec dst = src;
  dst.q = 0;
  dst.N = 0;
  if (dst.kind == RingKind::GroupAlgebra) dst.kind = RingKind::Chain;
  return {MapKind::Augment, src, dst, 0};
}

RingMap RingMap::kill_vars(const RingSpec& src) {
  if (src.kind != RingKind::TruncExt) fail("ERR_MAP_SPEC", "kill-vars needs z variables");
  RingSpec dst = src;
  dst.j = 0;
  dst.t = 1;
  dst.kind = dst.q > 0 || dst.N > 0 ? RingKind::GroupAlgebra : RingKind::Chain;
  return {MapKind::KillVars, src, dst, 0};
}

RingMap RingMap::inclusion(const RingSpec& src, const RingSpec& dst) {
  if (!src.finite_local() || !dst.finite_local())
    fail("ERR_GRADED_KIND", "inclusion undefined for graded kinds");
  bool ok = dst.p == src.p && dst.m == src.m && dst.q >= src.q && dst.j >= src.j &&
            (src.q == 0 || dst.N == src.N) && (src.j == 0 || dst.t == src.t);
  if (!ok) fail("ERR_MAP_SPEC", "inclusion must adjoin variables over the same coefficients");
  return {MapKind::Inclusion, src, dst, 0};
}

RingMap RingMap::trunc_vars(const RingSpec& src, int new_t) {
  if (src.kind != RingKind::TruncExt) fail("ERR_MAP_SPEC", "trunc-vars needs z variables");
  if (new_t > src.t || new_t < 1) fail("ERR_MAP_SPEC", "trunc-vars requires 1 <= t' <= t");
  RingSpec dst = src;
  dst.t = new_t;
  if (new_t == 1) {
    dst.j = 0;
    dst.kind = dst.q > 0 || dst.N > 0 ? RingKind::GroupAlgebra : RingKind::Chain;
  }
  return {MapKind::TruncVars, src, dst, new_t};
}

std::string RingMap::describe() const {
  const char* names[] = {"reduce-level", "mod-power", "augment", "kill-vars", "inclusion",
                         "trunc-vars"};
  return std::string(names[static_cast<int>(kind)]) + ": " + src.describe() + " -> " +
         dst.describe();
}

bool composable(const RingMap& f, const RingMap& g) { return f.dst.same_arithmetic(g.src); }

RingElement apply_map(const RingMap& f, const RingElement& x) {
  if (!x.ring.same_arithmetic(f.src)) fail("ERR_RING_MISMATCH", "element not in source of " + f.describe());
  Ring src(f.src);
  Ring dst(f.dst);
  RingElement out = dst.zero();
  Int dst_mod = dst.modulus();
  for (Int i = 0; i < src.basis_size(); ++i) {
    if (x.coords[i] == 0) continue;
    auto d = src.basis_digits(i);
    std::vector<int> nd(f.dst.q + f.dst.j, 0);
    bool killed = false;
    switch (f.kind) {
      case MapKind::ReduceLevel: {
        Int base = pow_int(f.dst.p, f.dst.N);
        for (int k = 0; k < f.src.q; ++k) nd[k] = base == 0 ? 0 : static_cast<int>(d[k] % base);
        for (int k = 0; k < f.src.j; ++k) nd[f.dst.q + k] = d[f.src.q + k];
        break;
      }
      case MapKind::ModPower:
        for (int k = 0; k < f.src.q + f.src.j; ++k) nd[k] = d[k];
        break;
      case MapKind::Augment:  // gamma^a -> 1
        for (int k = 0; k < f.src.j; ++k) nd[f.dst.q + k] = d[f.src.q + k];
        break;
      case MapKind::KillVars:
        for (int k = 0; k < f.src.j; ++k)
          if (d[f.src.q + k] != 0) killed = true;
        for (int k = 0; k < f.src.q; ++k) nd[k] = d[k];
        break;
      case MapKind::Inclusion:
        for (int k = 0; k < f.src.q; ++k) nd[k] = d[k];
        for (int k = 0; k < f.src.j; ++k) nd[f.dst.q + k] = d[f.src.q + k];
        break;
      case MapKind::TruncVars:
        for (int k = 0; k < f.src.q; ++k) nd[k] = d[k];
        for (int k = 0; k < f.src.j; ++k) {
          if (d[f.src.q + k] >= f.dst.t) killed = true;
          else if (f.dst.j > 0) nd[f.dst.q + k] = d[f.src.q + k];
        }
        break;
    }
    if (killed) continue;
    Int idx = dst.digits_index(nd);
    out.coords[idx] = mod_reduce(out.coords[idx] + x.coords[i], dst_mod);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ring matrices

RingMatrix ring_matrix_zero(const Ring& R, Int rows, Int cols) {
  RingMatrix M{R.spec(), rows, cols, {}};
  M.ent.assign(static_cast<size_t>(rows * cols), IVec::Zero(R.basis_size()));
  return M;
}

RingMatrix ring_matrix_identity(const Ring& R, Int n) {
  RingMatrix M = ring_matrix_zero(R, n, n);
  for (Int i = 0; i < n; ++i) M.at(i, i) = R.one().coords;
  return M;
}

RingMatrix ring_matrix_scalar(const Ring& R, Int n, const RingElement& c) {
  RingMatrix M = ring_matrix_zero(R, n, n);
  for (Int i = 0; i < n; ++i) M.at(i, i) = c.coords;
  return M;
}

RingMatrix ring_matrix_mul(const Ring& R, const RingMatrix& A, const RingMatrix& B) {
  if (A.cols != B.rows || !A.ring.same_arithmetic(B.ring))
    fail("ERR_DIM", "ring matrix product shape mismatch");
  RingMatrix C = ring_matrix_zero(R, A.rows, B.cols);
  for (Int i = 0; i < A.rows; ++i)
    for (Int k = 0; k < A.cols; ++k) {
      if (A.at(i, k).isZero()) continue;
      RingElement a{R.spec(), A.at(i, k)};
      for (Int jj = 0; jj < B.cols; ++jj) {
        if (B.at(k, jj).isZero()) continue;
        RingElement prod = R.mul(a, RingElement{R.spec(), B.at(k, jj)});
        C.at(i, jj) = R.add(RingElement{R.spec(), C.at(i, jj)}, prod).coords;
      }
    }
  return C;
}

RingMatrix ring_matrix_add(const Ring& R, const RingMatrix& A, const RingMatrix& B) {
  if (A.rows != B.rows || A.cols != B.cols) fail("ERR_DIM", "ring matrix sum shape mismatch");
  RingMatrix C = A;
  for (size_t i = 0; i < C.ent.size(); ++i)
    C.ent[i] = R.add(RingElement{R.spec(), A.ent[i]}, RingElement{R.spec(), B.ent[i]}).coords;
  return C;
}

RingMatrix ring_matrix_sub(const Ring& R, const RingMatrix& A, const RingMatrix& B) {
  if (A.rows != B.rows || A.cols != B.cols) fail("ERR_DIM", "ring matrix sum shape mismatch");
  RingMatrix C = A;
  for (size_t i = 0; i < C.ent.size(); ++i)
    C.ent[i] = R.sub(RingElement{R.spec(), A.ent[i]}, RingElement{R.spec(), B.ent[i]}).coords;
  return C;
}

bool ring_matrix_is_zero(const RingMatrix& A) {
  for (const auto& e : A.ent)
    if (!e.isZero()) return false;
  return true;
}

bool ring_matrix_equal(const RingMatrix& A, const RingMatrix& B) {
  if (A.rows != B.rows || A.cols != B.cols) return false;
  for (size_t i = 0; i < A.ent.size(); ++i)
    if (A.ent[i] != B.ent[i]) return false;
  return true;
}

RingMatrix ring_matrix_apply_map(const RingMap& f, const RingMatrix& A) {
  if (!A.ring.same_arithmetic(f.src)) fail("ERR_RING_MISMATCH", "matrix not over source of map");
  Ring dst(f.dst);
  RingMatrix M{f.dst, A.rows, A.cols, {}};
  M.ent.reserve(A.ent.size());
  for (const auto& e : A.ent) M.ent.push_back(apply_map(f, RingElement{A.ring, e}).coords);
  return M;
}

}  // namespace patchlab
