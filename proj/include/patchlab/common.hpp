#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace patchlab {

using Int = std::int64_t;

// Dense exact-integer matrices; every routine states the modulus it works under.
using IMat = Eigen::Matrix<Int, Eigen::Dynamic, Eigen::Dynamic>;
using IVec = Eigen::Matrix<Int, Eigen::Dynamic, 1>;

/// Error with a stable machine-readable code alongside the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& msg) {
  throw Error(code, msg);
}

bool is_prime(Int p);

/// base^exp with overflow check.
Int pow_int(Int base, int exp);

/// Reduce into [0, mod).
inline Int mod_reduce(Int x, Int mod) {
  Int r = x % mod;
  return r < 0 ? r + mod : r;
}

/// Inverse of u modulo mod; u must be a unit.
Int inv_unit_mod(Int u, Int mod);

/// p-adic valuation of x taken in [0, p^cap); returns cap for x == 0.
int padic_valuation(Int x, Int p, int cap);

/// Decimal string of p^e (schoolbook bignum; e may exceed 64-bit range).
std::string pow_decimal(Int p, Int e);

}  // namespace patchlab
