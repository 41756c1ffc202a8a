#include "patchlab/common.hpp"

#include <algorithm>
#include <vector>

namespace patchlab {

bool is_prime(Int p) {
  if (p < 2) return false;
  for (Int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

Int pow_int(Int base, int exp) {
  Int r = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<Int>::max() / base)
      fail("ERR_OVERFLOW", "integer power overflows 64 bits");
    r *= base;
  }
  return r;
}

Int inv_unit_mod(Int u, Int mod) {
  Int t = 0, new_t = 1;
  Int r = mod, new_r = mod_reduce(u, mod);
  while (new_r != 0) {
    Int q = r / new_r;
    std::swap(t -= q * new_t, new_t);
    std::swap(r -= q * new_r, new_r);
  }
  if (r != 1) fail("ERR_NOT_UNIT", "element is not invertible modulo " + std::to_string(mod));
  return mod_reduce(t, mod);
}

int padic_valuation(Int x, Int p, int cap) {
  if (x == 0) return cap;
  int v = 0;
  while (v < cap && x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

std::string pow_decimal(Int p, Int e) {
  std::vector<int> digits{1};  // little-endian
  for (Int i = 0; i < e; ++i) {
    int carry = 0;
    for (auto& d : digits) {
      long long v = static_cast<long long>(d) * p + carry;
      d = static_cast<int>(v % 10);
      carry = static_cast<int>(v / 10);
    }
    while (carry) {
      digits.push_back(carry % 10);
      carry /= 10;
    }
  }
  std::string s;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) s += static_cast<char>('0' + *it);
  return s;
}

}  // namespace patchlab
