#include "primmaps/numtheory.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace primmaps::nt {

bool is_prime(long long n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (long long d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

std::vector<std::pair<long long, int>> factorize(long long n) {
  if (n < 1) throw std::invalid_argument("factorize: n must be positive");
  std::vector<std::pair<long long, int>> out;
  for (long long d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
    if (n % d) continue;
    int e = 0;
    while (n % d == 0) n /= d, ++e;
    out.emplace_back(d, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

long long totient(long long n) {
  long long t = n;
  for (auto [p, e] : factorize(n)) t -= t / p;
  return t;
}

long long pow_mod(long long b, long long e, long long m) {
  if (m <= 0) throw std::invalid_argument("pow_mod: modulus must be positive");
  unsigned __int128 r = 1, x = ((b % m) + m) % m;
  while (e > 0) {
    if (e & 1) r = r * x % m;
    x = x * x % m;
    e >>= 1;
  }
  return (long long)r;
}

long long mult_order(long long a, long long n) {
  if (n <= 0) throw std::invalid_argument("mult_order: modulus must be positive");
  a = ((a % n) + n) % n;
  if (std::gcd(a, n) != 1) throw std::invalid_argument("mult_order: gcd(a, n) != 1");
  if (n == 1) return 1;
  long long order = totient(n);
  for (auto [p, e] : factorize(order)) {
    for (int i = 0; i < e && pow_mod(a, order / p, n) == 1; ++i) order /= p;
  }
  return order;
}

int two_part_exponent(long long n) {
  if (n <= 0) throw std::invalid_argument("two_part_exponent: n must be positive");
  int k = 0;
  while (n % 2 == 0) n /= 2, ++k;
  return k;
}

std::vector<long long> divisors(long long n) {
  std::vector<long long> out{1};
  for (auto [p, e] : factorize(n)) {
    size_t m = out.size();
    long long pk = 1;
    for (int i = 1; i <= e; ++i) {
      pk *= p;
      for (size_t j = 0; j < m; ++j) out.push_back(out[j] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

long long mult_order_mod_signs(long long a, long long n) {
  long long d = mult_order(a, n);
  if (n <= 2) return d;
  // -1 lies in <a> iff a^(d/2) = -1; then the image in the quotient has half the order.
  if (d % 2 == 0 && pow_mod(a, d / 2, n) == n - 1) return d / 2;
  return d;
}

}  // namespace primmaps::nt
