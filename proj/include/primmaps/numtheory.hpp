// Elementary number theory helpers shared by every module.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace primmaps::nt {

bool is_prime(long long n);

// Prime factorization by trial division, sorted by prime.
std::vector<std::pair<long long, int>> factorize(long long n);

long long totient(long long n);

// b^e mod m, e >= 0, m > 0.
long long pow_mod(long long b, long long e, long long m);

// Least k >= 1 with a^k = 1 mod n.  Requires gcd(a, n) = 1.
long long mult_order(long long a, long long n);

// Largest k with 2^k | n (n > 0).
int two_part_exponent(long long n);

std::vector<long long> divisors(long long n);

// Order of the image of a in the quotient (Z/n)* / {+-1}.
long long mult_order_mod_signs(long long a, long long n);

}  // namespace primmaps::nt
