#include <doctest.h>

#include <numeric>

#include "primmaps/numtheory.hpp"

using namespace primmaps::nt;

TEST_CASE("primality and factorization") {
  CHECK(is_prime(2));
  CHECK(is_prime(8191));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(2047));  // 23 * 89

  auto f = factorize(4095);
  REQUIRE(f.size() == 4);
  CHECK(f[0] == std::pair<long long, int>{3, 2});
  CHECK(f[3] == std::pair<long long, int>{13, 1});
}

TEST_CASE("totient") {
  CHECK(totient(1) == 1);
  CHECK(totient(31) == 30);
  CHECK(totient(8191) == 8190);
  CHECK(totient(2047) == 1936);  // 22 * 88
  long long brute = 0;
  for (int k = 1; k <= 360; ++k)
    if (std::gcd((long long)k, 360LL) == 1) ++brute;
  CHECK(totient(360) == brute);
}

TEST_CASE("multiplicative order") {
  CHECK(mult_order(2, 31) == 5);
  CHECK(mult_order(2, 7) == 3);
  CHECK(mult_order(3, 8) == 2);
  CHECK(mult_order(1, 1) == 1);
  CHECK_THROWS(mult_order(5, 10));
  // Brute-force agreement.
  for (long long n = 3; n <= 60; ++n)
    for (long long a = 1; a < n; ++a) {
      if (std::gcd(a, n) != 1) continue;
      long long k = 1, x = a % n;
      while (x != 1) x = x * a % n, ++k;
      CHECK(mult_order(a, n) == k);
    }
}

TEST_CASE("order in the quotient by signs") {
  CHECK(mult_order_mod_signs(2, 7) == 3);    // 2^3 = 1
  CHECK(mult_order_mod_signs(2, 9) == 3);    // 2^3 = -1
  CHECK(mult_order_mod_signs(2, 31) == 5);   // 2^5 = 1
  CHECK(mult_order_mod_signs(3, 10) == 2);   // 3^2 = -1
  CHECK(mult_order_mod_signs(3, 8) == 2);    // 3^2 = 1, 3 != +-1
  CHECK(mult_order_mod_signs(7, 4) == 1);    // 7 = -1
}

TEST_CASE("misc helpers") {
  CHECK(two_part_exponent(48) == 4);
  CHECK(two_part_exponent(7) == 0);
  CHECK(divisors(12) == std::vector<long long>{1, 2, 3, 4, 6, 12});
  CHECK(pow_mod(2, 6, 13) == 12);
}
