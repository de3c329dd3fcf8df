#include <doctest.h>

#include <random>

#include "primmaps/finite_field.hpp"
#include "primmaps/numtheory.hpp"

using namespace primmaps;
using ff::FieldSpec;

TEST_CASE("make_field basics") {
  auto f2 = FieldSpec::make(2, 1);
  CHECK(f2->q() == 2);

  // Exhaustive scan of the 4 monic cubics over GF(2) with nonzero constant
  // term leaves x^3+x+1 as the lex-smallest irreducible.
  auto f8 = FieldSpec::make(2, 3);
  CHECK(f8->q() == 8);
  CHECK(f8->modulus() == std::vector<int>{1, 1, 0, 1});

  CHECK(FieldSpec::make(3, 4)->q() == 81);

  CHECK_THROWS(FieldSpec::make(4, 1));
  CHECK_THROWS(FieldSpec::make(7, 0));
}

TEST_CASE("make_field is deterministic") {
  for (auto [p, e] : {std::pair{2, 5}, {3, 3}, {5, 2}, {13, 1}}) {
    auto a = FieldSpec::make(p, e);
    auto b = FieldSpec::make(p, e);
    CHECK(a->modulus() == b->modulus());
  }
}

TEST_CASE("field arithmetic") {
  auto f8 = FieldSpec::make(2, 3);
  for (uint32_t x = 1; x < 8; ++x) CHECK(f8->mul(x, f8->inv(x)) == f8->one());
  CHECK_THROWS(f8->inv(0));

  auto f13 = FieldSpec::make(13, 1);
  CHECK(f13->pow(2, 6) == 12);  // 2^6 = -1 mod 13

  auto f9 = FieldSpec::make(3, 2);
  for (uint32_t x = 0; x < 9; ++x) CHECK(f9->pow(x, 9) == x);  // x^q = x

  // Field axioms, spot-checked exhaustively on GF(9).
  for (uint32_t a = 0; a < 9; ++a)
    for (uint32_t b = 0; b < 9; ++b) {
      CHECK(f9->add(a, b) == f9->add(b, a));
      CHECK(f9->mul(a, b) == f9->mul(b, a));
      CHECK(f9->add(a, f9->neg(a)) == 0);
      for (uint32_t c = 0; c < 9; ++c)
        CHECK(f9->mul(a, f9->add(b, c)) == f9->add(f9->mul(a, b), f9->mul(a, c)));
    }
}

TEST_CASE("mixed-spec operands rejected") {
  auto f8 = FieldSpec::make(2, 3);
  auto f4 = FieldSpec::make(2, 2);
  ff::FieldElement a{f8.get(), 3}, b{f4.get(), 3};
  CHECK_THROWS(a + b);
  CHECK_THROWS(a * b);
}

TEST_CASE("multiplicative order") {
  auto f8 = FieldSpec::make(2, 3);
  CHECK(f8->order(f8->one()) == 1);
  CHECK(f8->order(f8->primitive_element()) == 7);
  auto f13 = FieldSpec::make(13, 1);
  CHECK(f13->order(3) == 3);  // 3^3 = 27 = 1 mod 13
  CHECK_THROWS(f13->order(0));

  // order divides q-1, for several fields.
  for (auto [p, e] : {std::pair{2, 6}, {3, 3}, {5, 2}, {7, 2}}) {
    auto f = FieldSpec::make(p, e);
    for (uint32_t x = 1; x < f->q(); ++x) CHECK((f->q() - 1) % f->order(x) == 0);
  }
}

TEST_CASE("primitive element is lex-first") {
  CHECK(FieldSpec::make(2, 1)->primitive_element() == 1);
  CHECK(FieldSpec::make(13, 1)->primitive_element() == 2);
  // GF(4): the class of x (index 2) precedes 1 in constant-first lex order
  // and has order 3.
  auto f4 = FieldSpec::make(2, 2);
  CHECK(f4->primitive_element() == 2);
  CHECK(f4->order(2) == 3);
}

TEST_CASE("frobenius") {
  auto f4 = FieldSpec::make(2, 2);
  uint32_t omega = 2;  // the class of x
  CHECK(f4->frobenius(omega, 0) == omega);
  CHECK(f4->frobenius(omega, 1) == f4->add(omega, f4->one()));  // w^2 = w+1

  // Additive and multiplicative homomorphism plus bijectivity, exhaustive for
  // q <= 64.
  for (auto [p, e] : {std::pair{2, 6}, {3, 3}, {2, 4}}) {
    auto f = FieldSpec::make(p, e);
    for (int k = 0; k < e; ++k) {
      std::vector<bool> hit(f->q(), false);
      for (uint32_t x = 0; x < f->q(); ++x) {
        uint32_t fx = f->frobenius(x, k);
        CHECK_FALSE(hit[fx]);
        hit[fx] = true;
        for (uint32_t y = 0; y < f->q(); ++y) {
          CHECK(f->frobenius(f->add(x, y), k) == f->add(fx, f->frobenius(y, k)));
          CHECK(f->frobenius(f->mul(x, y), k) == f->mul(fx, f->frobenius(y, k)));
        }
      }
    }
  }

  // (x+y)^(p^k) = x^(p^k) + y^(p^k) sampled in GF(27).
  auto f27 = FieldSpec::make(3, 3);
  std::mt19937 rng(7);
  for (int t = 0; t < 200; ++t) {
    uint32_t x = rng() % 27, y = rng() % 27;
    for (int k = 0; k < 3; ++k)
      CHECK(f27->frobenius(f27->add(x, y), k) ==
            f27->add(f27->frobenius(x, k), f27->frobenius(y, k)));
  }
}

TEST_CASE("element_of_order") {
  auto f13 = FieldSpec::make(13, 1);
  CHECK(f13->element_of_order(6) == 4);  // 2^2; order 6 mod 13
  CHECK(f13->element_of_order(1) == f13->one());
  auto f16 = FieldSpec::make(2, 4);
  CHECK(f16->element_of_order(15) == f16->primitive_element());
  CHECK_THROWS(f16->element_of_order(7));
}

TEST_CASE("x^(q-1) = 1") {
  for (auto [p, e] :
       {std::pair{2, 7}, {2, 5}, {3, 4}, {5, 2}, {11, 1}, {113, 1}}) {
    auto f = FieldSpec::make(p, e);
    for (uint32_t x = 1; x < f->q(); ++x) CHECK(f->pow(x, f->q() - 1) == f->one());
  }
  // Randomized for a larger field.
  auto f = FieldSpec::make(2, 16);
  std::mt19937 rng(99);
  for (int t = 0; t < 500; ++t) {
    uint32_t x = 1 + rng() % (f->q() - 1);
    CHECK(f->pow(x, f->q() - 1) == f->one());
  }
}
