// Exact arithmetic in GF(p^e).  Elements are stored as integer indices that
// pack the coefficient vector in base p (constant term in the lowest digit);
// multiplication and inversion run off log/antilog tables built once per field.
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace primmaps::ff {

class FieldSpec;
using FieldPtr = std::shared_ptr<const FieldSpec>;

class FieldSpec {
 public:
  // Deterministic: modulus is the lexicographically smallest monic irreducible
  // polynomial of degree e over GF(p), coefficients compared constant term
  // first.  Results are cached per (p, e).
  static FieldPtr make(int p, int e);

  int p() const { return p_; }
  int e() const { return e_; }
  long long q() const { return q_; }
  // e+1 coefficients, constant term first; monic.
  const std::vector<int>& modulus() const { return modulus_; }

  uint32_t zero() const { return 0; }
  uint32_t one() const { return 1; }
  uint32_t from_int(long long c) const;  // prime-subfield embedding
  std::vector<int> coeffs(uint32_t a) const;
  uint32_t from_coeffs(std::span<const int> c) const;

  uint32_t add(uint32_t a, uint32_t b) const;
  uint32_t neg(uint32_t a) const;
  uint32_t sub(uint32_t a, uint32_t b) const { return add(a, neg(b)); }
  uint32_t mul(uint32_t a, uint32_t b) const;
  uint32_t inv(uint32_t a) const;  // throws on zero
  uint32_t pow(uint32_t a, long long k) const;  // k >= 0
  uint32_t frobenius(uint32_t a, int k) const;  // a^(p^k), 0 <= k < e

  long long order(uint32_t a) const;  // multiplicative order; throws on zero
  // First element in lexicographic coefficient order with order q-1.
  uint32_t primitive_element() const { return lex_primitive_; }
  uint32_t element_of_order(long long n) const;  // requires n | q-1

  bool is_square(uint32_t a) const;  // in GF(q)*; true for 0

 private:
  FieldSpec() = default;
  void build_tables();

  int p_ = 0, e_ = 0;
  long long q_ = 0;
  std::vector<int> modulus_;
  std::vector<uint32_t> exp_, log_;  // exp_[k] = g^k, log_[exp_[k]] = k
  uint32_t table_gen_ = 0;           // generator used for the tables
  uint32_t lex_primitive_ = 0;
  std::vector<std::pair<long long, int>> q1_factors_;  // factorization of q-1
};

// Value-semantics wrapper used at API boundaries; checks spec compatibility.
struct FieldElement {
  const FieldSpec* spec = nullptr;
  uint32_t v = 0;

  friend bool operator==(const FieldElement&, const FieldElement&) = default;
  FieldElement operator+(const FieldElement& o) const;
  FieldElement operator-(const FieldElement& o) const;
  FieldElement operator*(const FieldElement& o) const;
  FieldElement operator-() const { return {spec, spec->neg(v)}; }
  FieldElement inverse() const { return {spec, spec->inv(v)}; }
  FieldElement pow(long long k) const { return {spec, spec->pow(v, k)}; }
};

long long multiplicative_order(const FieldElement& x);
FieldElement primitive_element(const FieldSpec& spec);
FieldElement frobenius(const FieldElement& x, int k);
FieldElement element_of_order(const FieldSpec& spec, long long n);

}  // namespace primmaps::ff
