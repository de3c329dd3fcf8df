#include "primmaps/finite_field.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "primmaps/numtheory.hpp"

namespace primmaps::ff {

namespace {

constexpr long long kTableLimit = 1 << 20;

// Dense little-endian polynomials over GF(p).
using Poly = std::vector<int>;

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mod(Poly a, const Poly& m, int p) {
  trim(a);
  int dm = (int)m.size() - 1;
  while ((int)a.size() - 1 >= dm) {
    int da = (int)a.size() - 1;
    int c = a[da];  // m is monic
    if (c != 0) {
      for (int i = 0; i <= dm; ++i) {
        int& x = a[da - dm + i];
        x = (x - c * m[i]) % p;
        if (x < 0) x += p;
      }
    }
    a.pop_back();
    trim(a);
  }
  return a;
}

bool is_irreducible(const Poly& f, int p) {
  int e = (int)f.size() - 1;
  if (e == 1) return true;
  if (f[0] == 0) return false;  // divisible by x
  // Trial division by every monic polynomial of degree 1..e/2.
  for (int d = 1; 2 * d <= e; ++d) {
    std::vector<int> c(d, 0);
    for (;;) {
      Poly g(c.begin(), c.end());
      g.push_back(1);
      Poly r = poly_mod(f, g, p);
      if (r.empty()) return false;
      int i = 0;
      while (i < d && ++c[i] == p) c[i++] = 0;
      if (i == d) break;
    }
  }
  return true;
}

}  // namespace

FieldPtr FieldSpec::make(int p, int e) {
  if (!nt::is_prime(p)) throw std::invalid_argument("make_field: p must be prime");
  if (e < 1) throw std::invalid_argument("make_field: e must be positive");

  static std::mutex mu;
  static std::map<std::pair<int, int>, FieldPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({p, e});
  if (it != cache.end()) return it->second;

  long long q = 1;
  for (int i = 0; i < e; ++i) {
    q *= p;
    if (q > kTableLimit) throw std::invalid_argument("make_field: field too large");
  }

  auto spec = std::shared_ptr<FieldSpec>(new FieldSpec());
  spec->p_ = p;
  spec->e_ = e;
  spec->q_ = q;

  // Scan candidates in ascending numeric encoding sum(c_i p^i); the first
  // irreducible one is x^3+x+1 for GF(8), x for any prime field.
  bool found = false;
  for (long long k = 0; k < q && !found; ++k) {
    Poly f(e + 1, 0);
    long long rem = k;
    for (int i = 0; i < e; ++i) {
      f[i] = (int)(rem % p);
      rem /= p;
    }
    f[e] = 1;
    if (is_irreducible(f, p)) {
      spec->modulus_ = f;
      found = true;
    }
  }
  if (!found) throw std::logic_error("make_field: no irreducible polynomial found");

  spec->build_tables();
  cache[{p, e}] = spec;
  return spec;
}

std::vector<int> FieldSpec::coeffs(uint32_t a) const {
  std::vector<int> c(e_);
  for (int i = 0; i < e_; ++i) {
    c[i] = a % p_;
    a /= p_;
  }
  return c;
}

uint32_t FieldSpec::from_coeffs(std::span<const int> c) const {
  if ((int)c.size() != e_) throw std::invalid_argument("from_coeffs: wrong length");
  uint32_t a = 0;
  for (int i = e_ - 1; i >= 0; --i) {
    int x = c[i] % p_;
    if (x < 0) x += p_;
    a = a * p_ + x;
  }
  return a;
}

uint32_t FieldSpec::from_int(long long c) const {
  long long x = c % p_;
  if (x < 0) x += p_;
  return (uint32_t)x;
}

uint32_t FieldSpec::add(uint32_t a, uint32_t b) const {
  if (p_ == 2) return a ^ b;
  uint32_t out = 0, mult = 1;
  for (int i = 0; i < e_; ++i) {
    int s = (int)(a % p_) + (int)(b % p_);
    if (s >= p_) s -= p_;
    out += (uint32_t)s * mult;
    a /= p_;
    b /= p_;
    mult *= p_;
  }
  return out;
}

uint32_t FieldSpec::neg(uint32_t a) const {
  if (p_ == 2) return a;
  uint32_t out = 0, mult = 1;
  for (int i = 0; i < e_; ++i) {
    int d = a % p_;
    out += (uint32_t)(d ? p_ - d : 0) * mult;
    a /= p_;
    mult *= p_;
  }
  return out;
}

uint32_t FieldSpec::mul(uint32_t a, uint32_t b) const {
  if (a == 0 || b == 0) return 0;
  long long k = (long long)log_[a] + log_[b];
  if (k >= q_ - 1) k -= q_ - 1;
  return exp_[k];
}

uint32_t FieldSpec::inv(uint32_t a) const {
  if (a == 0) throw std::domain_error("field inverse of zero");
  long long k = log_[a];
  return exp_[k == 0 ? 0 : q_ - 1 - k];
}

uint32_t FieldSpec::pow(uint32_t a, long long k) const {
  if (k < 0) throw std::invalid_argument("field pow: negative exponent");
  if (a == 0) return k == 0 ? one() : 0;
  long long r = (long long)log_[a] % (q_ - 1) * (k % (q_ - 1)) % (q_ - 1);
  return exp_[r];
}

uint32_t FieldSpec::frobenius(uint32_t a, int k) const {
  if (k < 0 || k >= e_) throw std::invalid_argument("frobenius: need 0 <= k < e");
  long long pk = 1;
  for (int i = 0; i < k; ++i) pk *= p_;
  return pow(a, pk);
}

long long FieldSpec::order(uint32_t a) const {
  if (a == 0) throw std::domain_error("multiplicative order of zero");
  return (q_ - 1) / std::gcd(q_ - 1, (long long)log_[a]);
}

uint32_t FieldSpec::element_of_order(long long n) const {
  if (n < 1 || (q_ - 1) % n != 0)
    throw std::invalid_argument("element_of_order: n must divide q-1");
  return pow(lex_primitive_, (q_ - 1) / n);
}

bool FieldSpec::is_square(uint32_t a) const {
  if (a == 0) return true;
  if (p_ == 2) return true;
  return log_[a] % 2 == 0;
}

void FieldSpec::build_tables() {
  q1_factors_ = q_ > 2 ? nt::factorize(q_ - 1) : std::vector<std::pair<long long, int>>{};

  // Bootstrap multiplication: polynomial product reduced mod the modulus.
  auto poly_mul = [&](uint32_t a, uint32_t b) -> uint32_t {
    std::vector<int> ca = coeffs(a), cb = coeffs(b);
    Poly prod(2 * e_ - 1, 0);
    for (int i = 0; i < e_; ++i) {
      if (!ca[i]) continue;
      for (int j = 0; j < e_; ++j) prod[i + j] = (prod[i + j] + ca[i] * cb[j]) % p_;
    }
    Poly r = poly_mod(prod, modulus_, p_);
    r.resize(e_, 0);
    return from_coeffs(r);
  };
  auto naive_order = [&](uint32_t a) {
    long long k = 1;
    uint32_t x = a;
    while (x != 1) {
      x = poly_mul(x, a);
      ++k;
    }
    return k;
  };

  table_gen_ = 0;
  for (uint32_t a = 1; a < q_; ++a) {
    if (naive_order(a) == q_ - 1) {
      table_gen_ = a;
      break;
    }
  }

  exp_.assign(q_ - 1, 0);
  log_.assign(q_, 0);
  uint32_t x = 1;
  for (long long k = 0; k < q_ - 1; ++k) {
    exp_[k] = x;
    log_[x] = (uint32_t)k;
    x = poly_mul(x, table_gen_);
  }

  // First element in lexicographic coefficient order (c0 compared first) with
  // full multiplicative order.
  lex_primitive_ = 0;
  for (long long k = 0; k < q_ && !lex_primitive_; ++k) {
    // Digits of k, most significant digit = c0.
    std::vector<int> c(e_);
    long long rem = k, base = 1;
    for (int i = 1; i < e_; ++i) base *= p_;
    for (int i = 0; i < e_; ++i) {
      c[i] = (int)(rem / base);
      rem %= base;
      if (i + 1 < e_) base /= p_;
    }
    uint32_t a = from_coeffs(c);
    if (a != 0 && order(a) == q_ - 1) lex_primitive_ = a;
  }
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
  if (spec != o.spec) throw std::invalid_argument("field elements from different fields");
  return {spec, spec->add(v, o.v)};
}
FieldElement FieldElement::operator-(const FieldElement& o) const {
  if (spec != o.spec) throw std::invalid_argument("field elements from different fields");
  return {spec, spec->sub(v, o.v)};
}
FieldElement FieldElement::operator*(const FieldElement& o) const {
  if (spec != o.spec) throw std::invalid_argument("field elements from different fields");
  return {spec, spec->mul(v, o.v)};
}

long long multiplicative_order(const FieldElement& x) { return x.spec->order(x.v); }
FieldElement primitive_element(const FieldSpec& spec) {
  return {&spec, spec.primitive_element()};
}
FieldElement frobenius(const FieldElement& x, int k) {
  return {x.spec, x.spec->frobenius(x.v, k)};
}
FieldElement element_of_order(const FieldSpec& spec, long long n) {
  return {&spec, spec.element_of_order(n)};
}

}  // namespace primmaps::ff
