#include "primmaps/affine_theory.hpp"

#include <numeric>
#include <stdexcept>

#include "primmaps/numtheory.hpp"

namespace primmaps::affine {

namespace {

long long ipow(long long b, long long e) {
  long long r = 1;
  for (long long i = 0; i < e; ++i) {
    if (r > (long long)4e18 / b) throw std::overflow_error("ipow overflow");
    r *= b;
  }
  return r;
}

}  // namespace

std::pair<TypeTriple, long long> mplus_type_genus(long long p, long long d, long long n) {
  long long q = ipow(p, d);
  if (n % 4 == 2) {
    long long genus = 1 + q * ((n - 6) / 4);
    return {TypeTriple{n / 2, n, 2 * p}, genus};
  }
  long long genus;
  if (n % 4 == 0) {
    genus = 1 + q * ((n - 4) / 4);
  } else {
    // n odd forces p = 2, so q is divisible by 4.
    genus = 1 + q / 4 * (n - 4);
  }
  return {TypeTriple{n, n, 2 * p}, genus};
}

std::pair<TypeTriple, long long> mminus_type_genus(long long p, long long d, long long n) {
  long long q = ipow(p, d);
  // genus 2 + q(np - n - 2p)/2p; q = p^d with d >= 2 makes q/p integral.
  long long genus = 2 + q / p * (n * p - n - 2 * p) / 2;
  if ((q / p * (n * p - n - 2 * p)) % 2 != 0)
    throw std::logic_error("non-integral Petrie-dual genus");
  long long l = (n % 4 == 2) ? n / 2 : n;
  return {TypeTriple{2 * p, n, l}, genus};
}

bool self_dual(long long p_residue, long long n) {
  if (n % 2 == 1) return true;
  if (n % 4 == 2) return false;  // type {n/2, n} cannot be self-dual
  long long r = ((p_residue % n) + n) % n;
  long long ord = nt::mult_order(r, n);
  long long x = 1;
  for (long long i = 0; i < ord; ++i) {
    if (x == n / 2 - 1 || x == (n / 2 + 1) % n) return true;
    x = x * r % n;
  }
  return false;
}

std::optional<AffineFamilyRecord> classify(long long p, long long n) {
  if (n <= 2) throw std::invalid_argument("classify: valency must exceed 2");
  if (!nt::is_prime(p)) throw std::invalid_argument("classify: p must be prime");
  if (std::gcd(p, n) != 1) return std::nullopt;
  if (n % 2 == 1 && p != 2) return std::nullopt;

  AffineFamilyRecord rec;
  rec.p = p;
  rec.n = n;
  rec.e = nt::mult_order_mod_signs(p, n);
  rec.d = 2 * rec.e;
  rec.caseA = (nt::pow_mod(p, rec.e, n) == n - 1);
  long long phi = nt::totient(n);
  if (phi % rec.d != 0) throw std::logic_error("phi(n) is not divisible by d");
  rec.pair_count = phi / rec.d;
  std::tie(rec.mplus_type, rec.mplus_genus) = mplus_type_genus(p, rec.d, n);
  std::tie(rec.mminus_type, rec.mminus_genus) = mminus_type_genus(p, rec.d, n);
  rec.self_dual = self_dual(p, n);
  return rec;
}

bool caseA_power_scan(long long p_residue, long long n) {
  long long r = ((p_residue % n) + n) % n;
  if (std::gcd(r, n) != 1) throw std::invalid_argument("power scan: gcd(p, n) != 1");
  long long ord = nt::mult_order(r, n);
  long long x = 1;
  for (long long i = 0; i < ord; ++i) {
    x = x * r % n;
    if (x == n - 1) return true;
  }
  return false;
}

bool caseA_congruence_closed_form(long long p_residue, long long n) {
  long long r = ((p_residue % n) + n) % n;
  if (std::gcd(r, n) != 1)
    throw std::invalid_argument("congruence test: gcd(p, n) != 1");
  auto factors = nt::factorize(n);
  long long n2 = 1;
  int common_k = -1;
  for (auto [pr, ex] : factors) {
    if (pr == 2) {
      n2 = ipow(2, ex);
      continue;
    }
    long long nr = ipow(pr, ex);
    int k = nt::two_part_exponent(nt::mult_order(r, nr));
    if (k < 1) return false;       // the 2-part must be at least 2
    if (common_k < 0) common_k = k;
    if (k != common_k) return false;
  }
  if (n2 >= 2 && r % n2 != n2 - 1) return false;
  if (n2 >= 4 && common_k >= 0 && common_k != 1) return false;
  return true;
}

QuotientData quotient_map_data(const AffineFamilyRecord& rec) {
  QuotientData qd;
  qd.n = rec.n;
  qd.m = rec.mplus_type.m;  // the quotient keeps the type {m, n}
  qd.l = 2;
  qd.mminus_type = TypeTriple{2, rec.n, qd.m};
  if (rec.n % 2 == 0) {
    qd.genus = (rec.n % 4 == 0) ? rec.n / 4 : (rec.n - 2) / 4;
    qd.orientable = true;
    qd.mplus_surface = "orientable surface of genus " + std::to_string(qd.genus) +
                       " (an n-gon with opposite sides identified, dualized)";
    qd.mminus_surface = "antipodal quotient of the n-valent beachball map";
  } else {
    qd.genus = 0;
    qd.orientable = true;
    qd.mplus_surface = "sphere with one vertex, one face and n half-edges";
    qd.mminus_surface = "closed disc with one interior vertex and n boundary half-edges";
  }
  return qd;
}

std::string Poly::str() const {
  std::string out;
  for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) {
    auto [exp, c] = *it;
    if (c == 0) continue;
    if (out.empty()) {
      if (c < 0) out += "-";
    } else {
      out += (c < 0) ? "-" : "+";
    }
    long long a = c < 0 ? -c : c;
    if (exp == 0) {
      out += std::to_string(a);
    } else {
      if (a != 1) out += std::to_string(a);
      out += "p";
      if (exp != 1) out += "^" + std::to_string(exp);
    }
  }
  return out.empty() ? "0" : out;
}

long long Poly::eval(long long p) const {
  long long r = 0;
  for (auto [exp, c] : coeff) {
    __int128 t = (__int128)c * ipow(p, exp);
    r += (long long)t;
  }
  return r;
}

std::vector<PairCountRow> mersenne_table(int emax) {
  if (emax > 20)
    throw std::invalid_argument("mersenne_table: e > 20 needs big-integer factoring");
  std::vector<PairCountRow> rows;
  for (int e = 3; e <= emax; ++e) {
    long long n = ipow(2, e) - 1;
    rows.push_back({2LL * e, e, n, nt::totient(n) / (2 * e)});
  }
  return rows;
}

std::vector<PairCountRow> fermat_table(int emax) {
  if (emax > 20)
    throw std::invalid_argument("fermat_table: e > 20 needs big-integer factoring");
  std::vector<PairCountRow> rows;
  for (int e = 2; e <= emax; ++e) {
    long long n = ipow(2, e) + 1;
    rows.push_back({2LL * e, e, n, nt::totient(n) / (2 * e)});
  }
  return rows;
}

std::vector<AffineFamilyRecord> fixed_p_table(long long p, long long nmax) {
  std::vector<AffineFamilyRecord> rows;
  for (long long n = 3; n <= nmax; ++n)
    if (auto rec = classify(p, n)) rows.push_back(*rec);
  return rows;
}

std::vector<ParametricRow> even_parametric_table(long long n) {
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument("even_parametric_table: need even n >= 4");
  std::vector<ParametricRow> rows;
  long long phi = nt::totient(n);
  for (long long c = 1; c < n; ++c) {
    if (std::gcd(c, n) != 1) continue;
    ParametricRow row;
    row.residue = c;
    row.n = n;
    row.e = nt::mult_order_mod_signs(c, n);
    row.d = 2 * row.e;
    row.caseA = (nt::pow_mod(c, row.e, n) == n - 1);
    row.pairs = phi / row.d;
    row.self_dual = self_dual(c, n);
    long long m = (n % 4 == 2) ? n / 2 : n;
    row.mplus_type = std::to_string(m) + "," + std::to_string(n) + ";2p";
    row.mminus_type = "2p," + std::to_string(n) + ";" + std::to_string(m);
    long long plus_coeff = (n % 4 == 2) ? (n - 6) / 4 : (n - 4) / 4;
    if (plus_coeff != 0) row.mplus_genus.coeff[(int)row.d] = plus_coeff;
    row.mplus_genus.coeff[0] = 1;
    row.mminus_genus.coeff[(int)row.d] = (n - 2) / 2;
    row.mminus_genus.coeff[(int)row.d - 1] = -(n / 2);
    row.mminus_genus.coeff[0] = 2;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace primmaps::affine
