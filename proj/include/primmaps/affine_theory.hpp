// Closed-form classification of the vertex-primitive regular maps with
// affine automorphism groups: admissibility, case A/B, Petrie-pair counts,
// types, genera, self-duality, dihedral quotients, and the reference tables.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace primmaps::affine {

struct TypeTriple {
  long long m = 0, n = 0, l = 0;
  friend bool operator==(const TypeTriple&, const TypeTriple&) = default;
};

struct AffineFamilyRecord {
  long long p = 0, n = 0;
  long long e = 0, d = 0;  // d = 2e, the dimension of V
  bool caseA = false;
  long long pair_count = 0;  // phi(n)/d Petrie dual pairs
  TypeTriple mplus_type;
  long long mplus_genus = 0;
  TypeTriple mminus_type;
  long long mminus_genus = 0;
  bool self_dual = false;  // of the orientable map M+
};

// nullopt when (p, n) admits no vertex-primitive regular map: gcd(p, n) > 1,
// or n odd with p != 2.  Requires prime p and n > 2.
std::optional<AffineFamilyRecord> classify(long long p, long long n);

std::pair<TypeTriple, long long> mplus_type_genus(long long p, long long d, long long n);
std::pair<TypeTriple, long long> mminus_type_genus(long long p, long long d, long long n);

// Self-duality of M+ from the congruence criterion; depends only on p mod n.
bool self_dual(long long p_residue, long long n);

// Closed-form test for case A (existence of e with p^e = -1 mod n) in terms
// of the orders of p modulo the prime-power parts of n.
bool caseA_congruence_closed_form(long long p_residue, long long n);
// Direct power-scan equivalent, for cross-validation.
bool caseA_power_scan(long long p_residue, long long n);

struct QuotientData {
  long long m = 0, n = 0, l = 2;  // extended type {m, n}_2 of the M+ quotient
  long long genus = 0;
  bool orientable = true;
  std::string mplus_surface;
  TypeTriple mminus_type;  // {2, n}_m
  std::string mminus_surface;
};

QuotientData quotient_map_data(const AffineFamilyRecord& rec);

// Integer polynomials in p, used by the parametric even-valency tables.
struct Poly {
  std::map<int, long long> coeff;  // exponent -> coefficient
  std::string str() const;         // canonical expanded form, e.g. "13p^12-14p^11+2"
  long long eval(long long p) const;
  friend bool operator==(const Poly&, const Poly&) = default;
};

struct PairCountRow {
  long long d = 0, e = 0, n = 0, pairs = 0;
};

// Mersenne valencies n = 2^e - 1 (e >= 3) and n = 2^e + 1 (e >= 2).
std::vector<PairCountRow> mersenne_table(int emax);
std::vector<PairCountRow> fermat_table(int emax);

// All admissible valencies 2 < n <= nmax for a fixed prime p.
std::vector<AffineFamilyRecord> fixed_p_table(long long p, long long nmax);

struct ParametricRow {
  long long residue = 0;  // p mod n
  long long d = 0, e = 0, n = 0;
  bool caseA = false;
  std::string mplus_type;  // "m,n;2p"
  Poly mplus_genus;
  std::string mminus_type;  // "2p,n;l"
  Poly mminus_genus;
  bool self_dual = false;
  long long pairs = 0;
};

// One row per unit residue mod n, for even n.
std::vector<ParametricRow> even_parametric_table(long long n);

}  // namespace primmaps::affine
