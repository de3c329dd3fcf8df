// Independent brute-force verification of the affine classification: builds
// V x| D_n explicitly, enumerates its vertex-primitive regular maps directly,
// and compares counts, types, genera, orientability, Petrie pairing and
// self-duality against the closed forms.  Also constructs generalised Paley
// graphs and the case-B quotient maps.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "primmaps/affine_theory.hpp"
#include "primmaps/map_core.hpp"

namespace primmaps::oracle {

// Vectors over GF(p) are packed base-p into a single index; linear maps are
// dense row-major d x d matrices over GF(p).
struct LinMat {
  int d = 0;
  std::vector<uint16_t> a;
  uint16_t at(int i, int j) const { return a[(size_t)d * i + j]; }
  uint16_t& at(int i, int j) { return a[(size_t)d * i + j]; }
  friend bool operator==(const LinMat&, const LinMat&) = default;
};

// (v, a^i b^s) with v packed; dih = i + s*n.
struct AffElem {
  uint32_t v = 0;
  uint16_t dih = 0;
  friend bool operator==(const AffElem&, const AffElem&) = default;
};

struct AffTriple {
  AffElem r0;
  uint16_t r1 = 0, r2 = 0;  // dihedral indices of the reflections
};

class AffineGroup {
 public:
  static std::shared_ptr<const AffineGroup> build(long long p, long long n,
                                                  long long vbound = 100000);

  long long p = 0, n = 0, e = 0, d = 0;
  bool caseA = false;
  long long vsize = 0;  // p^d
  long long order = 0;  // 2n p^d

  // Dihedral action matrices indexed like AffElem::dih.
  std::vector<LinMat> dih_mat;
  // Precomputed action of each dihedral element on packed vectors.
  std::vector<std::vector<uint32_t>> dih_act;

  int dih_mul(int g, int h) const;
  int dih_inv(int g) const;
  AffElem mul(const AffElem& x, const AffElem& y) const;
  AffElem inverse(const AffElem& x) const;
  bool is_identity(const AffElem& x) const { return x.v == 0 && x.dih == 0; }
  long long elem_order(const AffElem& x) const;

  uint32_t add_v(uint32_t a, uint32_t b) const;
  uint32_t neg_v(uint32_t a) const;
  std::vector<int> unpack(uint32_t v) const;
  uint32_t pack(const std::vector<int>& digits) const;
  uint32_t apply_lin(const LinMat& m, uint32_t v) const;

  // The full linear normalizer of the dihedral action in GL_d(p); every map
  // automorphism between standard-based triples is a translation twist of one
  // of these.
  struct LinAut {
    LinMat L;
    int rot_image = 1;  // pi(a) = a^rot_image
    int ref_image = 0;  // pi(b) = a^ref_image b
    bool kernel = false;
  };
  const std::vector<LinAut>& normalizer() const { return lambda_; }
  const std::vector<int>& normalizer_kernel() const { return lambda_kernel_; }
  int pi_dih(const LinAut& a, int g) const;  // induced permutation on dih indices

 private:
  AffineGroup() = default;
  std::vector<LinAut> lambda_;
  std::vector<int> lambda_kernel_;
};

using AffineGroupPtr = std::shared_ptr<const AffineGroup>;

struct AffineEnumeratedMap {
  AffTriple t;
  maps::MapDescriptor desc;
};

struct AffineEnumResult {
  std::vector<AffineEnumeratedMap> maps;
  std::vector<int> petrie_pairing;
};

AffineEnumResult enumerate_affine_maps(const AffineGroup& g);

// True iff some automorphism fixes r1 and swaps r0 with r2 (transporter
// search over the normalizer composed with translation twists).
bool oracle_self_dual(const AffineGroup& g, const AffTriple& t);

struct VerifyReport {
  long long p = 0, n = 0;
  bool pass = false;
  long long expected_maps = 0, found_maps = 0;
  std::vector<std::string> failures;
};

VerifyReport verify_against_theory(long long p, long long n, long long vbound = 100000);

struct PaleyGraph {
  long long q = 0, n = 0;
  std::vector<std::vector<int>> adj;  // sorted neighbor lists
};

// Cayley graph on GF(q) with connection set the order-n subgroup S of the
// units; requires S = -S and that S spans GF(q) over the prime field.
PaleyGraph generalized_paley_graph(long long q, long long n);

struct QuotientCheck {
  bool pass = false;
  long long quotient_order = 0;    // |G+| / |V_i|
  long long quotient_vertices = 0; // p^e
  long long quotient_valency = 0;  // n
  bool mirror_pair = false;        // M_1 isomorphic to the mirror of M_0
  bool chiral = false;             // M_0 not isomorphic to M_1
  std::vector<std::string> failures;
};

// Case-B only: quotients of an orientable enumerated map by the two
// D+-submodules, checked to be a chiral pair of generalised Paley maps.
QuotientCheck case_b_quotients(const AffineGroup& g, const AffTriple& orientable_map);

}  // namespace primmaps::oracle
