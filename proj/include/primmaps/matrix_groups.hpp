// Concrete matrix realizations of the admissible almost-simple families:
// PSL2(q)/PGL2(q) for odd q, SL2(2^e), and Sz(2^e), together with their
// standard dihedral subgroups, involution data and automorphism actions.
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "primmaps/finite_field.hpp"

namespace primmaps::mg {

enum class FamilyTag { PSL2, PGL2, SL2_even, Sz };
enum class Torus { Minus, Plus };  // n tied to q-1 resp. q+1

std::string to_string(FamilyTag t);

// One of the seven admissible (group, valency) cases.  Construction validates
// the admissibility bounds and throws std::invalid_argument otherwise.
struct GroupFamily {
  FamilyTag tag;
  long long q;
  Torus torus;

  static GroupFamily make(FamilyTag tag, long long q, Torus torus);
  int case_number() const;    // 1..7
  long long valency() const;  // n
  friend bool operator==(const GroupFamily&, const GroupFamily&) = default;
};

long long group_order(const GroupFamily& fam);

// Dense row-major matrix over the group's field; dim is 2 or 4.  Projective
// families keep entries in canonical form (first nonzero entry scaled to 1),
// which makes equality and hashing structural.
struct Mat {
  std::array<uint16_t, 16> a{};
  uint8_t dim = 2;
  friend bool operator==(const Mat&, const Mat&) = default;
  uint16_t& at(int i, int j) { return a[4 * i + j]; }
  uint16_t at(int i, int j) const { return a[4 * i + j]; }
};

struct MatHash {
  size_t operator()(const Mat& m) const {
    uint64_t h = 1469598103934665603ull ^ m.dim;
    for (int i = 0; i < 16; ++i) {
      h ^= m.a[i];
      h *= 1099511628211ull;
    }
    return (size_t)h;
  }
};

using MatSet = std::unordered_set<Mat, MatHash>;

// Quadratic extension GF(q^2) presented over a base GF(q), with elements as
// index pairs in the basis (1, beta).  Used to realize the nonsplit torus.
struct QuadExt {
  const ff::FieldSpec* base = nullptr;
  uint32_t c0 = 0, c1 = 0;  // t^2 + c1 t + c0, irreducible over the base

  static QuadExt make(const ff::FieldSpec& base);
  using Elt = std::pair<uint32_t, uint32_t>;
  Elt one() const { return {1, 0}; }
  Elt mul(Elt a, Elt b) const;
  Elt pow(Elt a, long long k) const;
  long long order(Elt a) const;
  Elt generator() const;              // deterministic generator of the units
  uint32_t norm(Elt a) const;         // a^(q+1), lands in the base field
  Elt beta_power_p() const;           // beta^p where p = char
};

class Group;
using GroupPtr = std::shared_ptr<const Group>;

// x -> c * sigma^frob(x) * c^{-1} with sigma the entrywise p-power map.
struct Automorphism {
  Mat c;
  int frob = 0;
};

struct DihedralSubgroup {
  long long n = 0;
  Mat rot, ref;
  std::vector<Mat> elements;  // rot^i, then rot^i * ref
  std::unordered_map<Mat, int, MatHash> index;
  bool contains(const Mat& m) const { return index.count(m) != 0; }
  // Reflections are elements[n..2n); reflection i is rot^i * ref.
  const Mat& reflection(int i) const { return elements[n + i]; }
};

struct InvolutionCounts {
  bool two_classes = false;
  long long I = 0;        // single-class count
  long long Iplus = 0;    // PGL2: class inside PSL2
  long long Iminus = 0;   // PGL2: outer class
};

struct AutAction {
  std::vector<Mat> inner_generators;
  // Complete coset representatives for Out(G), identity first.
  std::vector<Automorphism> outer_coset_reps;
  // Generators of N_A(D) as automorphisms; each maps D onto itself setwise.
  std::vector<Automorphism> dihedral_normalizer_gens;
  long long normalizer_order = 0;  // |N_A(D)| = 4ne or 2ne
};

// Immutable per-(tag, q) context.  The valency/torus choice enters only via
// standard_dihedral and aut_action.
class Group {
 public:
  static GroupPtr make(FamilyTag tag, long long q);

  FamilyTag tag;
  int p = 0, e = 0;
  long long q = 0;
  long long order = 0;
  int dim = 2;
  bool projective = false;
  ff::FieldPtr field;
  Mat identity;
  std::vector<Mat> generators;

  Mat canon(Mat m) const;
  Mat mul(const Mat& x, const Mat& y) const;
  Mat inverse(const Mat& m) const;
  Mat frobenius_map(Mat m, int k) const;
  bool is_identity(const Mat& m) const { return m == identity; }
  long long elem_order(const Mat& m) const;
  bool is_involution(const Mat& m) const;
  bool commute(const Mat& x, const Mat& y) const;
  // det of the canonical representative is a well-defined square-class;
  // 0 = square (PSL2 part), 1 = nonsquare.  2x2 families only.
  int det_class(const Mat& m) const;

  Mat apply(const Automorphism& a, const Mat& m) const;
  Automorphism compose(const Automorphism& a, const Automorphism& b) const;
  Automorphism inverse_aut(const Automorphism& a) const;

  long long max_group_order() const;  // enumeration bound (env-overridable)

  // Full element list via closure of the standard generators; throws if the
  // group exceeds the enumeration bound.
  const std::vector<Mat>& elements() const;
  bool has_elements() const { return order <= max_group_order(); }
  const std::vector<Mat>& involutions() const;
  // One class for PSL2/SL2/Sz, the PSL2-class then the outer class for PGL2.
  const std::vector<std::vector<Mat>>& involution_classes() const;
  const std::vector<Mat>& centralizer_of_involution(const Mat& x) const;

  // Transporter machinery: class_base(c) is a fixed base involution of class
  // c, transporter(x) conjugates the base onto x.
  int involution_class_of(const Mat& x) const;
  const Mat& class_base(int c) const;
  Mat transporter(const Mat& x) const;
  const std::vector<Mat>& base_centralizer(int c) const;

  // Suzuki-specific helpers (throw for other families).
  Mat sz_S(uint32_t a, uint32_t b) const;
  Mat sz_M(uint32_t lambda) const;
  Mat sz_T() const;

  ~Group();

 private:
  Group() = default;
  struct Caches;
  std::unique_ptr<Caches> caches_;
  void ensure_elements() const;
  void ensure_involutions() const;
  void ensure_sz_ovoid() const;
  Mat sz_transporter_impl(const Mat& x) const;
};

MatSet bfs_closure(const Group& g, std::span<const Mat> generators, long long bound);

DihedralSubgroup standard_dihedral(const Group& g, const GroupFamily& fam);

AutAction aut_action(const Group& g, const GroupFamily& fam, const DihedralSubgroup& d);

// Closed-form involution counts from the structure of the centralizers, and
// the brute-force recount used to validate them.
InvolutionCounts involution_centralizer_count(const GroupFamily& fam);
InvolutionCounts involution_centralizer_count_bruteforce(const Group& g);

// All distinct automorphisms in the subgroup generated by `gens`
// (deduplicated by their action on the group generators).
std::vector<Automorphism> generated_automorphisms(const Group& g,
                                                  std::span<const Automorphism> gens,
                                                  size_t bound = 1 << 16);

}  // namespace primmaps::mg
