// The algebra of regular maps presented by involution triples (r0, r1, r2):
// extended type, Euler characteristic, genus, duality operators and
// isomorphism testing.
#pragma once

#include <optional>

#include "primmaps/matrix_groups.hpp"

namespace primmaps::maps {

struct GeneratingTriple {
  mg::Mat r0, r1, r2;
  friend bool operator==(const GeneratingTriple&, const GeneratingTriple&) = default;
};

struct MapDescriptor {
  long long n = 0, m = 0, l = 0;  // vertex valency, face valency, Petrie length
  long long euler = 0;
  long long genus = 0;
  bool orientable = false;
  long long vertex_count = 0;
  std::optional<bool> self_dual, self_petrie;
  int petrie_partner = -1, dual_partner = -1;
};

// r_i are non-identity involutions and r0, r2 commute.
bool triple_valid(const mg::Group& g, const GeneratingTriple& t);

bool orientable(const mg::Group& g, const GeneratingTriple& t);

// Orientability by closure of <r0r1, r1r2>; usable whenever the element list
// fits in the enumeration bound.  Cross-checks the family shortcut.
bool orientable_generic(const mg::Group& g, const GeneratingTriple& t);

MapDescriptor describe(const mg::Group& g, const GeneratingTriple& t);

// Pure arithmetic shared with the affine side: Euler characteristic, genus
// and vertex count from |G| and the extended type.
MapDescriptor descriptor_from(long long group_order, long long n, long long m,
                              long long l, bool orientable);

GeneratingTriple dual(const GeneratingTriple& t);
GeneratingTriple petrie_dual(const mg::Group& g, const GeneratingTriple& t);

// True iff some automorphism in <Inn(G), outer reps> carries t1 onto t2
// componentwise.
bool isomorphic(const mg::Group& g, const GeneratingTriple& t1,
                const GeneratingTriple& t2, const mg::AutAction& aut);

}  // namespace primmaps::maps
