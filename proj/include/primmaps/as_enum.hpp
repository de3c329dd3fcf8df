// Enumeration and counting of vertex-primitive regular maps for the
// admissible almost-simple families, with the closed-form counts they must
// agree with.
#pragma once

#include <vector>

#include "primmaps/map_core.hpp"
#include "primmaps/matrix_groups.hpp"

namespace primmaps::asenum {

struct CountReport {
  mg::GroupFamily fam;
  long long n = 0;
  long long formula_count = 0;
  std::optional<long long> enumerated_count;
  std::optional<bool> agrees;
};

// Closed-form map count for an admissible family; division must be exact.
long long nu_formula(const mg::GroupFamily& fam);

// Orbit-count from the general two-stage argument, fed with the involution
// counts I (or I+, I-) and |N_A(D)|.
long long count_generic(long long n, const mg::InvolutionCounts& counts, long long N_order);

struct EnumeratedMap {
  maps::GeneratingTriple t;
  maps::MapDescriptor d;
};

struct EnumerationResult {
  mg::GroupFamily fam;
  std::vector<EnumeratedMap> maps;       // sorted by (genus, m, l)
  std::vector<int> petrie_pairing;       // total involution on map indices
};

EnumerationResult enumerate_maps(const mg::Group& g, const mg::GroupFamily& fam);

struct AppendixARow {
  long long n = 0, min_genus = 0, max_genus = 0, count = 0;
};

// Enumerates and cross-checks the count against nu_formula (throws on
// disagreement).
AppendixARow appendix_a_row(const mg::Group& g, const mg::GroupFamily& fam);

}  // namespace primmaps::asenum
