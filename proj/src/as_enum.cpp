#include "primmaps/as_enum.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "primmaps/numtheory.hpp"

namespace primmaps::asenum {

using maps::GeneratingTriple;
using mg::Automorphism;
using mg::FamilyTag;
using mg::Group;
using mg::GroupFamily;
using mg::Mat;
using mg::MatHash;

namespace {

long long exact_div(long long num, long long den, const char* what) {
  if (den == 0 || num % den != 0)
    throw std::logic_error(std::string("non-exact division in ") + what);
  return num / den;
}

}  // namespace

long long nu_formula(const GroupFamily& fam) {
  long long q = fam.q;
  long long n = fam.valency();
  long long e = mg::Group::make(fam.tag, q)->e;  // cached, cheap
  long long phi = nt::totient(n);
  switch (fam.case_number()) {
    case 1:
      return q % 4 == 1 ? exact_div((q - 5) * phi, 8 * e, "nu_1")
                        : exact_div((q + 1) * phi, 8 * e, "nu_1");
    case 4:
      return q % 4 == 1 ? exact_div((q - 1) * phi, 8 * e, "nu_4")
                        : exact_div((q - 3) * phi, 8 * e, "nu_4");
    case 2:
    case 3:
    case 5:
    case 6:
    case 7:
      return exact_div((q - 2) * phi, 2 * e, "nu");
  }
  throw std::invalid_argument("nu_formula: bad case");
}

long long count_generic(long long n, const mg::InvolutionCounts& counts, long long N_order) {
  if (n <= 2) throw std::invalid_argument("count_generic: need n > 2");
  long long phi = nt::totient(n);
  if (n % 2 == 1) {
    if (counts.two_classes)
      throw std::invalid_argument("count_generic: odd n has a single class");
    return exact_div(n * phi * (counts.I - 1), N_order, "count_generic odd");
  }
  if (!counts.two_classes)
    return exact_div(n * phi * (counts.I - 3), N_order, "count_generic even");
  return exact_div(n * phi * (counts.Iplus + counts.Iminus - 6), 2 * N_order,
                   "count_generic even two-class");
}

EnumerationResult enumerate_maps(const Group& g, const GroupFamily& fam) {
  long long n = fam.valency();
  auto D = mg::standard_dihedral(g, fam);
  auto act = mg::aut_action(g, fam, D);

  // The normalizer subgroup as explicit automorphisms, and its kernel K on D
  // (K is the stabilizer of every generating pair).
  auto nhat = mg::generated_automorphisms(g, act.dihedral_normalizer_gens);
  std::vector<Automorphism> K;
  for (const auto& a : nhat)
    if (g.apply(a, D.rot) == D.rot && g.apply(a, D.ref) == D.ref) K.push_back(a);

  // Normalizer generators act on reflection indices.
  auto refl_of = [&](const Mat& m) {
    auto it = D.index.find(m);
    if (it == D.index.end() || it->second < n)
      throw std::logic_error("normalizer image is not a reflection");
    return (int)(it->second - n);
  };
  std::vector<std::vector<int>> gen_perm;
  for (const auto& a : act.dihedral_normalizer_gens) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = refl_of(g.apply(a, D.reflection(i)));
    gen_perm.push_back(std::move(perm));
  }

  // Generating pairs (r1, r2) of D: reflection pairs whose rotation
  // difference is a unit mod n.
  auto pair_id = [&](int i, int j) { return i * (int)n + j; };
  std::vector<int> orbit_rep(n * n, -1);
  std::vector<std::pair<int, int>> reps;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (std::gcd((long long)((i - j + n) % n), n) != 1) continue;
      if (orbit_rep[pair_id(i, j)] >= 0) continue;
      int rep = pair_id(i, j);
      reps.push_back({i, j});
      std::vector<int> stack{rep};
      orbit_rep[rep] = rep;
      while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        int ci = cur / (int)n, cj = cur % (int)n;
        for (const auto& perm : gen_perm) {
          int nxt = pair_id(perm[ci], perm[cj]);
          if (orbit_rep[nxt] < 0) {
            orbit_rep[nxt] = rep;
            stack.push_back(nxt);
          }
        }
      }
    }

  bool check_generation = g.has_elements();
  auto expected_candidates = [&](const Mat& r2) {
    auto counts = mg::involution_centralizer_count(fam);
    long long I = counts.two_classes
                      ? (g.involution_class_of(r2) == 0 ? counts.Iplus : counts.Iminus)
                      : counts.I;
    return n % 2 == 0 ? I - 3 : I - 1;
  };

  struct Produced {
    GeneratingTriple t;
    maps::MapDescriptor d;
    int bucket;
    Mat r0_rep;
  };
  std::vector<Produced> produced;
  // bucket -> (candidate -> K-orbit representative)
  std::vector<std::unordered_map<Mat, Mat, MatHash>> bucket_orbit_rep(reps.size());

  for (size_t b = 0; b < reps.size(); ++b) {
    auto [i, j] = reps[b];
    Mat r1 = D.reflection(i), r2 = D.reflection(j);
    std::vector<Mat> cands;
    for (const Mat& x : g.involutions())
      if (!D.contains(x) && g.commute(x, r2)) cands.push_back(x);
    if ((long long)cands.size() != expected_candidates(r2))
      throw std::logic_error("candidate count disagrees with the centralizer structure");

    auto& rep_of = bucket_orbit_rep[b];
    for (const Mat& x : cands) {
      if (rep_of.count(x)) continue;
      // orbit of x under K
      std::vector<Mat> orbit{x};
      rep_of[x] = x;
      for (size_t head = 0; head < orbit.size(); ++head)
        for (const auto& a : K) {
          Mat y = g.apply(a, orbit[head]);
          if (!rep_of.count(y)) {
            rep_of[y] = x;
            orbit.push_back(y);
          }
        }
      GeneratingTriple t{x, r1, r2};
      if (check_generation) {
        std::vector<Mat> gens{t.r0, t.r1, t.r2};
        auto closure = mg::bfs_closure(g, gens, g.order);
        if ((long long)closure.size() != g.order)
          throw std::logic_error("triple does not generate the group");
      }
      produced.push_back({t, maps::describe(g, t), (int)b, x});
    }
  }

  // Safety-net isomorphism sweep inside equal extended types.
  std::vector<int> redirect(produced.size());
  std::iota(redirect.begin(), redirect.end(), 0);
  for (size_t i = 0; i < produced.size(); ++i) {
    if (redirect[i] != (int)i) continue;
    for (size_t j = i + 1; j < produced.size(); ++j) {
      if (redirect[j] != (int)j) continue;
      if (produced[i].d.m != produced[j].d.m || produced[i].d.l != produced[j].d.l) continue;
      if (maps::isomorphic(g, produced[j].t, produced[i].t, act)) redirect[j] = (int)i;
    }
  }

  std::vector<int> surviving;  // produced index -> compact index
  std::vector<int> compact(produced.size(), -1);
  for (size_t i = 0; i < produced.size(); ++i)
    if (redirect[i] == (int)i) {
      compact[i] = (int)surviving.size();
      surviving.push_back((int)i);
    }

  // Petrie partner: r0 -> r0 r2 stays in the same bucket.
  std::vector<int> petrie(surviving.size(), -1);
  auto find_map = [&](int bucket, const Mat& r0rep) {
    for (size_t i = 0; i < produced.size(); ++i)
      if (produced[i].bucket == bucket && produced[i].r0_rep == r0rep)
        return compact[redirect[i]];
    throw std::logic_error("Petrie partner not found in its bucket");
  };
  for (size_t si = 0; si < surviving.size(); ++si) {
    const auto& pr = produced[surviving[si]];
    Mat r0p = g.mul(pr.t.r0, pr.t.r2);
    petrie[si] = find_map(pr.bucket, bucket_orbit_rep[pr.bucket].at(r0p));
  }

  EnumerationResult out;
  out.fam = fam;
  for (int idx : surviving) out.maps.push_back({produced[idx].t, produced[idx].d});
  out.petrie_pairing = petrie;

  // Verify the pairing is an involution.
  for (size_t i = 0; i < out.petrie_pairing.size(); ++i) {
    int j = out.petrie_pairing[i];
    if (j < 0 || out.petrie_pairing[j] != (int)i)
      throw std::logic_error("Petrie pairing is not an involution");
  }
  for (size_t i = 0; i < out.maps.size(); ++i) {
    out.maps[i].d.petrie_partner = out.petrie_pairing[i];
    out.maps[i].d.self_petrie = (out.petrie_pairing[i] == (int)i);
  }

  // Dual partners exist inside the same enumeration only for m = n.
  for (size_t i = 0; i < out.maps.size(); ++i) {
    auto& mi = out.maps[i];
    if (mi.d.m != mi.d.n) {
      mi.d.self_dual = false;
      continue;
    }
    GeneratingTriple dt = maps::dual(mi.t);
    for (size_t j = 0; j < out.maps.size(); ++j) {
      const auto& mj = out.maps[j];
      if (mj.d.m != mi.d.m || mj.d.l != mi.d.l) continue;
      if (maps::isomorphic(g, dt, mj.t, act)) {
        mi.d.dual_partner = (int)j;
        mi.d.self_dual = (i == j);
        break;
      }
    }
    if (!mi.d.self_dual.has_value() || mi.d.dual_partner < 0)
      throw std::logic_error("self-type map has no dual partner in the enumeration");
  }

  // Deterministic order: (genus, m, l), then re-index the pairings.
  std::vector<int> order(out.maps.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& da = out.maps[a].d;
    const auto& db = out.maps[b].d;
    return std::tie(da.genus, da.m, da.l) < std::tie(db.genus, db.m, db.l);
  });
  std::vector<int> pos(out.maps.size());
  for (size_t i = 0; i < order.size(); ++i) pos[order[i]] = (int)i;
  EnumerationResult sorted;
  sorted.fam = out.fam;
  sorted.maps.resize(out.maps.size());
  sorted.petrie_pairing.resize(out.maps.size());
  for (size_t i = 0; i < order.size(); ++i) {
    sorted.maps[i] = out.maps[order[i]];
    sorted.maps[i].d.petrie_partner = pos[out.petrie_pairing[order[i]]];
    sorted.petrie_pairing[i] = pos[out.petrie_pairing[order[i]]];
    if (sorted.maps[i].d.dual_partner >= 0)
      sorted.maps[i].d.dual_partner = pos[sorted.maps[i].d.dual_partner];
  }
  return sorted;
}

AppendixARow appendix_a_row(const Group& g, const GroupFamily& fam) {
  auto res = enumerate_maps(g, fam);
  long long formula = nu_formula(fam);
  if ((long long)res.maps.size() != formula)
    throw std::logic_error("enumerated count disagrees with the closed-form count");
  AppendixARow row;
  row.n = fam.valency();
  row.count = formula;
  row.min_genus = res.maps.front().d.genus;
  row.max_genus = res.maps.back().d.genus;
  for (const auto& m : res.maps) {
    row.min_genus = std::min(row.min_genus, m.d.genus);
    row.max_genus = std::max(row.max_genus, m.d.genus);
  }
  return row;
}

}  // namespace primmaps::asenum
