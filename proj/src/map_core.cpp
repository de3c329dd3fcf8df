#include "primmaps/map_core.hpp"

#include <stdexcept>

namespace primmaps::maps {

using mg::FamilyTag;
using mg::Group;
using mg::Mat;

bool triple_valid(const Group& g, const GeneratingTriple& t) {
  return g.is_involution(t.r0) && g.is_involution(t.r1) && g.is_involution(t.r2) &&
         g.commute(t.r0, t.r2);
}

bool orientable(const Group& g, const GeneratingTriple& t) {
  switch (g.tag) {
    case FamilyTag::PSL2:
    case FamilyTag::SL2_even:
    case FamilyTag::Sz:
      return false;  // simple, no index-2 subgroup
    case FamilyTag::PGL2:
      // Orientable iff every generator avoids the unique index-2 subgroup
      // PSL2(q), i.e. all three have nonsquare determinant class.
      return g.det_class(t.r0) == 1 && g.det_class(t.r1) == 1 && g.det_class(t.r2) == 1;
  }
  return false;
}

bool orientable_generic(const Group& g, const GeneratingTriple& t) {
  Mat a = g.mul(t.r0, t.r1), b = g.mul(t.r1, t.r2);
  std::vector<Mat> gens{a, b};
  auto h = mg::bfs_closure(g, gens, g.order);
  if (2 * (long long)h.size() != g.order) return false;
  return !h.count(t.r0) && !h.count(t.r1) && !h.count(t.r2);
}

MapDescriptor descriptor_from(long long group_order, long long n, long long m,
                              long long l, bool orientable) {
  MapDescriptor d;
  d.n = n;
  d.m = m;
  d.l = l;
  d.orientable = orientable;
  // chi = |G|/2 * (1/n - 1/2 + 1/m) = |G| * (2m - nm + 2n) / (4nm)
  __int128 num = (__int128)group_order * (2 * m - n * m + 2 * n);
  long long den = 4 * n * m;
  if (num % den != 0) throw std::logic_error("non-integral Euler characteristic");
  __int128 chi = num / den;
  d.euler = (long long)chi;
  if (orientable) {
    if (d.euler % 2 != 0) throw std::logic_error("orientable map with odd Euler characteristic");
    d.genus = 1 - d.euler / 2;
  } else {
    d.genus = 2 - d.euler;
  }
  if (d.genus < 0) throw std::logic_error("negative genus");
  if (group_order % (2 * n) != 0) throw std::logic_error("vertex count is not integral");
  d.vertex_count = group_order / (2 * n);
  return d;
}

MapDescriptor describe(const Group& g, const GeneratingTriple& t) {
  if (!triple_valid(g, t)) throw std::invalid_argument("describe: invalid generating triple");
  long long n = g.elem_order(g.mul(t.r1, t.r2));
  long long m = g.elem_order(g.mul(t.r0, t.r1));
  long long l = g.elem_order(g.mul(g.mul(t.r0, t.r1), t.r2));
  return descriptor_from(g.order, n, m, l, orientable(g, t));
}

GeneratingTriple dual(const GeneratingTriple& t) { return {t.r2, t.r1, t.r0}; }

GeneratingTriple petrie_dual(const Group& g, const GeneratingTriple& t) {
  return {g.mul(t.r0, t.r2), t.r1, t.r2};
}

bool isomorphic(const Group& g, const GeneratingTriple& t1,
                const GeneratingTriple& t2, const mg::AutAction& aut) {
  for (const auto& omega : aut.outer_coset_reps) {
    GeneratingTriple u{g.apply(omega, t1.r0), g.apply(omega, t1.r1), g.apply(omega, t1.r2)};
    int c1 = g.involution_class_of(u.r1);
    if (c1 != g.involution_class_of(t2.r1)) continue;
    // Solutions of h u.r1 h^-1 = t2.r1 form the coset T(t2.r1) C(base) T(u.r1)^-1.
    Mat a = g.transporter(t2.r1);
    Mat b = g.inverse(g.transporter(u.r1));
    for (const Mat& c : g.base_centralizer(c1)) {
      Mat h = g.mul(a, g.mul(c, b));
      Mat hi = g.inverse(h);
      if (g.mul(h, g.mul(u.r0, hi)) != t2.r0) continue;
      if (g.mul(h, g.mul(u.r2, hi)) != t2.r2) continue;
      return true;
    }
  }
  return false;
}

}  // namespace primmaps::maps
