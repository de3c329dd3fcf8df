#include "primmaps/affine_oracle.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "primmaps/finite_field.hpp"
#include "primmaps/numtheory.hpp"

namespace primmaps::oracle {

using ff::FieldSpec;

namespace {

struct LinMatHash {
  size_t operator()(const LinMat& m) const {
    uint64_t h = 14695981039346656037ull ^ m.d;
    for (auto x : m.a) h = (h ^ x) * 1099511628211ull;
    return (size_t)h;
  }
};

struct AffElemHash {
  size_t operator()(const AffElem& x) const {
    uint64_t h = ((uint64_t)x.v << 16) | x.dih;
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    return (size_t)h;
  }
};

LinMat lin_identity(int d) {
  LinMat m;
  m.d = d;
  m.a.assign((size_t)d * d, 0);
  for (int i = 0; i < d; ++i) m.at(i, i) = 1;
  return m;
}

LinMat lin_mul(const LinMat& x, const LinMat& y, int p) {
  int d = x.d;
  LinMat r;
  r.d = d;
  r.a.assign((size_t)d * d, 0);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      int f = x.at(i, k);
      if (!f) continue;
      for (int j = 0; j < d; ++j)
        r.at(i, j) = (uint16_t)((r.at(i, j) + f * y.at(k, j)) % p);
    }
  return r;
}

int inv_mod(int a, int p) { return (int)nt::pow_mod(a, p - 2, p); }

LinMat lin_inverse(const LinMat& m, int p) {
  int d = m.d;
  std::vector<std::vector<int>> aug(d, std::vector<int>(2 * d, 0));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) aug[i][j] = m.at(i, j);
    aug[i][d + i] = 1;
  }
  for (int col = 0; col < d; ++col) {
    int piv = -1;
    for (int r = col; r < d && piv < 0; ++r)
      if (aug[r][col]) piv = r;
    if (piv < 0) throw std::logic_error("singular linear map");
    std::swap(aug[col], aug[piv]);
    int s = inv_mod(aug[col][col], p);
    for (int j = 0; j < 2 * d; ++j) aug[col][j] = aug[col][j] * s % p;
    for (int r = 0; r < d; ++r) {
      if (r == col || !aug[r][col]) continue;
      int f = aug[r][col];
      for (int j = 0; j < 2 * d; ++j)
        aug[r][j] = ((aug[r][j] - f * aug[col][j]) % p + p) % p;
    }
  }
  LinMat out;
  out.d = d;
  out.a.assign((size_t)d * d, 0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out.at(i, j) = (uint16_t)aug[i][d + j];
  return out;
}

// Row-reduce in place; returns rank.  Rows are length-d vectors mod p.
int gauss_rank(std::vector<std::vector<int>>& rows, int p) {
  int d = rows.empty() ? 0 : (int)rows[0].size();
  int rank = 0;
  for (int col = 0; col < d && rank < (int)rows.size(); ++col) {
    int piv = -1;
    for (int r = rank; r < (int)rows.size() && piv < 0; ++r)
      if (rows[r][col]) piv = r;
    if (piv < 0) continue;
    std::swap(rows[rank], rows[piv]);
    int s = inv_mod(rows[rank][col], p);
    for (int j = 0; j < d; ++j) rows[rank][j] = rows[rank][j] * s % p;
    for (int r = 0; r < (int)rows.size(); ++r) {
      if (r == rank || !rows[r][col]) continue;
      int f = rows[r][col];
      for (int j = 0; j < d; ++j)
        rows[r][j] = ((rows[r][j] - f * rows[rank][j]) % p + p) % p;
    }
    ++rank;
  }
  return rank;
}

// Solve A w = b (A given as stacked rows with the rhs appended); returns
// whether the system is consistent.
bool gauss_solvable(std::vector<std::vector<int>> rows, int p) {
  int cols = rows.empty() ? 0 : (int)rows[0].size();  // d + 1 with rhs last
  int d = cols - 1;
  int rank = 0;
  for (int col = 0; col < d && rank < (int)rows.size(); ++col) {
    int piv = -1;
    for (int r = rank; r < (int)rows.size() && piv < 0; ++r)
      if (rows[r][col]) piv = r;
    if (piv < 0) continue;
    std::swap(rows[rank], rows[piv]);
    int s = inv_mod(rows[rank][col], p);
    for (int j = 0; j < cols; ++j) rows[rank][j] = rows[rank][j] * s % p;
    for (int r = 0; r < (int)rows.size(); ++r) {
      if (r == rank || !rows[r][col]) continue;
      int f = rows[r][col];
      for (int j = 0; j < cols; ++j)
        rows[r][j] = ((rows[r][j] - f * rows[rank][j]) % p + p) % p;
    }
    ++rank;
  }
  for (int r = rank; r < (int)rows.size(); ++r)
    if (rows[r][d]) return false;
  return true;
}

// Nullspace basis of the stacked matrix (rows x d) over GF(p).
std::vector<std::vector<int>> nullspace(std::vector<std::vector<int>> rows, int p, int d) {
  int rank = 0;
  std::vector<int> pivot_col;
  for (int col = 0; col < d && rank < (int)rows.size(); ++col) {
    int piv = -1;
    for (int r = rank; r < (int)rows.size() && piv < 0; ++r)
      if (rows[r][col]) piv = r;
    if (piv < 0) continue;
    std::swap(rows[rank], rows[piv]);
    int s = inv_mod(rows[rank][col], p);
    for (int j = 0; j < d; ++j) rows[rank][j] = rows[rank][j] * s % p;
    for (int r = 0; r < (int)rows.size(); ++r) {
      if (r == rank || !rows[r][col]) continue;
      int f = rows[r][col];
      for (int j = 0; j < d; ++j)
        rows[r][j] = ((rows[r][j] - f * rows[rank][j]) % p + p) % p;
    }
    pivot_col.push_back(col);
    ++rank;
  }
  std::vector<std::vector<int>> basis;
  for (int col = 0; col < d; ++col) {
    if (std::find(pivot_col.begin(), pivot_col.end(), col) != pivot_col.end()) continue;
    std::vector<int> v(d, 0);
    v[col] = 1;
    for (int r = 0; r < rank; ++r)
      v[pivot_col[r]] = (p - rows[r][col]) % p;
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace

// ---------------------------------------------------------------------------
// Group construction

std::vector<int> AffineGroup::unpack(uint32_t v) const {
  std::vector<int> digits(d);
  for (int i = 0; i < d; ++i) {
    digits[i] = v % p;
    v /= (uint32_t)p;
  }
  return digits;
}

uint32_t AffineGroup::pack(const std::vector<int>& digits) const {
  uint32_t v = 0;
  for (int i = d - 1; i >= 0; --i) v = v * (uint32_t)p + (uint32_t)digits[i];
  return v;
}

uint32_t AffineGroup::add_v(uint32_t a, uint32_t b) const {
  if (p == 2) return a ^ b;
  uint32_t out = 0, mult = 1;
  for (int i = 0; i < d; ++i) {
    int s = (int)(a % p) + (int)(b % p);
    if (s >= p) s -= (int)p;
    out += (uint32_t)s * mult;
    a /= (uint32_t)p;
    b /= (uint32_t)p;
    mult *= (uint32_t)p;
  }
  return out;
}

uint32_t AffineGroup::neg_v(uint32_t a) const {
  if (p == 2) return a;
  uint32_t out = 0, mult = 1;
  for (int i = 0; i < d; ++i) {
    int dg = (int)(a % p);
    out += (uint32_t)(dg ? p - dg : 0) * mult;
    a /= (uint32_t)p;
    mult *= (uint32_t)p;
  }
  return out;
}

uint32_t AffineGroup::apply_lin(const LinMat& m, uint32_t v) const {
  auto digits = unpack(v);
  std::vector<int> out(d, 0);
  for (int j = 0; j < d; ++j) {
    int f = digits[j];
    if (!f) continue;
    for (int i = 0; i < d; ++i) out[i] = (out[i] + f * m.at(i, j)) % (int)p;
  }
  return pack(out);
}

int AffineGroup::dih_mul(int g, int h) const {
  int i1 = g % n, s1 = g / n, i2 = h % n, s2 = h / n;
  int i = (int)(((i1 + (s1 ? n - i2 : i2)) % n));
  return i + (int)n * (s1 ^ s2);
}

int AffineGroup::dih_inv(int g) const {
  int i = g % n, s = g / n;
  return s ? g : (int)((n - i) % n);
}

AffElem AffineGroup::mul(const AffElem& x, const AffElem& y) const {
  return AffElem{add_v(x.v, dih_act[x.dih][y.v]), (uint16_t)dih_mul(x.dih, y.dih)};
}

AffElem AffineGroup::inverse(const AffElem& x) const {
  int gi = dih_inv(x.dih);
  return AffElem{dih_act[gi][neg_v(x.v)], (uint16_t)gi};
}

long long AffineGroup::elem_order(const AffElem& x) const {
  AffElem y = x;
  long long cap = 4 * n * p + 8;
  for (long long k = 1; k <= cap; ++k) {
    if (is_identity(y)) return k;
    y = mul(y, x);
  }
  throw std::logic_error("affine element order exceeded its bound");
}

int AffineGroup::pi_dih(const LinAut& a, int g) const {
  int i = g % n, s = g / n;
  long long im = ((long long)a.rot_image * i) % n;
  if (s) im = (im + a.ref_image) % n;
  return (int)im + (int)n * s;
}

std::shared_ptr<const AffineGroup> AffineGroup::build(long long p, long long n,
                                                      long long vbound) {
  auto rec = affine::classify(p, n);
  if (!rec) throw std::invalid_argument("build_affine_group: inadmissible (p, n)");
  auto g = std::shared_ptr<AffineGroup>(new AffineGroup());
  g->p = p;
  g->n = n;
  g->e = rec->e;
  g->d = rec->d;
  g->caseA = rec->caseA;
  long long vsize = 1;
  for (int i = 0; i < g->d; ++i) {
    vsize *= p;
    if (vsize > vbound)
      throw std::invalid_argument("build_affine_group: p^d exceeds the bound");
  }
  g->vsize = vsize;
  g->order = 2 * n * vsize;

  int d = (int)g->d;
  LinMat A, B;
  std::vector<LinMat> extra_gens;

  if (g->caseA) {
    auto F = FieldSpec::make((int)p, d);
    uint32_t zeta = F->element_of_order(n);
    auto mult_mat = [&](uint32_t u) {
      LinMat m;
      m.d = d;
      m.a.assign((size_t)d * d, 0);
      uint32_t basis = 1;
      for (int j = 0; j < d; ++j) {
        uint32_t img = F->mul(u, basis);
        for (int i = 0; i < d; ++i) {
          m.at(i, j) = (uint16_t)(img % p);
          img /= (uint32_t)p;
        }
        basis *= (uint32_t)p;
      }
      return m;
    };
    auto frob_mat = [&](int k) {
      LinMat m;
      m.d = d;
      m.a.assign((size_t)d * d, 0);
      uint32_t basis = 1;
      for (int j = 0; j < d; ++j) {
        uint32_t img = F->frobenius(basis, k);
        for (int i = 0; i < d; ++i) {
          m.at(i, j) = (uint16_t)(img % p);
          img /= (uint32_t)p;
        }
        basis *= (uint32_t)p;
      }
      return m;
    };
    A = mult_mat(zeta);
    B = frob_mat((int)g->e);
    if (g->e < d) extra_gens.push_back(frob_mat(1));
    // Units u with u^(1 - p^e) in <zeta> normalize the dihedral action; they
    // form a cyclic subgroup, generated by the smallest power of a primitive
    // element that qualifies.
    uint32_t gamma = F->primitive_element();
    uint32_t u = gamma;
    for (long long t = 1; t < F->q(); ++t) {
      uint32_t w = F->mul(u, F->inv(F->frobenius(u, (int)g->e)));
      if (w == F->one() || n % F->order(w) == 0) {
        extra_gens.push_back(mult_mat(u));
        break;
      }
      u = F->mul(u, gamma);
    }
  } else {
    auto Fe = FieldSpec::make((int)p, (int)g->e);
    uint32_t zeta = Fe->element_of_order(n);
    int eh = (int)g->e;
    auto block_mat = [&](uint32_t u0, uint32_t u1, int frob_k, bool swap) {
      // (x, y) -> (u0 * x^(p^k), u1 * y^(p^k)), then optionally swap blocks.
      LinMat m;
      m.d = d;
      m.a.assign((size_t)d * d, 0);
      for (int blk = 0; blk < 2; ++blk) {
        uint32_t mult = blk == 0 ? u0 : u1;
        int out_blk = swap ? 1 - blk : blk;
        uint32_t basis = 1;
        for (int j = 0; j < eh; ++j) {
          uint32_t img = Fe->mul(mult, Fe->frobenius(basis, frob_k));
          for (int i = 0; i < eh; ++i) {
            m.at(out_blk * eh + i, blk * eh + j) = (uint16_t)(img % p);
            img /= (uint32_t)p;
          }
          basis *= (uint32_t)p;
        }
      }
      return m;
    };
    A = block_mat(zeta, Fe->inv(zeta), 0, false);
    B = block_mat(Fe->one(), Fe->one(), 0, true);
    uint32_t gamma = Fe->primitive_element();
    extra_gens.push_back(block_mat(gamma, gamma, 0, false));
    extra_gens.push_back(block_mat(Fe->one(), zeta, 0, false));
    if (g->e > 1) extra_gens.push_back(block_mat(Fe->one(), Fe->one(), 1, false));
  }

  // Dihedral matrices and fast action tables.
  g->dih_mat.resize(2 * n);
  g->dih_mat[0] = lin_identity(d);
  for (int i = 1; i < n; ++i) g->dih_mat[i] = lin_mul(g->dih_mat[i - 1], A, (int)p);
  for (int i = 0; i < n; ++i) g->dih_mat[n + i] = lin_mul(g->dih_mat[i], B, (int)p);
  {
    std::unordered_set<LinMat, LinMatHash> distinct(g->dih_mat.begin(), g->dih_mat.end());
    if ((long long)distinct.size() != 2 * n)
      throw std::logic_error("dihedral action is not faithful");
  }
  if (lin_mul(B, B, (int)p) != lin_identity(d))
    throw std::logic_error("b does not square to the identity");
  if (lin_mul(lin_mul(B, A, (int)p), B, (int)p) != lin_inverse(A, (int)p))
    throw std::logic_error("b does not invert a");

  std::vector<uint32_t> a_tab(vsize), b_tab(vsize);
  for (long long v = 0; v < vsize; ++v) {
    a_tab[v] = g->apply_lin(A, (uint32_t)v);
    b_tab[v] = g->apply_lin(B, (uint32_t)v);
  }
  g->dih_act.assign(2 * n, {});
  g->dih_act[0].resize(vsize);
  std::iota(g->dih_act[0].begin(), g->dih_act[0].end(), 0);
  for (int i = 1; i < n; ++i) {
    g->dih_act[i].resize(vsize);
    for (long long v = 0; v < vsize; ++v) g->dih_act[i][v] = a_tab[g->dih_act[i - 1][v]];
  }
  for (int i = 0; i < n; ++i) {
    g->dih_act[n + i].resize(vsize);
    for (long long v = 0; v < vsize; ++v) g->dih_act[n + i][v] = g->dih_act[i][b_tab[v]];
  }

  // Irreducibility of the D-action: every nonzero vector must generate V as a
  // D-module.  Exhaustive at small sizes, structural otherwise (the field
  // generated by the rotation eigenvalue already has the right degree, and
  // the reflection swaps the two halves in case B).
  auto orbit_rank = [&](uint32_t v) {
    std::vector<std::vector<int>> rows;
    for (int k = 0; k < 2 * n; ++k) rows.push_back(g->unpack(g->dih_act[k][v]));
    return gauss_rank(rows, (int)p);
  };
  if (vsize <= 20000) {
    for (long long v = 1; v < vsize; ++v)
      if (orbit_rank((uint32_t)v) != d)
        throw std::logic_error("dihedral action is reducible");
  } else {
    long long expected = g->caseA ? g->d : g->e;
    if (nt::mult_order(p, n) != expected)
      throw std::logic_error("rotation eigenvalue generates the wrong field");
    if (orbit_rank(1) != d) throw std::logic_error("dihedral action is reducible");
  }

  // Full linear normalizer of the dihedral action.
  std::vector<LinMat> lam_gens{A, B};
  for (auto& m : extra_gens) lam_gens.push_back(m);
  std::unordered_map<LinMat, int, LinMatHash> seen;
  std::vector<LinMat> lam{lin_identity(d)};
  seen[lam[0]] = 0;
  std::unordered_map<LinMat, int, LinMatHash> dih_index;
  for (int k = 0; k < 2 * n; ++k) dih_index[g->dih_mat[k]] = k;
  for (size_t head = 0; head < lam.size(); ++head) {
    LinMat cur = lam[head];
    for (const auto& s : lam_gens) {
      LinMat nxt = lin_mul(s, cur, (int)p);
      if (!seen.count(nxt)) {
        if (lam.size() > 2000000) throw std::logic_error("normalizer closure too large");
        seen[nxt] = (int)lam.size();
        lam.push_back(nxt);
      }
    }
  }
  for (const auto& L : lam) {
    LinMat Li = lin_inverse(L, (int)p);
    LinMat ca = lin_mul(L, lin_mul(A, Li, (int)p), (int)p);
    LinMat cb = lin_mul(L, lin_mul(B, Li, (int)p), (int)p);
    auto ia = dih_index.find(ca);
    auto ib = dih_index.find(cb);
    if (ia == dih_index.end() || ib == dih_index.end())
      throw std::logic_error("normalizer generator leaves the dihedral group");
    if (ia->second >= n || ib->second < n)
      throw std::logic_error("normalizer image has the wrong shape");
    AffineGroup::LinAut aut;
    aut.L = L;
    aut.rot_image = ia->second;
    aut.ref_image = ib->second - (int)n;
    aut.kernel = (aut.rot_image == 1 && aut.ref_image == 0);
    g->lambda_.push_back(aut);
    if (aut.kernel) g->lambda_kernel_.push_back((int)g->lambda_.size() - 1);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

// Existence of an automorphism tau_w . lambda sending src componentwise to
// dst; both triples are given as explicit group elements.
bool iso_search(const AffineGroup& g, const std::array<AffElem, 3>& src,
                const std::array<AffElem, 3>& dst) {
  int d = (int)g.d;
  for (const auto& aut : g.normalizer()) {
    bool dih_ok = true;
    for (int i = 0; i < 3 && dih_ok; ++i)
      dih_ok = (g.pi_dih(aut, src[i].dih) == dst[i].dih);
    if (!dih_ok) continue;
    // Stack (I - M_pi(h_i)) w = dst_i.v - L src_i.v over GF(p).
    std::vector<std::vector<int>> rows;
    for (int i = 0; i < 3; ++i) {
      const LinMat& M = g.dih_mat[g.pi_dih(aut, src[i].dih)];
      uint32_t rhs = g.add_v(dst[i].v, g.neg_v(g.apply_lin(aut.L, src[i].v)));
      auto rhs_digits = g.unpack(rhs);
      for (int r = 0; r < d; ++r) {
        std::vector<int> row(d + 1, 0);
        for (int c = 0; c < d; ++c)
          row[c] = ((r == c ? 1 : 0) - M.at(r, c) % (int)g.p + (int)g.p) % (int)g.p;
        row[d] = rhs_digits[r];
        rows.push_back(std::move(row));
      }
    }
    if (gauss_solvable(std::move(rows), (int)g.p)) return true;
  }
  return false;
}

}  // namespace

bool oracle_self_dual(const AffineGroup& g, const AffTriple& t) {
  AffElem e1{0, t.r1}, e2{0, t.r2};
  return iso_search(g, {t.r0, e1, e2}, {e2, e1, t.r0});
}

AffineEnumResult enumerate_affine_maps(const AffineGroup& g) {
  long long n = g.n;
  const auto& lambda = g.normalizer();
  const auto& kernel = g.normalizer_kernel();

  // Orbits of generating reflection pairs (r1, r2) under the normalizer.
  auto pid = [&](int i, int j) { return i * (int)n + j; };
  std::vector<int> orbit_rep(n * n, -1);
  std::vector<std::pair<int, int>> reps;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (std::gcd((long long)((i - j + n) % n), n) != 1) continue;
      if (orbit_rep[pid(i, j)] >= 0) continue;
      reps.push_back({i, j});
      std::vector<int> stack{pid(i, j)};
      orbit_rep[pid(i, j)] = pid(i, j);
      while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        int ci = cur / (int)n, cj = cur % (int)n;
        for (const auto& aut : lambda) {
          int ni = g.pi_dih(aut, (int)n + ci) - (int)n;
          int nj = g.pi_dih(aut, (int)n + cj) - (int)n;
          if (orbit_rep[pid(ni, nj)] < 0) {
            orbit_rep[pid(ni, nj)] = pid(i, j);
            stack.push_back(pid(ni, nj));
          }
        }
      }
    }

  long long pe = 1;
  for (long long i = 0; i < g.e; ++i) pe *= g.p;

  struct Produced {
    AffTriple t;
    maps::MapDescriptor desc;
    int bucket;
    AffElem rep;
  };
  std::vector<Produced> produced;
  std::vector<std::unordered_map<AffElem, AffElem, AffElemHash>> bucket_rep(reps.size());

  for (size_t b = 0; b < reps.size(); ++b) {
    int r1 = (int)n + reps[b].first, r2 = (int)n + reps[b].second;
    // r0 = (v, k) with k an involution (or identity) commuting with r2,
    // k(v) = -v, r2(v) = v, v != 0.
    std::vector<AffElem> cands;
    for (int k = 0; k < 2 * n; ++k) {
      if (g.dih_mul(k, k) != 0) continue;
      if (g.dih_mul(k, r2) != g.dih_mul(r2, k)) continue;
      std::vector<std::vector<int>> rows;
      int d = (int)g.d, p = (int)g.p;
      const LinMat& Mk = g.dih_mat[k];
      const LinMat& M2 = g.dih_mat[r2];
      for (int r = 0; r < d; ++r) {
        std::vector<int> row(d);
        for (int c = 0; c < d; ++c) row[c] = (Mk.at(r, c) + (r == c ? 1 : 0)) % p;
        rows.push_back(std::move(row));
      }
      for (int r = 0; r < d; ++r) {
        std::vector<int> row(d);
        for (int c = 0; c < d; ++c) row[c] = ((M2.at(r, c) - (r == c ? 1 : 0)) % p + p) % p;
        rows.push_back(std::move(row));
      }
      auto basis = nullspace(std::move(rows), p, d);
      if (basis.empty()) continue;
      // Enumerate the full solution space.
      long long total = 1;
      for (size_t i = 0; i < basis.size(); ++i) total *= p;
      for (long long idx = 1; idx < total; ++idx) {
        long long rem = idx;
        std::vector<int> v(d, 0);
        for (const auto& bv : basis) {
          int c = (int)(rem % p);
          rem /= p;
          if (c)
            for (int r = 0; r < d; ++r) v[r] = (v[r] + c * bv[r]) % p;
        }
        uint32_t packed = g.pack(v);
        if (packed != 0) cands.push_back(AffElem{packed, (uint16_t)k});
      }
    }
    std::sort(cands.begin(), cands.end(), [](const AffElem& x, const AffElem& y) {
      return std::tie(x.dih, x.v) < std::tie(y.dih, y.v);
    });
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    if ((long long)cands.size() != 2 * (pe - 1))
      throw std::logic_error("candidate count disagrees with the fixed-space structure");

    auto& rep_of = bucket_rep[b];
    for (const AffElem& x : cands) {
      if (rep_of.count(x)) continue;
      std::vector<AffElem> orbit{x};
      rep_of[x] = x;
      for (size_t head = 0; head < orbit.size(); ++head)
        for (int ki : kernel) {
          AffElem y{g.apply_lin(lambda[ki].L, orbit[head].v), orbit[head].dih};
          if (!rep_of.count(y)) {
            rep_of[y] = x;
            orbit.push_back(y);
          }
        }

      AffTriple t{x, (uint16_t)r1, (uint16_t)r2};
      // Generation: the dihedral orbit of the translation part must span V.
      std::vector<std::vector<int>> rows;
      for (int k = 0; k < 2 * n; ++k) rows.push_back(g.unpack(g.dih_act[k][x.v]));
      if (gauss_rank(rows, (int)g.p) != g.d)
        throw std::logic_error("triple does not generate the group");
      if (g.order <= 100000) {
        std::unordered_set<AffElem, AffElemHash> closure;
        std::deque<AffElem> queue;
        AffElem id{0, 0};
        closure.insert(id);
        queue.push_back(id);
        std::array<AffElem, 3> gens{x, AffElem{0, (uint16_t)r1}, AffElem{0, (uint16_t)r2}};
        while (!queue.empty()) {
          AffElem cur = queue.front();
          queue.pop_front();
          for (const auto& s : gens) {
            AffElem nx = g.mul(cur, s);
            if (closure.insert(nx).second) queue.push_back(nx);
          }
        }
        if ((long long)closure.size() != g.order)
          throw std::logic_error("closure of the triple misses part of the group");
      }

      AffElem a1{0, (uint16_t)r1}, a2{0, (uint16_t)r2};
      long long nn = g.elem_order(g.mul(a1, a2));
      if (nn != n) throw std::logic_error("vertex valency mismatch");
      long long m = g.elem_order(g.mul(x, a1));
      long long l = g.elem_order(g.mul(g.mul(x, a1), a2));
      bool ori = x.dih >= n;  // reflection part: all three generators odd
      produced.push_back({t, maps::descriptor_from(g.order, n, m, l, ori), (int)b, x});
    }
  }

  // Safety-net sweep within equal extended types.
  std::vector<int> redirect(produced.size());
  std::iota(redirect.begin(), redirect.end(), 0);
  for (size_t i = 0; i < produced.size(); ++i) {
    if (redirect[i] != (int)i) continue;
    for (size_t j = i + 1; j < produced.size(); ++j) {
      if (redirect[j] != (int)j) continue;
      if (produced[i].desc.m != produced[j].desc.m || produced[i].desc.l != produced[j].desc.l)
        continue;
      std::array<AffElem, 3> si{produced[j].t.r0, AffElem{0, produced[j].t.r1},
                                AffElem{0, produced[j].t.r2}};
      std::array<AffElem, 3> di{produced[i].t.r0, AffElem{0, produced[i].t.r1},
                                AffElem{0, produced[i].t.r2}};
      if (iso_search(g, si, di)) redirect[j] = (int)i;
    }
  }

  std::vector<int> compact(produced.size(), -1);
  std::vector<int> surviving;
  for (size_t i = 0; i < produced.size(); ++i)
    if (redirect[i] == (int)i) {
      compact[i] = (int)surviving.size();
      surviving.push_back((int)i);
    }

  AffineEnumResult out;
  for (int idx : surviving) out.maps.push_back({produced[idx].t, produced[idx].desc});
  out.petrie_pairing.assign(surviving.size(), -1);
  auto find_map = [&](int bucket, const AffElem& rep) {
    for (size_t i = 0; i < produced.size(); ++i)
      if (produced[i].bucket == bucket && produced[i].rep == rep)
        return compact[redirect[i]];
    throw std::logic_error("Petrie partner missing from its bucket");
  };
  for (size_t si = 0; si < surviving.size(); ++si) {
    const auto& pr = produced[surviving[si]];
    AffElem r0p = g.mul(pr.t.r0, AffElem{0, pr.t.r2});
    out.petrie_pairing[si] = find_map(pr.bucket, bucket_rep[pr.bucket].at(r0p));
  }
  for (size_t i = 0; i < out.petrie_pairing.size(); ++i) {
    int j = out.petrie_pairing[i];
    if (j < 0 || out.petrie_pairing[j] != (int)i)
      throw std::logic_error("Petrie pairing is not an involution");
    out.maps[i].desc.petrie_partner = j;
    out.maps[i].desc.self_petrie = (j == (int)i);
  }

  std::vector<int> order_idx(out.maps.size());
  std::iota(order_idx.begin(), order_idx.end(), 0);
  std::stable_sort(order_idx.begin(), order_idx.end(), [&](int a, int b) {
    const auto& da = out.maps[a].desc;
    const auto& db = out.maps[b].desc;
    return std::tie(da.orientable, da.genus, da.m, da.l) >
           std::tie(db.orientable, db.genus, db.m, db.l);
  });
  std::vector<int> pos(out.maps.size());
  for (size_t i = 0; i < order_idx.size(); ++i) pos[order_idx[i]] = (int)i;
  AffineEnumResult sorted;
  sorted.maps.resize(out.maps.size());
  sorted.petrie_pairing.resize(out.maps.size());
  for (size_t i = 0; i < order_idx.size(); ++i) {
    sorted.maps[i] = out.maps[order_idx[i]];
    sorted.petrie_pairing[i] = pos[out.petrie_pairing[order_idx[i]]];
    sorted.maps[i].desc.petrie_partner = sorted.petrie_pairing[i];
  }
  return sorted;
}

// ---------------------------------------------------------------------------
// Verification against the closed forms

VerifyReport verify_against_theory(long long p, long long n, long long vbound) {
  VerifyReport rep;
  rep.p = p;
  rep.n = n;
  auto rec_opt = affine::classify(p, n);
  if (!rec_opt) {
    rep.failures.push_back("(p, n) is inadmissible");
    return rep;
  }
  const auto& rec = *rec_opt;
  auto g = AffineGroup::build(p, n, vbound);
  auto res = enumerate_affine_maps(*g);

  auto fail = [&](const std::string& s) { rep.failures.push_back(s); };

  rep.expected_maps = 2 * rec.pair_count;
  rep.found_maps = (long long)res.maps.size();
  if (rep.found_maps != rep.expected_maps)
    fail("map count " + std::to_string(rep.found_maps) + " != 2*phi(n)/d = " +
         std::to_string(rep.expected_maps));

  long long orient = 0;
  for (const auto& m : res.maps) orient += m.desc.orientable ? 1 : 0;
  if (2 * orient != rep.found_maps) fail("orientable maps are not exactly half");

  for (size_t i = 0; i < res.maps.size(); ++i) {
    const auto& m = res.maps[i];
    int j = res.petrie_pairing[i];
    if (res.maps[j].desc.orientable == m.desc.orientable)
      fail("Petrie partner has the same orientability");
    const auto want_type = m.desc.orientable ? rec.mplus_type : rec.mminus_type;
    long long want_genus = m.desc.orientable ? rec.mplus_genus : rec.mminus_genus;
    if (affine::TypeTriple{m.desc.m, m.desc.n, m.desc.l} != want_type)
      fail("extended type mismatch at map " + std::to_string(i));
    if (m.desc.genus != want_genus)
      fail("genus mismatch at map " + std::to_string(i) + ": " +
           std::to_string(m.desc.genus) + " != " + std::to_string(want_genus));
    // Structural form of r0.
    int k = m.t.r0.dih;
    if (m.desc.orientable) {
      int want = (n % 2 == 0) ? g->dih_mul(m.t.r2, (int)n / 2) : (int)m.t.r2;
      if (k != want) fail("orientable r0 has unexpected dihedral part");
    } else {
      int want = (n % 2 == 0) ? (int)n / 2 : 0;
      if (k != want) fail("non-orientable r0 has unexpected dihedral part");
    }
    if (m.desc.orientable) {
      bool sd = oracle_self_dual(*g, m.t);
      if (sd != rec.self_dual)
        fail("self-duality mismatch at map " + std::to_string(i));
    }
  }
  rep.pass = rep.failures.empty();
  return rep;
}

// ---------------------------------------------------------------------------
// Generalised Paley graphs

PaleyGraph generalized_paley_graph(long long q, long long n) {
  auto f = nt::factorize(q);
  if (f.size() != 1) throw std::invalid_argument("paley: q must be a prime power");
  int p = (int)f[0].first, k = f[0].second;
  if (n < 1 || (q - 1) % n != 0) throw std::invalid_argument("paley: n must divide q-1");
  auto F = FieldSpec::make(p, k);
  uint32_t s0 = F->element_of_order(n);
  std::vector<uint32_t> S;
  uint32_t x = s0;
  for (long long i = 0; i < n; ++i) {
    S.push_back(x);
    x = F->mul(x, s0);
  }
  std::unordered_set<uint32_t> sset(S.begin(), S.end());
  for (uint32_t s : S)
    if (!sset.count(F->neg(s)))
      throw std::invalid_argument("paley: connection set is not symmetric (need even n or p = 2)");
  if (nt::mult_order(p, n) != k)
    throw std::invalid_argument("paley: the connection set does not span GF(q) over GF(p)");
  PaleyGraph graph;
  graph.q = q;
  graph.n = n;
  graph.adj.assign(q, {});
  for (long long v = 0; v < q; ++v) {
    for (uint32_t s : S) graph.adj[v].push_back((int)F->add((uint32_t)v, s));
    std::sort(graph.adj[v].begin(), graph.adj[v].end());
  }
  return graph;
}

// ---------------------------------------------------------------------------
// Case-B quotients

namespace {

// Elements (y, a^r) of GF(p^e) x| C_n with a acting as multiplication by act.
struct CyclicAffine {
  const FieldSpec* F;
  uint32_t act;
  long long n;
  using Elt = std::pair<uint32_t, int>;
  Elt id() const { return {0, 0}; }
  Elt mul(const Elt& x, const Elt& y) const {
    uint32_t scale = F->pow(act, x.second);
    return {F->add(x.first, F->mul(scale, y.first)), (int)((x.second + y.second) % n)};
  }
  Elt inv(const Elt& x) const {
    int r = (int)((n - x.second) % n);
    uint32_t scale = F->pow(act, r);
    return {F->neg(F->mul(scale, x.first)), r};
  }
};

// Does mapping gens0 -> gens1 extend to a group isomorphism?  BFS over words
// with conflict detection; exact for finite groups.
bool words_isomorphic(const CyclicAffine& g0, const CyclicAffine& g1,
                      std::array<CyclicAffine::Elt, 2> gens0,
                      std::array<CyclicAffine::Elt, 2> gens1, long long expected_size) {
  struct H {
    size_t operator()(const std::pair<uint32_t, int>& x) const {
      return std::hash<uint64_t>()(((uint64_t)x.first << 20) | (uint32_t)x.second);
    }
  };
  std::unordered_map<CyclicAffine::Elt, CyclicAffine::Elt, H> image;
  std::deque<CyclicAffine::Elt> queue;
  image[g0.id()] = g1.id();
  queue.push_back(g0.id());
  std::unordered_set<CyclicAffine::Elt, H> image_set{g1.id()};
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    auto img = image[cur];
    for (int k = 0; k < 2; ++k) {
      auto nxt = g0.mul(cur, gens0[k]);
      auto nimg = g1.mul(img, gens1[k]);
      auto it = image.find(nxt);
      if (it != image.end()) {
        if (it->second != nimg) return false;
      } else {
        image[nxt] = nimg;
        image_set.insert(nimg);
        queue.push_back(nxt);
      }
    }
  }
  return (long long)image.size() == expected_size &&
         (long long)image_set.size() == expected_size;
}

}  // namespace

QuotientCheck case_b_quotients(const AffineGroup& g, const AffTriple& t) {
  QuotientCheck qc;
  auto fail = [&](const std::string& s) { qc.failures.push_back(s); };
  if (g.caseA) {
    fail("quotient check requires case B");
    return qc;
  }
  int eh = (int)g.e, p = (int)g.p;
  auto Fe = FieldSpec::make(p, eh);
  long long pe = Fe->q();
  uint32_t zeta = Fe->element_of_order(g.n);

  // V0 = {(x, 0)}, V1 = {(0, y)}: a preserves both, b swaps them, and both
  // are normal in G+ = V x| <a>.
  auto split = [&](uint32_t v) {
    uint32_t x = 0, y = 0, mult = 1;
    for (int i = 0; i < eh; ++i) {
      x += (uint32_t)(v % p) * mult;
      v /= (uint32_t)p;
      mult *= (uint32_t)p;
    }
    mult = 1;
    for (int i = 0; i < eh; ++i) {
      y += (uint32_t)(v % p) * mult;
      v /= (uint32_t)p;
      mult *= (uint32_t)p;
    }
    return std::pair<uint32_t, uint32_t>{x, y};
  };
  {
    // a-action block structure: V0 scales by zeta, V1 by zeta^-1.
    auto [x1, y1] = split(g.dih_act[1][g.pack([&] {
      std::vector<int> dig(g.d, 0);
      dig[0] = 1;
      return dig;
    }())]);
    if (y1 != 0) fail("V0 is not a-invariant");
    auto [x2, y2] = split(g.dih_act[1][g.pack([&] {
      std::vector<int> dig(g.d, 0);
      dig[eh] = 1;
      return dig;
    }())]);
    if (x2 != 0) fail("V1 is not a-invariant");
    auto [x3, y3] = split(g.dih_act[g.n][g.pack([&] {
      std::vector<int> dig(g.d, 0);
      dig[0] = 1;
      return dig;
    }())]);
    if (x3 != 0 || y3 == 0) fail("b does not swap the two summands");
    (void)x1;
    (void)y2;
  }

  // Images of the rotation pair (x, y) = (r1 r2, r0 r1) in G+/V_i.
  AffElem xbar = g.mul(AffElem{0, t.r1}, AffElem{0, t.r2});
  AffElem ybar = g.mul(t.r0, AffElem{0, t.r1});
  if (xbar.dih >= g.n || ybar.dih >= g.n) {
    fail("rotation images are not in G+");
    return qc;
  }
  auto [xv0, xv1] = split(xbar.v);
  auto [yv0, yv1] = split(ybar.v);

  // Quotient by V0 keeps the V1 coordinate (a acts by zeta^-1); quotient by
  // V1 keeps V0 (a acts by zeta).
  CyclicAffine q0{Fe.get(), Fe->inv(zeta), g.n};
  CyclicAffine q1{Fe.get(), zeta, g.n};
  CyclicAffine::Elt x0{xv1, (int)xbar.dih}, y0{yv1, (int)ybar.dih};
  CyclicAffine::Elt x1{xv0, (int)xbar.dih}, y1{yv0, (int)ybar.dih};

  qc.quotient_order = g.n * pe;
  qc.quotient_vertices = pe;

  // Valency: order of the rotation image.
  auto elt_order = [&](const CyclicAffine& qq, CyclicAffine::Elt x) {
    auto y = x;
    long long k = 1;
    while (!(y == qq.id())) {
      y = qq.mul(y, x);
      if (++k > 4 * g.n * p) throw std::logic_error("quotient order bound exceeded");
    }
    return k;
  };
  qc.quotient_valency = elt_order(q0, x0);
  if (qc.quotient_valency != g.n) fail("quotient valency is not n");
  if (elt_order(q1, x1) != g.n) fail("second quotient valency is not n");

  // The neighbor set of vertex 0 must be a coset of the order-n subgroup,
  // i.e. the quotient embeds a generalised Paley graph.
  for (int which = 0; which < 2; ++which) {
    const CyclicAffine& qq = which ? q1 : q0;
    auto xx = which ? x1 : x0;
    auto yy = which ? y1 : y0;
    std::unordered_set<uint32_t> nbrs;
    auto cur = yy;
    for (long long j = 0; j < g.n; ++j) {
      nbrs.insert(cur.first);
      cur = qq.mul(xx, cur);
    }
    if ((long long)nbrs.size() != g.n) {
      fail("neighbor set has the wrong size");
      continue;
    }
    uint32_t base = *nbrs.begin();
    std::unordered_set<uint32_t> scaled;
    for (uint32_t v : nbrs) scaled.insert(Fe->mul(v, Fe->inv(base)));
    std::unordered_set<uint32_t> subgroup;
    uint32_t z = Fe->one();
    for (long long j = 0; j < g.n; ++j) {
      subgroup.insert(z);
      z = Fe->mul(z, zeta);
    }
    if (scaled != subgroup) fail("neighbor set is not a coset of the order-n subgroup");
  }

  // Mirror pair: Q1 with (x1, y1) is isomorphic to Q0 with (x0^-1, y0^-1),
  // and the two quotients are not isomorphic as oriented maps (chirality).
  qc.mirror_pair = words_isomorphic(q1, q0, {x1, y1}, {q0.inv(x0), q0.inv(y0)},
                                    qc.quotient_order);
  if (!qc.mirror_pair) fail("quotients are not mirror images");
  qc.chiral = !words_isomorphic(q0, q1, {x0, y0}, {x1, y1}, qc.quotient_order);
  if (!qc.chiral) fail("quotients are isomorphic as oriented maps (not chiral)");

  qc.pass = qc.failures.empty();
  return qc;
}

}  // namespace primmaps::oracle
