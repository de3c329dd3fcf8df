#include "primmaps/matrix_groups.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "primmaps/numtheory.hpp"

namespace primmaps::mg {

namespace {

// q = p^e with p prime, or throws.
std::pair<int, int> split_prime_power(long long q) {
  if (q < 2) throw std::invalid_argument("q must be a prime power");
  auto f = nt::factorize(q);
  if (f.size() != 1) throw std::invalid_argument("q must be a prime power");
  return {(int)f[0].first, f[0].second};
}

long long env_group_bound() {
  static long long bound = [] {
    if (const char* s = std::getenv("PRIMMAPS_MAX_GROUP_ORDER")) {
      long long v = std::atoll(s);
      if (v > 0) return v;
    }
    return 200000LL;
  }();
  return bound;
}

}  // namespace

std::string to_string(FamilyTag t) {
  switch (t) {
    case FamilyTag::PSL2: return "psl2";
    case FamilyTag::PGL2: return "pgl2";
    case FamilyTag::SL2_even: return "sl2";
    case FamilyTag::Sz: return "sz";
  }
  return "?";
}

GroupFamily GroupFamily::make(FamilyTag tag, long long q, Torus torus) {
  auto [p, e] = split_prime_power(q);
  switch (tag) {
    case FamilyTag::PSL2:
      if (p == 2) throw std::invalid_argument("psl2 requires odd q (use sl2 for even q)");
      if (torus == Torus::Minus && q <= 11)
        throw std::invalid_argument("psl2 with n=(q-1)/2 requires odd q > 11");
      if (torus == Torus::Plus && q <= 9)
        throw std::invalid_argument("psl2 with n=(q+1)/2 requires odd q > 9");
      break;
    case FamilyTag::PGL2:
      if (p == 2) throw std::invalid_argument("pgl2 requires odd q");
      if (q <= 5) throw std::invalid_argument("pgl2 requires odd q > 5");
      break;
    case FamilyTag::SL2_even:
      if (p != 2 || q < 4) throw std::invalid_argument("sl2 requires q = 2^e >= 4");
      break;
    case FamilyTag::Sz:
      if (p != 2 || e % 2 == 0 || e < 3)
        throw std::invalid_argument("sz requires q = 2^e with odd e > 1");
      if (torus == Torus::Plus)
        throw std::invalid_argument("sz has no q+1 dihedral case; use the q-1 torus");
      break;
  }
  return GroupFamily{tag, q, torus};
}

int GroupFamily::case_number() const {
  switch (tag) {
    case FamilyTag::PSL2: return torus == Torus::Minus ? 1 : 4;
    case FamilyTag::PGL2: return torus == Torus::Minus ? 2 : 5;
    case FamilyTag::SL2_even: return torus == Torus::Minus ? 3 : 6;
    case FamilyTag::Sz: return 7;
  }
  return 0;
}

long long GroupFamily::valency() const {
  switch (tag) {
    case FamilyTag::PSL2: return torus == Torus::Minus ? (q - 1) / 2 : (q + 1) / 2;
    case FamilyTag::PGL2:
    case FamilyTag::SL2_even: return torus == Torus::Minus ? q - 1 : q + 1;
    case FamilyTag::Sz: return q - 1;
  }
  return 0;
}

long long group_order(const GroupFamily& fam) {
  long long q = fam.q;
  switch (fam.tag) {
    case FamilyTag::PSL2: return q * (q * q - 1) / 2;
    case FamilyTag::PGL2: return q * (q * q - 1);
    case FamilyTag::SL2_even: return q * (q * q - 1);
    case FamilyTag::Sz: return q * q * (q * q + 1) * (q - 1);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Quadratic extension

QuadExt QuadExt::make(const ff::FieldSpec& base) {
  long long q = base.q();
  for (uint32_t c0 = 0; c0 < q; ++c0)
    for (uint32_t c1 = 0; c1 < q; ++c1) {
      bool has_root = false;
      for (uint32_t x = 0; x < q && !has_root; ++x) {
        uint32_t v = base.add(base.add(base.mul(x, x), base.mul(c1, x)), c0);
        has_root = (v == 0);
      }
      if (!has_root) return QuadExt{&base, c0, c1};
    }
  throw std::logic_error("no irreducible quadratic over the base field");
}

QuadExt::Elt QuadExt::mul(Elt a, Elt b) const {
  const auto& F = *base;
  uint32_t a0 = a.first, a1 = a.second, b0 = b.first, b1 = b.second;
  uint32_t t = F.mul(a1, b1);
  uint32_t r0 = F.sub(F.mul(a0, b0), F.mul(t, c0));
  uint32_t r1 = F.sub(F.add(F.mul(a0, b1), F.mul(a1, b0)), F.mul(t, c1));
  return {r0, r1};
}

QuadExt::Elt QuadExt::pow(Elt a, long long k) const {
  Elt r = one(), x = a;
  while (k > 0) {
    if (k & 1) r = mul(r, x);
    x = mul(x, x);
    k >>= 1;
  }
  return r;
}

long long QuadExt::order(Elt a) const {
  long long n = base->q() * base->q() - 1;
  for (auto [p, e] : nt::factorize(n)) {
    for (int i = 0; i < e && pow(a, n / p) == one(); ++i) n /= p;
  }
  return n;
}

QuadExt::Elt QuadExt::generator() const {
  long long q = base->q();
  for (long long idx = 1; idx < q * q; ++idx) {
    Elt a{(uint32_t)(idx % q), (uint32_t)(idx / q)};
    if (order(a) == q * q - 1) return a;
  }
  throw std::logic_error("no generator in quadratic extension");
}

uint32_t QuadExt::norm(Elt a) const {
  Elt n = pow(a, base->q() + 1);
  if (n.second != 0) throw std::logic_error("norm left the base field");
  return n.first;
}

QuadExt::Elt QuadExt::beta_power_p() const {
  return pow({0, 1}, base->p());
}

// ---------------------------------------------------------------------------
// Group context

struct Group::Caches {
  std::mutex mu;
  bool have_elements = false;
  std::vector<Mat> elements;
  bool have_involutions = false;
  std::vector<Mat> involutions;
  std::vector<std::vector<Mat>> classes;
  std::vector<Mat> bases;
  std::vector<std::vector<Mat>> base_centralizers;
  std::unordered_map<Mat, Mat, MatHash> transversal;  // involution -> conjugator from base
  std::unordered_map<Mat, std::vector<Mat>, MatHash> centralizers;
  // Suzuki ovoid: projective points with transversal group elements.
  bool have_ovoid = false;
  std::vector<std::array<uint16_t, 4>> ovoid_points;
  std::vector<Mat> ovoid_transversal;
};

Group::~Group() = default;

GroupPtr Group::make(FamilyTag tag, long long q) {
  auto [p, e] = split_prime_power(q);
  auto g = std::shared_ptr<Group>(new Group());
  g->tag = tag;
  g->q = q;
  g->p = p;
  g->e = e;
  g->caches_ = std::make_unique<Caches>();

  switch (tag) {
    case FamilyTag::PSL2:
      if (p == 2 || q < 5) throw std::invalid_argument("psl2 needs odd q >= 5");
      g->dim = 2;
      g->projective = true;
      g->order = q * (q * q - 1) / 2;
      break;
    case FamilyTag::PGL2:
      if (p == 2) throw std::invalid_argument("pgl2 needs odd q");
      g->dim = 2;
      g->projective = true;
      g->order = q * (q * q - 1);
      break;
    case FamilyTag::SL2_even:
      if (p != 2 || q < 4) throw std::invalid_argument("sl2 needs q = 2^e >= 4");
      g->dim = 2;
      g->projective = false;
      g->order = q * (q * q - 1);
      break;
    case FamilyTag::Sz:
      if (p != 2 || e % 2 == 0 || e < 3) throw std::invalid_argument("sz needs q = 2^e, odd e >= 3");
      g->dim = 4;
      g->projective = false;
      g->order = q * q * (q * q + 1) * (q - 1);
      break;
  }

  g->field = ff::FieldSpec::make(p, e);
  const auto& F = *g->field;

  Mat id;
  id.dim = g->dim;
  for (int i = 0; i < g->dim; ++i) id.at(i, i) = (uint16_t)F.one();
  g->identity = id;

  uint32_t alpha = F.primitive_element();
  auto mat2 = [&](uint32_t a, uint32_t b, uint32_t c, uint32_t d) {
    Mat m;
    m.dim = 2;
    m.at(0, 0) = a; m.at(0, 1) = b; m.at(1, 0) = c; m.at(1, 1) = d;
    return g->canon(m);
  };

  if (tag == FamilyTag::Sz) {
    g->generators = {g->sz_S(F.one(), 0), g->sz_M(alpha), g->sz_T()};
  } else {
    uint32_t one = F.one();
    g->generators = {mat2(one, one, 0, one), mat2(one, 0, one, one),
                     mat2(one, alpha, 0, one)};
    if (tag == FamilyTag::PGL2) g->generators.push_back(mat2(alpha, 0, 0, one));
  }
  return g;
}

Mat Group::canon(Mat m) const {
  if (!projective) return m;
  const auto& F = *field;
  int d = m.dim;
  for (int i = 0; i < d * d; ++i) {
    uint32_t v = m.a[4 * (i / d) + (i % d)];
    if (v != 0) {
      if (v == F.one()) return m;
      uint32_t s = F.inv(v);
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) m.at(j, k) = (uint16_t)F.mul(m.at(j, k), s);
      return m;
    }
  }
  throw std::logic_error("zero matrix");
}

Mat Group::mul(const Mat& x, const Mat& y) const {
  const auto& F = *field;
  Mat r;
  r.dim = x.dim;
  int d = x.dim;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      uint32_t s = 0;
      for (int k = 0; k < d; ++k) s = F.add(s, F.mul(x.at(i, k), y.at(k, j)));
      r.at(i, j) = (uint16_t)s;
    }
  return projective ? canon(r) : r;
}

Mat Group::inverse(const Mat& m) const {
  const auto& F = *field;
  int d = m.dim;
  if (d == 2) {
    uint32_t det = F.sub(F.mul(m.at(0, 0), m.at(1, 1)), F.mul(m.at(0, 1), m.at(1, 0)));
    uint32_t di = F.inv(det);
    Mat r;
    r.dim = 2;
    r.at(0, 0) = (uint16_t)F.mul(m.at(1, 1), di);
    r.at(0, 1) = (uint16_t)F.mul(F.neg(m.at(0, 1)), di);
    r.at(1, 0) = (uint16_t)F.mul(F.neg(m.at(1, 0)), di);
    r.at(1, 1) = (uint16_t)F.mul(m.at(0, 0), di);
    return projective ? canon(r) : r;
  }
  // Gauss-Jordan for 4x4.
  uint32_t aug[4][8];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      aug[i][j] = m.at(i, j);
      aug[i][j + 4] = (j == i) ? F.one() : 0;
    }
  for (int col = 0; col < 4; ++col) {
    int piv = -1;
    for (int r = col; r < 4 && piv < 0; ++r)
      if (aug[r][col] != 0) piv = r;
    if (piv < 0) throw std::logic_error("singular matrix");
    std::swap_ranges(aug[col], aug[col] + 8, aug[piv]);
    uint32_t s = F.inv(aug[col][col]);
    for (int j = 0; j < 8; ++j) aug[col][j] = F.mul(aug[col][j], s);
    for (int r = 0; r < 4; ++r) {
      if (r == col || aug[r][col] == 0) continue;
      uint32_t f = aug[r][col];
      for (int j = 0; j < 8; ++j) aug[r][j] = F.sub(aug[r][j], F.mul(f, aug[col][j]));
    }
  }
  Mat out;
  out.dim = 4;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.at(i, j) = (uint16_t)aug[i][j + 4];
  return out;
}

Mat Group::frobenius_map(Mat m, int k) const {
  k %= e;
  if (k == 0) return m;
  const auto& F = *field;
  int d = m.dim;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m.at(i, j) = (uint16_t)F.frobenius(m.at(i, j), k);
  return projective ? canon(m) : m;
}

long long Group::elem_order(const Mat& m) const {
  Mat x = m;
  long long cap = 2 * q + 64;
  for (long long k = 1; k <= cap; ++k) {
    if (is_identity(x)) return k;
    x = mul(x, m);
  }
  throw std::logic_error("element order exceeded the theoretical bound");
}

bool Group::is_involution(const Mat& m) const {
  return !is_identity(m) && is_identity(mul(m, m));
}

bool Group::commute(const Mat& x, const Mat& y) const { return mul(x, y) == mul(y, x); }

int Group::det_class(const Mat& m) const {
  if (dim != 2) throw std::logic_error("det_class is for 2x2 families");
  const auto& F = *field;
  uint32_t det = F.sub(F.mul(m.at(0, 0), m.at(1, 1)), F.mul(m.at(0, 1), m.at(1, 0)));
  return F.is_square(det) ? 0 : 1;
}

Mat Group::apply(const Automorphism& a, const Mat& m) const {
  Mat x = frobenius_map(m, a.frob);
  return mul(a.c, mul(x, inverse(a.c)));
}

Automorphism Group::compose(const Automorphism& a, const Automorphism& b) const {
  return Automorphism{mul(a.c, frobenius_map(b.c, a.frob)), (a.frob + b.frob) % e};
}

Automorphism Group::inverse_aut(const Automorphism& a) const {
  int k = (e - a.frob % e) % e;
  return Automorphism{frobenius_map(inverse(a.c), k), k};
}

long long Group::max_group_order() const { return env_group_bound(); }

// ---------------------------------------------------------------------------
// Suzuki matrices

Mat Group::sz_S(uint32_t a, uint32_t b) const {
  if (tag != FamilyTag::Sz) throw std::logic_error("sz_S on a non-Suzuki group");
  const auto& F = *field;
  int half = (e + 1) / 2;  // twist: x -> x^(2^((e+1)/2))
  uint32_t as = F.frobenius(a, half);
  uint32_t bs = F.frobenius(b, half);
  uint32_t a1s = F.mul(a, as);              // a^(1+sigma)
  uint32_t c31 = F.add(a1s, b);             // a^(1+sigma) + b
  uint32_t c41 = F.add(F.add(F.mul(F.mul(a, a), as), F.mul(a, b)), bs);
  Mat m;
  m.dim = 4;
  uint32_t one = F.one();
  m.at(0, 0) = one;
  m.at(1, 0) = (uint16_t)a;    m.at(1, 1) = one;
  m.at(2, 0) = (uint16_t)c31;  m.at(2, 1) = (uint16_t)as;  m.at(2, 2) = one;
  m.at(3, 0) = (uint16_t)c41;  m.at(3, 1) = (uint16_t)c31; m.at(3, 2) = (uint16_t)a; m.at(3, 3) = one;
  return m;
}

Mat Group::sz_M(uint32_t lambda) const {
  if (tag != FamilyTag::Sz) throw std::logic_error("sz_M on a non-Suzuki group");
  const auto& F = *field;
  long long tau = 1LL << ((e - 1) / 2);
  uint32_t lt = F.pow(lambda, tau);
  uint32_t l1t = F.mul(lambda, lt);  // lambda^(1+tau)
  Mat m;
  m.dim = 4;
  m.at(0, 0) = (uint16_t)F.inv(l1t);
  m.at(1, 1) = (uint16_t)F.inv(lt);
  m.at(2, 2) = (uint16_t)lt;
  m.at(3, 3) = (uint16_t)l1t;
  return m;
}

Mat Group::sz_T() const {
  if (tag != FamilyTag::Sz) throw std::logic_error("sz_T on a non-Suzuki group");
  Mat m;
  m.dim = 4;
  uint16_t one = (uint16_t)field->one();
  m.at(0, 3) = one;
  m.at(1, 2) = one;
  m.at(2, 1) = one;
  m.at(3, 0) = one;
  return m;
}

// ---------------------------------------------------------------------------
// Closures and involution data

MatSet bfs_closure(const Group& g, std::span<const Mat> generators, long long bound) {
  MatSet seen;
  std::deque<Mat> queue;
  seen.insert(g.identity);
  queue.push_back(g.identity);
  while (!queue.empty()) {
    Mat x = queue.front();
    queue.pop_front();
    for (const Mat& s : generators) {
      Mat y = g.mul(x, s);
      if (seen.insert(y).second) {
        if ((long long)seen.size() > bound)
          throw std::runtime_error("bfs_closure: bound exceeded");
        queue.push_back(y);
      }
    }
  }
  return seen;
}

namespace {
bool mat_less(const Mat& x, const Mat& y) {
  if (x.dim != y.dim) return x.dim < y.dim;
  return x.a < y.a;
}
}  // namespace

void Group::ensure_elements() const {
  auto& c = *caches_;
  if (c.have_elements) return;
  if (order > max_group_order())
    throw std::runtime_error("group order " + std::to_string(order) +
                             " exceeds the enumeration bound");
  MatSet set = bfs_closure(*this, generators, order);
  if ((long long)set.size() != order)
    throw std::logic_error("generator closure does not match the group order");
  c.elements.assign(set.begin(), set.end());
  std::sort(c.elements.begin(), c.elements.end(), mat_less);
  c.have_elements = true;
}

const std::vector<Mat>& Group::elements() const {
  std::lock_guard lock(caches_->mu);
  ensure_elements();
  return caches_->elements;
}

void Group::ensure_sz_ovoid() const {
  auto& c = *caches_;
  if (c.have_ovoid) return;
  const auto& F = *field;
  auto canon_pt = [&](std::array<uint16_t, 4> v) {
    for (int i = 0; i < 4; ++i) {
      if (v[i] != 0) {
        uint32_t s = F.inv(v[i]);
        for (int j = 0; j < 4; ++j) v[j] = (uint16_t)F.mul(v[j], s);
        return v;
      }
    }
    throw std::logic_error("zero point");
  };
  auto apply_pt = [&](const Mat& m, const std::array<uint16_t, 4>& v) {
    std::array<uint16_t, 4> out{};
    for (int i = 0; i < 4; ++i) {
      uint32_t s = 0;
      for (int j = 0; j < 4; ++j) s = F.add(s, F.mul(m.at(i, j), v[j]));
      out[i] = (uint16_t)s;
    }
    return canon_pt(out);
  };

  struct PtHash {
    size_t operator()(const std::array<uint16_t, 4>& v) const {
      uint64_t h = 14695981039346656037ull;
      for (auto x : v) h = (h ^ x) * 1099511628211ull;
      return (size_t)h;
    }
  };
  std::array<uint16_t, 4> base{0, 0, 0, (uint16_t)F.one()};
  std::unordered_map<std::array<uint16_t, 4>, int, PtHash> index;
  index[base] = 0;
  c.ovoid_points = {base};
  c.ovoid_transversal = {identity};
  for (size_t head = 0; head < c.ovoid_points.size(); ++head) {
    auto pt = c.ovoid_points[head];
    Mat tr = c.ovoid_transversal[head];
    for (const Mat& s : generators) {
      auto im = apply_pt(s, pt);
      if (!index.count(im)) {
        index[im] = (int)c.ovoid_points.size();
        c.ovoid_points.push_back(im);
        c.ovoid_transversal.push_back(mul(s, tr));
      }
    }
  }
  if ((long long)c.ovoid_points.size() != q * q + 1)
    throw std::logic_error("ovoid orbit has unexpected size");
  c.have_ovoid = true;
}

void Group::ensure_involutions() const {
  auto& c = *caches_;
  if (c.have_involutions) return;

  if (tag == FamilyTag::Sz) {
    ensure_sz_ovoid();
    for (size_t i = 0; i < c.ovoid_points.size(); ++i) {
      const Mat& tr = c.ovoid_transversal[i];
      Mat tri = inverse(tr);
      for (uint32_t b = 1; b < q; ++b)
        c.involutions.push_back(mul(tr, mul(sz_S(0, b), tri)));
    }
    std::sort(c.involutions.begin(), c.involutions.end(), mat_less);
    c.classes = {c.involutions};
    c.bases = {sz_S(0, 1)};
    std::vector<Mat> cent;
    cent.reserve(q * q);
    for (uint32_t a = 0; a < q; ++a)
      for (uint32_t b = 0; b < q; ++b) cent.push_back(sz_S(a, b));
    c.base_centralizers = {cent};
    c.have_involutions = true;
    return;
  }

  ensure_elements();
  for (const Mat& m : c.elements)
    if (is_involution(m)) c.involutions.push_back(m);

  int nclasses = (tag == FamilyTag::PGL2) ? 2 : 1;
  c.classes.assign(nclasses, {});
  for (const Mat& m : c.involutions) {
    int cls = (nclasses == 2) ? det_class(m) : 0;
    c.classes[cls].push_back(m);
  }
  for (int cls = 0; cls < nclasses; ++cls) {
    if (c.classes[cls].empty()) throw std::logic_error("empty involution class");
    Mat base = c.classes[cls][0];
    c.bases.push_back(base);
    std::vector<Mat> cent;
    for (const Mat& m : c.elements)
      if (commute(m, base)) cent.push_back(m);
    c.base_centralizers.push_back(cent);
    // Conjugation-orbit transversal rooted at the base.
    c.transversal[base] = identity;
    std::deque<Mat> queue{base};
    while (!queue.empty()) {
      Mat x = queue.front();
      queue.pop_front();
      Mat wx = c.transversal[x];
      for (const Mat& s : generators) {
        Mat y = mul(s, mul(x, inverse(s)));
        if (!c.transversal.count(y)) {
          c.transversal[y] = mul(s, wx);
          queue.push_back(y);
        }
      }
    }
  }
  long long covered = 0;
  for (auto& cl : c.classes) covered += (long long)cl.size();
  if (covered != (long long)c.transversal.size())
    throw std::logic_error("involution classes do not partition the involutions");
  c.have_involutions = true;
}

const std::vector<Mat>& Group::involutions() const {
  std::lock_guard lock(caches_->mu);
  ensure_involutions();
  return caches_->involutions;
}

const std::vector<std::vector<Mat>>& Group::involution_classes() const {
  std::lock_guard lock(caches_->mu);
  ensure_involutions();
  return caches_->classes;
}

int Group::involution_class_of(const Mat& x) const {
  if (tag == FamilyTag::Sz || tag != FamilyTag::PGL2) return 0;
  return det_class(x);
}

const Mat& Group::class_base(int c) const {
  std::lock_guard lock(caches_->mu);
  ensure_involutions();
  return caches_->bases.at(c);
}

const std::vector<Mat>& Group::base_centralizer(int c) const {
  std::lock_guard lock(caches_->mu);
  ensure_involutions();
  return caches_->base_centralizers.at(c);
}

Mat Group::sz_transporter_impl(const Mat& x) const {
  // Caller holds the lock and has ensured the ovoid.  x fixes a unique ovoid
  // point P; conjugating by the point transversal pulls x into Z(Q) =
  // {S(0,b)}, and a torus element moves S(0,b) to S(0,1).
  auto& c = *caches_;
  const auto& F = *field;
  for (size_t i = 0; i < c.ovoid_points.size(); ++i) {
    const auto& pt = c.ovoid_points[i];
    std::array<uint16_t, 4> im{};
    for (int r = 0; r < 4; ++r) {
      uint32_t s = 0;
      for (int j = 0; j < 4; ++j) s = F.add(s, F.mul(x.at(r, j), pt[j]));
      im[r] = (uint16_t)s;
    }
    int k0 = -1;
    for (int k = 0; k < 4 && k0 < 0; ++k)
      if (pt[k] != 0) k0 = k;
    if (im[k0] == 0) continue;
    uint32_t s = F.mul(im[k0], F.inv(pt[k0]));
    bool fixed = true;
    for (int k = 0; k < 4 && fixed; ++k) fixed = (im[k] == F.mul(s, pt[k]));
    if (!fixed) continue;

    Mat tr = c.ovoid_transversal[i];
    Mat w = mul(inverse(tr), mul(x, tr));  // should be S(0,b)
    uint32_t b = w.at(2, 0);
    if (b == 0 || w.at(1, 0) != 0) continue;
    // Solve mu^(1+sigma) = b; gcd(1+sigma, q-1) = 1 for Suzuki parameters.
    long long sigma = 1LL << ((e + 1) / 2);
    long long m = q - 1, a = (1 + sigma) % m;
    long long inv = -1;
    for (long long t = 0; t < m; ++t)
      if (a * t % m == 1 % m) { inv = t; break; }
    if (inv < 0) throw std::logic_error("1+sigma not invertible mod q-1");
    uint32_t mu = F.pow(b, inv);
    Mat t = mul(tr, sz_M(mu));
    if (mul(t, mul(sz_S(0, 1), inverse(t))) != x) continue;
    return t;
  }
  throw std::invalid_argument("transporter: no fixed ovoid point (not an involution?)");
}

Mat Group::transporter(const Mat& x) const {
  std::lock_guard lock(caches_->mu);
  ensure_involutions();
  auto& c = *caches_;
  if (tag != FamilyTag::Sz) {
    auto it = c.transversal.find(x);
    if (it == c.transversal.end()) throw std::invalid_argument("transporter: not an involution");
    return it->second;
  }
  return sz_transporter_impl(x);
}

const std::vector<Mat>& Group::centralizer_of_involution(const Mat& x) const {
  std::lock_guard lock(caches_->mu);
  ensure_involutions();
  auto& c = *caches_;
  auto it = c.centralizers.find(x);
  if (it != c.centralizers.end()) return it->second;
  std::vector<Mat> cent;
  if (tag == FamilyTag::Sz) {
    // The centralizer is the Sylow 2-subgroup fixing the same ovoid point.
    Mat t = sz_transporter_impl(x);
    Mat ti = inverse(t);
    cent.reserve(q * q);
    for (uint32_t a = 0; a < q; ++a)
      for (uint32_t b = 0; b < q; ++b) cent.push_back(mul(t, mul(sz_S(a, b), ti)));
  } else {
    ensure_elements();
    for (const Mat& m : c.elements)
      if (commute(m, x)) cent.push_back(m);
  }
  auto [pos, _] = c.centralizers.emplace(x, std::move(cent));
  return pos->second;
}

// ---------------------------------------------------------------------------
// Standard dihedral subgroups

namespace {

Mat mat2_raw(int a, int b, int c, int d, const ff::FieldSpec& F) {
  auto fi = [&](int x) { return x >= 0 ? F.from_int(x) : F.neg(F.from_int(-x)); };
  Mat m;
  m.dim = 2;
  m.at(0, 0) = (uint16_t)fi(a);
  m.at(0, 1) = (uint16_t)fi(b);
  m.at(1, 0) = (uint16_t)fi(c);
  m.at(1, 1) = (uint16_t)fi(d);
  return m;
}

// Matrix of multiplication by u on the quadratic extension in basis (1, beta).
Mat mult_matrix(const QuadExt& ext, QuadExt::Elt u) {
  const auto& F = *ext.base;
  Mat m;
  m.dim = 2;
  m.at(0, 0) = (uint16_t)u.first;
  m.at(1, 0) = (uint16_t)u.second;
  m.at(0, 1) = (uint16_t)F.neg(F.mul(u.second, ext.c0));
  m.at(1, 1) = (uint16_t)F.sub(u.first, F.mul(u.second, ext.c1));
  return m;
}

// Basis of the solution space of  t*R = R2*t  for 2x2 matrices over GF(q).
std::vector<Mat> conj_solution_basis(const ff::FieldSpec& F, const Mat& R, const Mat& R2) {
  // Unknowns t00,t01,t10,t11; build the 4x4 coefficient matrix of
  // (t*R - R2*t) = 0.
  uint32_t A[4][4] = {};
  auto idx = [](int i, int j) { return 2 * i + j; };
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      int row = idx(i, j);
      // (t*R)_{ij} = sum_k t_{ik} R_{kj}
      for (int k = 0; k < 2; ++k)
        A[row][idx(i, k)] = F.add(A[row][idx(i, k)], R.at(k, j));
      // -(R2*t)_{ij} = -sum_k R2_{ik} t_{kj}
      for (int k = 0; k < 2; ++k)
        A[row][idx(k, j)] = F.sub(A[row][idx(k, j)], R2.at(i, k));
    }
  // Gaussian elimination; collect nullspace basis.
  int pivot_col[4] = {-1, -1, -1, -1};
  int rank = 0;
  for (int col = 0; col < 4 && rank < 4; ++col) {
    int piv = -1;
    for (int r = rank; r < 4 && piv < 0; ++r)
      if (A[r][col] != 0) piv = r;
    if (piv < 0) continue;
    for (int j = 0; j < 4; ++j) std::swap(A[rank][j], A[piv][j]);
    uint32_t s = F.inv(A[rank][col]);
    for (int j = 0; j < 4; ++j) A[rank][j] = F.mul(A[rank][j], s);
    for (int r = 0; r < 4; ++r) {
      if (r == rank || A[r][col] == 0) continue;
      uint32_t f = A[r][col];
      for (int j = 0; j < 4; ++j) A[r][j] = F.sub(A[r][j], F.mul(f, A[rank][j]));
    }
    pivot_col[rank++] = col;
  }
  std::vector<Mat> basis;
  for (int col = 0; col < 4; ++col) {
    bool is_pivot = false;
    for (int r = 0; r < rank; ++r) is_pivot |= (pivot_col[r] == col);
    if (is_pivot) continue;
    uint32_t v[4] = {};
    v[col] = F.one();
    for (int r = 0; r < rank; ++r) v[pivot_col[r]] = F.neg(A[r][col]);
    Mat m;
    m.dim = 2;
    m.at(0, 0) = (uint16_t)v[0];
    m.at(0, 1) = (uint16_t)v[1];
    m.at(1, 0) = (uint16_t)v[2];
    m.at(1, 1) = (uint16_t)v[3];
    basis.push_back(m);
  }
  return basis;
}

}  // namespace

DihedralSubgroup standard_dihedral(const Group& g, const GroupFamily& fam) {
  if (fam.tag != g.tag || fam.q != g.q)
    throw std::invalid_argument("standard_dihedral: family does not match the group");
  const auto& F = *g.field;
  long long n = fam.valency();
  DihedralSubgroup d;
  d.n = n;

  uint32_t alpha = F.primitive_element();
  auto diag2 = [&](uint32_t a, uint32_t b) {
    Mat m;
    m.dim = 2;
    m.at(0, 0) = (uint16_t)a;
    m.at(1, 1) = (uint16_t)b;
    return g.canon(m);
  };
  if (fam.torus == Torus::Minus) {
    switch (g.tag) {
      case FamilyTag::PSL2:
        d.rot = diag2(alpha, F.inv(alpha));
        d.ref = g.canon(mat2_raw(0, 1, -1, 0, F));
        break;
      case FamilyTag::PGL2:
        d.rot = diag2(alpha, F.one());
        d.ref = g.canon(mat2_raw(0, 1, 1, 0, F));
        break;
      case FamilyTag::SL2_even:
        d.rot = diag2(alpha, F.inv(alpha));
        d.ref = mat2_raw(0, 1, 1, 0, F);
        break;
      case FamilyTag::Sz:
        d.rot = g.sz_M(alpha);
        d.ref = g.sz_T();
        break;
    }
  } else {
    // Nonsplit torus: multiplication by a unit of GF(q^2) acting on the
    // 2-dimensional GF(q)-space with basis (1, beta).
    QuadExt ext = QuadExt::make(F);
    QuadExt::Elt zeta = ext.generator();
    QuadExt::Elt u;
    switch (g.tag) {
      case FamilyTag::PSL2:
      case FamilyTag::SL2_even:
        u = ext.pow(zeta, g.q - 1);  // norm-1 subgroup, order q+1
        break;
      case FamilyTag::PGL2:
        u = zeta;
        break;
      default:
        throw std::invalid_argument("no nonsplit torus for this family");
    }
    Mat R = mult_matrix(ext, u);
    d.rot = g.canon(R);
    // Inverting involution: solve t*R = R'*t with R' = mult by u^q (the
    // Galois conjugate, projectively the inverse on the torus).
    Mat R2 = mult_matrix(ext, ext.pow(u, g.q));
    auto basis = conj_solution_basis(F, R, R2);
    if (basis.size() != 2)
      throw std::logic_error("conjugating space of the nonsplit torus is not 2-dimensional");
    Mat rot_inv = g.inverse(d.rot);
    bool found = false;
    for (long long c1 = 0; c1 < g.q && !found; ++c1)
      for (long long c2 = 0; c2 < g.q && !found; ++c2) {
        if (c1 == 0 && c2 == 0) continue;
        Mat t;
        t.dim = 2;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            uint32_t v = F.add(F.mul((uint32_t)c1, basis[0].at(i, j)),
                               F.mul((uint32_t)c2, basis[1].at(i, j)));
            t.at(i, j) = (uint16_t)v;
          }
        uint32_t det = F.sub(F.mul(t.at(0, 0), t.at(1, 1)), F.mul(t.at(0, 1), t.at(1, 0)));
        if (det == 0) continue;
        if (g.tag == FamilyTag::PSL2 && !F.is_square(det)) continue;
        if (g.tag == FamilyTag::SL2_even) {
          // scale to determinant 1 (square roots are unique in char 2)
          uint32_t s = F.inv(F.pow(det, g.q / 2));
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) t.at(i, j) = (uint16_t)F.mul(t.at(i, j), s);
        }
        Mat tc = g.canon(t);
        if (!g.is_involution(tc)) continue;
        if (g.mul(g.mul(tc, d.rot), tc) != rot_inv) continue;
        d.ref = tc;
        found = true;
      }
    if (!found) throw std::logic_error("no inverting involution found for the nonsplit torus");
  }

  if (g.elem_order(d.rot) != n) throw std::logic_error("rotation has wrong order");
  if (!g.is_involution(d.ref)) throw std::logic_error("reflection is not an involution");
  Mat conj = g.mul(g.mul(d.ref, d.rot), d.ref);
  if (conj != g.inverse(d.rot)) throw std::logic_error("reflection does not invert the rotation");

  Mat r = g.identity;
  for (long long i = 0; i < n; ++i) {
    d.elements.push_back(r);
    r = g.mul(r, d.rot);
  }
  for (long long i = 0; i < n; ++i) d.elements.push_back(g.mul(d.elements[i], d.ref));
  for (size_t i = 0; i < d.elements.size(); ++i) d.index[d.elements[i]] = (int)i;
  if ((long long)d.index.size() != 2 * n)
    throw std::logic_error("dihedral subgroup elements are not distinct");
  return d;
}

// ---------------------------------------------------------------------------
// Automorphism action

AutAction aut_action(const Group& g, const GroupFamily& fam, const DihedralSubgroup& d) {
  AutAction act;
  act.inner_generators = g.generators;
  long long n = fam.valency();
  act.normalizer_order = (g.tag == FamilyTag::PSL2 ? 4 : 2) * n * g.e;

  const auto& F = *g.field;
  Automorphism ident{g.identity, 0};

  // Outer coset representatives.
  act.outer_coset_reps.push_back(ident);
  Mat delta;
  bool have_delta = false;
  if (g.tag == FamilyTag::PSL2) {
    // Diagonal outer automorphism: conjugation by a nonsquare-determinant
    // element of PGL2.
    if (fam.torus == Torus::Minus) {
      Mat m;
      m.dim = 2;
      m.at(0, 0) = (uint16_t)F.primitive_element();
      m.at(1, 1) = (uint16_t)F.one();
      delta = g.canon(m);
    } else {
      QuadExt ext = QuadExt::make(F);
      delta = g.canon(mult_matrix(ext, ext.generator()));
    }
    have_delta = true;
  }
  for (int k = 1; k < g.e; ++k) act.outer_coset_reps.push_back({g.identity, k});
  if (have_delta) {
    size_t m = act.outer_coset_reps.size();
    for (size_t i = 0; i < m; ++i)
      act.outer_coset_reps.push_back({delta, act.outer_coset_reps[i].frob});
  }

  // Normalizer generators: conjugation by D, the extra torus (PSL2), and a
  // Galois representative corrected to fix the standard D setwise.
  act.dihedral_normalizer_gens.push_back({d.rot, 0});
  act.dihedral_normalizer_gens.push_back({d.ref, 0});
  if (have_delta) act.dihedral_normalizer_gens.push_back({delta, 0});

  if (g.e > 1) {
    std::vector<Automorphism> candidates;
    if (fam.torus == Torus::Minus) {
      candidates.push_back({g.identity, 1});
    } else {
      QuadExt ext = QuadExt::make(F);
      auto bp = ext.beta_power_p();
      Mat P;
      P.dim = 2;
      P.at(0, 0) = (uint16_t)F.one();
      P.at(0, 1) = (uint16_t)bp.first;
      P.at(1, 1) = (uint16_t)bp.second;
      candidates.push_back({g.canon(P), 1});
      candidates.push_back({g.canon(g.inverse(P)), 1});
    }
    bool ok = false;
    for (const auto& cand : candidates) {
      bool preserves = true;
      for (const Mat& el : d.elements)
        if (!d.contains(g.apply(cand, el))) {
          preserves = false;
          break;
        }
      if (preserves) {
        act.dihedral_normalizer_gens.push_back(cand);
        ok = true;
        break;
      }
    }
    if (!ok) throw std::logic_error("no Galois normalizer representative preserves D");
  }

  for (const auto& a : act.dihedral_normalizer_gens)
    for (const Mat& el : d.elements)
      if (!d.contains(g.apply(a, el)))
        throw std::logic_error("normalizer generator does not preserve D");
  return act;
}

// ---------------------------------------------------------------------------
// Involution counts

InvolutionCounts involution_centralizer_count(const GroupFamily& fam) {
  long long q = fam.q;
  InvolutionCounts out;
  switch (fam.tag) {
    case FamilyTag::PSL2: {
      // Centralizer D_k with 2k divisible by 4.
      long long k = (q % 4 == 1) ? (q - 1) / 2 : (q + 1) / 2;
      out.I = k + 1;
      break;
    }
    case FamilyTag::PGL2: {
      long long k = (q % 4 == 1) ? q - 1 : q + 1;  // k = q +- 1 = 0 mod 4
      long long l = (q % 4 == 1) ? q + 1 : q - 1;
      out.two_classes = true;
      out.Iplus = k + 1;
      out.Iminus = l + 1;
      break;
    }
    case FamilyTag::SL2_even:
    case FamilyTag::Sz:
      out.I = q - 1;
      break;
  }
  return out;
}

InvolutionCounts involution_centralizer_count_bruteforce(const Group& g) {
  const auto& classes = g.involution_classes();
  auto count_commuting = [&](const Mat& base) {
    long long c = 0;
    for (const Mat& x : g.involutions())
      if (g.commute(x, base)) ++c;
    return c;
  };
  InvolutionCounts out;
  if (classes.size() == 2) {
    out.two_classes = true;
    out.Iplus = count_commuting(g.class_base(0));
    out.Iminus = count_commuting(g.class_base(1));
  } else {
    out.I = count_commuting(g.class_base(0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Automorphism subgroup enumeration

std::vector<Automorphism> generated_automorphisms(const Group& g,
                                                  std::span<const Automorphism> gens,
                                                  size_t bound) {
  struct Key {
    std::vector<Mat> images;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    size_t operator()(const Key& k) const {
      size_t h = 0x9e3779b97f4a7c15ull;
      MatHash mh;
      for (const Mat& m : k.images) h = h * 1315423911u + mh(m);
      return h;
    }
  };
  auto key_of = [&](const Automorphism& a) {
    Key k;
    for (const Mat& s : g.generators) k.images.push_back(g.apply(a, s));
    return k;
  };

  std::vector<Automorphism> out;
  std::unordered_map<Key, int, KeyHash> seen;
  Automorphism ident{g.identity, 0};
  out.push_back(ident);
  seen.emplace(key_of(ident), 0);
  for (size_t head = 0; head < out.size(); ++head) {
    Automorphism cur = out[head];
    for (const Automorphism& s : gens) {
      Automorphism nxt = g.compose(s, cur);
      Key k = key_of(nxt);
      if (!seen.count(k)) {
        if (out.size() >= bound)
          throw std::runtime_error("generated_automorphisms: bound exceeded");
        seen.emplace(std::move(k), (int)out.size());
        out.push_back(nxt);
      }
    }
  }
  return out;
}

}  // namespace primmaps::mg
