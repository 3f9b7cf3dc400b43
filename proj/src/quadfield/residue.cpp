#include <algorithm>
#include <functional>

#include "bianchi/quadfield.hpp"

namespace bianchi {

ResidueGroup::ResidueGroup(const FieldK& K, const IdealK& f) : K_(&K), f_(f) {
  int64_t N = f.norm();
  if (N > 4000000) throw MathError("ResidueGroup: modulus too large to enumerate");
  std::vector<IdealK> primes;
  if (N > 1)
    for (auto& [P, e] : factor_ideal(K, f)) primes.push_back(P);
  pos_.assign((size_t)N, -1);
  for (int64_t idx = 0; idx < N; ++idx) {
    IntElem a = f.from_index(idx);
    bool unit = true;
    for (auto& P : primes)
      if (P.contains(a)) {
        unit = false;
        break;
      }
    if (N == 1) unit = true;
    if (unit) {
      pos_[(size_t)idx] = (int32_t)elems_.size();
      elems_.push_back(a);
    }
  }
  const int64_t n = (int64_t)elems_.size();
  auto mulp = [&](int32_t i, int32_t j) {
    return pos_[(size_t)f_.index_of(K_->mul(elems_[(size_t)i], elems_[(size_t)j]))];
  };
  const int32_t one = pos_[(size_t)f_.index_of({1, 0})];
  auto powp = [&](int32_t x, int64_t e) {
    int32_t r = one;
    int32_t b = x;
    while (e > 0) {
      if (e & 1) r = mulp(r, b);
      e >>= 1;
      if (e) b = mulp(b, b);
    }
    return r;
  };

  // decompose G/H for a subgroup H (membership mask) inside the set S
  std::function<std::vector<int32_t>(const std::vector<int32_t>&, std::vector<char>)> decompose =
      [&](const std::vector<int32_t>& S, std::vector<char> H) -> std::vector<int32_t> {
    auto qorder = [&](int32_t x) {
      int64_t o = 1;
      int32_t y = x;
      while (!H[(size_t)y]) {
        y = mulp(y, x);
        ++o;
      }
      return o;
    };
    int32_t best = -1;
    int64_t bo = 1;
    for (int32_t x : S) {
      int64_t o = qorder(x);
      if (o > bo) {
        bo = o;
        best = x;
      }
    }
    if (best < 0) return {};
    // H' = H <best>
    std::vector<char> H2 = H;
    std::vector<int32_t> hs;
    for (size_t i = 0; i < H.size(); ++i)
      if (H[i]) hs.push_back((int32_t)i);
    int32_t g = one;
    for (int64_t k = 0; k < bo; ++k) {
      for (int32_t h : hs) H2[(size_t)mulp(h, g)] = 1;
      g = mulp(g, best);
    }
    std::vector<int32_t> rest = decompose(S, H2);
    std::vector<int32_t> out{best};
    for (int32_t hj : rest) {
      // order of hj modulo H2
      int64_t nj = 1;
      int32_t y = hj;
      while (!H2[(size_t)y]) {
        y = mulp(y, hj);
        ++nj;
      }
      // hj^nj = eta * best^c with eta in H; find c
      int32_t binv = powp(best, bo - 1);
      int32_t cur = y;
      int64_t c = 0;
      while (!H[(size_t)cur]) {
        cur = mulp(cur, binv);
        ++c;
        if (c > bo) throw MathError("ResidueGroup: decomposition failed");
      }
      if (c % nj) throw MathError("ResidueGroup: non-divisible lift");
      out.push_back(mulp(hj, powp(binv, c / nj)));
    }
    return out;
  };

  // Sylow pieces
  for (auto [l, v] : factor_int(std::max<int64_t>(n, 1))) {
    if (n == 1) break;
    int64_t lv = ipow(l, v), m = n / lv;
    std::vector<char> inS((size_t)n, 0);
    std::vector<int32_t> S;
    for (int32_t x = 0; x < n; ++x) {
      int32_t y = powp(x, m);
      if (!inS[(size_t)y]) {
        inS[(size_t)y] = 1;
        S.push_back(y);
      }
    }
    std::vector<char> H((size_t)n, 0);
    H[(size_t)one] = 1;
    for (int32_t g : decompose(S, H)) {
      gens_.push_back(elems_[(size_t)g]);
      int64_t o = 1;
      int32_t y = g;
      while (y != one) {
        y = mulp(y, g);
        ++o;
      }
      ords_.push_back(o);
    }
  }
  // coordinate tables by enumerating products
  int r = (int)gens_.size();
  coords_.assign((size_t)r, std::vector<int32_t>((size_t)n, -1));
  std::vector<int32_t> cur{one};
  std::vector<std::vector<int32_t>> cc{std::vector<int32_t>((size_t)r, 0)};
  for (int k = 0; k < r; ++k) {
    int32_t g = pos_[(size_t)f_.index_of(gens_[(size_t)k])];
    std::vector<int32_t> nxt;
    std::vector<std::vector<int32_t>> ncc;
    for (size_t t = 0; t < cur.size(); ++t) {
      int32_t y = cur[t];
      for (int64_t e = 0; e < ords_[(size_t)k]; ++e) {
        nxt.push_back(y);
        auto c = cc[t];
        c[(size_t)k] = (int32_t)e;
        ncc.push_back(c);
        y = mulp(y, g);
      }
    }
    cur.swap(nxt);
    cc.swap(ncc);
  }
  if ((int64_t)cur.size() != n) throw MathError("ResidueGroup: basis does not span");
  for (size_t t = 0; t < cur.size(); ++t) {
    if (coords_.empty()) break;
    if (coords_[0][(size_t)cur[t]] != -1) throw MathError("ResidueGroup: basis not independent");
    for (int k = 0; k < r; ++k) coords_[(size_t)k][(size_t)cur[t]] = cc[t][(size_t)k];
  }
}

int64_t ResidueGroup::exponent() const {
  int64_t e = 1;
  for (auto o : ords_) e = lcm64(e, o);
  return e;
}

bool ResidueGroup::is_unit(const IntElem& a) const { return pos_[(size_t)f_.index_of(a)] >= 0; }

std::optional<std::vector<int64_t>> ResidueGroup::dlog(const IntElem& a) const {
  int32_t p = pos_[(size_t)f_.index_of(a)];
  if (p < 0) return std::nullopt;
  std::vector<int64_t> out(gens_.size());
  for (size_t k = 0; k < gens_.size(); ++k) out[k] = coords_[k][(size_t)p];
  return out;
}

std::vector<std::vector<int64_t>> ResidueGroup::unit_image() const {
  std::vector<std::vector<int64_t>> out;
  for (auto& u : K_->units()) out.push_back(*dlog(u));
  return out;
}

int64_t ResidueGroup::euler_phi_ideal() const {
  if (f_.is_unit_ideal()) return 1;
  int64_t r = f_.norm();
  for (auto& [P, e] : factor_ideal(*K_, f_)) r = r / P.norm() * (P.norm() - 1);
  return r;
}

// ---- SplitLevel ----

SplitLevel::SplitLevel(const FieldK& K, int64_t p, int64_t root_mod, int a, int b, int64_t prim_root)
    : K_(&K), p_(p), a_(a), b_(b) {
  m1_ = ipow(p, a);
  m2_ = ipow(p, b);
  n1_ = a ? (p - 1) * ipow(p, a - 1) : 1;
  n2_ = b ? (p - 1) * ipow(p, b - 1) : 1;
  int64_t mm = ipow(p, std::max(a, b));
  root_ = mod64(root_mod, std::max<int64_t>(mm, 1));
  auto build = [&](int e, int64_t m, int64_t n, std::vector<int32_t>& dl, std::vector<int32_t>& pw) {
    if (!e) return;
    dl.assign((size_t)m, -1);
    pw.assign((size_t)n, 0);
    int64_t x = 1;
    for (int64_t k = 0; k < n; ++k) {
      if (dl[(size_t)x] != -1) throw MathError("SplitLevel: not a primitive root");
      dl[(size_t)x] = (int32_t)k;
      pw[(size_t)k] = (int32_t)x;
      x = x * prim_root % m;
    }
  };
  build(a, m1_, n1_, dl1_, pw1_);
  build(b, m2_, n2_, dl2_, pw2_);
  for (auto& u : K.units()) unit_dl_.push_back({dlog1(res1(u)), dlog2(res2(u))});
  // idempotents: e1 = 1 mod p^a, 0 mod pbar^b; e2 the reverse
  // pi generates p = (p, omega - root)
  IdealK P = IdealK::from_generators(K, {{p, 0}, {-mod64(root_, p), 1}});
  IntElem pi = P.generator(K);
  IntElem pa = K.pow(pi, a), pb = K.pow(K.conj(pi), b);
  int64_t M = ipow(p, a + b);
  auto red = [&](IntElem z) { return IntElem{mod64(z.x, M), mod64(z.y, M)}; };
  if (a == 0) {
    e1_ = {0, 0};
    e2_ = {1, 0};
  } else if (b == 0) {
    e1_ = {1, 0};
    e2_ = {0, 0};
  } else {
    int64_t u = invmod(res1(pb), m1_);
    int64_t v = invmod(res2(pa), m2_);
    e1_ = red(K.scale(pb, u));
    e2_ = red(K.scale(pa, v));
  }
}

IdealK SplitLevel::prime_p() const {
  return IdealK::from_generators(*K_, {{p_, 0}, {-mod64(root_, p_), 1}});
}

int64_t SplitLevel::res1(const IntElem& x) const {
  if (!a_) return 0;
  return mod64(mod64(x.x, m1_) + mulmod(mod64(x.y, m1_), mod64(root_, m1_), m1_), m1_);
}
int64_t SplitLevel::res2(const IntElem& x) const {
  if (!b_) return 0;
  int64_t rb = mod64(K_->omega_trace() - root_, m2_);
  return mod64(mod64(x.x, m2_) + mulmod(mod64(x.y, m2_), rb, m2_), m2_);
}

bool SplitLevel::unit_trivial(int64_t j1, int64_t j2) const {
  for (auto [d1, d2] : unit_dl_) {
    __int128 v = (__int128)j1 * d1 * n2_ + (__int128)j2 * d2 * n1_;
    if (v % ((__int128)n1_ * n2_) != 0) return false;
  }
  return true;
}

std::vector<std::pair<int64_t, int64_t>> SplitLevel::unit_trivial_characters() const {
  std::vector<std::pair<int64_t, int64_t>> out;
  for (int64_t j1 = 0; j1 < n1_; ++j1)
    for (int64_t j2 = 0; j2 < n2_; ++j2)
      if (unit_trivial(j1, j2)) out.push_back({j1, j2});
  return out;
}

std::pair<int, int> SplitLevel::conductor(int64_t j1, int64_t j2) const {
  auto one = [&](int e, int64_t j, int64_t n) {
    if (e == 0 || mod64(j, n) == 0) return 0;
    for (int c = 1; c <= e; ++c)
      if (mod64(j, ipow(p_, e - c)) == 0) return c;
    return e;
  };
  return {one(a_, j1, n1_), one(b_, j2, n2_)};
}

std::pair<int64_t, int64_t> SplitLevel::restrict_to(int64_t j1, int64_t j2, int a2, int b2) const {
  auto [c1, c2] = conductor(j1, j2);
  if (c1 > a2 || c2 > b2 || a2 > a_ || b2 > b_) throw MathError("SplitLevel::restrict_to: level too small");
  int64_t n1b = a2 ? (p_ - 1) * ipow(p_, a2 - 1) : 1;
  int64_t n2b = b2 ? (p_ - 1) * ipow(p_, b2 - 1) : 1;
  return {mod64(j1, n1_) / (n1_ / n1b), mod64(j2, n2_) / (n2_ / n2b)};
}

IntElem SplitLevel::crt_lift(int64_t r1, int64_t r2) const {
  int64_t M = ipow(p_, a_ + b_);
  IntElem z = K_->add(K_->scale(e1_, mod64(r1, m1_)), K_->scale(e2_, mod64(r2, m2_)));
  return {mod64(z.x, M), mod64(z.y, M)};
}

}  // namespace bianchi
