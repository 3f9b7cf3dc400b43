#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "bianchi/quadfield.hpp"

namespace bianchi {

namespace {
int64_t floordiv(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
// extended gcd: returns g and (s, t) with s a + t b = g >= 0
int64_t egcd(int64_t a, int64_t b, int64_t& s, int64_t& t) {
  int64_t s0 = 1, t0 = 0, s1 = 0, t1 = 1;
  while (b != 0) {
    int64_t q = floordiv(a, b);
    int64_t r = a - q * b;
    a = b;
    b = r;
    int64_t ns = s0 - q * s1, nt = t0 - q * t1;
    s0 = s1;
    t0 = t1;
    s1 = ns;
    t1 = nt;
  }
  if (a < 0) {
    a = -a;
    s0 = -s0;
    t0 = -t0;
  }
  s = s0;
  t = t0;
  return a;
}
}  // namespace

IdealK IdealK::from_generators(const FieldK& K, const std::vector<IntElem>& gens) {
  // Z-lattice spanned by g and g*omega for each generator
  std::vector<IntElem> vecs;
  for (auto& g : gens) {
    vecs.push_back(g);
    vecs.push_back(K.mul(g, {0, 1}));
  }
  // combine into one vector with omega-coordinate = gcd, others with omega-coordinate 0
  IntElem piv{0, 0};
  int64_t Agcd = 0;
  for (auto v : vecs) {
    if (v.y == 0) {
      Agcd = gcd64(Agcd, v.x);
      continue;
    }
    if (piv.y == 0 && piv.x == 0) {
      piv = v;
      continue;
    }
    int64_t s, t;
    int64_t g = egcd(piv.y, v.y, s, t);
    IntElem np{s * piv.x + t * v.x, g};
    // the complementary combination has omega-coordinate 0
    int64_t c1 = v.y / g, c2 = piv.y / g;
    int64_t zx = c1 * piv.x - c2 * v.x;
    Agcd = gcd64(Agcd, zx);
    piv = np;
  }
  IdealK I;
  if (piv.y == 0) {
    // lattice of rank < 2 cannot happen for a nonzero ideal
    throw MathError("IdealK: zero ideal");
  }
  if (piv.y < 0) piv = {-piv.x, -piv.y};
  Agcd = std::llabs(Agcd);
  // A = gcd(Agcd) must also absorb C * (multiple) conditions; lattice is closed so Agcd > 0
  if (Agcd == 0) throw MathError("IdealK: degenerate lattice");
  I.A_ = Agcd;
  I.C_ = piv.y;
  I.B_ = mod64(piv.x, I.A_);
  return I;
}

bool IdealK::contains(const IntElem& a) const { return reduce(a).is_zero(); }

IntElem IdealK::reduce(const IntElem& a) const {
  int64_t q = floordiv(a.y, C_);
  int64_t x = a.x - q * B_, y = a.y - q * C_;
  return {mod64(x, A_), y};
}
int64_t IdealK::index_of(const IntElem& a) const {
  IntElem r = reduce(a);
  return r.y * A_ + r.x;
}
IntElem IdealK::from_index(int64_t idx) const { return {idx % A_, idx / A_}; }

IntElem IdealK::generator(const FieldK& K) const {
  if (gen_) return *gen_;
  int64_t N = norm();
  if (N == 1) {
    gen_ = IntElem{1, 0};
    return *gen_;
  }
  int64_t disc = 4 * K.omega_norm() - K.omega_trace() * K.omega_trace();
  int64_t Y = (int64_t)std::floor(std::sqrt(4.0 * (double)N / (double)disc)) + 1;
  for (int64_t y = -Y; y <= Y; ++y) {
    // (2x + tr y)^2 + disc y^2 = 4N
    int64_t rem = 4 * N - disc * y * y;
    if (rem < 0) continue;
    int64_t s = (int64_t)std::llround(std::sqrt((double)rem));
    for (int64_t ss = std::max<int64_t>(0, s - 1); ss <= s + 1; ++ss) {
      if (ss * ss != rem) continue;
      for (int sg : {1, -1}) {
        int64_t twox = sg * ss - K.omega_trace() * y;
        if (twox % 2) continue;
        IntElem c{twox / 2, y};
        if (K.norm(c) == N && contains(c)) {
          gen_ = K.unit_normalize(c);
          return *gen_;
        }
      }
    }
  }
  throw MathError("IdealK::generator: ideal " + str() + " is not principal");
}

std::string IdealK::str() const {
  std::ostringstream os;
  os << "<" << A_ << ", " << B_ << "+" << C_ << "w>";
  return os.str();
}

IdealK ideal_mul(const FieldK& K, const IdealK& a, const IdealK& b) {
  IntElem a1{a.A(), 0}, a2{a.B(), a.C()}, b1{b.A(), 0}, b2{b.B(), b.C()};
  return IdealK::from_generators(K, {K.mul(a1, b1), K.mul(a1, b2), K.mul(a2, b1), K.mul(a2, b2)});
}
IdealK ideal_pow(const FieldK& K, const IdealK& a, int e) {
  IdealK r = IdealK::unit_ideal(K);
  for (int i = 0; i < e; ++i) r = ideal_mul(K, r, a);
  return r;
}
IdealK ideal_conj(const FieldK& K, const IdealK& a) {
  return IdealK::from_generators(K, {{a.A(), 0}, K.conj({a.B(), a.C()})});
}
IdealK ideal_add(const FieldK& K, const IdealK& a, const IdealK& b) {
  return IdealK::from_generators(K, {{a.A(), 0}, {a.B(), a.C()}, {b.A(), 0}, {b.B(), b.C()}});
}
bool ideal_divides(const FieldK&, const IdealK& a, const IdealK& b) {
  return a.contains({b.A(), 0}) && a.contains({b.B(), b.C()});
}
IdealK ideal_div(const FieldK& K, const IdealK& b, const IdealK& a) {
  if (!ideal_divides(K, a, b)) throw MathError("ideal_div: divisor does not divide");
  IdealK ac = ideal_conj(K, a);
  int64_t n = a.norm();
  std::vector<IntElem> gens;
  for (IntElem x : {IntElem{b.A(), 0}, IntElem{b.B(), b.C()}})
    for (IntElem y : {IntElem{ac.A(), 0}, IntElem{ac.B(), ac.C()}}) {
      IntElem z = K.mul(x, y);
      if (z.x % n || z.y % n) throw MathError("ideal_div: inexact");
      gens.push_back({z.x / n, z.y / n});
    }
  return IdealK::from_generators(K, gens);
}

PrimeSplit factor_prime(const FieldK& K, int64_t q) {
  if (!is_prime(q)) throw MathError("factor_prime: " + std::to_string(q) + " is not prime");
  PrimeSplit ps;
  ps.q = q;
  int k = K.kronecker(q);
  // roots of the minimal polynomial of omega mod q
  std::vector<int64_t> roots;
  for (int64_t r = 0; r < q; ++r)
    if (mod64(r * r - K.omega_trace() * r + K.omega_norm(), q) == 0) roots.push_back(r);
  if (k == -1) {
    ps.kind = Splitting::Inert;
    ps.primes.push_back(IdealK::principal(K, {q, 0}));
  } else if (k == 0) {
    ps.kind = Splitting::Ramified;
    ps.primes.push_back(IdealK::from_generators(K, {{q, 0}, {-roots.at(0), 1}}));
  } else {
    ps.kind = Splitting::Split;
    for (int64_t r : roots) ps.primes.push_back(IdealK::from_generators(K, {{q, 0}, {-r, 1}}));
  }
  return ps;
}

std::vector<std::pair<IdealK, int>> factor_ideal(const FieldK& K, const IdealK& I) {
  std::vector<std::pair<IdealK, int>> out;
  IdealK rest = I;
  for (auto [q, e] : factor_int(I.norm())) {
    (void)e;
    for (auto& P : factor_prime(K, q).primes) {
      int cnt = 0;
      while (!rest.is_unit_ideal() && ideal_divides(K, P, rest)) {
        rest = ideal_div(K, rest, P);
        ++cnt;
      }
      if (cnt) out.push_back({P, cnt});
    }
  }
  if (!rest.is_unit_ideal()) throw MathError("factor_ideal: incomplete factorization");
  return out;
}

std::vector<std::pair<IntElem, int64_t>> ideals_up_to(const FieldK& K, int64_t X) {
  std::vector<std::pair<IntElem, int64_t>> out;
  int64_t disc = 4 * K.omega_norm() - K.omega_trace() * K.omega_trace();
  int64_t Y = (int64_t)std::floor(std::sqrt(4.0 * (double)X / (double)disc)) + 1;
  for (int64_t y = -Y; y <= Y; ++y) {
    double rem = 4.0 * X - (double)disc * y * y;
    if (rem < 0) continue;
    double s = std::sqrt(rem);
    int64_t lo = (int64_t)std::floor((-s - K.omega_trace() * y) / 2) - 1;
    int64_t hi = (int64_t)std::ceil((s - K.omega_trace() * y) / 2) + 1;
    for (int64_t x = lo; x <= hi; ++x) {
      IntElem a{x, y};
      if (a.is_zero()) continue;
      int64_t n = K.norm(a);
      if (n > X) continue;
      if (K.unit_normalize(a) == a) out.push_back({a, n});
    }
  }
  std::sort(out.begin(), out.end(), [](auto& l, auto& r) {
    return l.second != r.second ? l.second < r.second : l.first < r.first;
  });
  return out;
}

}  // namespace bianchi
