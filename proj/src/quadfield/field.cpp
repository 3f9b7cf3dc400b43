#include <cmath>
#include <sstream>

#include "bianchi/quadfield.hpp"

namespace bianchi {

namespace {
bool squarefree(int64_t n) {
  for (auto [q, e] : factor_int(n))
    if (e > 1) return false;
  return true;
}
int legendre(int64_t a, int64_t q) {
  a = mod64(a, q);
  if (a == 0) return 0;
  return powmod(a, (q - 1) / 2, q) == 1 ? 1 : -1;
}
}  // namespace

FieldK::FieldK(int64_t D) : D_(D) {
  if (D <= 0) throw MathError("FieldK: D must be positive");
  if (D % 4 == 3 && squarefree(D)) {
    tr_ = 1;
    nw_ = (1 + D) / 4;
  } else if (D % 4 == 0 && (D / 4) % 4 != 3 && (D / 4) % 4 != 0 && squarefree(D / 4)) {
    tr_ = 0;
    nw_ = D / 4;
  } else {
    throw MathError("FieldK: -" + std::to_string(D) + " is not a fundamental discriminant");
  }
  // units: elements of norm 1
  for (int64_t y = -1; y <= 1; ++y)
    for (int64_t x = -2; x <= 2; ++x)
      if (norm({x, y}) == 1) units_.push_back({x, y});
  w_ = (int)units_.size();
  // class number by counting reduced forms of discriminant -D
  h_ = 0;
  for (int64_t a = 1; 3 * a * a <= D; ++a)
    for (int64_t b = -a + 1; b <= a; ++b) {
      int64_t num = b * b + D;
      if (num % (4 * a)) continue;
      int64_t c = num / (4 * a);
      if (c < a) continue;
      if (c == a && b < 0) continue;
      if (gcd64(gcd64(a, std::abs(b)), c) != 1) continue;
      ++h_;
    }
  // sqrt(-D) as the Gauss sum of the Kronecker character mod D
  CycNum gs(D);
  for (int64_t a = 1; a <= D; ++a) {
    int k = kronecker(a);
    if (k) gs += CycNum::root_of_unity(D, a) * mpq_class(k);
  }
  // omega = (tr + sqrt(-D)) / 2 in both cases
  omega_cyc_ = (gs + CycNum::rational(mpq_class(tr_))) * mpq_class(1, 2);
}

int FieldK::kronecker(int64_t n) const {
  // Kronecker symbol (-D / n) for n >= 1
  if (n <= 0) throw MathError("kronecker: n must be positive");
  int r = 1;
  for (auto [q, e] : factor_int(n)) {
    int s;
    if (q == 2) {
      if (D_ % 4 == 0)
        s = 0;
      else
        s = (mod64(-D_, 8) == 1) ? 1 : -1;
    } else {
      s = legendre(-D_, q);
    }
    if (s == 0) return 0;
    if (s == -1 && (e % 2 == 1)) r = -r;
  }
  return r;
}

IntElem FieldK::delta() const { return tr_ == 1 ? IntElem{-1, 2} : IntElem{0, 2}; }

CycNum FieldK::to_cyc(const IntElem& a) const {
  return CycNum::rational(mpq_class(a.x)) + omega_cyc_ * mpq_class(a.y);
}
CycNum FieldK::to_cyc(const mpq_class& x, const mpq_class& y) const {
  return CycNum::rational(x) + omega_cyc_ * y;
}
std::complex<double> FieldK::to_complex(const IntElem& a) const {
  double re = a.x + a.y * tr_ / 2.0;
  double im = a.y * std::sqrt((double)(4 * nw_ - tr_ * tr_)) / 2.0;
  return {re, im};
}

IntElem FieldK::mul(const IntElem& a, const IntElem& b) const {
  // (x1 + y1 w)(x2 + y2 w) with w^2 = tr w - nw
  int64_t yy = a.y * b.y;
  return {a.x * b.x - nw_ * yy, a.x * b.y + a.y * b.x + tr_ * yy};
}
IntElem FieldK::pow(IntElem a, int e) const {
  if (e < 0) throw MathError("FieldK::pow: negative exponent");
  IntElem r{1, 0};
  while (e > 0) {
    if (e & 1) r = mul(r, a);
    e >>= 1;
    if (e) a = mul(a, a);
  }
  return r;
}
int64_t FieldK::norm(const IntElem& a) const { return a.x * a.x + tr_ * a.x * a.y + nw_ * a.y * a.y; }

std::optional<IntElem> FieldK::div_exact(const IntElem& a, const IntElem& b) const {
  int64_t n = norm(b);
  if (n == 0) throw MathError("division by zero in O_K");
  IntElem t = mul(a, conj(b));
  if (t.x % n || t.y % n) return std::nullopt;
  return IntElem{t.x / n, t.y / n};
}

int64_t FieldK::trace_over_delta(const IntElem& a) const { return a.y; }

IntElem FieldK::unit_normalize(const IntElem& a) const {
  if (a.is_zero()) throw MathError("unit_normalize: zero");
  IntElem best = a;
  bool first = true;
  for (auto& u : units_) {
    IntElem c = mul(u, a);
    if (first) {
      best = c;
      first = false;
      continue;
    }
    int64_t rc = 2 * c.x + tr_ * c.y, rb = 2 * best.x + tr_ * best.y;
    if (rc > rb || (rc == rb && c.y > best.y)) best = c;
  }
  return best;
}

std::string FieldK::str(const IntElem& a) const {
  std::ostringstream os;
  const char* w = (D_ == 4) ? "i" : "w";
  if (a.y == 0) {
    os << a.x;
  } else if (a.x == 0) {
    os << a.y << "*" << w;
  } else {
    os << a.x << (a.y > 0 ? "+" : "-") << std::llabs(a.y) << "*" << w;
  }
  return os.str();
}

ElemK elem_mul(const FieldK& K, const ElemK& a, const ElemK& b) {
  mpq_class yy = a.y * b.y;
  return ElemK(a.x * b.x - K.omega_norm() * yy, a.x * b.y + a.y * b.x + K.omega_trace() * yy);
}
ElemK elem_add(const ElemK& a, const ElemK& b) { return ElemK(a.x + b.x, a.y + b.y); }
ElemK elem_conj(const FieldK& K, const ElemK& a) { return ElemK(a.x + K.omega_trace() * a.y, -a.y); }
mpq_class elem_norm(const FieldK& K, const ElemK& a) {
  return a.x * a.x + K.omega_trace() * a.x * a.y + K.omega_norm() * a.y * a.y;
}
ElemK elem_inv(const FieldK& K, const ElemK& a) {
  mpq_class n = elem_norm(K, a);
  if (n == 0) throw MathError("elem_inv: zero");
  ElemK c = elem_conj(K, a);
  return ElemK(c.x / n, c.y / n);
}

}  // namespace bianchi
