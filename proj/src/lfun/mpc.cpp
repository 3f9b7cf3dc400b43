#include <sstream>

#include "bianchi/lfun.hpp"

namespace bianchi {

namespace {
thread_local int g_digits = 50;
}

void set_working_digits(int digits) {
  g_digits = digits;
  Real::default_precision((unsigned)(digits + 15));
}
int working_digits() { return g_digits; }

Complex Complex::operator/(const Complex& o) const {
  Real n = o.norm();
  if (n == 0) throw MathError("Complex: division by zero");
  return {(re * o.re + im * o.im) / n, (im * o.re - re * o.im) / n};
}

Real Complex::abs() const { return boost::multiprecision::sqrt(norm()); }

std::string Complex::str(int digits) const {
  std::ostringstream os;
  os.precision(digits);
  os << re << (im < 0 ? " - " : " + ") << boost::multiprecision::abs(im) << "i";
  return os.str();
}

Real pi_mp() {
  Real r;
  mpfr_const_pi(r.backend().data(), MPFR_RNDN);
  return r;
}

Complex exp_i(const Real& theta) { return {boost::multiprecision::cos(theta), boost::multiprecision::sin(theta)}; }

Complex root_of_unity_mp(int64_t m, int64_t e) {
  e = mod64(e, m);
  // exact special cases avoid tiny imaginary noise
  if (e == 0) return Complex(Real(1));
  if (2 * e == m) return Complex(Real(-1));
  if (4 * e == m) return Complex(Real(0), Real(1));
  if (4 * e == 3 * m) return Complex(Real(0), Real(-1));
  return exp_i(2 * pi_mp() * Real(e) / Real(m));
}

static Real from_q(const mpq_class& q) {
  Real r;
  mpfr_set_q(r.backend().data(), q.get_mpq_t(), MPFR_RNDN);
  return r;
}

Complex to_mp(const CycNum& x) {
  Complex s;
  const auto& c = x.coeffs();
  for (size_t k = 0; k < c.size(); ++k) {
    if (c[k] == 0) continue;
    s += root_of_unity_mp(x.conductor(), (int64_t)k) * from_q(c[k]);
  }
  return s;
}

Complex to_mp(const FieldK& K, const IntElem& a) {
  Real disc(4 * K.omega_norm() - K.omega_trace() * K.omega_trace());
  Real re = Real(a.x) + Real(a.y) * Real(K.omega_trace()) / 2;
  Real im = Real(a.y) * boost::multiprecision::sqrt(disc) / 2;
  return {re, im};
}

Complex cpow_int(const Complex& z, int e) {
  Complex r(Real(1)), b = z;
  bool neg = e < 0;
  unsigned n = (unsigned)std::abs(e);
  while (n) {
    if (n & 1) r = r * b;
    n >>= 1;
    if (n) b = b * b;
  }
  return neg ? Complex(Real(1)) / r : r;
}

}  // namespace bianchi
