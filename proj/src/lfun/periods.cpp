#include <array>
#include <cmath>

#include "bianchi/lfun.hpp"

namespace bianchi {

namespace mp = boost::multiprecision;

Real agm(const Real& a0, const Real& b0) {
  Real a = a0, b = b0;
  Real tol = mp::pow(Real(10), -(int)(working_digits() + 10));
  for (int it = 0; it < 200 && mp::abs(a - b) > tol * a; ++it) {
    Real an = (a + b) / 2;
    b = mp::sqrt(a * b);
    a = an;
  }
  return a;
}

namespace {
// roots e1 > e2 > e3 of x^3 + a4 x + a6 (all real), trigonometric form
std::array<Real, 3> real_roots(int64_t a4, int64_t a6) {
  Real p(a4), q(a6);
  if (4 * p * p * p + 27 * q * q >= 0) throw MathError("cm_periods: cubic does not have three real roots");
  Real m = 2 * mp::sqrt(-p / 3);
  Real theta = mp::acos(3 * q / (p * m)) / 3;
  std::array<Real, 3> r;
  for (int k = 0; k < 3; ++k) r[(size_t)k] = m * mp::cos(theta - 2 * pi_mp() * k / 3);
  std::sort(r.begin(), r.end(), [](const Real& x, const Real& y) { return x > y; });
  return r;
}
}  // namespace

Periods cm_periods(const FieldK& K, int64_t a4, int64_t a6, int k) {
  Periods P;
  auto e = real_roots(a4, a6);
  P.omega_inf = 2 * pi_mp() / agm(mp::sqrt(e[0] - e[2]), mp::sqrt(e[0] - e[1]));
  const int n = 2 * k + 2;
  Real ratio = P.omega_inf / pi_mp();
  P.omega_F = Complex(mp::pow(ratio, n));
  // sqrt(D)/(2i) = -delta/2 with delta = sqrt(-D)
  CycNum half_delta = K.to_cyc(K.delta()) * mpq_class(-1, 2);
  mpq_class two_over_w(2, K.w());
  two_over_w.canonicalize();
  P.norm_over_F = half_delta.pow(n) * two_over_w;
  P.omega_norm = to_mp(P.norm_over_F) * P.omega_F;
  return P;
}

double real_period_by_quadrature(int64_t a4, int64_t a6) {
  set_working_digits(std::max(working_digits(), 20));
  auto e = real_roots(a4, a6);
  const double l2 = (e[0] - e[1]).convert_to<double>(), l3 = (e[0] - e[2]).convert_to<double>();
  // x = e1 + t^2, then t = u/(1-u) on [0,1)
  auto f = [&](double u) {
    if (u >= 1) return 2.0;  // limit of the integrand
    double t = u / (1 - u);
    double dt = 1 / ((1 - u) * (1 - u));
    return 2 * dt / std::sqrt((t * t + l2) * (t * t + l3));
  };
  // smooth on [0,1], plain composite Simpson is enough
  const int n = 200000;
  double h = 1.0 / n, s = f(0) + f(1);
  for (int i = 1; i < n; ++i) s += f(i * h) * (i % 2 ? 4 : 2);
  return 2 * s * h / 3;
}

}  // namespace bianchi
