#include <cmath>
#include <mutex>
#include <tuple>

#include "bianchi/lfun.hpp"

namespace bianchi {

namespace mp = boost::multiprecision;

Real incomplete_gamma(const Real& a, const Real& x) {
  // closed forms for positive integers and half-integers, MPFR otherwise
  Real twice = a * 2;
  Real tr = mp::round(twice);
  if (twice == tr && a > 0 && tr < 200) {
    int n2 = tr.convert_to<int>();
    Real ex = mp::exp(-x);
    if (n2 % 2 == 0) {
      int n = n2 / 2;
      Real term(1), sum(1), fact(1);
      for (int k = 1; k < n; ++k) {
        term *= x / k;
        sum += term;
        fact *= k;
      }
      return fact * ex * sum;
    }
    Real g = mp::sqrt(pi_mp()) * mp::erfc(mp::sqrt(x));
    Real s(0.5);
    for (int k = 1; k < n2; k += 2) {
      g = s * g + mp::pow(x, s) * ex;
      s += 1;
    }
    return g;
  }
  Real r;
  mpfr_gamma_inc(r.backend().data(), a.backend().data(), x.backend().data(), MPFR_RNDN);
  return r;
}

int64_t afe_cutoff(double Q, int digits, double u2) {
  double A = std::sqrt(Q) / (2 * M_PI);
  return (int64_t)std::ceil(u2 * A * (2.3 * digits + 20)) + 10;
}

namespace {
struct WeightKey {
  double Q;
  std::string s, kappa, res;
  int64_t cutoff;
  int digits;
  double u1, u2, u3;
  bool operator<(const WeightKey& o) const {
    return std::tie(Q, s, kappa, res, cutoff, digits, u1, u2, u3) <
           std::tie(o.Q, o.s, o.kappa, o.res, o.cutoff, o.digits, o.u1, o.u2, o.u3);
  }
};
std::mutex g_wmu;
std::map<WeightKey, AfeWeights> g_weights;
}  // namespace

AfeWeights afe_weights(double Q, const Real& s, const Real& kappa, const AfeOptions& opt, int64_t cutoff,
                       const Real& pole_residue) {
  WeightKey key{Q, s.str(30), kappa.str(30), pole_residue.str(30), cutoff, working_digits(), opt.u1, opt.u2, opt.u3};
  {
    std::lock_guard lk(g_wmu);
    auto it = g_weights.find(key);
    if (it != g_weights.end()) return it->second;
  }
  AfeWeights w;
  w.cutoff = cutoff;
  w.A = mp::sqrt(Real(Q)) / (2 * pi_mp());
  w.s = s;
  w.kappa = kappa;
  const double us[3] = {opt.u1, opt.u2, opt.u3};
  Real a1 = s + kappa, a2 = 1 - s + kappa;
  for (int j = 0; j < 3; ++j) {
    Real u(us[j]);
    w.direct[j].resize((size_t)cutoff + 1);
    w.dual[j].resize((size_t)cutoff + 1);
    for (int64_t m = 1; m <= cutoff; ++m) {
      Real Am = w.A / m;
      w.direct[j][(size_t)m] = mp::pow(Am, s) * incomplete_gamma(a1, m * u / w.A);
      w.dual[j][(size_t)m] = mp::pow(Am, 1 - s) * incomplete_gamma(a2, m / (u * w.A));
    }
    if (pole_residue != 0)
      w.pole[j] = Complex(pole_residue * (mp::pow(u, s - 1) / (s - 1) - mp::pow(u, s) / s));
  }
  std::lock_guard lk(g_wmu);
  g_weights.emplace(key, w);
  return w;
}

AfeSolved afe_solve(const AfeWeights& w, const AfeSums& sums) {
  Complex S1 = sums.direct[0] + w.pole[0], S2 = sums.direct[1] + w.pole[1], S3 = sums.direct[2] + w.pole[2];
  Complex T1 = sums.dual[0], T2 = sums.dual[1], T3 = sums.dual[2];
  Complex den = T2 - T1;
  if (den.abs() == 0) throw MathError("afe: root number resolution failure (degenerate test points)");
  Complex W = (S1 - S2) / den;
  Complex L1 = S1 + W * T1;
  Complex L3 = S3 + W * T3;
  AfeSolved out;
  out.lambda = L1;
  out.root_number = W;
  out.consistency = (L3 - L1).abs().convert_to<double>();
  return out;
}

namespace {
// unitary coefficient of a primitive character at the ideal (alpha)
Complex unitary_coeff(const HeckeCharacter& chi, const FieldK& K, const IntElem& alpha, int64_t N,
                      const std::vector<Complex>& roots) {
  Complex z = to_mp(K, alpha) / mp::sqrt(Real(N));
  Complex v = roots[(size_t)chi.eps_exp(alpha)];
  InfinityType t = chi.type();
  if (t.a) v = v * cpow_int(z.conj(), t.a);  // z^{-a} = conj(z)^a on the unit circle
  if (t.b) v = v * cpow_int(z, t.b);
  return v;
}
}  // namespace

AfeReport hecke_lvalue_report(const HeckeCharacter& chi_in, double s0, const AfeOptions& opt) {
  set_working_digits(opt.digits);
  // the functional equation only holds for genuine Hecke characters
  if (!chi_in.unit_compatible()) throw MathError("hecke_lvalue: character is not trivial on units (" + chi_in.describe() + ")");
  HeckeCharacter chi = chi_in.primitive();
  const FieldK& K = chi.field();
  InfinityType t = chi.type();
  const int n = std::abs(t.a - t.b);
  Real kappa = Real(n) / 2;
  Real s = Real(s0) + Real(t.a + t.b) / 2;
  const double Q = (double)K.D() * (double)chi.modulus().norm();
  const int64_t cutoff = afe_cutoff(Q, opt.digits, opt.u2);
  const bool pole = chi.modulus().is_unit_ideal() && t.a == t.b;
  if (pole && (s == 1 || s == 0)) throw MathError("hecke_lvalue: pole of the Dedekind zeta function");
  Real residue = pole ? Real(K.h()) / K.w() : Real(0);
  AfeWeights w = afe_weights(Q, s, kappa, opt, cutoff, residue);
  std::vector<Complex> roots;
  for (int64_t e = 0; e < chi.order(); ++e) roots.push_back(root_of_unity_mp(chi.order(), e));
  AfeSums sums;
  int64_t terms = 0;
  for (auto& [alpha, N] : ideals_up_to(K, cutoff)) {
    if (!chi.coprime(alpha)) continue;
    Complex c = unitary_coeff(chi, K, alpha, N, roots);
    Complex cc = c.conj();
    for (int j = 0; j < 3; ++j) {
      sums.direct[j] += c * w.direct[j][(size_t)N];
      sums.dual[j] += cc * w.dual[j][(size_t)N];
    }
    ++terms;
  }
  AfeSolved sol = afe_solve(w, sums);
  Real gam = mp::tgamma(s + kappa) * mp::pow(w.A, s);
  AfeReport rep;
  rep.lvalue.value = sol.lambda / gam;
  rep.root_number = sol.root_number;
  rep.consistency = sol.consistency / gam.convert_to<double>();
  // tail of the smoothed sums is below 10^{-digits} by the cutoff choice
  rep.lvalue.err = rep.consistency + std::pow(10.0, -opt.digits);
  rep.terms = terms;
  rep.conductor_norm = Q;
  return rep;
}

ComplexVal hecke_lvalue(const HeckeCharacter& chi, double s0, int digits) {
  AfeOptions opt;
  opt.digits = digits;
  return hecke_lvalue_report(chi, s0, opt).lvalue;
}

ComplexVal hecke_lvalue_direct(const HeckeCharacter& chi, double s0, int64_t cutoff) {
  const FieldK& K = chi.field();
  InfinityType t = chi.type();
  const double sigma = s0 + (t.a + t.b) / 2.0;
  if (sigma <= 1.0) throw MathError("hecke_lvalue_direct: outside the region of absolute convergence");
  std::vector<std::complex<double>> roots;
  for (int64_t e = 0; e < chi.order(); ++e) roots.push_back(std::polar(1.0, 2 * M_PI * e / chi.order()));
  set_working_digits(30);
  // long double is plenty for a tail-bounded check
  std::complex<long double> acc = 0;
  for (auto& [alpha, N] : ideals_up_to(K, cutoff)) {
    if (!chi.coprime(alpha)) continue;
    std::complex<double> z = K.to_complex(alpha) / std::sqrt((double)N);
    std::complex<double> v = roots[(size_t)chi.eps_exp(alpha)];
    if (t.a) v *= std::pow(std::conj(z), t.a);
    if (t.b) v *= std::pow(z, t.b);
    acc += std::complex<long double>(v) * (long double)std::pow((double)N, -sigma);
  }
  ComplexVal out;
  out.value = Complex(Real((double)acc.real()), Real((double)acc.imag()));
  // number of ideals of norm n is at most d(n); Sum_{n > X} d(n) n^{-sigma} <= X^{1-sigma}(log X + 2)/(sigma - 1)
  double X = (double)cutoff;
  out.err = std::pow(X, 1 - sigma) * (std::log(X) + 2) / (sigma - 1) + 1e-15;
  return out;
}

}  // namespace bianchi
