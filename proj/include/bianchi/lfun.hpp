#pragma once
#include <boost/multiprecision/mpfr.hpp>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bianchi/arith.hpp"
#include "bianchi/heckechar.hpp"
#include "bianchi/quadfield.hpp"

namespace bianchi {

using Real = boost::multiprecision::mpfr_float;

// sets the default MPFR precision to digits plus guard digits
void set_working_digits(int digits);
int working_digits();

struct Complex {
  Real re, im;
  Complex() : re(0), im(0) {}
  Complex(Real r, Real i = Real(0)) : re(std::move(r)), im(std::move(i)) {}
  Complex(double r) : re(r), im(0) {}
  static Complex from(std::complex<double> z) { return Complex(Real(z.real()), Real(z.imag())); }
  Complex operator+(const Complex& o) const { return {re + o.re, im + o.im}; }
  Complex operator-(const Complex& o) const { return {re - o.re, im - o.im}; }
  Complex operator-() const { return {-re, -im}; }
  Complex operator*(const Complex& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
  Complex operator*(const Real& s) const { return {re * s, im * s}; }
  Complex operator/(const Complex& o) const;
  Complex operator/(const Real& s) const { return {re / s, im / s}; }
  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const Complex& o) { return *this = *this * o; }
  Complex conj() const { return {re, -im}; }
  Real norm() const { return re * re + im * im; }
  Real abs() const;
  std::complex<double> to_cd() const { return {re.convert_to<double>(), im.convert_to<double>()}; }
  std::string str(int digits = 20) const;
};
Complex exp_i(const Real& theta);               // e^{i theta}
Complex root_of_unity_mp(int64_t m, int64_t e);  // e^{2 pi i e/m}
Complex to_mp(const CycNum& x);
Complex to_mp(const FieldK& K, const IntElem& a);
Complex cpow_int(const Complex& z, int e);
Real pi_mp();

// complex value with a propagated error estimate (absolute)
struct ComplexVal {
  Complex value;
  double err = 0;
  std::complex<double> approx() const { return value.to_cd(); }
};

// ---- coefficient streams ----
struct StreamEntry {
  IntElem ideal;  // canonical generator
  int64_t norm;
  CycNum value;
};
class CoeffStream {
 public:
  CoeffStream() = default;
  CoeffStream(std::vector<StreamEntry> e, int64_t cutoff) : entries_(std::move(e)), cutoff_(cutoff) {}
  const std::vector<StreamEntry>& entries() const { return entries_; }
  int64_t cutoff() const { return cutoff_; }
  // value at the ideal with this canonical generator (0 if absent)
  CycNum at(const FieldK& K, const IntElem& a) const;
  // the Dirichlet series over Z: sum over ideals of a given norm
  CycNum rational_coeff(int64_t n) const;
  bool operator==(const CoeffStream& o) const;

 private:
  std::vector<StreamEntry> entries_;
  int64_t cutoff_ = 0;
};
// Stream(A, B)(a) = Sum_{bd = a} A(b) B^c(d), whose L-series is L(A, s) L(B, s)
CoeffStream coeff_stream(const FieldK& K, const HeckeCharacter& A, const HeckeCharacter& B, int64_t cutoff);
struct BianchiStreams {
  CoeffStream primary;    // (phi^c psi, phi^c psi^c lambda_K)
  CoeffStream alternate;  // (phi^c psi lambda_K, phi^c psi^c)
  bool agree = false;
};
BianchiStreams coeffs_of_bianchi(const FieldK& K, const HeckeCharacter& phi, const HeckeCharacter& psi,
                                 int64_t cutoff);

// ---- L-values ----
struct AfeReport {
  ComplexVal lvalue;      // L(chi, s0)
  Complex root_number;    // solved W of the unitary completed L-function
  double consistency = 0; // |Lambda(u3) - Lambda(u1)| relative
  int64_t terms = 0;
  double conductor_norm = 0;
};
struct AfeOptions {
  int digits = 50;
  double u1 = 1.0, u2 = 1.25, u3 = 1.1;
};
// L(chi, s0) for a Hecke character of any infinity type, s0 real; chi is primitivized first.
AfeReport hecke_lvalue_report(const HeckeCharacter& chi, double s0, const AfeOptions& opt = {});
ComplexVal hecke_lvalue(const HeckeCharacter& chi, double s0, int digits);
// plain truncated Dirichlet sum with tail bound, for s0 - 1 - (a+b)/2 > 1/2... (absolute convergence)
ComplexVal hecke_lvalue_direct(const HeckeCharacter& chi, double s0, int64_t cutoff);

// AFE core on precomputed class data: given unitary coefficients, the level Q = D N(conductor),
// kappa and s (unitary variable), returns Lambda_u(s) and the solved root number.
struct AfeSums {
  Complex direct[3], dual[3];  // per cut parameter u1, u2, u3
};
struct AfeWeights {
  // weights per norm m <= cutoff: direct (A/m)^s Gamma(s+kappa, m u/A), dual (A/m)^{1-s} Gamma(1-s+kappa, m/(u A))
  int64_t cutoff = 0;
  std::vector<Real> direct[3], dual[3];
  Real A;
  Real s, kappa;
  Complex pole[3];  // pole contributions for Dedekind zeta (zero otherwise)
};
AfeWeights afe_weights(double Q, const Real& s, const Real& kappa, const AfeOptions& opt, int64_t cutoff,
                       const Real& pole_residue = Real(0));
int64_t afe_cutoff(double Q, int digits, double u2 = 1.25);
// Lambda_u(s) and W from the sums; consistency is |Lambda(u3) - Lambda(u1)|
struct AfeSolved {
  Complex lambda, root_number;
  double consistency;
};
AfeSolved afe_solve(const AfeWeights& w, const AfeSums& sums);
Real incomplete_gamma(const Real& a, const Real& x);

// ---- periods ----
struct Periods {
  Real omega_inf;            // real period of the CM curve
  Complex omega_F;           // (Omega/pi)^{2k+2}
  Complex omega_norm;        // (2/w)(sqrt D Omega/(2 pi i))^{2k+2}
  CycNum norm_over_F;        // (2/w)(sqrt D/(2i))^{2k+2}
  bool use_norm = true;      // which period normalizes the symbol
  const Complex& active() const { return use_norm ? omega_norm : omega_F; }
};
// curve y^2 = x^3 + a4 x + a6 with three real roots; real period by AGM
Real agm(const Real& a, const Real& b);
Periods cm_periods(const FieldK& K, int64_t a4, int64_t a6, int k);
// numerical integral 2 int_{e1}^inf dx / sqrt(f(x)) for the cross check (double precision)
double real_period_by_quadrature(int64_t a4, int64_t a6);

// ---- base change context ----
struct BaseChange {
  const FieldK* K = nullptr;
  HeckeCharacter phi;        // the CM character
  HeckeCharacter lambdaK;
  const PadicEmbedding* emb = nullptr;
  IdealK P, Pb;              // P the prime of iota_p
  IntElem pi_p, pi_pbar;     // uniformizers used for cusps and matrices
  CycNum lambda;             // phi(pbar), the unit root U_p eigenvalue
  CycNum beta;               // phi(p)
  int k = 0;
  Periods periods;
  int digits = 50;
};
BaseChange make_base_change(const FieldK& K, const PadicEmbedding& emb, int digits, bool use_norm_period = true,
                            IntElem unit_p = {1, 0}, IntElem unit_pbar = {1, 0});

// L(F, psi, 1) = L(phi^c psi, 1) L(phi^c psi^c lambda_K, 1) and the completed, stabilized value
struct LambdaValue {
  ComplexVal L1, L2;
  Complex gamma_factor;     // Gamma(q+1)Gamma(r+1)/(2 pi i)^{q+r+2}
  Complex euler;            // prod_{q | p} (1 - phi(p) psi(q)/N q)
  Complex lambda;           // Lambda(F, psi)
  Complex lambda_stab;      // Lambda(F^p, psi)
  Complex ratio;            // Lambda(F^p, psi)/Omega_active
};
LambdaValue completed_lambda(const BaseChange& bc, const HeckeCharacter& psi);
Complex stabilization_factor(const BaseChange& bc, const HeckeCharacter& psi);

// SplitLevel p^a pbar^b compatible with the embedding (root from the seed, fixed primitive root)
SplitLevel split_level(const BaseChange& bc, int a, int b);
int64_t primitive_root_pk(int64_t p);  // generates (Z/p^k)^x for every k

// batch: Lambda(F^p, psi)/Omega_active for every unit-trivial psi of exact conductor p^a pbar^b,
// psi_f = SplitLevel character (j1, j2). Exact-precision path (MPFR).
std::map<std::pair<int64_t, int64_t>, Complex> level_ratios(const BaseChange& bc, int a, int b);

// same in double precision with FFTW (deep levels). Arrays are indexed j1 * n2 + j2 and hold
// values only at unit-trivial characters of exact conductor (a, b) (flag in `primitive`).
struct DeepLevel {
  int a = 0, b = 0;
  int64_t n1 = 1, n2 = 1;
  std::vector<char> primitive;
  std::vector<std::complex<double>> ratio;  // Lambda(F^p, psi)/Omega_active
  std::vector<std::complex<double>> gauss;  // W(psi)
  double max_consistency = 0;
};
DeepLevel deep_level_ratios(const BaseChange& bc, int a, int b);
// W(psi) in double precision from the factorized local sums, for all (j1, j2) at level (a, b)
std::vector<std::complex<double>> deep_gauss_sums(const BaseChange& bc, const SplitLevel& lev);

// ---- recognition ----
struct Recognition {
  CycNum value;
  double margin = 0;     // |b2| / |b1| after reduction
  double residual = 0;
  bool ok = false;
  std::string reason;
};
// element of Q(zeta_m) of bounded height near z
Recognition rationalize(const Complex& z, int64_t m, const mpz_class& height, double err);
// element x + y omega of K near z
Recognition recognize_in_K(const FieldK& K, const Complex& z, const mpz_class& height, double err);
// values X(chi^sigma) = sigma(X(chi)) on a Galois orbit over K; basis zeta_r^j
struct OrbitSolve {
  std::vector<CycNum> values;  // exact, one per orbit member
  double margin = 1e300;
  double residual = 0;
  bool ok = false;
  std::string reason;
};
// members[g] is the numeric value at sigma_g where sigma_g(zeta_r) = zeta_r^{exps[g]}, exps over (Z/r)^x
OrbitSolve solve_galois_orbit(const FieldK& K, int64_t r, const std::vector<int64_t>& exps,
                              const std::vector<Complex>& members, const mpz_class& height, double err);

// ---- Katz ----
struct KatzValue {
  ComplexVal value;     // the interpolation value divided by Omega_p^{a-b}
  CycNum Wp;            // W_p(eta)
  CycNum euler;         // (1 - eta(pbar))(1 - 1/(eta(p) N p)) with the eta(p) = 0 convention
  int t = 0;            // exponent of p in the conductor of eta
};
// eta of infinity type (a, b), a > 0 >= b; differential d for the local Gauss sum at p
KatzValue katz_rhs(const BaseChange& bc, const HeckeCharacter& eta, const IntElem& differential);

}  // namespace bianchi
