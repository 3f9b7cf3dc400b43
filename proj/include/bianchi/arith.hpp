#pragma once
#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bianchi {

struct MathError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int64_t euler_phi(int64_t n);
int64_t gcd64(int64_t a, int64_t b);
int64_t lcm64(int64_t a, int64_t b);
int64_t ipow(int64_t b, int e);
int64_t mod64(int64_t a, int64_t m);
int64_t mulmod(int64_t a, int64_t b, int64_t m);
int64_t powmod(int64_t b, int64_t e, int64_t m);
int64_t invmod(int64_t a, int64_t m);
std::vector<std::pair<int64_t, int>> factor_int(int64_t n);
bool is_prime(int64_t n);

// Element of Q(zeta_m) in the power basis 1, z, ..., z^{phi(m)-1}.
class CycNum {
 public:
  CycNum();  // zero in Q
  explicit CycNum(int64_t m);
  CycNum(int64_t m, std::vector<mpq_class> coeffs);
  static CycNum rational(const mpq_class& q);
  static CycNum root_of_unity(int64_t m, int64_t e);  // exp(2 pi i e / m)
  static CycNum from_int(long v) { return rational(mpq_class(v)); }

  int64_t conductor() const { return m_; }
  const std::vector<mpq_class>& coeffs() const { return c_; }
  bool is_zero() const;
  bool is_rational() const;
  mpq_class rational_part() const;  // only for is_rational()

  CycNum lift(int64_t M) const;  // requires m | M
  CycNum operator+(const CycNum& o) const;
  CycNum operator-(const CycNum& o) const;
  CycNum operator-() const;
  CycNum operator*(const CycNum& o) const;
  CycNum operator*(const mpq_class& q) const;
  CycNum operator/(const CycNum& o) const { return *this * o.inv(); }
  CycNum& operator+=(const CycNum& o) { return *this = *this + o; }
  CycNum& operator-=(const CycNum& o) { return *this = *this - o; }
  CycNum& operator*=(const CycNum& o) { return *this = *this * o; }
  CycNum inv() const;
  CycNum pow(int64_t e) const;
  CycNum conj() const;             // complex conjugation
  CycNum galois(int64_t a) const;  // zeta -> zeta^a, gcd(a, m) = 1
  bool operator==(const CycNum& o) const;
  bool operator!=(const CycNum& o) const { return !(*this == o); }

  // smallest conductor m' | m with this element in Q(zeta_m')
  CycNum minimized() const;
  std::complex<double> to_complex() const;
  std::string str() const;  // e.g. "[4: 1/2, -1/2]"
  mpz_class denominator() const;
  // max |numerator| and common denominator, for height bounds
  mpz_class height() const;

 private:
  int64_t m_ = 1;
  std::vector<mpq_class> c_;
};

const std::vector<int64_t>& cyclotomic_poly(int64_t m);
// zeta_m^e expressed in the power basis (integer coefficients)
const std::vector<int64_t>& cyclotomic_power(int64_t m, int64_t e);

// p-adic number p^v * u with u a unit known modulo p^N (relative precision N).
// Exact zero known modulo p^v is stored with zero=true and N=0.
class PadicNum {
 public:
  PadicNum() = default;
  PadicNum(int64_t p, int64_t unit, int v, int N);
  static PadicNum zero(int64_t p, int absprec);
  static PadicNum from_int(int64_t p, int64_t a, int absprec);
  static PadicNum from_rational(int64_t p, const mpq_class& q, int absprec);
  static int max_precision(int64_t p);  // largest N with p^N < 2^62

  int64_t prime() const { return p_; }
  int valuation() const { return v_; }  // for zero: absolute precision
  int64_t unit() const { return u_; }
  int relprec() const { return N_; }
  int absprec() const { return zero_ ? v_ : v_ + N_; }
  bool is_zero() const { return zero_; }
  // residue modulo p^absprec for values with v >= 0
  int64_t residue() const;

  PadicNum operator+(const PadicNum& o) const;
  PadicNum operator-(const PadicNum& o) const;
  PadicNum operator-() const;
  PadicNum operator*(const PadicNum& o) const;
  PadicNum operator/(const PadicNum& o) const { return *this * o.inv(); }
  PadicNum& operator+=(const PadicNum& o) { return *this = *this + o; }
  PadicNum& operator-=(const PadicNum& o) { return *this = *this - o; }
  PadicNum& operator*=(const PadicNum& o) { return *this = *this * o; }
  PadicNum inv() const;
  PadicNum pow(int64_t e) const;
  PadicNum reduce_absprec(int absprec) const;  // never increases precision
  // congruent to o modulo p^{min absprec}
  bool equals(const PadicNum& o) const;
  std::string str() const;

 private:
  int64_t p_ = 0;
  int v_ = 0;
  int64_t u_ = 0;
  int N_ = 0;
  bool zero_ = true;
};

PadicNum hensel_root(const std::vector<int64_t>& poly, int64_t p, int N, int64_t seed);

// Element of Q_p(zeta_{p^e}) in the power basis over Q_p; exponent e = 0 gives Q_p.
class PadicCyc {
 public:
  PadicCyc() = default;
  PadicCyc(int64_t p, int e, std::vector<PadicNum> coords);
  static PadicCyc scalar(const PadicNum& x);
  int64_t prime() const { return p_; }
  int exponent() const { return e_; }
  const std::vector<PadicNum>& coords() const { return c_; }
  PadicCyc lift(int e) const;
  PadicCyc operator+(const PadicCyc& o) const;
  PadicCyc operator-(const PadicCyc& o) const;
  PadicCyc operator*(const PadicCyc& o) const;
  PadicCyc operator*(const PadicNum& o) const;
  // minimum coordinate valuation; the power basis is an integral basis of Z_p[zeta]
  int valuation() const;
  int absprec() const;
  bool is_zero() const;
  std::string str() const;

 private:
  int64_t p_ = 0;
  int e_ = 0;
  std::vector<PadicNum> c_;
};

// The fixed embedding iota_p. Roots of unity of order dividing p-1 land in Z_p;
// the p-power part of a conductor is kept formally (PadicCyc).
class PadicEmbedding {
 public:
  PadicEmbedding() = default;
  // omega_poly: minimal polynomial of the integral generator of O_K (low degree first)
  PadicEmbedding(int64_t p, int N, const std::vector<int64_t>& omega_poly, int64_t seed,
                 const CycNum* omega_in_cyc);

  int64_t prime() const { return p_; }
  int precision() const { return N_; }
  int64_t seed() const { return seed_; }
  const PadicNum& omega() const { return omega_; }
  const PadicNum& omega_conj() const { return omega_bar_; }
  PadicNum zeta_split(int64_t d) const;  // d | p-1
  int64_t split_conductor() const { return p_ - 1; }

  PadicNum embed(const CycNum& x) const;        // requires conductor | p-1
  PadicCyc embed_formal(const CycNum& x) const;  // conductor = m' p^e with m' | p-1
  // (a + b omega) under the two completions above p
  PadicNum sigma1(const mpq_class& a, const mpq_class& b) const;
  PadicNum sigma2(const mpq_class& a, const mpq_class& b) const;

 private:
  int64_t p_ = 0;
  int N_ = 0;
  int64_t seed_ = 0;
  PadicNum omega_, omega_bar_;
  PadicNum zeta_pm1_;
};

}  // namespace bianchi
