#pragma once
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bianchi/arith.hpp"

namespace bianchi {

// Integral element x + y*omega of O_K.
struct IntElem {
  int64_t x = 0, y = 0;
  bool operator==(const IntElem& o) const { return x == o.x && y == o.y; }
  bool operator!=(const IntElem& o) const { return !(*this == o); }
  bool operator<(const IntElem& o) const { return x < o.x || (x == o.x && y < o.y); }
  bool is_zero() const { return x == 0 && y == 0; }
};

// K = Q(sqrt(-D)) with -D a fundamental discriminant; O_K = Z[omega].
class FieldK {
 public:
  explicit FieldK(int64_t D);
  int64_t D() const { return D_; }
  // omega^2 = trace*omega - normw
  int64_t omega_trace() const { return tr_; }
  int64_t omega_norm() const { return nw_; }
  std::vector<int64_t> omega_minpoly() const { return {nw_, -tr_, 1}; }
  int w() const { return w_; }
  int h() const { return h_; }
  const std::vector<IntElem>& units() const { return units_; }
  IntElem delta() const;  // sqrt(-D) as an element of O_K
  // omega inside Q(zeta_D) via the quadratic Gauss sum
  const CycNum& omega_cyc() const { return omega_cyc_; }
  CycNum to_cyc(const IntElem& a) const;
  CycNum to_cyc(const mpq_class& x, const mpq_class& y) const;
  std::complex<double> to_complex(const IntElem& a) const;

  IntElem mul(const IntElem& a, const IntElem& b) const;
  IntElem add(const IntElem& a, const IntElem& b) const { return {a.x + b.x, a.y + b.y}; }
  IntElem sub(const IntElem& a, const IntElem& b) const { return {a.x - b.x, a.y - b.y}; }
  IntElem conj(const IntElem& a) const { return {a.x + tr_ * a.y, -a.y}; }
  IntElem scale(const IntElem& a, int64_t s) const { return {a.x * s, a.y * s}; }
  IntElem pow(IntElem a, int e) const;
  int64_t norm(const IntElem& a) const;
  int64_t trace(const IntElem& a) const { return 2 * a.x + tr_ * a.y; }
  // exact division; nullopt if b does not divide a
  std::optional<IntElem> div_exact(const IntElem& a, const IntElem& b) const;
  // Tr(a/delta) for a in O_K (an integer)
  int64_t trace_over_delta(const IntElem& a) const;
  // canonical unit multiple of a nonzero element: maximal real part, then maximal imaginary part
  IntElem unit_normalize(const IntElem& a) const;
  bool is_unit(const IntElem& a) const { return norm(a) == 1; }
  std::string str(const IntElem& a) const;
  // class representatives I_1 = O_K, ... (only the count is used at h = 1)
  int kronecker(int64_t q) const;  // Kronecker symbol (-D / q)

 private:
  int64_t D_, tr_, nw_;
  int w_, h_;
  std::vector<IntElem> units_;
  CycNum omega_cyc_;
};

// Element of K with rational coordinates in {1, omega}.
struct ElemK {
  mpq_class x, y;
  ElemK() = default;
  ElemK(mpq_class a, mpq_class b) : x(std::move(a)), y(std::move(b)) {}
  static ElemK from(const IntElem& a) { return ElemK(mpq_class(a.x), mpq_class(a.y)); }
  bool operator==(const ElemK& o) const { return x == o.x && y == o.y; }
  bool is_zero() const { return x == 0 && y == 0; }
};
ElemK elem_mul(const FieldK& K, const ElemK& a, const ElemK& b);
ElemK elem_add(const ElemK& a, const ElemK& b);
ElemK elem_conj(const FieldK& K, const ElemK& a);
mpq_class elem_norm(const FieldK& K, const ElemK& a);
ElemK elem_inv(const FieldK& K, const ElemK& a);

// Integral ideal in Hermite normal form: I = Z*A + Z*(B + C*omega), C | A, C | B.
class IdealK {
 public:
  IdealK() = default;
  static IdealK from_generators(const FieldK& K, const std::vector<IntElem>& gens);
  static IdealK principal(const FieldK& K, const IntElem& g) { return from_generators(K, {g}); }
  static IdealK unit_ideal(const FieldK& K) { return principal(K, {1, 0}); }
  int64_t norm() const { return A_ * C_; }
  int64_t A() const { return A_; }
  int64_t B() const { return B_; }
  int64_t C() const { return C_; }
  bool contains(const IntElem& a) const;
  IntElem reduce(const IntElem& a) const;  // canonical representative
  int64_t index_of(const IntElem& a) const;  // 0 .. norm-1
  IntElem from_index(int64_t idx) const;
  bool is_unit_ideal() const { return norm() == 1; }
  bool operator==(const IdealK& o) const { return A_ == o.A_ && B_ == o.B_ && C_ == o.C_; }
  bool operator<(const IdealK& o) const {
    return A_ != o.A_ ? A_ < o.A_ : (B_ != o.B_ ? B_ < o.B_ : C_ < o.C_);
  }
  // generator for h = 1, normalized by FieldK::unit_normalize
  IntElem generator(const FieldK& K) const;
  std::string str() const;

 private:
  int64_t A_ = 1, B_ = 0, C_ = 1;
  mutable std::optional<IntElem> gen_;
};
IdealK ideal_mul(const FieldK& K, const IdealK& a, const IdealK& b);
IdealK ideal_pow(const FieldK& K, const IdealK& a, int e);
IdealK ideal_conj(const FieldK& K, const IdealK& a);
IdealK ideal_add(const FieldK& K, const IdealK& a, const IdealK& b);  // gcd
bool ideal_divides(const FieldK& K, const IdealK& a, const IdealK& b);  // a | b
// exact quotient b / a, requires a | b
IdealK ideal_div(const FieldK& K, const IdealK& b, const IdealK& a);

enum class Splitting { Split, Inert, Ramified };
struct PrimeSplit {
  int64_t q;
  Splitting kind;
  std::vector<IdealK> primes;  // split: {q1, q2}; inert: {(q)}; ramified: {Q} with Q^2 = (q)
};
PrimeSplit factor_prime(const FieldK& K, int64_t q);
// factorization of an integral ideal into prime powers
std::vector<std::pair<IdealK, int>> factor_ideal(const FieldK& K, const IdealK& I);
// ideals of norm <= X, one per ideal, with canonical generators (h = 1)
std::vector<std::pair<IntElem, int64_t>> ideals_up_to(const FieldK& K, int64_t X);

// (O_K / f)^x by enumeration, with a basis of cyclic factors.
class ResidueGroup {
 public:
  ResidueGroup(const FieldK& K, const IdealK& f);
  const IdealK& modulus() const { return f_; }
  int64_t order() const { return (int64_t)elems_.size(); }
  const std::vector<IntElem>& elements() const { return elems_; }
  const std::vector<IntElem>& generators() const { return gens_; }
  const std::vector<int64_t>& gen_orders() const { return ords_; }
  int64_t exponent() const;
  bool is_cyclic() const { return gens_.size() <= 1; }
  // coordinates of a in the generator basis; empty if not a unit mod f
  std::optional<std::vector<int64_t>> dlog(const IntElem& a) const;
  bool is_unit(const IntElem& a) const;
  // images of the global units in coordinates
  std::vector<std::vector<int64_t>> unit_image() const;
  int64_t euler_phi_ideal() const;  // N(f) prod (1 - 1/N(q))

 private:
  const FieldK* K_;
  IdealK f_;
  std::vector<IntElem> elems_;
  std::vector<IntElem> gens_;
  std::vector<int64_t> ords_;
  std::vector<int32_t> pos_;                  // residue index -> element position or -1
  std::vector<std::vector<int32_t>> coords_;  // per generator, indexed by position
};

// Residues modulo p^a pbar^b for split p = p pbar through (sigma1, sigma2) with
// (O/p^a)^x = (Z/p^a)^x generated by a fixed primitive root.
class SplitLevel {
 public:
  SplitLevel(const FieldK& K, int64_t p, int64_t root_mod, int a, int b, int64_t prim_root);
  int a() const { return a_; }
  int b() const { return b_; }
  int64_t p() const { return p_; }
  int64_t root() const { return root_; }  // image of omega mod p^max(a,b)
  IdealK prime_p() const;                 // (p, omega - root), the prime of sigma1
  int64_t n1() const { return n1_; }
  int64_t n2() const { return n2_; }
  int64_t mod1() const { return m1_; }
  int64_t mod2() const { return m2_; }
  int64_t group_order() const { return n1_ * n2_; }
  int64_t res1(const IntElem& x) const;  // sigma1(x) mod p^a
  int64_t res2(const IntElem& x) const;  // sigma2(x) mod p^b
  // discrete logs, -1 if not a unit
  int64_t dlog1(int64_t r) const { return a_ ? dl1_[(size_t)mod64(r, m1_)] : 0; }
  int64_t dlog2(int64_t r) const { return b_ ? dl2_[(size_t)mod64(r, m2_)] : 0; }
  int64_t exp1(int64_t k) const { return a_ ? pw1_[(size_t)mod64(k, n1_)] : 0; }
  int64_t exp2(int64_t k) const { return b_ ? pw2_[(size_t)mod64(k, n2_)] : 0; }
  // unit-trivial characters (j1, j2) meaning chi(x) = exp(2 pi i (j1 d1/n1 + j2 d2/n2))
  std::vector<std::pair<int64_t, int64_t>> unit_trivial_characters() const;
  bool unit_trivial(int64_t j1, int64_t j2) const;
  // conductor exponents of (j1, j2)
  std::pair<int, int> conductor(int64_t j1, int64_t j2) const;
  // the character at a lower level (a', b') it is induced from (requires conductor <= (a', b'))
  std::pair<int64_t, int64_t> restrict_to(int64_t j1, int64_t j2, int a2, int b2) const;
  // global element x + y omega with sigma1 = r1 mod p^a and sigma2 = r2 mod p^b
  IntElem crt_lift(int64_t r1, int64_t r2) const;
  const std::vector<std::pair<int64_t, int64_t>>& unit_dlogs() const { return unit_dl_; }

 private:
  const FieldK* K_;
  int64_t p_, root_;
  int a_, b_;
  int64_t m1_, m2_, n1_, n2_;
  std::vector<int32_t> dl1_, dl2_;
  std::vector<int32_t> pw1_, pw2_;
  std::vector<std::pair<int64_t, int64_t>> unit_dl_;
  IntElem e1_, e2_;  // CRT idempotents
};

// Cusp x/y with (x, y) coprime, normalized up to units; infinity is (1 : 0).
struct Cusp {
  IntElem num, den;
  bool is_infinity() const { return den.is_zero(); }
  bool operator==(const Cusp& o) const { return num == o.num && den == o.den; }
  bool operator<(const Cusp& o) const { return num < o.num || (num == o.num && den < o.den); }
};
Cusp make_cusp(const FieldK& K, const IntElem& x, const IntElem& y);  // reduces and normalizes
Cusp cusp_infinity();
std::string cusp_str(const FieldK& K, const Cusp& c);
IntElem elem_gcd(const FieldK& K, const IntElem& a, const IntElem& b);

// true iff c = infinity, or x in I_i and (y in m or y invertible mod m)
bool cusp_in_C(const FieldK& K, const IdealK& m, int class_index, const Cusp& c);

struct Mat2K {
  IntElem a, b, c, d;
};
Cusp apply_mat(const FieldK& K, const Mat2K& g, const Cusp& c);  // (a z + b)/(c z + d)
struct StabilityReport {
  int tested = 0;
  std::vector<std::string> counterexamples;
  bool ok() const { return counterexamples.empty(); }
};
StabilityReport c_stability_check(const FieldK& K, const IdealK& m, const std::vector<Mat2K>& mats,
                                  const std::vector<Cusp>& cusps);

}  // namespace bianchi
