#pragma once
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <mutex>
#include <vector>

#include "bianchi/lfun.hpp"

namespace bianchi {

template <class R>
struct Mat2 {
  R a, b, c, d;
};

// Element of V_{k,l}^*: coefficient c[i][j] pairs with X^{k-i} Y^i Xbar^{l-j} Ybar^j.
template <class R>
struct DualPoly {
  int k = 0, l = 0;
  std::vector<R> c;  // (k+1)(l+1), row-major in i
  DualPoly() = default;
  DualPoly(int k_, int l_, const R& zero) : k(k_), l(l_), c((size_t)((k_ + 1) * (l_ + 1)), zero) {}
  R& at(int i, int j) { return c[(size_t)(i * (l + 1) + j)]; }
  const R& at(int i, int j) const { return c[(size_t)(i * (l + 1) + j)]; }
  // pairing with the monomial X^{k-i} Y^i Xbar^{l-j} Ybar^j
  const R& pair(int i, int j) const { return at(i, j); }
};

// column i of the result: coefficients of (dX + bY)^{k-i} (cX + aY)^i in X^{k-i'} Y^{i'}
template <class R>
std::vector<std::vector<R>> poly_action_matrix(const Mat2<R>& g, int k, const R& zero, const R& one) {
  // out[i'][i]
  std::vector<std::vector<R>> out((size_t)k + 1, std::vector<R>((size_t)k + 1, zero));
  for (int i = 0; i <= k; ++i) {
    // polynomial in Y/X: coefficients by power of Y
    std::vector<R> poly{one};
    auto mul_lin = [&](const R& x_coef, const R& y_coef) {
      std::vector<R> next(poly.size() + 1, zero);
      for (size_t e = 0; e < poly.size(); ++e) {
        next[e] = next[e] + poly[e] * x_coef;
        next[e + 1] = next[e + 1] + poly[e] * y_coef;
      }
      poly = std::move(next);
    };
    for (int e = 0; e < k - i; ++e) mul_lin(g.d, g.b);
    for (int e = 0; e < i; ++e) mul_lin(g.c, g.a);
    for (int ip = 0; ip <= k; ++ip) out[(size_t)ip][(size_t)i] = poly[(size_t)ip];
  }
  return out;
}

// (v|gamma)(P) = v(gamma . P), gamma . P(X, Y) = P(dX + bY, cX + aY); g2 acts on the conjugate block.
// This is a right action: (v|g)|h = v|(gh).
template <class R>
DualPoly<R> gamma_action(const Mat2<R>& g1, const Mat2<R>& g2, const DualPoly<R>& v, const R& zero, const R& one) {
  auto A = poly_action_matrix(g1, v.k, zero, one);
  auto B = poly_action_matrix(g2, v.l, zero, one);
  DualPoly<R> out(v.k, v.l, zero);
  for (int i = 0; i <= v.k; ++i)
    for (int j = 0; j <= v.l; ++j) {
      R s = zero;
      for (int ip = 0; ip <= v.k; ++ip)
        for (int jp = 0; jp <= v.l; ++jp) s = s + A[(size_t)ip][(size_t)i] * B[(size_t)jp][(size_t)j] * v.at(ip, jp);
      out.at(i, j) = s;
    }
  return out;
}

// formal integer combination of cusps
struct CuspDivisor {
  std::map<Cusp, int64_t> terms;
  static CuspDivisor from_pair(const Cusp& a, const Cusp& b);  // {a} - {b}
  int64_t degree() const;
};

// Symbol data at one level p^a pbar^b: values at unit numerators indexed by dlog class d1 * n2 + d2.
// Values c(b/gamma)/Omega lie in K; they are stored as numerators over a common denominator.
struct SymbolLevel {
  int a = 0, b = 0;
  int64_t n1 = 1, n2 = 1;
  std::vector<IntElem> num;
  bool exact = false;               // recognized and inverted in exact arithmetic
  double max_round_residual = 0;    // deep levels: distance to the lattice before rounding
};

// Exact inversion record at a level, kept for the round trip
struct ExactLevelData {
  int a = 0, b = 0;
  std::map<std::pair<int64_t, int64_t>, CycNum> lo;  // Lambda(F^p, psi)/Omega_active, primitive characters only
  std::map<std::pair<int64_t, int64_t>, CycNum> X;   // 8 W(psi) lo(psi) (D w / 2 = 8 on Q(i))
  std::map<std::pair<int64_t, int64_t>, CycNum> S;   // S_g for every unit-trivial character at this level
  std::vector<CycNum> c;                             // c(b/gamma)/Omega at unit residues, by dlog class
  double min_margin = 1e300;
  bool from_cache = false;
};

// recognized Lambda/Omega constants of one exact level and the worst recognition margin
struct RecognizedLevel {
  std::map<std::pair<int64_t, int64_t>, CycNum> lo;
  double min_margin = 1e300;
};

struct RoundTrip {
  int checked = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty() && checked > 0; }
};

struct SymbolOptions {
  int exact_max = 2;            // levels (a, b) with max(a, b) <= exact_max are inverted exactly
  int64_t denominator = 100;    // common denominator of the symbol values
  mpz_class height = mpz_class(1) << 40;
  // optional persistence of recognized constants; a loaded level skips the L-value batch
  std::function<std::optional<RecognizedLevel>(int, int)> load_level;
  std::function<void(int, int, const RecognizedLevel&)> store_level;
};

// The period-normalized base-change symbol c(a)/Omega recovered from twisted L-values.
class BaseChangeSymbol {
 public:
  BaseChangeSymbol(const BaseChange& bc, SymbolOptions opt = {});
  const BaseChange& context() const { return *bc_; }
  const SymbolOptions& options() const { return opt_; }

  // computes every level (a, b) <= (A, B) that is not present yet
  void ensure_levels(int A, int B);
  bool has_level(int a, int b) const { return levels_.count({a, b}) > 0; }
  const SymbolLevel& level(int a, int b) const;
  const ExactLevelData& exact_data(int a, int b) const;
  // forward substitution: Sum_b chi(b) c(b/g) = lambda^{a+b} S_g(chi) exactly, every character at the level
  RoundTrip round_trip(int a, int b) const;

  // value at the cusp b / (pi_p^t pi_pbar^s) from p-adic residues of the numerator;
  // r1 = sigma1(b) mod p^t, r2 = sigma2(b) mod p^s (reduced to the exact level first)
  IntElem value_num(int t, int s, int64_t r1, int64_t r2) const;
  ElemK value(int t, int s, int64_t r1, int64_t r2) const;
  // value at an arbitrary element of K with p-power denominator
  ElemK value_at(const ElemK& a) const;
  CycNum value_cyc(const ElemK& a) const;

  // constants for the residue reduction: sigma1(pi_p) = p rho1, sigma1(pi_pbar) = tau1,
  // sigma2(pi_p) = tau2, sigma2(pi_pbar) = p rho2, all modulo p^prec
  struct UnitData {
    int prec = 0;
    int64_t mod = 1;
    int64_t rho1 = 1, tau1 = 1, tau2 = 1, rho2 = 1;
    int64_t root = 0;  // omega under sigma1 mod p^prec
  };
  const UnitData& units() const { return ud_; }
  const SplitLevel& split(int a, int b) const;

  // bookkeeping for reports
  int exact_levels() const;
  int deep_levels() const;
  double max_round_residual() const;

 private:
  const BaseChange* bc_;
  SymbolOptions opt_;
  std::map<std::pair<int, int>, SymbolLevel> levels_;
  std::map<std::pair<int, int>, ExactLevelData> exact_;
  // S_f of every primitive character, by conductor level, in double precision (deep path)
  std::map<std::pair<int, int>, std::vector<std::complex<double>>> sf_deep_;
  mutable std::map<std::pair<int, int>, SplitLevel> splits_;
  UnitData ud_;

  void build_exact(int a, int b);
  void build_deep(int a, int b);
  const std::vector<std::complex<double>>& primitive_sf(int a, int b);
  void prepare_units(int prec);
};

// Galois orbit over Q(i) of the SplitLevel character (j1, j2): chi -> chi^e, e = 1 mod 4.
// Values of the orbit lie in Q(i)(zeta_r), r the odd part of the order; exps[g] is e mod r.
struct CharOrbit {
  int64_t r = 1;
  std::vector<int64_t> exps;
  std::vector<std::pair<int64_t, int64_t>> members;
};
CharOrbit galois_orbit(const SplitLevel& lev, int64_t j1, int64_t j2);

// Exact local sums of the symbol: (phi|U_q)(at cusp b/g) with q in {p, pbar}, in K, from the table
ElemK hecke_U_value(const BaseChangeSymbol& sym, bool at_p, int t, int s, int64_t r1, int64_t r2);

}  // namespace bianchi
