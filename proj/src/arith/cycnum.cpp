#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>

#include "bianchi/arith.hpp"

namespace bianchi {

int64_t gcd64(int64_t a, int64_t b) { return std::gcd(a, b); }
int64_t lcm64(int64_t a, int64_t b) { return a / std::gcd(a, b) * b; }
int64_t ipow(int64_t b, int e) {
  int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}
int64_t mod64(int64_t a, int64_t m) {
  int64_t r = a % m;
  return r < 0 ? r + m : r;
}
int64_t mulmod(int64_t a, int64_t b, int64_t m) {
  __int128 r = (__int128)a * b % m;
  if (r < 0) r += m;
  return (int64_t)r;
}
int64_t powmod(int64_t b, int64_t e, int64_t m) {
  int64_t r = 1 % m;
  b = mod64(b, m);
  while (e > 0) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}
int64_t invmod(int64_t a, int64_t m) {
  int64_t g = m, x = 0, x1 = 1, a1 = mod64(a, m);
  while (a1) {
    int64_t q = g / a1;
    std::tie(g, a1) = std::make_pair(a1, g - q * a1);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  if (g != 1) throw MathError("invmod: not invertible");
  return mod64(x, m);
}
std::vector<std::pair<int64_t, int>> factor_int(int64_t n) {
  std::vector<std::pair<int64_t, int>> out;
  for (int64_t q = 2; q * q <= n; ++q) {
    if (n % q) continue;
    int e = 0;
    while (n % q == 0) n /= q, ++e;
    out.push_back({q, e});
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}
bool is_prime(int64_t n) {
  if (n < 2) return false;
  for (int64_t q = 2; q * q <= n; ++q)
    if (n % q == 0) return false;
  return true;
}
int64_t euler_phi(int64_t n) {
  int64_t r = n;
  for (auto [q, e] : factor_int(n)) r = r / q * (q - 1);
  return r;
}

namespace {
std::mutex g_cyc_mu;
std::map<int64_t, std::vector<int64_t>> g_phi_poly;
std::map<int64_t, std::vector<std::vector<int64_t>>> g_powers;

std::vector<int64_t> poly_divexact(std::vector<int64_t> num, const std::vector<int64_t>& den) {
  // monic den
  int dn = (int)den.size() - 1;
  int nn = (int)num.size() - 1;
  std::vector<int64_t> q(nn - dn + 1, 0);
  for (int i = nn; i >= dn; --i) {
    int64_t c = num[i];
    q[i - dn] = c;
    for (int j = 0; j <= dn; ++j) num[i - dn + j] -= c * den[j];
  }
  return q;
}

const std::vector<int64_t>& phi_poly_locked(int64_t m) {
  auto it = g_phi_poly.find(m);
  if (it != g_phi_poly.end()) return it->second;
  std::vector<int64_t> num(m + 1, 0);
  num[0] = -1;
  num[m] = 1;
  for (int64_t d = 1; d < m; ++d)
    if (m % d == 0) num = poly_divexact(num, phi_poly_locked(d));
  return g_phi_poly[m] = num;
}

const std::vector<std::vector<int64_t>>& powers_locked(int64_t m) {
  auto it = g_powers.find(m);
  if (it != g_powers.end()) return it->second;
  const auto& P = phi_poly_locked(m);
  int64_t d = (int64_t)P.size() - 1;
  std::vector<std::vector<int64_t>> tab(m, std::vector<int64_t>(d, 0));
  std::vector<int64_t> cur(d, 0);
  cur[0] = 1;
  if (d == 0) cur.clear();
  for (int64_t e = 0; e < m; ++e) {
    tab[e] = cur;
    // multiply by x modulo P (monic)
    std::vector<int64_t> nx(d, 0);
    int64_t top = d ? cur[d - 1] : 0;
    for (int64_t j = d - 1; j >= 1; --j) nx[j] = cur[j - 1] - top * P[j];
    if (d) nx[0] = -top * P[0];
    cur = nx;
  }
  return g_powers[m] = tab;
}

// small integer view of rational coordinates: c = num / den with |num| < 2^bits
bool integer_view(const std::vector<mpq_class>& c, int bits, std::vector<int64_t>& num, mpz_class& den) {
  den = 1;
  for (auto& x : c) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
  if (mpz_sizeinbase(den.get_mpz_t(), 2) > 40) return false;
  num.resize(c.size());
  mpz_class t;
  for (size_t k = 0; k < c.size(); ++k) {
    t = c[k].get_num() * (den / c[k].get_den());
    if (mpz_sizeinbase(t.get_mpz_t(), 2) >= (size_t)bits) return false;
    num[k] = t.get_si();
  }
  return true;
}

mpz_class mpz_from_i128(__int128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? (unsigned __int128)(-(v + 1)) + 1 : (unsigned __int128)v;
  mpz_class r((unsigned long)(uint64_t)(u >> 64));
  r <<= 64;
  r += mpz_class((unsigned long)(uint64_t)u);
  return neg ? mpz_class(-r) : r;
}

std::vector<mpq_class> rationals_over(const std::vector<__int128>& acc, const mpz_class& den) {
  std::vector<mpq_class> out(acc.size());
  for (size_t j = 0; j < acc.size(); ++j) {
    if (!acc[j]) continue;
    out[j] = mpq_class(mpz_from_i128(acc[j]), den);
    out[j].canonicalize();
  }
  return out;
}

// out = Sum_k c[k] zeta_m^{k * mul} in the power basis of Q(zeta_m)
std::vector<mpq_class> map_powers(const std::vector<mpq_class>& c, int64_t m, int64_t mul) {
  const size_t d = (size_t)euler_phi(m);
  std::vector<int64_t> num;
  mpz_class den;
  if (integer_view(c, 48, num, den)) {
    std::vector<__int128> acc(d, 0);
    for (size_t k = 0; k < c.size(); ++k) {
      if (!num[k]) continue;
      const auto& v = cyclotomic_power(m, (int64_t)k * mul);
      for (size_t j = 0; j < d; ++j)
        if (v[j]) acc[j] += (__int128)num[k] * v[j];
    }
    return rationals_over(acc, den);
  }
  std::vector<mpq_class> out(d, mpq_class(0));
  for (size_t k = 0; k < c.size(); ++k) {
    if (c[k] == 0) continue;
    const auto& v = cyclotomic_power(m, (int64_t)k * mul);
    for (size_t j = 0; j < d; ++j)
      if (v[j]) out[j] += c[k] * v[j];
  }
  return out;
}
}  // namespace

const std::vector<int64_t>& cyclotomic_poly(int64_t m) {
  std::lock_guard<std::mutex> lk(g_cyc_mu);
  return phi_poly_locked(m);
}
const std::vector<int64_t>& cyclotomic_power(int64_t m, int64_t e) {
  std::lock_guard<std::mutex> lk(g_cyc_mu);
  return powers_locked(m)[mod64(e, m)];
}

CycNum::CycNum() : m_(1), c_(1, mpq_class(0)) {}
CycNum::CycNum(int64_t m) : m_(m), c_(euler_phi(m), mpq_class(0)) {
  if (m <= 0) throw MathError("CycNum: conductor must be positive");
}
CycNum::CycNum(int64_t m, std::vector<mpq_class> coeffs) : m_(m), c_(std::move(coeffs)) {
  if ((int64_t)c_.size() != euler_phi(m)) throw MathError("CycNum: coefficient length must equal phi(m)");
}
CycNum CycNum::rational(const mpq_class& q) { return CycNum(1, {q}); }
CycNum CycNum::root_of_unity(int64_t m, int64_t e) {
  const auto& v = cyclotomic_power(m, e);
  CycNum r(m);
  for (size_t i = 0; i < v.size(); ++i) r.c_[i] = v[i];
  return r;
}
bool CycNum::is_zero() const {
  for (auto& x : c_)
    if (x != 0) return false;
  return true;
}
bool CycNum::is_rational() const { return minimized().m_ <= 2; }
mpq_class CycNum::rational_part() const {
  CycNum r = minimized();
  if (r.m_ > 2) throw MathError("CycNum: not rational");
  return r.c_[0];
}

CycNum CycNum::lift(int64_t M) const {
  if (M == m_) return *this;
  if (M % m_) throw MathError("CycNum::lift: conductor does not divide target");
  return CycNum(M, map_powers(c_, M, M / m_));
}

CycNum CycNum::operator+(const CycNum& o) const {
  int64_t M = lcm64(m_, o.m_);
  CycNum a = lift(M), b = o.lift(M);
  for (size_t i = 0; i < a.c_.size(); ++i) a.c_[i] += b.c_[i];
  return a;
}
CycNum CycNum::operator-() const {
  CycNum a = *this;
  for (auto& x : a.c_) x = -x;
  return a;
}
CycNum CycNum::operator-(const CycNum& o) const { return *this + (-o); }
CycNum CycNum::operator*(const mpq_class& q) const {
  CycNum a = *this;
  for (auto& x : a.c_) x *= q;
  return a;
}
CycNum CycNum::operator*(const CycNum& o) const {
  int64_t M = lcm64(m_, o.m_);
  CycNum a = lift(M), b = o.lift(M);
  size_t d = a.c_.size();
  std::vector<int64_t> na, nb;
  mpz_class da, db;
  if (integer_view(a.c_, 30, na, da) && integer_view(b.c_, 30, nb, db)) {
    std::vector<__int128> prod(2 * d - 1, 0);
    for (size_t i = 0; i < d; ++i) {
      if (!na[i]) continue;
      for (size_t j = 0; j < d; ++j) prod[i + j] += (__int128)na[i] * nb[j];
    }
    std::vector<__int128> acc(prod.begin(), prod.begin() + (long)d);
    for (size_t e = d; e < prod.size(); ++e) {
      if (!prod[e]) continue;
      const auto& v = cyclotomic_power(M, (int64_t)e);
      for (size_t j = 0; j < d; ++j)
        if (v[j]) acc[j] += prod[e] * v[j];
    }
    return CycNum(M, rationals_over(acc, da * db));
  }
  std::vector<mpq_class> prod(2 * d - 1, mpq_class(0));
  for (size_t i = 0; i < d; ++i) {
    if (a.c_[i] == 0) continue;
    for (size_t j = 0; j < d; ++j)
      if (b.c_[j] != 0) prod[i + j] += a.c_[i] * b.c_[j];
  }
  CycNum r(M);
  for (size_t e = 0; e < prod.size(); ++e) {
    if (prod[e] == 0) continue;
    if (e < d) {
      r.c_[e] += prod[e];
      continue;
    }
    const auto& v = cyclotomic_power(M, (int64_t)e);
    for (size_t j = 0; j < d; ++j)
      if (v[j]) r.c_[j] += prod[e] * v[j];
  }
  return r;
}

CycNum CycNum::inv() const {
  if (is_zero()) throw MathError("CycNum: inversion of zero");
  // extended Euclid on (a(x), Phi_m(x)) over Q
  using Poly = std::vector<mpq_class>;
  auto trim = [](Poly& p) {
    while (p.size() > 1 && p.back() == 0) p.pop_back();
    if (p.empty()) p.push_back(mpq_class(0));
  };
  auto sub_mul = [&](const Poly& a, const Poly& b, const Poly& q) {
    // a - b*q
    Poly r = a;
    size_t n = std::max(a.size(), b.size() + q.size() - 1);
    r.resize(n, mpq_class(0));
    for (size_t i = 0; i < b.size(); ++i)
      for (size_t j = 0; j < q.size(); ++j) r[i + j] -= b[i] * q[j];
    trim(r);
    return r;
  };
  auto divmod = [&](Poly a, const Poly& b, Poly& q) {
    trim(a);
    q.assign(a.size() >= b.size() ? a.size() - b.size() + 1 : 1, mpq_class(0));
    while (a.size() >= b.size() && !(a.size() == 1 && a[0] == 0)) {
      size_t sh = a.size() - b.size();
      mpq_class c = a.back() / b.back();
      q[sh] = c;
      for (size_t i = 0; i < b.size(); ++i) a[i + sh] -= c * b[i];
      a.pop_back();
      trim(a);
      if (sh == 0) break;
    }
    return a;
  };
  const auto& P = cyclotomic_poly(m_);
  Poly r0(P.begin(), P.end()), r1 = c_;
  trim(r1);
  Poly s0{0}, s1{1};
  while (!(r1.size() == 1 && r1[0] == 0)) {
    Poly q;
    Poly r2 = divmod(r0, r1, q);
    Poly s2 = sub_mul(s0, s1, q);
    r0 = r1;
    r1 = r2;
    s0 = s1;
    s1 = s2;
  }
  // r0 is a nonzero constant (gcd), s0 * a = r0 mod Phi
  if (r0.size() != 1) throw MathError("CycNum: non-invertible (internal)");
  CycNum out(m_);
  // reduce s0 modulo Phi
  Poly q;
  Poly red = divmod(s0, Poly(P.begin(), P.end()), q);
  for (size_t i = 0; i < red.size() && i < out.c_.size(); ++i) out.c_[i] = red[i] / r0[0];
  return out;
}

CycNum CycNum::pow(int64_t e) const {
  if (e < 0) return inv().pow(-e);
  CycNum r = CycNum::rational(1), b = *this;
  while (e > 0) {
    if (e & 1) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}
CycNum CycNum::galois(int64_t a) const {
  if (gcd64(mod64(a, m_), m_) != 1 && m_ > 1) throw MathError("CycNum::galois: exponent not a unit");
  return CycNum(m_, map_powers(c_, m_, a));
}
CycNum CycNum::conj() const { return galois(-1); }

bool CycNum::operator==(const CycNum& o) const {
  int64_t M = lcm64(m_, o.m_);
  CycNum a = lift(M), b = o.lift(M);
  return a.c_ == b.c_;
}

// coordinates of x in Q(zeta_d) by elimination modulo a 61-bit prime, rational reconstruction and an
// exact check; nullopt when any step fails (the caller falls back to rational elimination)
static std::optional<std::vector<mpq_class>> subfield_coords_modular(const CycNum& x, int64_t d) {
  const uint64_t P = 2305843009213693951ull;  // 2^61 - 1
  const int64_t m = x.conductor();
  std::vector<int64_t> num;
  mpz_class den;
  if (!integer_view(x.coeffs(), 60, num, den)) return std::nullopt;
  const size_t n = num.size();
  const size_t fd = (size_t)euler_phi(d);
  auto red = [&](int64_t v) { return (uint64_t)mod64(v, (int64_t)P); };
  auto mul = [&](uint64_t a, uint64_t b) { return (uint64_t)((unsigned __int128)a * b % P); };
  auto inv = [&](uint64_t a) {
    uint64_t r = 1, e = P - 2;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  };
  // rows: power-basis coordinates of Q(zeta_m); columns: zeta_d^k lifted, then the right side
  std::vector<std::vector<uint64_t>> A(n, std::vector<uint64_t>(fd + 1, 0));
  for (size_t k = 0; k < fd; ++k) {
    const auto& v = cyclotomic_power(m, (int64_t)k * (m / d));
    for (size_t j = 0; j < n; ++j) A[j][k] = red(v[j]);
  }
  for (size_t j = 0; j < n; ++j) A[j][fd] = red(num[j]);
  size_t row = 0;
  std::vector<size_t> pivcol;
  for (size_t col = 0; col < fd && row < n; ++col) {
    size_t piv = row;
    while (piv < n && A[piv][col] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(A[piv], A[row]);
    uint64_t iv = inv(A[row][col]);
    for (size_t c2 = col; c2 <= fd; ++c2) A[row][c2] = mul(A[row][c2], iv);
    for (size_t r2 = 0; r2 < n; ++r2) {
      if (r2 == row || A[r2][col] == 0) continue;
      uint64_t f = A[r2][col];
      for (size_t c2 = col; c2 <= fd; ++c2) A[r2][c2] = (A[r2][c2] + P - mul(f, A[row][c2])) % P;
    }
    pivcol.push_back(col);
    ++row;
  }
  for (size_t r2 = row; r2 < n; ++r2)
    if (A[r2][fd] != 0) return std::nullopt;
  // rational reconstruction with |a|, b < 2^30
  const int64_t bound = int64_t(1) << 30;
  std::vector<mpq_class> y(fd, mpq_class(0));
  for (size_t r2 = 0; r2 < pivcol.size(); ++r2) {
    __int128 r0 = (__int128)P, r1 = (__int128)A[r2][fd], t0 = 0, t1 = 1;
    while (r1 >= bound) {
      __int128 q = r0 / r1;
      __int128 tmp = r0 - q * r1;
      r0 = r1;
      r1 = tmp;
      tmp = t0 - q * t1;
      t0 = t1;
      t1 = tmp;
    }
    if (t1 == 0 || t1 >= bound || -t1 >= bound) return std::nullopt;
    mpq_class q(mpz_class((long)(int64_t)r1), mpz_class((long)(int64_t)t1));
    q.canonicalize();
    y[pivcol[r2]] = q / den;
  }
  if (!(CycNum(d, y).lift(m) == x)) return std::nullopt;
  return y;
}

CycNum CycNum::minimized() const {
  // try conductors dividing m in increasing order; membership by Galois invariance
  if (m_ <= 2) return CycNum(1, {c_[0]});
  // numeric screen of Galois invariance; the elimination below is the exact test
  std::vector<double> cd(c_.size());
  double scale = 1;
  for (size_t k = 0; k < c_.size(); ++k) {
    cd[k] = c_[k].get_d();
    scale += std::abs(cd[k]);
  }
  std::vector<std::complex<double>> zt((size_t)m_);
  for (int64_t e = 0; e < m_; ++e) zt[(size_t)e] = std::polar(1.0, 2.0 * M_PI * (double)e / (double)m_);
  auto at = [&](int64_t a) {
    std::complex<double> s = 0;
    for (size_t k = 0; k < cd.size(); ++k)
      if (cd[k] != 0) s += cd[k] * zt[(size_t)mod64((int64_t)k * a, m_)];
    return s;
  };
  const std::complex<double> here = at(1);
  const double tol = 1e-9 * scale;
  for (int64_t d = 1; d < m_; ++d) {
    if (m_ % d) continue;
    // fixed field of {a : a = 1 mod d}
    bool fixed = true;
    for (int64_t a = 1 + d; a < m_ && fixed; a += d)
      if (gcd64(a, m_) == 1 && std::abs(at(a) - here) > tol) fixed = false;
    if (!fixed) continue;
    int64_t dd = d;
    int64_t fd = euler_phi(dd);
    if (auto y = subfield_coords_modular(*this, dd)) {
      if (dd <= 2) return CycNum(1, {(*y)[0]});
      return CycNum(dd, *y);
    }
    // build lifted basis vectors and solve by Gaussian elimination
    size_t n = c_.size();
    std::vector<std::vector<mpq_class>> A(n, std::vector<mpq_class>(fd + 1, mpq_class(0)));
    for (int64_t k = 0; k < fd; ++k) {
      CycNum e(dd);
      e.c_[k] = 1;
      CycNum l = e.lift(m_);
      for (size_t j = 0; j < n; ++j) A[j][k] = l.c_[j];
    }
    for (size_t j = 0; j < n; ++j) A[j][fd] = c_[j];
    // elimination
    size_t row = 0;
    std::vector<int64_t> pivcol;
    for (int64_t col = 0; col < fd && row < n; ++col) {
      size_t piv = row;
      while (piv < n && A[piv][col] == 0) ++piv;
      if (piv == n) continue;
      std::swap(A[piv], A[row]);
      for (size_t r2 = 0; r2 < n; ++r2) {
        if (r2 == row || A[r2][col] == 0) continue;
        mpq_class f = A[r2][col] / A[row][col];
        for (int64_t c2 = col; c2 <= fd; ++c2) A[r2][c2] -= f * A[row][c2];
      }
      pivcol.push_back(col);
      ++row;
    }
    bool ok = true;
    for (size_t r2 = row; r2 < n; ++r2)
      if (A[r2][fd] != 0) ok = false;
    if (!ok) continue;
    CycNum y(dd);
    for (size_t r2 = 0; r2 < pivcol.size(); ++r2) y.c_[pivcol[r2]] = A[r2][fd] / A[r2][pivcol[r2]];
    if (dd <= 2) return CycNum(1, {y.c_[0]});
    return y;
  }
  return *this;
}

std::complex<double> CycNum::to_complex() const {
  std::complex<double> s = 0;
  for (size_t k = 0; k < c_.size(); ++k) {
    if (c_[k] == 0) continue;
    double ang = 2.0 * M_PI * (double)k / (double)m_;
    s += c_[k].get_d() * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return s;
}

std::string CycNum::str() const {
  CycNum r = minimized();
  std::ostringstream os;
  os << "[" << r.m_ << ":";
  for (size_t k = 0; k < r.c_.size(); ++k) os << (k ? ", " : " ") << r.c_[k].get_str();
  os << "]";
  return os.str();
}

mpz_class CycNum::denominator() const {
  mpz_class d = 1;
  for (auto& x : c_) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), x.get_den_mpz_t());
  return d;
}
mpz_class CycNum::height() const {
  mpz_class d = denominator(), h = d;
  for (auto& x : c_) {
    mpq_class t = abs(x * d);
    mpz_class n = t.get_num();
    if (n > h) h = n;
  }
  return h;
}

}  // namespace bianchi
