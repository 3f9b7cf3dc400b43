#include <cmath>
#include <sstream>

#include "bianchi/arith.hpp"

namespace bianchi {

namespace {
int64_t pw(int64_t p, int n) {
  int64_t r = 1;
  for (int i = 0; i < n; ++i) r *= p;
  return r;
}
int val_of(int64_t p, int64_t& x) {
  int v = 0;
  while (x != 0 && x % p == 0) x /= p, ++v;
  return v;
}
int val_mpz(int64_t p, mpz_class& x) {
  int v = 0;
  if (x == 0) return 0;
  mpz_class P = p;
  while (mpz_divisible_p(x.get_mpz_t(), P.get_mpz_t())) {
    x /= P;
    ++v;
  }
  return v;
}
int64_t mpz_mod64(const mpz_class& x, int64_t m) {
  mpz_class r;
  mpz_class M = m;
  mpz_mod(r.get_mpz_t(), x.get_mpz_t(), M.get_mpz_t());
  return r.get_si();
}
}  // namespace

int PadicNum::max_precision(int64_t p) { return (int)std::floor(62.0 / std::log2((double)p)); }

PadicNum::PadicNum(int64_t p, int64_t unit, int v, int N) : p_(p), v_(v), u_(unit), N_(N), zero_(false) {
  if (N <= 0) {
    *this = zero(p, v);
    return;
  }
  if (N > max_precision(p)) throw MathError("PadicNum: precision exceeds 64-bit capacity");
  int64_t pn = pw(p, N);
  u_ = mod64(u_, pn);
  if (u_ % p == 0) {
    // normalize: shift valuation
    int64_t x = u_;
    if (x == 0) {
      *this = zero(p, v + N);
      return;
    }
    int s = val_of(p, x);
    v_ += s;
    N_ -= s;
    u_ = mod64(x, pw(p, N_));
  }
}

PadicNum PadicNum::zero(int64_t p, int absprec) {
  PadicNum z;
  z.p_ = p;
  z.v_ = absprec;
  z.u_ = 0;
  z.N_ = 0;
  z.zero_ = true;
  return z;
}

PadicNum PadicNum::from_int(int64_t p, int64_t a, int absprec) {
  if (a == 0) return zero(p, absprec);
  int64_t x = a;
  int v = val_of(p, x);
  if (v >= absprec) return zero(p, absprec);
  // integers are exact; cap the claimed precision at what fits in 64 bits
  int N = std::min(absprec - v, max_precision(p));
  return PadicNum(p, mod64(x, pw(p, N)), v, N);
}

PadicNum PadicNum::from_rational(int64_t p, const mpq_class& q, int absprec) {
  if (q == 0) return zero(p, absprec);
  mpz_class n = q.get_num(), d = q.get_den();
  int vn = val_mpz(p, n), vd = val_mpz(p, d);
  int v = vn - vd;
  if (v >= absprec) return zero(p, absprec);
  int N = std::min(absprec - v, max_precision(p));
  int64_t pn = pw(p, N);
  int64_t un = mpz_mod64(n, pn), ud = mpz_mod64(d, pn);
  return PadicNum(p, mulmod(un, invmod(ud, pn), pn), v, N);
}

int64_t PadicNum::residue() const {
  if (zero_) return 0;
  if (v_ < 0) throw MathError("PadicNum::residue: negative valuation");
  int64_t pa = pw(p_, absprec());
  return mulmod(u_, pw(p_, v_), pa);
}

PadicNum PadicNum::operator+(const PadicNum& o) const {
  if (p_ != o.p_) throw MathError("PadicNum: prime mismatch");
  int ab = std::min(absprec(), o.absprec());
  if (zero_) return o.reduce_absprec(ab);
  if (o.zero_) return reduce_absprec(ab);
  int vm = std::min(v_, o.v_);
  int rel = ab - vm;
  if (rel <= 0) return zero(p_, ab);
  int64_t pr = pw(p_, rel);
  int64_t a = mulmod(u_, pw(p_, v_ - vm) % pr, pr);
  int64_t b = mulmod(o.u_, pw(p_, o.v_ - vm) % pr, pr);
  int64_t s = mod64(a + b, pr);
  if (s == 0) return zero(p_, ab);
  return PadicNum(p_, s, vm, rel);
}
PadicNum PadicNum::operator-() const {
  if (zero_) return *this;
  return PadicNum(p_, mod64(-u_, pw(p_, N_)), v_, N_);
}
PadicNum PadicNum::operator-(const PadicNum& o) const { return *this + (-o); }
PadicNum PadicNum::operator*(const PadicNum& o) const {
  if (p_ != o.p_) throw MathError("PadicNum: prime mismatch");
  if (zero_ && o.zero_) return zero(p_, v_ + o.v_);
  if (zero_) return zero(p_, v_ + o.v_);
  if (o.zero_) return zero(p_, o.v_ + v_);
  int N = std::min(N_, o.N_);
  int64_t pn = pw(p_, N);
  return PadicNum(p_, mulmod(u_ % pn, o.u_ % pn, pn), v_ + o.v_, N);
}
PadicNum PadicNum::inv() const {
  if (zero_) throw MathError("PadicNum: inversion of zero");
  return PadicNum(p_, invmod(u_, pw(p_, N_)), -v_, N_);
}
PadicNum PadicNum::pow(int64_t e) const {
  if (e < 0) return inv().pow(-e);
  PadicNum r = from_int(p_, 1, absprec() > 0 ? std::max(N_, 1) : 1);
  if (!zero_) r = PadicNum(p_, 1, 0, N_);
  PadicNum b = *this;
  while (e > 0) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}
PadicNum PadicNum::reduce_absprec(int ab) const {
  if (ab >= absprec()) return *this;
  if (zero_ || ab <= v_) return zero(p_, ab);
  int N = ab - v_;
  return PadicNum(p_, u_ % pw(p_, N), v_, N);
}
bool PadicNum::equals(const PadicNum& o) const { return (*this - o).is_zero(); }

std::string PadicNum::str() const {
  std::ostringstream os;
  if (zero_) {
    os << "O(" << p_ << "^" << v_ << ")";
    return os.str();
  }
  os << u_;
  if (v_) os << "*" << p_ << "^" << v_;
  os << " + O(" << p_ << "^" << absprec() << ")";
  return os.str();
}

PadicNum hensel_root(const std::vector<int64_t>& poly, int64_t p, int N, int64_t seed) {
  if (N > PadicNum::max_precision(p)) throw MathError("hensel_root: precision too large");
  auto evalmod = [&](const std::vector<int64_t>& f, int64_t x, int64_t m) {
    int64_t r = 0;
    for (size_t i = f.size(); i-- > 0;) r = mod64(mulmod(r, x, m) + mod64(f[i], m), m);
    return r;
  };
  std::vector<int64_t> df;
  for (size_t i = 1; i < poly.size(); ++i) df.push_back(poly[i] * (int64_t)i);
  if (evalmod(poly, seed, p) != 0) throw MathError("hensel_root: seed is not a root modulo p");
  if (evalmod(df, seed, p) == 0) throw MathError("hensel_root: seed is not a simple root");
  int64_t x = mod64(seed, p);
  int prec = 1;
  while (prec < N) {
    prec = std::min(2 * prec, N);
    int64_t m = pw(p, prec);
    int64_t fx = evalmod(poly, x, m), dfx = evalmod(df, x, m);
    x = mod64(x - mulmod(fx, invmod(dfx, m), m), m);
  }
  return PadicNum::from_int(p, x, N);
}

// ---- PadicCyc ----

PadicCyc::PadicCyc(int64_t p, int e, std::vector<PadicNum> coords) : p_(p), e_(e), c_(std::move(coords)) {
  if ((int64_t)c_.size() != (e == 0 ? 1 : euler_phi(pw(p, e)))) throw MathError("PadicCyc: wrong coordinate count");
}
PadicCyc PadicCyc::scalar(const PadicNum& x) { return PadicCyc(x.prime(), 0, {x}); }
PadicCyc PadicCyc::lift(int e) const {
  if (e == e_) return *this;
  if (e < e_) throw MathError("PadicCyc::lift: cannot lower exponent");
  int64_t M = pw(p_, e);
  int64_t s = pw(p_, e - e_);
  int ab = absprec();
  std::vector<PadicNum> out(euler_phi(M), PadicNum::zero(p_, ab));
  for (size_t k = 0; k < c_.size(); ++k) {
    const auto& v = cyclotomic_power(M, (int64_t)k * s);
    for (size_t j = 0; j < v.size(); ++j)
      if (v[j]) out[j] += c_[k] * PadicNum::from_int(p_, v[j], ab + 8);
  }
  for (auto& x : out) x = x.reduce_absprec(ab);
  return PadicCyc(p_, e, out);
}
PadicCyc PadicCyc::operator+(const PadicCyc& o) const {
  int e = std::max(e_, o.e_);
  PadicCyc a = lift(e), b = o.lift(e);
  for (size_t i = 0; i < a.c_.size(); ++i) a.c_[i] += b.c_[i];
  return a;
}
PadicCyc PadicCyc::operator-(const PadicCyc& o) const {
  int e = std::max(e_, o.e_);
  PadicCyc a = lift(e), b = o.lift(e);
  for (size_t i = 0; i < a.c_.size(); ++i) a.c_[i] -= b.c_[i];
  return a;
}
PadicCyc PadicCyc::operator*(const PadicNum& o) const {
  PadicCyc a = *this;
  for (auto& x : a.c_) x *= o;
  return a;
}
PadicCyc PadicCyc::operator*(const PadicCyc& o) const {
  int e = std::max(e_, o.e_);
  PadicCyc a = lift(e), b = o.lift(e);
  if (e == 0) return PadicCyc(p_, 0, {a.c_[0] * b.c_[0]});
  int64_t M = pw(p_, e);
  size_t d = a.c_.size();
  int ab = std::min(a.absprec() + b.c_[0].valuation(), b.absprec() + a.c_[0].valuation());
  ab = std::min(ab, std::max(a.absprec(), b.absprec()));
  std::vector<PadicNum> prod(2 * d - 1, PadicNum::zero(p_, 200));
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) prod[i + j] += a.c_[i] * b.c_[j];
  std::vector<PadicNum> out(d, PadicNum::zero(p_, 200));
  for (size_t k = 0; k < prod.size(); ++k) {
    if (k < d) {
      out[k] += prod[k];
      continue;
    }
    const auto& v = cyclotomic_power(M, (int64_t)k);
    for (size_t j = 0; j < d; ++j)
      if (v[j]) out[j] += prod[k] * PadicNum::from_int(p_, v[j], 60);
  }
  (void)ab;
  return PadicCyc(p_, e, out);
}
int PadicCyc::valuation() const {
  int v = 1 << 20;
  for (auto& x : c_) v = std::min(v, x.valuation());
  return v;
}
int PadicCyc::absprec() const {
  int v = 1 << 20;
  for (auto& x : c_) v = std::min(v, x.absprec());
  return v;
}
bool PadicCyc::is_zero() const {
  for (auto& x : c_)
    if (!x.is_zero()) return false;
  return true;
}
std::string PadicCyc::str() const {
  std::ostringstream os;
  os << "(";
  for (size_t k = 0; k < c_.size(); ++k) os << (k ? ", " : "") << c_[k].str();
  os << ")";
  if (e_) os << "_zeta" << pw(p_, e_);
  return os.str();
}

// ---- PadicEmbedding ----

PadicEmbedding::PadicEmbedding(int64_t p, int N, const std::vector<int64_t>& omega_poly, int64_t seed,
                               const CycNum* omega_in_cyc)
    : p_(p), N_(N), seed_(seed) {
  omega_ = hensel_root(omega_poly, p, N, seed);
  // the other root: trace - omega
  int64_t tr = -omega_poly[1];
  omega_bar_ = PadicNum::from_int(p, tr, N) - omega_;
  // generator of mu_{p-1} compatible with the embedding of K when K sits in Q(zeta_{p-1})
  int64_t m = p - 1;
  std::vector<int64_t> cands;
  for (int64_t g = 2; g < p; ++g) {
    bool prim = true;
    for (auto [q, e] : factor_int(m))
      if (powmod(g, m / q, p) == 1) prim = false;
    if (prim) cands.push_back(g);
  }
  if (m == 1) cands = {1};
  std::vector<int64_t> xpoly(m + 1, 0);
  xpoly[0] = -1;
  xpoly[m] = 1;
  for (int64_t g : cands) {
    zeta_pm1_ = m == 1 ? PadicNum::from_int(p, 1, N) : hensel_root(xpoly, p, N, g);
    if (!omega_in_cyc || m % omega_in_cyc->conductor() != 0) return;
    if (embed(*omega_in_cyc).equals(omega_)) return;
  }
  if (omega_in_cyc && m % omega_in_cyc->conductor() == 0)
    throw MathError("PadicEmbedding: no root-of-unity choice compatible with the seed");
}

PadicNum PadicEmbedding::zeta_split(int64_t d) const {
  if ((p_ - 1) % d) throw MathError("PadicEmbedding: order does not divide p-1");
  return zeta_pm1_.pow((p_ - 1) / d);
}

PadicNum PadicEmbedding::embed(const CycNum& x) const {
  int64_t m = x.conductor();
  if ((p_ - 1) % m != 0)
    throw MathError("embed_padic: p does not split completely in Q(zeta_" + std::to_string(m) + ")");
  PadicNum z = zeta_split(m == 1 ? 1 : m);
  PadicNum acc = PadicNum::zero(p_, N_ + 40);
  PadicNum zk = PadicNum::from_int(p_, 1, N_);
  int minv = 0;
  for (size_t k = 0; k < x.coeffs().size(); ++k) {
    const mpq_class& c = x.coeffs()[k];
    if (c != 0) {
      PadicNum cq = PadicNum::from_rational(p_, c, N_ + 40);
      minv = std::min(minv, cq.valuation());
      acc += cq * zk;
    }
    zk = zk * z;
  }
  // precision of the result: N plus the most negative coefficient valuation
  return acc.reduce_absprec(N_ + minv);
}

PadicCyc PadicEmbedding::embed_formal(const CycNum& x) const {
  int64_t m = x.conductor();
  int e = 0;
  int64_t ms = m;
  while (ms % p_ == 0) ms /= p_, ++e;
  if ((p_ - 1) % ms != 0)
    throw MathError("embed_padic: prime-to-p part of the conductor does not divide p-1");
  int64_t pe = pw(p_, e);
  // zeta_m = zeta_ms^u * zeta_pe^v with u*pe + v*ms = 1
  int64_t u = pe == 1 ? 1 : invmod(pe, ms == 1 ? 1 : ms);
  if (ms == 1) u = 0;
  int64_t v = ms == 1 ? 1 : (pe == 1 ? 0 : invmod(ms, pe));
  PadicNum zs = zeta_split(ms);
  int d = e == 0 ? 1 : (int)euler_phi(pe);
  int minv = 0;
  for (auto& c : x.coeffs())
    if (c != 0) minv = std::min(minv, PadicNum::from_rational(p_, c, N_ + 40).valuation());
  int ab = N_ + minv;
  std::vector<PadicNum> out(d, PadicNum::zero(p_, N_ + 40));
  for (size_t k = 0; k < x.coeffs().size(); ++k) {
    const mpq_class& c = x.coeffs()[k];
    if (c == 0) continue;
    PadicNum cq = PadicNum::from_rational(p_, c, N_ + 40) * zs.pow(mod64(u * (int64_t)k, ms));
    if (e == 0) {
      out[0] += cq;
      continue;
    }
    const auto& pv = cyclotomic_power(pe, mod64(v * (int64_t)k, pe));
    for (int j = 0; j < d; ++j)
      if (pv[j]) out[j] += cq * PadicNum::from_int(p_, pv[j], N_ + 40);
  }
  for (auto& y : out) y = y.reduce_absprec(ab);
  return PadicCyc(p_, e, out);
}

PadicNum PadicEmbedding::sigma1(const mpq_class& a, const mpq_class& b) const {
  return PadicNum::from_rational(p_, a, N_) + PadicNum::from_rational(p_, b, N_ + 20) * omega_;
}
PadicNum PadicEmbedding::sigma2(const mpq_class& a, const mpq_class& b) const {
  return PadicNum::from_rational(p_, a, N_) + PadicNum::from_rational(p_, b, N_ + 20) * omega_bar_;
}

}  // namespace bianchi
