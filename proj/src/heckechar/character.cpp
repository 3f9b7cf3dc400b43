#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <mutex>
#include <sstream>

#include "bianchi/heckechar.hpp"

namespace bianchi {

HeckeCharacter HeckeCharacter::build(const FieldK& K, const IdealK& f, InfinityType type,
                                     std::shared_ptr<const ResidueGroup> rg, int64_t E,
                                     std::vector<int64_t> gexp) {
  HeckeCharacter c;
  c.K_ = &K;
  c.f_ = f;
  c.type_ = type;
  c.rg_ = std::move(rg);
  int64_t g = E;
  for (auto& x : gexp) {
    x = mod64(x, E);
    g = gcd64(g, x);
  }
  if (g == 0) g = E;
  c.E_ = E / g;
  for (auto& x : gexp) x /= g;
  c.gen_exp_ = std::move(gexp);
  return c;
}

HeckeCharacter HeckeCharacter::trivial(const FieldK& K) {
  IdealK one = IdealK::unit_ideal(K);
  return build(K, one, {}, std::make_shared<ResidueGroup>(K, one), 1, {});
}

HeckeCharacter HeckeCharacter::from_pairs(const FieldK& K, const IdealK& modulus, InfinityType type,
                                          const std::vector<std::pair<IntElem, mpq_class>>& table) {
  auto rg = std::make_shared<ResidueGroup>(K, modulus);
  int64_t E = 1;
  std::vector<std::pair<IntElem, int64_t>> steps;
  for (auto& [x, ang] : table) {
    mpq_class a = ang;
    a.canonicalize();
    if (!a.get_den().fits_slong_p()) throw MathError("from_pairs: angle denominator too large");
    E = lcm64(E, a.get_den().get_si());
  }
  for (auto& [x, ang] : table) {
    if (!rg->is_unit(x)) throw MathError("from_pairs: table entry " + K.str(x) + " is not a unit mod f");
    mpq_class a = ang * E;
    a.canonicalize();
    steps.push_back({x, mod64(a.get_num().get_si(), E)});
  }
  const int64_t N = modulus.norm();
  std::vector<int64_t> val((size_t)N, -1);
  std::deque<IntElem> queue{IntElem{1, 0}};
  val[(size_t)modulus.index_of({1, 0})] = 0;
  int64_t seen = 1;
  while (!queue.empty()) {
    IntElem x = queue.front();
    queue.pop_front();
    int64_t vx = val[(size_t)modulus.index_of(x)];
    for (auto& [g, vg] : steps) {
      IntElem y = modulus.reduce(K.mul(x, g));
      int64_t vy = mod64(vx + vg, E);
      int64_t& slot = val[(size_t)modulus.index_of(y)];
      if (slot == -1) {
        slot = vy;
        ++seen;
        queue.push_back(y);
      } else if (slot != vy) {
        throw MathError("from_pairs: table is not a homomorphism (conflict at " + K.str(y) + ")");
      }
    }
  }
  if (seen != rg->order())
    throw MathError("from_pairs: table generates a subgroup of order " + std::to_string(seen) + " not " +
                    std::to_string(rg->order()));
  std::vector<int64_t> gexp;
  for (auto& g : rg->generators()) gexp.push_back(val[(size_t)modulus.index_of(g)]);
  return build(K, modulus, type, rg, E, gexp);
}

HeckeCharacter HeckeCharacter::canonical_phi_Qi(const FieldK& K) {
  if (K.D() != 4) throw MathError("canonical_phi_Qi: field is not Q(i)");
  IdealK f = IdealK::principal(K, {-2, 2});
  // ep(u) = u^{-1}: i -> -i has angle 3/4
  std::vector<std::pair<IntElem, mpq_class>> table{{{0, 1}, mpq_class(3, 4)}, {{-1, 0}, mpq_class(1, 2)}};
  for (auto& t : table) t.second.canonicalize();
  return from_pairs(K, f, {-1, 0}, table);
}

HeckeCharacter HeckeCharacter::lambda_K(const FieldK& K) {
  IdealK f = IdealK::principal(K, {K.D(), 0});
  auto rg = std::make_shared<ResidueGroup>(K, f);
  std::vector<int64_t> gexp;
  for (auto& g : rg->generators()) gexp.push_back(K.kronecker(K.norm(g)) == 1 ? 0 : 1);
  return build(K, f, {}, rg, 2, gexp);
}

HeckeCharacter HeckeCharacter::from_split(const FieldK& K, const SplitLevel& lev, int64_t j1, int64_t j2,
                                          InfinityType type) {
  IdealK P = lev.prime_p();
  IdealK f = ideal_mul(K, ideal_pow(K, P, lev.a()), ideal_pow(K, ideal_conj(K, P), lev.b()));
  auto rg = std::make_shared<ResidueGroup>(K, f);
  int64_t E = lcm64(lev.n1(), lev.n2());
  std::vector<int64_t> gexp;
  for (auto& g : rg->generators()) {
    int64_t d1 = lev.dlog1(lev.res1(g)), d2 = lev.dlog2(lev.res2(g));
    if (d1 < 0 || d2 < 0) throw MathError("from_split: generator not a unit");
    // psi_f = chi, ep = chi^{-1}
    gexp.push_back(-(mod64(j1 * d1, lev.n1()) * (E / lev.n1()) + mod64(j2 * d2, lev.n2()) * (E / lev.n2())));
  }
  return build(K, f, type, rg, E, gexp);
}

int64_t HeckeCharacter::eps_exp(const IntElem& x) const {
  auto d = rg_->dlog(x);
  if (!d) throw MathError("HeckeCharacter: " + K_->str(x) + " is not coprime to the modulus");
  __int128 s = 0;
  for (size_t k = 0; k < d->size(); ++k) s += (__int128)(*d)[k] * gen_exp_[k];
  return (int64_t)(((s % E_) + E_) % E_);
}

CycNum HeckeCharacter::eps(const IntElem& x) const { return CycNum::root_of_unity(E_, eps_exp(x)); }
CycNum HeckeCharacter::psi_f(const IntElem& x) const { return CycNum::root_of_unity(E_, -eps_exp(x)); }

std::complex<double> HeckeCharacter::eps_complex(const IntElem& x) const {
  return std::polar(1.0, 2 * M_PI * (double)eps_exp(x) / (double)E_);
}

CycNum elem_pow_cyc(const FieldK& K, const IntElem& alpha, int e) {
  if (e == 0) return CycNum::from_int(1);
  CycNum r = K.to_cyc(alpha).pow(std::abs(e));
  return e > 0 ? r : r.inv();
}

bool HeckeCharacter::unit_compatible() const {
  for (auto& u : K_->units()) {
    CycNum lhs = eps(u);
    CycNum rhs = elem_pow_cyc(*K_, u, type_.a) * elem_pow_cyc(*K_, K_->conj(u), type_.b);
    if (lhs != rhs) return false;
  }
  return true;
}

IdealK HeckeCharacter::conductor() const {
  IdealK f = f_;
  if (f.is_unit_ideal()) return f;
  for (auto& [q, e] : factor_ideal(*K_, f_)) {
    for (int k = 0; k < e; ++k) {
      IdealK smaller = ideal_div(*K_, f, q);
      bool ok = true;
      for (auto& x : rg_->elements()) {
        if (!smaller.reduce(K_->sub(x, {1, 0})).is_zero()) continue;
        if (eps_exp(x) != 0) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
      f = smaller;
    }
  }
  return f;
}

HeckeCharacter HeckeCharacter::primitive() const {
  IdealK c = conductor();
  if (c == f_) return *this;
  auto rg = std::make_shared<ResidueGroup>(*K_, c);
  std::vector<int64_t> byidx((size_t)c.norm(), -1);
  for (auto& x : rg_->elements()) byidx[(size_t)c.index_of(x)] = eps_exp(x);
  std::vector<int64_t> gexp;
  for (auto& g : rg->generators()) {
    int64_t v = byidx[(size_t)c.index_of(g)];
    if (v < 0) throw MathError("primitive: reduction map not surjective");
    gexp.push_back(v);
  }
  return build(*K_, c, type_, rg, E_, gexp);
}

HeckeCharacter HeckeCharacter::extend_modulus(const IdealK& g) const {
  if (!ideal_divides(*K_, f_, g)) throw MathError("extend_modulus: modulus does not divide target");
  auto rg = std::make_shared<ResidueGroup>(*K_, g);
  std::vector<int64_t> gexp;
  for (auto& x : rg->generators()) gexp.push_back(eps_exp(x));
  return build(*K_, g, type_, rg, E_, gexp);
}

CycNum HeckeCharacter::eval_ideal(const IntElem& alpha) const {
  if (alpha.is_zero()) throw MathError("eval_ideal: zero ideal");
  {
    std::shared_lock lk(cache_->mu);
    auto it = cache_->vals.find(alpha);
    if (it != cache_->vals.end()) return it->second;
  }
  CycNum v;
  if (!coprime(alpha)) {
    v = CycNum::from_int(0);
  } else {
    v = eps(alpha) * elem_pow_cyc(*K_, alpha, -type_.a) * elem_pow_cyc(*K_, K_->conj(alpha), -type_.b);
  }
  std::unique_lock lk(cache_->mu);
  cache_->vals.emplace(alpha, v);
  return v;
}

std::complex<double> HeckeCharacter::eval_complex(const IntElem& alpha) const {
  if (!coprime(alpha)) return 0.0;
  std::complex<double> z = K_->to_complex(alpha);
  return eps_complex(alpha) * std::pow(z, -type_.a) * std::pow(std::conj(z), -type_.b);
}

HeckeCharacter HeckeCharacter::conj() const {
  IdealK fc = ideal_conj(*K_, f_);
  auto rg = std::make_shared<ResidueGroup>(*K_, fc);
  std::vector<int64_t> gexp;
  for (auto& g : rg->generators()) gexp.push_back(eps_exp(K_->conj(g)));
  return build(*K_, fc, {type_.b, type_.a}, rg, E_, gexp);
}

HeckeCharacter HeckeCharacter::mul(const HeckeCharacter& o) const {
  IdealK g = ideal_add(*K_, f_, o.f_);
  IdealK l = ideal_div(*K_, ideal_mul(*K_, f_, o.f_), g);
  auto rg = std::make_shared<ResidueGroup>(*K_, l);
  int64_t E = lcm64(E_, o.E_);
  std::vector<int64_t> gexp;
  for (auto& x : rg->generators()) gexp.push_back(eps_exp(x) * (E / E_) + o.eps_exp(x) * (E / o.E_));
  return build(*K_, l, {type_.a + o.type_.a, type_.b + o.type_.b}, rg, E, gexp);
}

HeckeCharacter HeckeCharacter::inverse() const {
  std::vector<int64_t> gexp;
  for (auto v : gen_exp_) gexp.push_back(-v);
  return build(*K_, f_, {-type_.a, -type_.b}, rg_, E_, gexp);
}

HeckeCharacter HeckeCharacter::norm_twist(int e) const {
  return build(*K_, f_, {type_.a + e, type_.b + e}, rg_, E_, gen_exp_);
}

std::string HeckeCharacter::fingerprint() const {
  // FNV-1a over the full value table, so equal characters on equal moduli agree
  uint64_t h = 1469598103934665603ull;
  auto mix = [&](int64_t v) {
    for (int k = 0; k < 8; ++k) {
      h ^= (uint64_t)((v >> (8 * k)) & 0xff);
      h *= 1099511628211ull;
    }
  };
  mix(K_->D());
  mix(f_.A());
  mix(f_.B());
  mix(f_.C());
  mix(type_.a);
  mix(type_.b);
  // E is reduced in build(), so (E, eps_exp) is canonical
  std::vector<std::pair<int64_t, int64_t>> vals;
  for (auto& x : rg_->elements()) vals.push_back({f_.index_of(x), eps_exp(x)});
  std::sort(vals.begin(), vals.end());
  mix(E_);
  for (auto& [i, v] : vals) {
    mix(i);
    mix(v);
  }
  std::ostringstream os;
  os << "D" << K_->D() << "-N" << f_.norm() << "-t" << type_.a << "_" << type_.b << "-" << std::hex
     << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string HeckeCharacter::describe() const {
  std::ostringstream os;
  os << "modulus=" << f_.str() << " type=(" << type_.a << "," << type_.b << ") order=" << E_ << " gens=[";
  for (size_t k = 0; k < gen_exp_.size(); ++k) {
    if (k) os << ",";
    os << K_->str(rg_->generators()[k]) << ":" << gen_exp_[k] << "/" << E_;
  }
  os << "]";
  return os.str();
}

}  // namespace bianchi
