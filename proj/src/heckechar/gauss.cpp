#include <map>

#include "bianchi/heckechar.hpp"

namespace bianchi {

namespace {

// Sum_e counts[e] zeta_L^e as a CycNum
CycNum from_counts(int64_t L, const std::vector<int64_t>& counts) {
  const int64_t deg = euler_phi(L);
  // counts are bounded by the residue count, so int64 accumulation is safe
  std::vector<int64_t> acc((size_t)deg, 0);
  for (int64_t e = 0; e < L; ++e) {
    if (!counts[(size_t)e]) continue;
    const auto& pw = cyclotomic_power(L, e);
    for (int64_t k = 0; k < deg; ++k) acc[(size_t)k] += pw[(size_t)k] * counts[(size_t)e];
  }
  std::vector<mpq_class> c;
  for (auto a : acc) c.emplace_back(mpz_class((long)a));
  return CycNum(L, c).minimized();
}

// Sum_{d in (O/f)^x} zeta_E^{sign * eps_exp(d)} e(Tr(d c / (gamma delta)))
CycNum twisted_sum(const HeckeCharacter& psi, int sign, const IntElem& c) {
  const FieldK& K = psi.field();
  const IdealK& f = psi.modulus();
  IntElem gamma = f.generator(K);
  const int64_t N = K.norm(gamma);
  const int64_t E = psi.order();
  const int64_t L = lcm64(E, N);
  std::vector<int64_t> counts((size_t)L, 0);
  IntElem cg = K.mul(c, K.conj(gamma));
  for (auto& d : psi.residues().elements()) {
    int64_t k = mod64(K.trace_over_delta(K.mul(d, cg)), N);
    int64_t e = mod64(sign * psi.eps_exp(d) * (L / E) + k * (L / N), L);
    ++counts[(size_t)e];
  }
  return from_counts(L, counts);
}

CycNum infinity_factor(const FieldK& K, const IntElem& z, InfinityType t) {
  return elem_pow_cyc(K, z, t.a) * elem_pow_cyc(K, K.conj(z), t.b);
}

}  // namespace

CycNum gauss_sum_W(const HeckeCharacter& psi) {
  const FieldK& K = psi.field();
  if (psi.modulus().is_unit_ideal()) return infinity_factor(K, K.delta(), psi.type());
  if (!psi.is_primitive()) throw MathError("gauss_sum_W: character is imprimitive");
  IntElem gamma = psi.modulus().generator(K);
  CycNum pre = infinity_factor(K, K.mul(K.delta(), gamma), psi.type());
  return pre * twisted_sum(psi, -1, {1, 0});
}

CycNum gauss_tau(const HeckeCharacter& psi) {
  const FieldK& K = psi.field();
  if (psi.modulus().is_unit_ideal()) return CycNum::from_int(1);
  IntElem gamma = psi.modulus().generator(K);
  CycNum pre = infinity_factor(K, K.mul(K.delta(), gamma), psi.type()).inv();
  return pre * twisted_sum(psi, +1, {1, 0});
}

CycNum orthogonality_lhs(const HeckeCharacter& psi, const IntElem& c) {
  if (psi.modulus().is_unit_ideal()) return CycNum::from_int(1);
  // the infinity-type constants of psi^{-1} cancel between numerator and tau(psi^{-1})
  CycNum num = twisted_sum(psi, -1, c);
  CycNum den = twisted_sum(psi, -1, {1, 0});
  if (den.is_zero()) throw MathError("orthogonality_lhs: tau(psi^{-1}) vanishes (imprimitive?)");
  return num / den;
}

int ideal_valuation(const FieldK& K, const IdealK& q, const IdealK& I) {
  int v = 0;
  IdealK rest = I;
  while (!rest.is_unit_ideal() && ideal_divides(K, q, rest)) {
    rest = ideal_div(K, rest, q);
    ++v;
  }
  return v;
}

IntElem uniformizer(const FieldK& K, const IdealK& q) { return q.generator(K); }

CycNum local_gauss_sum(const HeckeCharacter& psi, const IdealK& q) {
  return local_gauss_sum(psi, q, psi.field().delta());
}

CycNum local_gauss_sum(const HeckeCharacter& psi, const IdealK& q, const IntElem& differential) {
  const FieldK& K = psi.field();
  const IdealK& f = psi.modulus();
  const int t = ideal_valuation(K, q, f);
  if (t == 0) return CycNum::from_int(1);
  IdealK Q = ideal_pow(K, q, t);
  IdealK rest = ideal_div(K, f, Q);
  // idempotents: e1 in rest with e1 = 1 mod Q, e2 in Q with e2 = 1 mod rest
  IntElem e1{1, 0}, e2{0, 0};
  if (!rest.is_unit_ideal()) {
    bool found = false;
    for (int64_t idx = 0; idx < f.norm() && !found; ++idx) {
      IntElem x = f.from_index(idx);
      if (rest.contains(x) && Q.contains(K.sub(x, {1, 0}))) {
        e1 = x;
        e2 = K.sub({1, 0}, x);
        found = true;
      }
    }
    if (!found) throw MathError("local_gauss_sum: CRT idempotent not found");
  }
  const int64_t qq = factor_int(q.norm()).at(0).first;
  const bool split = K.kronecker(qq) == 1;
  IntElem pi = uniformizer(K, q);
  IntElem dpt = K.mul(differential, K.pow(pi, t));
  const int64_t M = K.norm(dpt);
  int v = 0;
  int64_t mprime = M;
  while (mprime % qq == 0) {
    mprime /= qq;
    ++v;
  }
  const int64_t qv = ipow(qq, v);
  int64_t root = 0;
  if (split) {
    int64_t r = mod64(-q.B(), qq);
    root = hensel_root(K.omega_minpoly(), qq, std::max(v, 1), r).residue();
  }
  const int64_t minv = invmod(mod64(mprime, qv), qv);
  const int64_t E = psi.order();
  const int64_t L = lcm64(E, qv);
  std::vector<int64_t> counts((size_t)L, 0);
  IntElem dconj = K.conj(dpt);
  ResidueGroup local(K, Q);
  for (auto& u : local.elements()) {
    IntElem ut = f.reduce(K.add(K.mul(u, e1), e2));
    int64_t chi = -psi.eps_exp(ut);  // psi_q(u) = psi_f(u~)
    IntElem y = K.mul(u, dconj);
    int64_t num = split ? mod64(mod64(y.x, qv) + mulmod(mod64(y.y, qv), root, qv), qv) : mod64(K.trace(y), qv);
    int64_t r = mulmod(num, minv, qv);
    int64_t e = mod64(chi * (L / E) - r * (L / qv), L);
    ++counts[(size_t)e];
  }
  CycNum sum = from_counts(L, counts);
  // psi_q(pi)^{-t} = (pi^a pibar^b)^t psi_f(pi~)^t with pi~ = 1 mod Q, = pi mod rest
  IntElem pit = rest.is_unit_ideal() ? IntElem{1, 0} : f.reduce(K.add(e1, K.mul(pi, e2)));
  CycNum pre = infinity_factor(K, pi, psi.type()).pow(t) * CycNum::root_of_unity(E, -t * psi.eps_exp(pit));
  return pre * sum;
}

CycNum local_W(const HeckeCharacter& psi, const IdealK& q, const IntElem& differential) {
  const int t = ideal_valuation(psi.field(), q, psi.modulus());
  CycNum tau = local_gauss_sum(psi, q, differential);
  mpq_class scale(mpz_class(1), mpz_class(ipow(q.norm(), t)));
  scale.canonicalize();
  return tau * scale;
}

std::pair<IdealK, IdealK> split_primes(const FieldK& K, const PadicEmbedding& emb) {
  const int64_t p = emb.prime();
  int64_t r = mod64(emb.omega().residue(), p);
  IdealK P = IdealK::from_generators(K, {{p, 0}, {-r, 1}});
  return {P, ideal_conj(K, P)};
}

AvatarCharacter::AvatarCharacter(const HeckeCharacter& psi, const PadicEmbedding& emb) : psi_(psi), emb_(&emb) {
  auto [P, Pb] = split_primes(psi.field(), emb);
  P_ = P;
  Pb_ = Pb;
  t_ = ideal_valuation(psi.field(), P_, psi.modulus());
  s_ = ideal_valuation(psi.field(), Pb_, psi.modulus());
}

PadicCyc AvatarCharacter::eval(const IntElem& x) const {
  // non p-units are allowed; the sigma factors then carry the valuation
  if (!psi_.coprime(x)) throw MathError("avatar: argument not coprime to the modulus");
  PadicCyc val = emb_->embed_formal(psi_.psi_f(x));
  auto spow = [](PadicNum z, int e) { return e >= 0 ? z.pow(e) : z.inv().pow(-e); };
  PadicNum s1 = emb_->sigma1(mpq_class(x.x), mpq_class(x.y));
  PadicNum s2 = emb_->sigma2(mpq_class(x.x), mpq_class(x.y));
  return val * (spow(s1, psi_.type().a) * spow(s2, psi_.type().b));
}

}  // namespace bianchi
