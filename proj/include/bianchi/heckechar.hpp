#pragma once
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "bianchi/arith.hpp"
#include "bianchi/quadfield.hpp"

namespace bianchi {

// psi_inf(z) = z^a zbar^b
struct InfinityType {
  int a = 0, b = 0;
  bool operator==(const InfinityType& o) const { return a == o.a && b == o.b; }
};

// A Hecke character of K given as an ideal function.
// ep(alpha) is a root of unity of order dividing E on (O/f)^x, stored by its exponents on the
// residue-group generators, and psi((alpha)) = ep(alpha) alpha^{-a} conj(alpha)^{-b}.
// The finite idelic part is psi_f = ep^{-1}.
class HeckeCharacter {
 public:
  HeckeCharacter() = default;
  static HeckeCharacter trivial(const FieldK& K);
  // values given on a generating list of residues: ep(g) = exp(2 pi i angle), angle in Q/Z
  static HeckeCharacter from_pairs(const FieldK& K, const IdealK& modulus, InfinityType type,
                                   const std::vector<std::pair<IntElem, mpq_class>>& table);
  // canonical CM character of Q(i): modulus (1+i)^3, type (-1, 0), psi((alpha)) = u^{-1} alpha
  static HeckeCharacter canonical_phi_Qi(const FieldK& K);
  // lambda_K = chi_{-D} o N on modulus (D), imprimitive by design
  static HeckeCharacter lambda_K(const FieldK& K);
  // finite-order character of modulus p^a pbar^b whose psi_f is the SplitLevel character (j1, j2)
  static HeckeCharacter from_split(const FieldK& K, const SplitLevel& lev, int64_t j1, int64_t j2,
                                   InfinityType type = {});

  const FieldK& field() const { return *K_; }
  const IdealK& modulus() const { return f_; }
  InfinityType type() const { return type_; }
  int64_t order() const { return E_; }  // values of ep live in mu_E
  const ResidueGroup& residues() const { return *rg_; }

  bool coprime(const IntElem& x) const { return rg_->is_unit(x); }
  // ep(x) = zeta_E^{eps_exp(x)}; throws if x is not coprime to f
  int64_t eps_exp(const IntElem& x) const;
  CycNum eps(const IntElem& x) const;
  CycNum psi_f(const IntElem& x) const;  // eps(x)^{-1}
  std::complex<double> eps_complex(const IntElem& x) const;
  // ep(u) = u^a ubar^b for every global unit u
  bool unit_compatible() const;
  bool is_trivial() const { return f_.is_unit_ideal() && type_.a == 0 && type_.b == 0; }
  IdealK conductor() const;
  bool is_primitive() const { return conductor() == f_; }
  HeckeCharacter primitive() const;
  // the same character viewed on a multiple of its modulus
  HeckeCharacter extend_modulus(const IdealK& g) const;

  // value on the principal ideal (alpha); 0 if not coprime to f
  CycNum eval_ideal(const IntElem& alpha) const;
  CycNum eval_ideal(const IdealK& I) const { return eval_ideal(I.generator(*K_)); }
  std::complex<double> eval_complex(const IntElem& alpha) const;

  HeckeCharacter conj() const;  // psi^c(a) = psi(abar)
  HeckeCharacter mul(const HeckeCharacter& o) const;
  HeckeCharacter inverse() const;
  HeckeCharacter norm_twist(int e = 1) const;  // psi |.|^e as an ideal function psi(a) N(a)^{-e}
  std::string fingerprint() const;
  std::string describe() const;

 private:
  struct Cache {
    std::shared_mutex mu;
    std::map<IntElem, CycNum> vals;
  };
  const FieldK* K_ = nullptr;
  IdealK f_;
  InfinityType type_;
  std::shared_ptr<const ResidueGroup> rg_;
  int64_t E_ = 1;
  std::vector<int64_t> gen_exp_;  // exponent of zeta_E at each residue-group generator
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();

  static HeckeCharacter build(const FieldK& K, const IdealK& f, InfinityType type,
                              std::shared_ptr<const ResidueGroup> rg, int64_t E,
                              std::vector<int64_t> gexp);
};

// alpha^e inside Q(zeta_D), negative e allowed for alpha != 0
CycNum elem_pow_cyc(const FieldK& K, const IntElem& alpha, int e);

// W(psi) = psi_inf(delta) Sum_{[a] in f^{-1}/O coprime} psi_f(a) e(Tr(a/delta)), representatives
// a = d/gamma with gamma the canonical generator of f. Requires a primitive psi; W(trivial) = 1.
CycNum gauss_sum_W(const HeckeCharacter& psi);
// tau(psi) = Sum_{[a]} psi(a f) psi_inf(a/delta) e(Tr(a/delta))
CycNum gauss_tau(const HeckeCharacter& psi);
// (1/tau(psi^{-1})) Sum_{[a]} psi(af)^{-1} psi_inf(a/delta)^{-1} e(Tr(a c/delta))
CycNum orthogonality_lhs(const HeckeCharacter& psi, const IntElem& c);

// psi_q(pi)^{-t} Sum_{u in (O_q/q^t)^x} psi_q(u) e_q(u / (d pi^t)), with d the local differential
// (delta by default). Returns 1 if q does not divide the modulus.
CycNum local_gauss_sum(const HeckeCharacter& psi, const IdealK& q, const IntElem& differential);
CycNum local_gauss_sum(const HeckeCharacter& psi, const IdealK& q);
// N(q)^{-t} tau_q
CycNum local_W(const HeckeCharacter& psi, const IdealK& q, const IntElem& differential);
// exponent of q in the modulus
int ideal_valuation(const FieldK& K, const IdealK& q, const IdealK& I);

// p-adic avatar psi_hat(x) = psi_f(x) sigma1(x)^a sigma2(x)^b on O coprime to f p.
class AvatarCharacter {
 public:
  AvatarCharacter(const HeckeCharacter& psi, const PadicEmbedding& emb);
  PadicCyc eval(const IntElem& x) const;
  int t() const { return t_; }  // exponent of p (the prime of sigma1) in the modulus
  int s() const { return s_; }  // exponent of pbar
  const HeckeCharacter& source() const { return psi_; }
  const IdealK& prime_p() const { return P_; }
  const IdealK& prime_pbar() const { return Pb_; }

 private:
  HeckeCharacter psi_;
  const PadicEmbedding* emb_;
  IdealK P_, Pb_;
  int t_ = 0, s_ = 0;
};

// primes above p ordered as (p, pbar) with p the prime of sigma1
std::pair<IdealK, IdealK> split_primes(const FieldK& K, const PadicEmbedding& emb);
// generator a + b omega of a prime of norm q with a > |b| style normalization (unit_normalize)
IntElem uniformizer(const FieldK& K, const IdealK& q);

}  // namespace bianchi
