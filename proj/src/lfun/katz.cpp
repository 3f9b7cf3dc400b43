#include "bianchi/lfun.hpp"

namespace bianchi {

KatzValue katz_rhs(const BaseChange& bc, const HeckeCharacter& eta_in, const IntElem& differential) {
  set_working_digits(bc.digits);
  const FieldK& K = *bc.K;
  HeckeCharacter eta = eta_in.primitive();
  InfinityType t = eta.type();
  if (!(t.a > 0 && t.b <= 0)) throw MathError("katz_rhs: infinity type must satisfy a > 0 >= b");
  KatzValue out;
  out.t = ideal_valuation(K, bc.P, eta.modulus());
  out.Wp = local_W(eta, bc.P, differential);
  // eta(q) = 0 for q | conductor, and the second factor is then 1 by convention
  CycNum one = CycNum::from_int(1);
  CycNum at_pbar = eta.eval_ideal(bc.Pb);
  CycNum at_p = eta.eval_ideal(bc.P);
  CycNum e1 = one - at_pbar;
  CycNum e2 = at_p.is_zero() ? one : one - (at_p * mpq_class(bc.P.norm())).inv();
  out.euler = e1 * e2;
  ComplexVal L = hecke_lvalue(eta, 0.0, bc.digits);
  Real omega_pow = boost::multiprecision::pow(bc.periods.omega_inf, t.a - t.b);
  Real scale = -Real(K.w()) / 2;
  out.value.value = to_mp(out.Wp * out.euler) * L.value * scale / omega_pow;
  out.value.err = (to_mp(out.Wp * out.euler).abs() * Real(L.err) / omega_pow).convert_to<double>() * K.w() / 2;
  return out;
}

}  // namespace bianchi
