#include "bianchi/quadfield.hpp"

namespace bianchi {

IntElem elem_gcd(const FieldK& K, const IntElem& a, const IntElem& b) {
  if (a.is_zero() && b.is_zero()) throw MathError("elem_gcd: both zero");
  if (a.is_zero()) return K.unit_normalize(b);
  if (b.is_zero()) return K.unit_normalize(a);
  return ideal_add(K, IdealK::principal(K, a), IdealK::principal(K, b)).generator(K);
}

Cusp cusp_infinity() { return Cusp{{1, 0}, {0, 0}}; }

Cusp make_cusp(const FieldK& K, const IntElem& x, const IntElem& y) {
  if (y.is_zero()) {
    if (x.is_zero()) throw MathError("make_cusp: 0/0");
    return cusp_infinity();
  }
  IntElem g = elem_gcd(K, x, y);
  IntElem xr = *K.div_exact(x, g), yr = *K.div_exact(y, g);
  IntElem yn = K.unit_normalize(yr);
  for (auto& u : K.units())
    if (K.mul(u, yr) == yn) return Cusp{K.mul(u, xr), yn};
  throw MathError("make_cusp: normalization failed");
}

std::string cusp_str(const FieldK& K, const Cusp& c) {
  if (c.is_infinity()) return "inf";
  return "(" + K.str(c.num) + ")/(" + K.str(c.den) + ")";
}

bool cusp_in_C(const FieldK& K, const IdealK& m, int class_index, const Cusp& c) {
  if (class_index != 1) {
    if (K.h() == 1) throw MathError("cusp_in_C: class index out of range for h = 1");
    throw MathError("cusp_in_C: h > 1 is not supported");
  }
  if (c.is_infinity()) return true;
  // x in I_1 = O_K always
  if (m.contains(c.den)) return true;
  return ideal_add(K, IdealK::principal(K, c.den), m).is_unit_ideal();
}

Cusp apply_mat(const FieldK& K, const Mat2K& g, const Cusp& c) {
  IntElem x = K.add(K.mul(g.a, c.num), K.mul(g.b, c.den));
  IntElem y = K.add(K.mul(g.c, c.num), K.mul(g.d, c.den));
  return make_cusp(K, x, y);
}

StabilityReport c_stability_check(const FieldK& K, const IdealK& m, const std::vector<Mat2K>& mats,
                                  const std::vector<Cusp>& cusps) {
  StabilityReport rep;
  for (auto& g : mats)
    for (auto& c : cusps) {
      if (!cusp_in_C(K, m, 1, c)) continue;
      ++rep.tested;
      Cusp img = apply_mat(K, g, c);
      if (!cusp_in_C(K, m, 1, img))
        rep.counterexamples.push_back(cusp_str(K, c) + " -> " + cusp_str(K, img));
    }
  return rep;
}

}  // namespace bianchi
