#include "bianchi/symbols.hpp"

namespace bianchi {

CuspDivisor CuspDivisor::from_pair(const Cusp& a, const Cusp& b) {
  CuspDivisor d;
  d.terms[a] += 1;
  d.terms[b] -= 1;
  if (d.terms[a] == 0) d.terms.erase(a);
  if (d.terms.count(b) && d.terms[b] == 0) d.terms.erase(b);
  return d;
}

int64_t CuspDivisor::degree() const {
  int64_t s = 0;
  for (auto& [c, m] : terms) s += m;
  return s;
}

}  // namespace bianchi
