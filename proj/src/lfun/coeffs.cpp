#include <algorithm>

#include "bianchi/lfun.hpp"

namespace bianchi {

CycNum CoeffStream::at(const FieldK& K, const IntElem& a) const {
  IntElem g = K.unit_normalize(a);
  int64_t n = K.norm(g);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), std::make_pair(n, g), [](const StreamEntry& e, auto& key) {
    return e.norm != key.first ? e.norm < key.first : e.ideal < key.second;
  });
  if (it != entries_.end() && it->norm == n && it->ideal == g) return it->value;
  return CycNum();
}

CycNum CoeffStream::rational_coeff(int64_t n) const {
  CycNum s;
  for (auto& e : entries_)
    if (e.norm == n) s += e.value;
  return s.minimized();
}

bool CoeffStream::operator==(const CoeffStream& o) const {
  if (cutoff_ != o.cutoff_ || entries_.size() != o.entries_.size()) return false;
  for (size_t i = 0; i < entries_.size(); ++i) {
    const auto &x = entries_[i], &y = o.entries_[i];
    if (!(x.ideal == y.ideal) || x.norm != y.norm || x.value != y.value) return false;
  }
  return true;
}

CoeffStream coeff_stream(const FieldK& K, const HeckeCharacter& A, const HeckeCharacter& B, int64_t cutoff) {
  auto ideals = ideals_up_to(K, cutoff);
  std::vector<CycNum> av(ideals.size()), bv(ideals.size());
  for (size_t i = 0; i < ideals.size(); ++i) {
    av[i] = A.eval_ideal(ideals[i].first);
    bv[i] = B.eval_ideal(K.conj(ideals[i].first));
  }
  auto index_of = [&](const IntElem& g, int64_t n) {
    auto it = std::lower_bound(ideals.begin(), ideals.end(), std::make_pair(g, n), [](auto& e, auto& key) {
      return e.second != key.second ? e.second < key.second : e.first < key.first;
    });
    return (size_t)(it - ideals.begin());
  };
  std::vector<CycNum> acc(ideals.size());
  for (size_t i = 0; i < ideals.size(); ++i) {
    if (av[i].is_zero()) continue;
    const int64_t nb = ideals[i].second;
    for (size_t j = 0; j < ideals.size() && ideals[j].second * nb <= cutoff; ++j) {
      if (bv[j].is_zero()) continue;
      IntElem g = K.unit_normalize(K.mul(ideals[i].first, ideals[j].first));
      acc[index_of(g, nb * ideals[j].second)] += av[i] * bv[j];
    }
  }
  std::vector<StreamEntry> out;
  for (size_t i = 0; i < ideals.size(); ++i)
    out.push_back({ideals[i].first, ideals[i].second, acc[i].minimized()});
  return CoeffStream(std::move(out), cutoff);
}

BianchiStreams coeffs_of_bianchi(const FieldK& K, const HeckeCharacter& phi, const HeckeCharacter& psi,
                                 int64_t cutoff) {
  HeckeCharacter lk = HeckeCharacter::lambda_K(K);
  HeckeCharacter pc = phi.conj();
  BianchiStreams s;
  s.primary = coeff_stream(K, pc.mul(psi), pc.mul(psi.conj()).mul(lk), cutoff);
  s.alternate = coeff_stream(K, pc.mul(psi).mul(lk), pc.mul(psi.conj()), cutoff);
  s.agree = s.primary == s.alternate;
  return s;
}

}  // namespace bianchi
