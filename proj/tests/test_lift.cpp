#include <set>

#include "bianchi/lift.hpp"
#include "doctest.h"

using namespace bianchi;

namespace {

// a smaller instance than the reference run: N = T = 3 keeps the tree at 5^6 leaves
constexpr int N = 3, T = 3;

struct Instance {
  FieldK K{4};
  PadicEmbedding emb{5, 8, K.omega_minpoly(), 57, &K.omega_cyc()};
  BaseChange bc = make_base_change(K, emb, 50);
  BaseChangeSymbol sym{bc};
  std::unique_ptr<Lifter> lifter;
  Instance() {
    sym.ensure_levels(T + 1, T + 1);
    lifter = std::make_unique<Lifter>(sym, LiftOptions{N, 0, false, 0});
  }
};
Instance& inst() {
  static Instance I;
  return I;
}

}  // namespace

TEST_CASE("moment bound and modulus") {
  Lifter& L = *inst().lifter;
  CHECK(L.M() == N + 1);
  CHECK(L.modulus() == 125);
}

TEST_CASE("node count at level (i, j) is p^(i+j)") {
  Instance& I = inst();
  for (int i = 0; i <= 2; ++i)
    for (int j = 0; j <= 2; ++j) {
      auto nodes = I.lifter->level_nodes(i, j);
      int64_t expect = 1;
      for (int n = 0; n < i + j; ++n) expect *= 5;
      CHECK((int64_t)nodes.size() == expect);
      // distinct cusps b/(pi^i pibar^j)
      const SplitLevel lev(I.K, 5, I.sym.split(i, j).root(), i, j, primitive_root_pk(5));
      std::set<std::pair<int64_t, int64_t>> res;
      for (auto& n : nodes) res.insert({lev.res1(n.b), lev.res2(n.b)});
      CHECK((int64_t)res.size() == expect);
    }
}

TEST_CASE("initial lift specializes to the symbol") {
  Instance& I = inst();
  for (auto& node : I.lifter->level_nodes(1, 1)) {
    auto m = I.lifter->initial_lift(node);
    CHECK(m[0] == I.lifter->embedded_value(node.b, node.i, node.j));
    for (size_t n = 1; n < m.size(); ++n) CHECK(m[n] == 0);
  }
  // root: c(0) = (4+3i)/50, and 4 + 3i = i (2 - i)^2 lies in p^2, so the value is a unit
  PadicNum i1 = I.emb.sigma1(mpq_class(0), mpq_class(1));
  PadicNum c0 = (PadicNum::from_int(5, 4, 8) + PadicNum::from_int(5, 3, 8) * i1) / PadicNum::from_int(5, 50, 8);
  int v = -1;
  int64_t e = I.lifter->embedded_value({0, 0}, 0, 0, &v);
  CHECK(v == 0);
  CHECK(c0.valuation() == 0);
  CHECK((c0 - PadicNum::from_int(5, e, N)).reduce_absprec(N).is_zero());
}

TEST_CASE("eigenlift is p-integral and stays in C") {
  Instance& I = inst();
  LiftStats st;
  FinDist root = I.lifter->eigen_lift(T, T, &st);
  CHECK(st.leaves == 15625);
  CHECK(st.nonintegral_leaves == 0);
  CHECK(st.cusp_checks > 0);
  CHECK(st.cusp_failures == 0);
  CHECK(root.min_valuation() >= 0);
  CHECK(root.profile_exact());
  // the total moment is the symbol value at {0} - {infinity}
  CHECK((root.at(0, 0) - PadicNum::from_int(5, I.lifter->embedded_value({0, 0}, 0, 0), N)).reduce_absprec(N).is_zero());
}

TEST_CASE("random higher moments are forgotten") {
  Instance& I = inst();
  FinDist root = I.lifter->eigen_lift(T, T);
  Lifter A(I.sym, LiftOptions{N, 0, true, 7}), B(I.sym, LiftOptions{N, 0, true, 8});
  CHECK(A.initial_lift({{3, 1}, T, T}) != B.initial_lift({{3, 1}, T, T}));
  FinDist a = A.eigen_lift(T, T), b = B.eigen_lift(T, T);
  CHECK(a.agrees(b));
  CHECK(a.agrees(root));
}

TEST_CASE("one more U sweep changes nothing") {
  Instance& I = inst();
  FinDist root = I.lifter->eigen_lift(T, T);
  CHECK(I.lifter->eigen_lift(T + 1, T).agrees(root));
  CHECK(I.lifter->eigen_lift(T, T + 1).agrees(root));
}

TEST_CASE("convergence is monotone") {
  Instance& I = inst();
  std::vector<std::string> lines;
  auto steps = convergence_log(*I.lifter, T, [&](const std::string& l) { lines.push_back(l); });
  REQUIRE(steps.size() == (size_t)T);
  CHECK(lines.size() == (size_t)T);
  CHECK(lines[0].find("stage=lift event=sweep t=1") == 0);
  for (size_t t = 1; t < steps.size(); ++t) CHECK(steps[t].agreeing >= steps[t - 1].agreeing);
  CHECK(steps.back().agreeing == steps.back().total);
}

TEST_CASE("lift at inner nodes is integral") {
  Instance& I = inst();
  int bad = 0;
  for (int i = 0; i <= 1; ++i)
    for (int j = 0; j <= 1; ++j)
      for (auto& node : I.lifter->level_nodes(i, j)) bad += I.lifter->node_value(node, T, T).min_valuation() < 0;
  CHECK(bad == 0);
}
