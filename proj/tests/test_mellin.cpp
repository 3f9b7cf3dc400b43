#include "bianchi/mellin.hpp"
#include "doctest.h"

using namespace bianchi;

namespace {

constexpr int N = 3, T = 3;

struct Instance {
  FieldK K{4};
  PadicEmbedding emb{5, 8, K.omega_minpoly(), 57, &K.omega_cyc()};
  BaseChange bc = make_base_change(K, emb, 50);
  BaseChangeSymbol sym{bc};
  std::unique_ptr<Lifter> lifter;
  Instance() {
    sym.ensure_levels(T, T);
    lifter = std::make_unique<Lifter>(sym, LiftOptions{N, 0, false, 0});
  }
  MellinOptions opts() const {
    MellinOptions o;
    o.T = T;
    return o;
  }
};
Instance& inst() {
  static Instance I;
  return I;
}

int diff_val(const PadicCyc& a, const PadicCyc& b) {
  PadicCyc d = a - b;
  return d.is_zero() ? d.absprec() : d.valuation();
}

const CharSpec kTrivial{0, 0, 0, 0};

}  // namespace

TEST_CASE("verification set") {
  Instance& I = inst();
  auto set = verification_set(I.sym);
  REQUIRE(!set.empty());
  CHECK(set[0].t == 0);
  CHECK(set[0].s == 0);
  CHECK(set.size() == 1 + 4 + 4 + 3);
  for (auto& c : set) CHECK(c.make(I.sym).unit_compatible());
}

TEST_CASE("interpolation at the trivial character") {
  Instance& I = inst();
  InterpRecord r = interpolation_check(*I.lifter, kTrivial, N - 2, I.opts());
  CHECK(r.pass);
  CHECK(r.valuation >= N - 2);
  // both Z-factors present, sign +1
  CycNum one = CycNum::from_int(1);
  CycNum zl = one - I.bc.lambda.inv();
  CHECK(r.zfactor == zl * zl);
  CHECK(r.lhs.level_t == 1);
  CHECK(r.lhs.level_s == 1);
}

TEST_CASE("Z factor drops the primes in the conductor") {
  Instance& I = inst();
  CycNum one = CycNum::from_int(1);
  auto atp = primitive_characters(I.sym, 2, 0);
  REQUIRE(!atp.empty());
  auto r = interpolation_check(*I.lifter, atp[0], N - 2, I.opts());
  HeckeCharacter psi = atp[0].make(I.sym);
  CHECK(psi.eval_ideal(I.bc.P).is_zero());
  CHECK(r.zfactor == one - (I.bc.lambda * psi.eval_ideal(I.bc.Pb)).inv());
  CHECK(r.pass);
  for (auto& c : primitive_characters(I.sym, 1, 1)) {
    auto rr = interpolation_check(*I.lifter, c, N - 2, I.opts());
    CHECK(rr.zfactor == one);
    CHECK(rr.pass);
  }
}

TEST_CASE("mellin transform is unchanged by a global unit") {
  Instance& I = inst();
  for (const CharSpec& c : verification_set(I.sym)) {
    PadicLValue base = mellin_eval(*I.lifter, c, I.opts());
    for (IntElem u : {IntElem{0, 1}, IntElem{-1, 0}, IntElem{0, -1}}) {
      MellinOptions o = I.opts();
      o.unit_twist = u;
      PadicLValue tw = mellin_eval(*I.lifter, c, o);
      CHECK(diff_val(base.value, tw.value) >= N);
    }
  }
}

TEST_CASE("refining the disc level agrees") {
  Instance& I = inst();
  for (const CharSpec& c : {kTrivial, primitive_characters(I.sym, 2, 0).at(0), primitive_characters(I.sym, 0, 2).at(0)}) {
    PadicLValue base = mellin_eval(*I.lifter, c, I.opts());
    MellinOptions op = I.opts(), ob = I.opts();
    op.extra_p = 1;
    ob.extra_pbar = 1;
    INFO(c.label());
    CHECK(diff_val(base.value, mellin_eval(*I.lifter, c, op).value) >= base.claimed_precision);
    CHECK(diff_val(base.value, mellin_eval(*I.lifter, c, ob).value) >= base.claimed_precision);
  }
}

TEST_CASE("precision ledger") {
  Instance& I = inst();
  PadicLValue v = mellin_eval(*I.lifter, kTrivial, I.opts());
  CHECK(v.claimed_precision == N);
  CHECK(v.losses.size() == 3);
  CHECK(v.losses[0].first == "embedding");
  CHECK(v.losses[0].second == 0);
  MellinOptions o = I.opts();
  o.q = 1;
  CHECK(mellin_eval(*I.lifter, kTrivial, o).claimed_precision == N - 1);
}

TEST_CASE("bad requests are refused") {
  Instance& I = inst();
  MellinOptions o = I.opts();
  o.q = I.lifter->M();
  CHECK_THROWS_AS(mellin_eval(*I.lifter, kTrivial, o), MathError);
  o = I.opts();
  o.unit_twist = {1, 1};
  CHECK_THROWS_AS(mellin_eval(*I.lifter, kTrivial, o), MathError);
  o = I.opts();
  o.extra_p = T;
  CHECK_THROWS_AS(mellin_eval(*I.lifter, kTrivial, o), MathError);
}

TEST_CASE("Katz factorization") {
  Instance& I = inst();
  auto set = verification_set(I.sym);
  auto recs = katz_check(*I.lifter, set, N - 2, I.opts());
  REQUIRE(recs.size() == set.size());
  // trivial psi: every local sum is 1, W_p(eta) W_p(eta') = W(triv) = 1
  CHECK(recs[0].gauss_identity);
  int pass = 0, gauss = 0;
  for (auto& r : recs) {
    INFO(r.chr.label() << " " << r.reason);
    CHECK(r.recognized);
    pass += r.pass;
    gauss += r.gauss_identity;
  }
  CHECK(gauss == (int)recs.size());
  CHECK(pass == (int)recs.size());
  CHECK(recs[0].valuation >= N - 2);
}

TEST_CASE("Katz check reuses known values") {
  Instance& I = inst();
  std::map<std::string, PadicLValue> known;
  known[kTrivial.label()] = mellin_eval(*I.lifter, kTrivial, I.opts());
  auto recs = katz_check(*I.lifter, {kTrivial}, N - 2, I.opts(), &known);
  REQUIRE(recs.size() == 1);
  CHECK(diff_val(recs[0].lhs.value, known[kTrivial.label()].value) >= N);
  CHECK(recs[0].pass);
}
