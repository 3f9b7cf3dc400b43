#include <random>

#include "bianchi/arith.hpp"
#include "doctest.h"

using namespace bianchi;

static mpq_class Q(long n, long d) {
  mpq_class q(n, d);
  q.canonicalize();
  return q;
}

TEST_CASE("cyclotomic basics") {
  CycNum z4 = CycNum::root_of_unity(4, 1);
  CHECK(z4 * z4 == CycNum::from_int(-1));
  CycNum z5 = CycNum::root_of_unity(5, 1);
  CHECK(z5 + z5.pow(2) + z5.pow(3) + z5.pow(4) == CycNum::from_int(-1));
  CycNum one = CycNum::from_int(1);
  CycNum inv = (one + z4).inv();
  // oracle: multiply back
  CHECK(inv * (one + z4) == one);
  CHECK(inv == (one - z4) * mpq_class(1, 2));
  CHECK_THROWS_AS(CycNum(12).inv(), MathError);
}

TEST_CASE("cyclotomic mixed conductors and minimization") {
  CycNum z3 = CycNum::root_of_unity(3, 1), z4 = CycNum::root_of_unity(4, 1);
  CycNum z12 = z3 * z4;
  CHECK(z12.conductor() == 12);
  CHECK(z12.pow(12) == CycNum::from_int(1));
  CHECK(z12.pow(3).minimized().conductor() == 4);
  CHECK((z12.pow(4) + z12.pow(8)).minimized() == CycNum::from_int(-1));
  CHECK(CycNum::root_of_unity(20, 5).minimized() == z4);
  CHECK(z4.conj() == z4.inv());
  CHECK(z4.galois(3) == z4.conj());
}

TEST_CASE("cyclotomic field axioms on random elements") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> d(-9, 9);
  for (int64_t m : {4, 5, 8, 12, 20}) {
    for (int t = 0; t < 20; ++t) {
      auto rnd = [&] {
        std::vector<mpq_class> c(euler_phi(m));
        for (auto& x : c) x = Q(d(rng), 1 + std::abs(d(rng)));
        return CycNum(m, c);
      };
      CycNum a = rnd(), b = rnd(), c = rnd();
      CHECK((a + b) * c == a * c + b * c);
      if (!a.is_zero()) CHECK(a * a.inv() == CycNum::from_int(1));
      auto za = a.to_complex(), zb = b.to_complex();
      CHECK(std::abs((a * b).to_complex() - za * zb) < 1e-9 * (1 + std::abs(za * zb)));
    }
  }
}

TEST_CASE("hensel lifting") {
  PadicNum r = hensel_root({1, 0, 1}, 5, 3, 2);
  CHECK(r.residue() == 57);
  CHECK(hensel_root({-3, 1}, 7, 4, 3).residue() == 3);
  CHECK(hensel_root({-3, 1}, 5, 2, 3).residue() == 3);
  CHECK_THROWS_AS(hensel_root({1, 0, 1}, 7, 3, 2), MathError);
  // poly(r) = 0 mod p^N at higher precision
  PadicNum s = hensel_root({1, 0, 1}, 5, 20, 2);
  PadicNum v = s * s + PadicNum::from_int(5, 1, 20);
  CHECK(v.is_zero());
  CHECK(v.absprec() >= 20);
}

TEST_CASE("padic precision tracking") {
  PadicNum a = PadicNum::from_int(5, 10, 6);  // 5*2
  CHECK(a.valuation() == 1);
  CHECK(a.relprec() == 5);
  PadicNum b = a.inv();
  CHECK(b.valuation() == -1);
  CHECK(b.relprec() == 5);
  PadicNum c = a * b;
  CHECK(c.equals(PadicNum::from_int(5, 1, 5)));
  PadicNum x = PadicNum::from_int(5, 1, 4), y = PadicNum::from_int(5, 26, 6);
  PadicNum z = y - x;  // 25, known mod 5^4
  CHECK(z.absprec() == 4);
  CHECK(z.valuation() == 2);
  PadicNum q = PadicNum::from_rational(5, mpq_class(1, 25), 4);
  CHECK(q.valuation() == -2);
  CHECK(q.absprec() == 4);
  CHECK((q * PadicNum::from_int(5, 25, 10)).equals(PadicNum::from_int(5, 1, 4)));
}

TEST_CASE("embedding of Q(i) at p = 5") {
  CycNum i = CycNum::root_of_unity(4, 1);
  PadicEmbedding E(5, 3, {1, 0, 1}, 2, &i);
  CHECK(E.omega().residue() == 57);
  CHECK(E.embed(CycNum::from_int(1)).residue() == 1);
  CHECK(E.embed(CycNum::from_int(1)).valuation() == 0);
  PadicNum a = E.embed(CycNum::from_int(2) + i);
  CHECK(a.residue() == 59);
  CHECK(a.valuation() == 0);
  PadicNum b = E.embed(CycNum::from_int(2) - i);
  CHECK(b.valuation() == 1);
  CHECK(mod64(b.residue() - (-55), 125) == 0);
  CHECK(E.sigma1(2, -1).valuation() == 1);
  CHECK(E.sigma2(2, 1).valuation() == 1);
  CHECK_THROWS_AS(E.embed(CycNum::root_of_unity(3, 1)), MathError);
}

TEST_CASE("embedding is a ring homomorphism on random pairs") {
  CycNum i = CycNum::root_of_unity(4, 1);
  PadicEmbedding E(5, 12, {1, 0, 1}, 2, &i);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> d(-30, 30);
  for (int t = 0; t < 100; ++t) {
    auto rnd = [&] {
      return CycNum(4, {Q(d(rng), 1 + std::abs(d(rng)) % 7), Q(d(rng), 1 + std::abs(d(rng)) % 5)});
    };
    CycNum a = rnd(), b = rnd();
    PadicNum ea = E.embed(a), eb = E.embed(b);
    PadicNum dm = E.embed(a * b) - ea * eb;
    PadicNum ds = E.embed(a + b) - (ea + eb);
    CHECK(dm.is_zero());
    CHECK(ds.is_zero());
    // reported precision never below N minus the denominators' valuation loss
    CHECK(dm.absprec() >= 12 - 4);
  }
}

TEST_CASE("formal embedding of order-5 roots of unity") {
  CycNum i = CycNum::root_of_unity(4, 1);
  PadicEmbedding E(5, 10, {1, 0, 1}, 2, &i);
  CycNum z20 = CycNum::root_of_unity(20, 1);
  PadicCyc e = E.embed_formal(z20);
  CHECK(e.exponent() == 1);
  // zeta_20^20 = 1 and the embedding is multiplicative
  PadicCyc acc = PadicCyc::scalar(PadicNum::from_int(5, 1, 10));
  for (int k = 0; k < 20; ++k) acc = acc * e;
  PadicCyc one = PadicCyc::scalar(PadicNum::from_int(5, 1, 10));
  CHECK((acc - one).is_zero());
  // restriction to Q(i) agrees with embed
  PadicCyc ei = E.embed_formal(z20.pow(5));
  CHECK((ei - PadicCyc::scalar(E.omega())).is_zero());
  // 1 - zeta_5 has valuation 1/4, so its coordinate valuation is 0 but its 4th power is divisible by 5
  PadicCyc u = one - E.embed_formal(CycNum::root_of_unity(5, 1));
  PadicCyc u4 = u * u * u * u;
  CHECK(u.valuation() == 0);
  CHECK(u4.valuation() >= 1);
}
