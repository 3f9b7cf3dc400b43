#include <random>
#include <set>

#include "bianchi/quadfield.hpp"
#include "doctest.h"

using namespace bianchi;

TEST_CASE("field data for Q(i) and friends") {
  FieldK K(4);
  CHECK(K.w() == 4);
  CHECK(K.h() == 1);
  CHECK(K.omega_cyc() == CycNum::root_of_unity(4, 1));
  CHECK(K.norm(K.delta()) == 4);
  CHECK(FieldK(3).w() == 6);
  CHECK(FieldK(7).w() == 2);
  CHECK(FieldK(20).h() == 2);
  CHECK(FieldK(23).h() == 3);
  CHECK(FieldK(163).h() == 1);
  CHECK_THROWS_AS(FieldK(12), MathError);
  CHECK_THROWS_AS(FieldK(5), MathError);
  // omega in Q(zeta_D) squares correctly for D = 7
  FieldK K7(7);
  CycNum om = K7.omega_cyc();
  CHECK(om * om == om * mpq_class(K7.omega_trace()) - CycNum::from_int(K7.omega_norm()));
}

TEST_CASE("conjugation and norm") {
  FieldK K(4);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> d(-50, 50);
  for (int t = 0; t < 200; ++t) {
    IntElem a{d(rng), d(rng)};
    CHECK(K.conj(K.conj(a)) == a);
    CHECK(K.norm(a) >= 0);
    CHECK((K.norm(a) == 0) == a.is_zero());
    CHECK((K.conj(a) == a) == (a.y == 0));
  }
}

TEST_CASE("prime splitting") {
  FieldK K(4);
  auto s5 = factor_prime(K, 5);
  CHECK(s5.kind == Splitting::Split);
  REQUIRE(s5.primes.size() == 2);
  std::set<std::pair<int64_t, int64_t>> gens;
  for (auto& P : s5.primes) {
    IntElem g = P.generator(K);
    gens.insert({g.x, g.y});
    CHECK(P.norm() == 5);
  }
  CHECK(gens == std::set<std::pair<int64_t, int64_t>>{{2, -1}, {2, 1}});
  CHECK(ideal_mul(K, s5.primes[0], s5.primes[1]) == IdealK::principal(K, {5, 0}));
  auto s2 = factor_prime(K, 2);
  CHECK(s2.kind == Splitting::Ramified);
  CHECK(ideal_pow(K, s2.primes[0], 2) == IdealK::principal(K, {2, 0}));
  CHECK(s2.primes[0].generator(K) == IntElem{1, 1});
  CHECK(factor_prime(K, 7).kind == Splitting::Inert);
  CHECK(factor_prime(K, 7).primes[0].norm() == 49);
  CHECK_THROWS_AS(factor_prime(K, 9), MathError);
}

TEST_CASE("ideal generators and multiplicativity of the norm") {
  FieldK K(4);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> d(-40, 40);
  for (int t = 0; t < 200; ++t) {
    IntElem a{d(rng), d(rng)}, b{d(rng), d(rng)};
    if (a.is_zero() || b.is_zero()) continue;
    IdealK I = IdealK::principal(K, a), J = IdealK::principal(K, b);
    CHECK(I.norm() == K.norm(a));
    CHECK(ideal_mul(K, I, J).norm() == I.norm() * J.norm());
    CHECK(IdealK::principal(K, I.generator(K)) == I);
    CHECK(K.unit_normalize(I.generator(K)) == I.generator(K));
  }
  // non-principal ideal in Q(sqrt(-5))
  FieldK K20(20);
  IdealK P = factor_prime(K20, 2).primes[0];
  CHECK_THROWS_AS(P.generator(K20), MathError);
}

TEST_CASE("residue groups") {
  FieldK K(4);
  ResidueGroup G1(K, IdealK::unit_ideal(K));
  CHECK(G1.order() == 1);
  IdealK pb = IdealK::principal(K, {2, 1});
  ResidueGroup G(K, pb);
  CHECK(G.order() == 4);
  CHECK(G.is_cyclic());
  CHECK(G.gen_orders() == std::vector<int64_t>{4});
  ResidueGroup G2(K, ideal_pow(K, pb, 2));
  CHECK(G2.order() == 20);
  CHECK(G2.euler_phi_ideal() == 20);
  IdealK m = IdealK::principal(K, {-2, 2});  // (1+i)^3
  ResidueGroup Gm(K, m);
  CHECK(Gm.order() == 4);
  for (int64_t x : {3, 63, 100, 125, 200})
    for (int64_t y : {1, 5, 8}) {
      IdealK f = IdealK::principal(K, {x, y});
      ResidueGroup R(K, f);
      CHECK(R.order() == R.euler_phi_ideal());
      int64_t prod = 1;
      for (auto o : R.gen_orders()) prod *= o;
      CHECK(prod == R.order());
    }
}

TEST_CASE("character orthogonality on an enumerated group") {
  FieldK K(4);
  IdealK f = ideal_mul(K, IdealK::principal(K, {2, 1}), IdealK::principal(K, {3, 0}));
  ResidueGroup R(K, f);
  int64_t e = R.exponent();
  auto ords = R.gen_orders();
  // all characters: exponent vectors j with j_k mod ords_k
  std::vector<std::vector<int64_t>> chars{{}};
  for (auto o : ords) {
    std::vector<std::vector<int64_t>> nx;
    for (auto& c : chars)
      for (int64_t j = 0; j < o; ++j) {
        auto cc = c;
        cc.push_back(j);
        nx.push_back(cc);
      }
    chars.swap(nx);
  }
  CHECK((int64_t)chars.size() == R.order());
  for (auto& a : R.elements()) {
    auto dl = *R.dlog(a);
    std::vector<int64_t> cnt(e, 0);
    for (auto& c : chars) {
      int64_t s = 0;
      for (size_t k = 0; k < c.size(); ++k) s += c[k] * dl[k] * (e / ords[k]);
      cnt[mod64(s, e)]++;
    }
    bool is_one = IdealK(f).reduce(a) == f.reduce({1, 0});
    CycNum sum;
    for (int64_t k = 0; k < e; ++k)
      if (cnt[k]) sum += CycNum::root_of_unity(e, k) * mpq_class(cnt[k]);
    CHECK(sum == CycNum::from_int(is_one ? R.order() : 0));
  }
}

TEST_CASE("split residue levels") {
  FieldK K(4);
  SplitLevel L(K, 5, 57 + 125 * 0, 2, 1, 2);
  CHECK(L.group_order() == 80);
  CHECK(L.res1({2, -1}) % 5 == 0);
  CHECK(L.res2({2, 1}) % 5 == 0);
  for (int64_t r1 = 0; r1 < 25; ++r1)
    for (int64_t r2 = 0; r2 < 5; ++r2) {
      IntElem z = L.crt_lift(r1, r2);
      CHECK(L.res1(z) == r1);
      CHECK(L.res2(z) == r2);
    }
  // no nontrivial unit-trivial character of conductor exactly p
  SplitLevel L1(K, 5, 57, 1, 0, 2);
  CHECK(L1.unit_trivial_characters().size() == 1);
  SplitLevel L22(K, 5, 57, 2, 2, 2);
  CHECK(L22.unit_trivial_characters().size() == 100);
  auto c = L22.conductor(5, 0);
  CHECK(c == std::pair<int, int>{1, 0});
  CHECK(L22.restrict_to(5, 0, 1, 0) == std::pair<int64_t, int64_t>{1, 0});
}

TEST_CASE("cusps and the set C") {
  FieldK K(4);
  IdealK m = IdealK::principal(K, {-2, 2});
  CHECK(cusp_in_C(K, m, 1, cusp_infinity()));
  CHECK(cusp_in_C(K, m, 1, make_cusp(K, {0, 0}, {1, 0})));
  CHECK_FALSE(cusp_in_C(K, m, 1, make_cusp(K, {1, 0}, {1, 1})));
  CHECK(cusp_in_C(K, m, 1, make_cusp(K, {3, 0}, {2, -1})));
  CHECK(cusp_in_C(K, m, 1, make_cusp(K, {1, 0}, {-2, 2})));
  CHECK_THROWS_AS(cusp_in_C(K, m, 2, cusp_infinity()), MathError);
  // unit invariance
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> d(-9, 9);
  for (int t = 0; t < 100; ++t) {
    IntElem x{d(rng), d(rng)}, y{d(rng), d(rng)};
    if (y.is_zero() && x.is_zero()) continue;
    for (auto& u : K.units()) {
      Cusp a = make_cusp(K, x, y), b = make_cusp(K, K.mul(u, x), K.mul(u, y));
      CHECK(a == b);
      CHECK(cusp_in_C(K, m, 1, a) == cusp_in_C(K, m, 1, b));
    }
  }
}

TEST_CASE("stability of C under Gamma_1 and stabilization matrices") {
  FieldK K(4);
  IdealK m = IdealK::principal(K, {-2, 2});
  IntElem mg{-2, 2};
  std::vector<Mat2K> mats;
  mats.push_back({{1, 0}, {0, 0}, {0, 0}, {1, 0}});
  // Gamma_1(n) elements with n = m * (5): c in n, a = d = 1 mod n
  IntElem n = K.mul(mg, {5, 0});
  mats.push_back({{1, 0}, {1, 0}, n, K.add({1, 0}, n)});
  mats.push_back({K.add({1, 0}, n), {0, 1}, {0, 0}, {1, 0}});
  mats.push_back({{1, 0}, {0, 0}, {0, 0}, {2, -1}});
  mats.push_back({{2, -1}, {0, 0}, {0, 0}, {1, 0}});
  for (int b = 0; b < 5; ++b) mats.push_back({{1, 0}, {b, 0}, {0, 0}, {2, -1}});
  std::vector<Cusp> cusps{cusp_infinity()};
  for (int x = -3; x <= 3; ++x)
    for (int y = -3; y <= 3; ++y)
      for (IntElem den : {IntElem{1, 0}, IntElem{2, -1}, IntElem{3, 4}, IntElem{-2, 2}})
        cusps.push_back(make_cusp(K, {x, y}, den));
  auto rep = c_stability_check(K, m, mats, cusps);
  CHECK(rep.tested > 100);
  CHECK(rep.ok());
  // the image a/(2-i) of an integral cusp lies in C
  CHECK(cusp_in_C(K, m, 1, apply_mat(K, mats[3], make_cusp(K, {3, 2}, {1, 0}))));
}

TEST_CASE("ideal enumeration") {
  FieldK K(4);
  auto ids = ideals_up_to(K, 100);
  // number of ideals of norm <= X in Z[i]: sum over n of r2(n)/4
  int64_t brute = 0;
  for (int64_t x = -10; x <= 10; ++x)
    for (int64_t y = -10; y <= 10; ++y)
      if ((x || y) && x * x + y * y <= 100) ++brute;
  CHECK((int64_t)ids.size() * 4 == brute);
}
