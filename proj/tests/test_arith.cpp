#include <random>
#include <set>
#include <tuple>

#include "doctest.h"
#include "gl3/arith.hpp"

using namespace gl3;

TEST_CASE("mobius") {
  CHECK(mobius(1) == 1);
  CHECK(mobius(12) == 0);
  CHECK(mobius(30) == -1);
  CHECK(mobius(35) == 1);
  // sum_{d | n} mu(d) = [n = 1]
  for (i64 n = 1; n <= 10000; ++n) {
    i64 s = 0;
    for (i64 d : divisors(n)) s += mobius(d);
    if (s != (n == 1 ? 1 : 0)) FAIL("divisor sum of mobius wrong at n = " << n);
  }
}

TEST_CASE("divisor_triples") {
  CHECK(divisor_triples(1) == std::vector<Triple>{{1, 1, 1}});
  auto t4 = divisor_triples(4);
  CHECK(t4.size() == 6);
  std::set<std::tuple<i64, i64, i64>> want{{1, 1, 4}, {1, 4, 1}, {4, 1, 1}, {1, 2, 2}, {2, 1, 2}, {2, 2, 1}};
  std::set<std::tuple<i64, i64, i64>> got;
  for (auto t : t4) got.insert({t.d1, t.d2, t.d3});
  CHECK(got == want);
  for (i64 p : {2, 3, 5}) {
    CHECK(divisor_triples(p).size() == 3);
    CHECK(divisor_triples(p * p).size() == 6);
  }
  for (i64 m = 1; m <= 500; ++m) CHECK(static_cast<i64>(divisor_triples(m).size()) == tau3(m));
}

TEST_CASE("mod_inverse") {
  for (i64 q = 1; q <= 20; ++q) CHECK(mod_inverse(1, q) == (q == 1 ? 0 : 1));
  CHECK(mod_inverse(3, 7) == 5);
  for (i64 q = 2; q <= 200; ++q)
    for (i64 a = 1; a < q; ++a)
      if (gcd(a, q) == 1) {
        if (a * mod_inverse(a, q) % q != 1) FAIL("inverse wrong " << a << " mod " << q);
      } else {
        CHECK_THROWS_AS(mod_inverse(a, q), NotInvertible);
      }
  CHECK(mod_inverse(-3, 7) == 2);
}

TEST_CASE("factorize and phi") {
  auto f = factorize(360);
  CHECK(f == std::vector<std::pair<i64, int>>{{2, 3}, {3, 2}, {5, 1}});
  CHECK(euler_phi(360) == 96);
  CHECK(factorize(999983) == std::vector<std::pair<i64, int>>{{999983, 1}});
  CHECK(divisors(12) == std::vector<i64>{1, 2, 3, 4, 6, 12});
}

TEST_CASE("RationalPhase reduction") {
  RationalPhase p(6, 8);
  CHECK(p.numerator == 3);
  CHECK(p.denominator == 4);
  RationalPhase z(10, 5);
  CHECK(z.numerator == 0);
  CHECK(z.denominator == 1);
  RationalPhase n(-1, 3);
  CHECK(n.numerator == 2);
}

TEST_CASE("ExactSum zero detection") {
  // full sums of q-th roots of unity vanish
  for (i64 q = 2; q <= 60; ++q) {
    ExactSum s(q);
    for (i64 k = 0; k < q; ++k) s.add_index(k);
    CHECK(s.is_zero());
    CHECK(std::abs(s.evaluate()) < 1e-12);
  }
  // primitive roots sum to mu(q)
  for (i64 q = 1; q <= 200; ++q) {
    ExactSum s(q);
    for (i64 k = 0; k < q; ++k)
      if (gcd(k, q) == 1) s.add_index(k);
    auto v = s.as_integer();
    REQUIRE(v.has_value());
    CHECK(*v == mobius(q));
  }
  // a single nontrivial root is neither zero nor rational
  ExactSum one(12);
  one.add_index(5);
  CHECK_FALSE(one.is_zero());
  CHECK_FALSE(one.as_integer().has_value());
  // e(1/6) + e(5/6) = 1
  ExactSum s6(6);
  s6.add_index(1);
  s6.add_index(5);
  CHECK(s6.as_integer() == std::optional<i64>(1));
}

TEST_CASE("ExactSum random cancellation agrees with floating evaluation") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    i64 q = 1 + rng() % 90;
    ExactSum s(q);
    for (int t = 0; t < 6; ++t) {
      // add a random rotated full p-sum so that the total is often zero
      auto f = factorize(q);
      if (f.empty()) break;
      i64 p = f[rng() % f.size()].first;
      i64 k0 = rng() % q;
      i64 sign = (rng() % 2) ? 1 : -1;
      for (i64 j = 0; j < p; ++j) s.add_index(k0 + j * (q / p), sign);
    }
    if (rng() % 3 == 0) s.add_index(rng() % q);
    double mag = std::abs(s.evaluate());
    CHECK(s.is_zero() == (mag < 1e-9));
  }
}
