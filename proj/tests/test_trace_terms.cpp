#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "gl3/trace_terms.hpp"

using namespace gl3;

TEST_CASE("Sigma4/Sigma5 moduli: brute force and mirror") {
  for (auto [a, b] : std::vector<std::pair<i64, i64>>{{4, 1}, {1, 1}, {2, 3}, {12, 3}, {1, 6}, {9, 4}}) {
    auto fast = sigma4_moduli(a, b, 1000);
    auto slow = sigma4_moduli_brute(a, b, 1000);
    auto key = [](const ModuliPair& x, const ModuliPair& y) { return x.D2 < y.D2 || (x.D2 == y.D2 && x.D1 < y.D1); };
    std::sort(slow.begin(), slow.end(), key);
    CHECK(fast == slow);

    auto five = sigma5_moduli(a, b, 1000);
    auto five_slow = sigma5_moduli_brute(a, b, 1000);
    CHECK(five.size() == five_slow.size());
    // (m2, n1, D2 | D1) <-> (m1, n2, D1 | D2)
    REQUIRE(five.size() == fast.size());
    for (size_t i = 0; i < fast.size(); ++i) {
      CHECK(five[i].D1 == fast[i].D2);
      CHECK(five[i].D2 == fast[i].D1);
      CHECK(std::find(five_slow.begin(), five_slow.end(), five[i]) != five_slow.end());
    }
  }
  // 4 D1 = D2^2 with D2 | D1: D2 = 2k, D1 = k^2, k even
  auto p = sigma4_moduli(4, 1, 1000);
  REQUIRE(p.size() >= 2);
  CHECK(p[0] == ModuliPair{4, 4});
  CHECK(p[1] == ModuliPair{16, 8});
  for (auto& x : p) CHECK(4 * x.D1 == x.D2 * x.D2);
}

TEST_CASE("Sigma6 survival") {
  auto s = sigma6_survival(16.0, std::pow(16.0, 0.4), 0.1, 4096.0);
  CHECK(s.tuples > 0);
  CHECK(s.admissible_tuples == 0);
  CHECK(s.admissible_pairs == 0);
  CHECK(s.best_margin < 1.0);
  // a larger product range lets D1 = D2 = 1 survive
  auto big = sigma6_survival(16.0, 1.0, 0.1, 1e6);
  CHECK(big.admissible_tuples > 0);
  CHECK(sigma6_d1_bound(1e4, 1e4, 16.0, 0.1) == static_cast<i64>(std::floor(1e4 / std::pow(16.0, 1.8))));
  CHECK(sigma6_d2_bound(64.0, 64.0, 16.0, 0.1) == 0);
}

TEST_CASE("trace terms: Delta, Sigma6, guards") {
  auto p = TestFunctionParams::make(8.0, 0.7, 3.0, 1.0, 0);
  auto r = TraceTermRequest::first(1, 1, p);
  auto d = trace_term(r, TermKind::Delta);
  auto w = weyl_integral_h(p, r.tol, 1);
  CHECK(std::abs(d.value.real() - w.value / (192.0 * std::pow(kPi, 5))) <= d.error_estimate + 1e-12 * w.value);
  CHECK(d.ratio_T3M2 > 0.0);
  CHECK(trace_term(TraceTermRequest::first(2, 1, p), TermKind::Delta).value == cplx(0.0, 0.0));

  auto r6 = TraceTermRequest::first(2, 3, TestFunctionParams::make(16.0, 0.7));
  auto s6 = trace_term(r6, TermKind::Sigma6);
  CHECK(s6.value == cplx(0.0, 0.0));
  CHECK(s6.tuples == 0);

  auto g = r;
  g.max_tuples = 1;
  g.n1 = 1, g.m2 = 1, g.d_max = 4;  // (D1, D2) = (1, 1), (4, 2)
  CHECK_THROWS_AS(trace_term(g, TermKind::Sigma4), CostGuardError);
  CHECK_THROWS_AS(trace_term(r, TermKind::EMax), InsufficientData);
  auto bad = r;
  bad.n1 = 0;
  CHECK_THROWS_AS(trace_term(bad, TermKind::Delta), std::invalid_argument);

  CHECK(term_from_string("e_min") == TermKind::EMin);
  CHECK(term_from_string("Sigma4") == TermKind::Sigma4);
  CHECK(to_string(TermKind::EMax) == "E_max");
  CHECK(moment_from_string("second") == Moment::Second);
  CHECK_THROWS_AS(term_from_string("sigma7"), std::invalid_argument);
}

TEST_CASE("trace terms: Sigma4 with one modulus pair") {
  auto p = TestFunctionParams::make(8.0, 0.7, 3.0, 1.0, 0);
  auto r = TraceTermRequest::first(1, 1, p);
  r.d_max = 1;
  r.tol = 1e-5;
  auto s = trace_term(r, TermKind::Sigma4);
  CHECK(s.tuples == 2);
  PhiOptions o;
  o.tol = r.tol;
  // S~(-eps, 1, 1; 1, 1) = 1
  auto a = phi_transform(PhiKind::W4, 1.0, 0.0, p, o);
  auto b = phi_transform(PhiKind::W4, -1.0, 0.0, p, o);
  CHECK(std::abs(s.value - (a.value + b.value)) <= s.error_estimate + 1e-9 * std::abs(s.value));
}
