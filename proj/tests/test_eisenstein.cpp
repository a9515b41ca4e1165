#include <random>
#include <sstream>

#include "doctest.h"
#include "gl3/eisenstein.hpp"

using namespace gl3;

namespace {

SpectralPoint random_imaginary(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-15.0, 15.0);
  return SpectralPoint::imaginary(u(rng), u(rng));
}

}  // namespace

TEST_CASE("minimal coefficients: small values") {
  std::mt19937_64 rng(1);
  auto mu = random_imaginary(rng);
  CHECK(std::abs(coeff_minimal(mu, 1, 1) - 1.0) < 1e-15);
  SpectralPoint zero{};
  CHECK(std::abs(coeff_minimal(zero, 4, 1) - 6.0) < 1e-13);
  for (i64 m = 1; m <= 1000; ++m) CHECK(std::abs(coeff_minimal(zero, m, 1) - double(tau3(m))) < 1e-9);
  // A(p, 1) = p^mu1 + p^mu2 + p^mu3
  for (i64 p : {2, 3, 5, 7}) {
    cplx ref = 0.0;
    for (auto& x : mu.mu) ref += std::exp(x * std::log(double(p)));
    CHECK(std::abs(coeff_minimal(mu, p, 1) - ref) < 1e-12);
  }
}

TEST_CASE("minimal coefficients: multiplicativity and symmetry") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 3; ++t) {
    auto mu = random_imaginary(rng);
    for (i64 a = 1; a <= 100; ++a)
      for (i64 b = 1; b <= 100; ++b) {
        if (gcd(a, b) != 1) continue;
        cplx lhs = coeff_minimal(mu, a * b, 1);
        cplx rhs = coeff_minimal(mu, a, 1) * coeff_minimal(mu, b, 1);
        if (std::abs(lhs - rhs) > 1e-9) FAIL("multiplicativity fails at " << a << ", " << b);
      }
    for (i64 m = 1; m <= 1000; ++m) CHECK(std::abs(coeff_minimal(mu, m, 1) - std::conj(coeff_minimal(mu, 1, m))) < 1e-10);
  }
}

TEST_CASE("minimal coefficients: tau3 bound on a sample") {
  std::mt19937_64 rng(3);
  auto mu = random_imaginary(rng);
  for (i64 m = 1; m <= 60; ++m)
    for (i64 n = 1; m * n <= 2000; ++n)
      CHECK(std::abs(coeff_minimal(mu, m, n)) <= double(tau3(m) * tau3(n)) + 1e-9);
}

TEST_CASE("synthetic GL(2) source") {
  auto g = CoefficientSource::synthetic(42, 10000);
  CHECK(g.lambda(1) == cplx(1.0));
  CHECK(g.kim_sarnak_ratio(0.0) <= 1.0);
  for (i64 n = 1; n <= 10000; ++n) CHECK(std::abs(g.lambda(n)) <= std::pow(double(n), kKimSarnak) + 1e-12);
  // Hecke recursion at primes
  for (i64 p : {2, 3, 5, 7, 11})
    for (i64 pk = p; pk * p * p <= 10000; pk *= p)
      CHECK(std::abs(g.lambda(pk * p) - (g.lambda(p) * g.lambda(pk) - g.lambda(pk / p))) < 1e-12);
  // lambda(m) lambda(n) = sum_{d | (m, n)} lambda(mn / d^2)
  for (i64 m = 1; m <= 100; ++m)
    for (i64 n = 1; m * n <= 10000; ++n) {
      cplx rhs = 0.0;
      for (i64 d : divisors(gcd(m, n))) rhs += g.lambda(m * n / (d * d));
      if (std::abs(g.lambda(m) * g.lambda(n) - rhs) > 1e-10) FAIL("Hecke relation fails at " << m << ", " << n);
    }
  // prefix consistency across table lengths
  auto small = CoefficientSource::synthetic(42, 500);
  for (i64 n = 1; n <= 500; ++n) CHECK(small.lambda(n) == g.lambda(n));
  CHECK_THROWS_AS(g.lambda(10001), InsufficientData);
}

TEST_CASE("maximal coefficients") {
  auto g = CoefficientSource::synthetic(7, 10000);
  cplx mu(0.0, 2.5);
  CHECK(std::abs(coeff_maximal(mu, g, 1, 1) - 1.0) < 1e-15);
  for (i64 p : {2, 3, 5, 7, 13}) {
    double lp = std::log(double(p));
    cplx ref = g.lambda(p) * std::exp(mu * lp) + std::exp(-2.0 * mu * lp);
    CHECK(std::abs(coeff_maximal(mu, g, p, 1) - ref) < 1e-12);
  }
  for (i64 m = 1; m <= 300; ++m) CHECK(std::abs(coeff_maximal(mu, g, m, 1) - std::conj(coeff_maximal(mu, g, 1, m))) < 1e-10);
  CHECK_THROWS_AS(coeff_maximal(mu, CoefficientSource::synthetic(7, 10), 11, 1), InsufficientData);
}

TEST_CASE("normalizer of the minimal series") {
  auto mu = SpectralPoint::from_nu({kI, kI, -2.0 * kI});
  double ref = std::norm(zeta(1.0 + 3.0 * kI)) * std::norm(zeta(1.0 + 3.0 * kI)) * std::norm(zeta(1.0 - 6.0 * kI)) / 16.0;
  CHECK(std::abs(norm_minimal(mu) - ref) <= 1e-12 * ref);
  auto p = SpectralPoint::from_nu({2.0 * kI, -5.0 * kI, 3.0 * kI});
  for (auto& w : WeylElement::all()) {
    auto q = weyl_apply(w, p);
    CHECK(std::abs(norm_minimal(q) - norm_minimal(p)) <= 1e-12 * norm_minimal(p));
  }
  CHECK_THROWS_AS(norm_minimal(SpectralPoint{}), PoleError);
  // 1/N <= 1e4 prod log^2(2 + |nu_k|) with |nu_k| in [1, 100]
  for (double a = 1.0; a <= 50.0; a += 3.5)
    for (double b = 1.0; b <= 50.0; b += 3.5) {
      auto m = SpectralPoint::from_nu({a * kI, b * kI, -(a + b) * kI});
      double bound = 1e4;
      for (double y : {a, b, a + b}) bound *= std::pow(std::log(2.0 + y), 2);
      CHECK(1.0 / norm_minimal(m) <= bound);
    }
}

TEST_CASE("normalizer of the maximal series") {
  auto g = CoefficientSource::synthetic(11, 100000);
  auto r = norm_maximal(0.0, g, 0.0, 100000);
  cplx direct = 0.0;
  for (i64 n = 1; n <= 100000; ++n) direct += g.lambda(n) / double(n);
  CHECK(std::abs(r.value - 8.0 * std::norm(direct)) <= 1e-6 * r.value);
  CHECK(r.value > 0.0);
  CHECK_THROWS_AS(norm_maximal(0.0, g, 0.0, 100001), InsufficientData);
  // strict tolerance cannot be met with a tiny table
  auto tiny = CoefficientSource::synthetic(11, 8);
  CHECK_THROWS_AS(norm_maximal(0.0, tiny, 0.0, 0, 1e-12), InsufficientData);
  for (double t = -20.0; t <= 20.0; t += 5.0) {
    auto rr = norm_maximal(cplx(0.0, t), g, 1.0, 20000);
    CHECK(rr.value > 0.0);
    CHECK(1.0 / rr.value <= 1e3 * std::pow(2.0 + std::abs(t), 0.1));
  }
}

TEST_CASE("coefficient table parsing") {
  std::istringstream ok("# mu_g 0 9.53\n# L_ad 0.9\n# norm 2.5\n# free comment\n1\t1\t0\n2\t-1.07\t0\n3\t-0.45\t0.1\n");
  auto src = CoefficientSource::from_stream(ok);
  CHECK(src.kind() == CoefficientSource::Kind::FileTable);
  CHECK(src.max_n() == 3);
  CHECK(src.mu_g() == cplx(0.0, 9.53));
  CHECK(src.L_ad() == 0.9);
  CHECK(src.norm() == 2.5);
  CHECK(src.lambda(2) == cplx(-1.07, 0.0));

  auto line_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      CoefficientSource::from_stream(in);
    } catch (const TableFormatError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("1\t1\t0\n2\tx\t0\n") == 2);
  CHECK(line_of("1\t1\t0\n3\t0.5\t0\n") == 2);           // gap
  CHECK(line_of("1\t2\t0\n") == 1);                      // lambda(1) != 1
  CHECK(line_of("# L_ad -1\n1\t1\t0\n") == 1);
  CHECK(line_of("1\t1\t0\n\n2\t50\t0\n") == 3);          // bound violation
  CHECK(line_of("1 1 0\n") == 1);                        // not tab separated
  CHECK(line_of("1\t1\t0\t7\n") == 1);
  CHECK(line_of("# mu_g 1\n") == 1);
  CHECK(line_of("") == 0);
}

TEST_CASE("synthetic GL(3) source") {
  SyntheticGl3Source s(5, 2000);
  CHECK(std::abs(s.A(1, 1) - 1.0) < 1e-15);
  for (i64 m = 1; m <= 40; ++m)
    for (i64 n = 1; m * n <= 2000; ++n) CHECK(std::abs(s.A(m, n)) <= double(tau3(m) * tau3(n)) + 1e-9);
  // A(p,1) A(1,p) = A(p,p) + 1
  for (i64 p : {2, 3, 5, 7})
    CHECK(std::abs(s.A(p, 1) * s.A(1, p) - s.A(p, p) - 1.0) < 1e-12);
}
