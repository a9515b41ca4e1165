#include <random>
#include <algorithm>
#include <set>
#include <tuple>

#include "doctest.h"
#include "gl3/spectral.hpp"

using namespace gl3;

namespace {

double cdist(const Triple3& a, const Triple3& b) {
  return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]);
}

Triple3 random_trace_zero(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  cplx a(u(rng), u(rng)), b(u(rng), u(rng));
  return {a, b, -a - b};
}

}  // namespace

TEST_CASE("nu and mu conversions") {
  CHECK(cdist(nu_from_mu({0.0, 0.0, 0.0}), {0.0, 0.0, 0.0}) == 0.0);
  CHECK(cdist(nu_from_mu({2.0 * kI, -kI, -kI}), {kI, 0.0, -kI}) < 1e-15);
  CHECK(cdist(mu_from_nu({kI, 0.0, -kI}), {2.0 * kI, -kI, -kI}) < 1e-15);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    auto mu = random_trace_zero(rng);
    auto nu = nu_from_mu(mu);
    CHECK(std::abs(nu[0] + nu[1] + nu[2]) < 1e-12);
    CHECK(cdist(mu_from_nu(nu), mu) < 1e-12);
  }
  CHECK_THROWS_AS(nu_from_mu({1.0, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(mu_from_nu({1.0, 1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("Weyl group") {
  auto& els = WeylElement::all();
  // closure and a unique inverse for every element
  for (auto& a : els) {
    int inverses = 0;
    for (auto& b : els) {
      auto c = a * b;
      CHECK(std::find(els.begin(), els.end(), c) != els.end());
      if (c == WeylElement::identity()) ++inverses;
    }
    CHECK(inverses == 1);
  }
  int invol = 0;
  for (auto& a : els) invol += a.is_involution();
  CHECK(invol == 4);  // identity and three transpositions
  SpectralPoint mu{{3.0 * kI, kI, -4.0 * kI}};
  CHECK(cdist(weyl_apply(WeylElement::identity(), mu).mu, mu.mu) == 0.0);
  WeylElement w2{{0, 2, 1}};
  CHECK(cdist(weyl_apply(w2, weyl_apply(w2, mu)).mu, mu.mu) == 0.0);
  std::set<std::tuple<double, double, double>> orbit;
  for (auto& w : els) {
    auto m = weyl_apply(w, mu);
    orbit.insert({m.mu[0].imag(), m.mu[1].imag(), m.mu[2].imag()});
    CHECK(std::abs(m.mu[0] + m.mu[1] + m.mu[2]) < 1e-12);
  }
  CHECK(orbit.size() == 6);
  // weyl_apply agrees with composition
  for (auto& a : els)
    for (auto& b : els) CHECK(cdist(weyl_apply(a * b, mu).mu, weyl_apply(a, weyl_apply(b, mu)).mu) == 0.0);
}

TEST_CASE("in_lambda") {
  CHECK(in_lambda({{kI, -kI, 0.0}}, 0.0, true));
  CHECK_FALSE(in_lambda({{0.6, -0.6, 0.0}}, 0.5, false));
  CHECK(in_lambda({{0.3 + kI, -0.3 + kI, -2.0 * kI}}, 0.5, true));
  CHECK_FALSE(in_lambda({{0.3 + kI, -0.3 + kI, -2.0 * kI}}, 0.2, true));
  CHECK_FALSE(in_lambda({{0.3 + kI, 0.3 + 2.0 * kI, -0.6 - 3.0 * kI}}, 1.0, true));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    auto mu = random_trace_zero(rng);
    for (double c : {0.0, 0.5, 5.0, 30.0})
      if (in_lambda({mu}, c, true)) CHECK(in_lambda({mu}, c, false));
  }
}

TEST_CASE("in_lambda with real parts in both directions") {
  // (0.3+i, 0.3-i, -0.6): negated entries are (-0.3-i, -0.3+i, 0.6) and the
  // conjugates are (0.3-i, 0.3+i, -0.6), which differ; with c = 1/2 the
  // Re check already fails at |-0.6| > 1/2.
  SpectralPoint mu{{0.3 + kI, 0.3 - kI, -0.6}};
  CHECK_FALSE(in_lambda(mu, 0.5, false));
  CHECK_FALSE(in_lambda(mu, 0.6, true));
  CHECK(in_lambda(mu, 0.6, false));
}

TEST_CASE("test function zeros, symmetry, positivity") {
  auto p = TestFunctionParams::make(16.0, 0.7);
  p.validate();
  // nu1 = 1/3 kills P
  auto z = SpectralPoint::from_nu({1.0 / 3.0, 2.0 * kI, -1.0 / 3.0 - 2.0 * kI});
  CHECK(std::abs(test_function_h(z, p)) == 0.0);
  for (int n = 0; n <= p.poly_order; ++n) {
    double c = (1.0 + 2.0 * n) / 3.0;
    auto zz = SpectralPoint::from_nu({-c, 5.0 * kI, c - 5.0 * kI});
    CHECK(std::abs(test_function_h(zz, p)) == 0.0);
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 100; ++i) {
    auto mu = SpectralPoint::imaginary(u(rng), u(rng));
    cplx h0 = test_function_h(mu, p);
    CHECK(h0.real() >= 0.0);
    CHECK(std::abs(h0.imag()) <= 1e-12 * std::abs(h0) + 1e-300);
    for (auto& w : WeylElement::all()) {
      cplx hw = test_function_h(weyl_apply(w, mu), p);
      CHECK(std::abs(hw - h0) <= 1e-10 * std::abs(h0) + 1e-300);
    }
  }
}

TEST_CASE("test function at mu0 against reversed-order evaluation") {
  auto p = TestFunctionParams::make(16.0, 0.7);
  double M = std::pow(16.0, 0.7);
  auto mu = p.mu0;
  auto nu = mu.nu(), nu0 = p.mu0.nu();
  // P with k outer, n inner, both descending
  cplx P = 1.0;
  for (int k = 2; k >= 0; --k)
    for (int n = p.poly_order; n >= 0; --n) {
      double c = (1.0 + 2.0 * n) / 3.0;
      P *= (nu[k] + c) / std::abs(nu0[k]);
      P *= (nu[k] - c) / std::abs(nu0[k]);
    }
  cplx S = 0.0;
  auto& els = WeylElement::all();
  for (int i = 5; i >= 0; --i) {
    auto wm = weyl_apply(els[i], mu);
    cplx e = 0.0;
    for (int k = 2; k >= 0; --k) e += std::pow((wm.mu[k] - p.mu0.mu[k]) / M, 2);
    S += std::exp(e);
  }
  cplx ref = S * S * P * P;
  cplx h = test_function_h(mu, p);
  CHECK(std::abs(h - ref) <= 1e-10 * std::abs(ref));
}

TEST_CASE("TestFunctionParams JSON and validation") {
  auto p = TestFunctionParams::make(16.0, 0.7);
  auto q = TestFunctionParams::from_json(p.to_json());
  CHECK(q.T == p.T);
  CHECK(q.window() == p.window());
  CHECK(cdist(q.mu0.mu, p.mu0.mu) == 0.0);
  CHECK(q.poly_order == p.poly_order);
  CHECK_THROWS(TestFunctionParams::from_json(R"({"T":16,"bogus":1})"));
  CHECK_THROWS(TestFunctionParams::from_json(R"({"T":16,"mu0":[[1,0],[0,1],[-1,-1]]})"));
  CHECK_THROWS(TestFunctionParams::from_json(R"({"T":16,"theta":1.5})"));
  CHECK_THROWS(TestFunctionParams::from_json(R"({"T":16,"poly_order":-1})"));
}

TEST_CASE("spectral density") {
  CHECK(std::abs(spec_density({{0.0, 0.0, 0.0}})) == 0.0);
  auto mu = SpectralPoint::from_nu({10.0 * kI, 10.0 * kI, -20.0 * kI});
  double ref = 1.0;
  for (double y : {10.0, 10.0, -20.0}) ref *= -3.0 * y * std::tanh(1.5 * kPi * y);
  CHECK(std::abs(spec_density(mu) - ref) <= 1e-12 * std::abs(ref));
  CHECK(ref < 0.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 50; ++i) {
    SpectralPoint m{{cplx(u(rng) * 0.02, u(rng)), cplx(u(rng) * 0.02, u(rng)), 0.0}};
    m.mu[2] = -m.mu[0] - m.mu[1];
    cplx s0 = spec_density(m);
    for (auto& w : WeylElement::all()) CHECK(std::abs(spec_density(weyl_apply(w, m)) - s0) <= 1e-12 * std::abs(s0));
    CHECK(std::abs(spec_density(-m) - s0) <= 1e-12 * std::abs(s0));
  }
  // nu1 = 1/3 puts cos(pi/2) = 0 in the tangent
  CHECK_THROWS_AS(spec_density(SpectralPoint::from_nu({1.0 / 3.0, 0.5, -1.0 / 3.0 - 0.5})), PoleError);
}

TEST_CASE("Weyl integral refinement") {
  auto p = TestFunctionParams::make(8.0, 0.7);
  auto r = weyl_integral_h(p, 1e-8);
  CHECK(r.converged);
  CHECK(r.value > 0.0);
  // a finer grid on the same radius moves the value by less than the tolerance
  auto p2 = p;
  auto r2 = weyl_integral_h(p2, 1e-10);
  CHECK(std::abs(r2.value - r.value) <= 1e-8 * r.value);
  // the signed variant is the negative of the |spec| one on Re mu = 0
  auto rs = weyl_integral_h(p, 1e-8, 1, true);
  CHECK(std::abs(rs.value + r.value) <= 1e-8 * r.value);
  // thread count does not change the bits
  auto r4 = weyl_integral_h(p, 1e-8, 3);
  CHECK(r4.value == r.value);
}

TEST_CASE("Weyl integral is continuous in T") {
  double prev = 0.0;
  for (double T = 8.0; T <= 9.0 + 1e-9; T += 0.25) {
    auto p = TestFunctionParams::make(T, 0.7, 3.0, 1.0, 6);
    auto r = weyl_integral_h(p, 1e-8);
    CHECK(r.converged);
    CHECK(std::isfinite(r.value));
    if (prev > 0.0) CHECK(std::abs(std::log(r.value / prev)) < 1.0);
    prev = r.value;
  }
}
