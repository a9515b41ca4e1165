#include <random>

#include "doctest.h"
#include "gl3/kernels.hpp"
#include "gl3/special.hpp"

using namespace gl3;

namespace {

SpectralPoint permuted(const SpectralPoint& m, int a, int b, int c) { return {{m.mu[a], m.mu[b], m.mu[c]}}; }

bool close(cplx a, cplx b, double rel) { return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)); }

// Both contours closed to the left: double residue series of the ++ kernel.
cplx w6_residue_series(double y, const SpectralPoint& mu, int nmax) {
  const double L = std::log(4.0 * kPi * kPi * y);
  const auto& m = mu.mu;
  cplx tot = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) {
      if (k == j) continue;
      for (int n = 0; n < nmax; ++n)
        for (int q = 0; q < nmax; ++q) {
          cplx l = -(m[k] - double(n) - m[j] - double(q)) * L - std::lgamma(n + 1.0) - std::lgamma(q + 1.0);
          for (int i = 0; i < 3; ++i) {
            if (i != k) l += log_gamma(m[k] - double(n) - m[i]);
            if (i != j) l += log_gamma(-m[j] - double(q) + m[i]);
          }
          l -= log_gamma(m[k] - m[j] - double(n + q));
          tot += ((n + q) % 2 ? -1.0 : 1.0) * std::exp(l);
        }
    }
  return tot * s_trig(1, 1, 0.3, 0.3, mu);
}

}  // namespace

TEST_CASE("G~: shift by 2, conjugation, symmetry, poles") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-12.0, 12.0);
  for (int t = 0; t < 20; ++t) {
    auto mu = SpectralPoint::imaginary(u(rng), u(rng));
    cplx s(0.3 + 0.05 * t, u(rng));
    // A(s+2) = A(s) prod (s-mu)/2 (mu-1-s)/2,  B(s+2) = B(s) prod (1+s-mu)/2 (mu-s)/2
    cplx fa = std::pow(kPi, -6.0), fb = fa;
    for (auto& m : mu.mu) {
      fa *= 0.5 * (s - m) * 0.5 * (m - 1.0 - s);
      fb *= 0.5 * (1.0 + s - m) * 0.5 * (m - s);
    }
    cplx a = 0.5 * (g_tilde(s, mu, 1) + g_tilde(s, mu, -1));
    cplx ib = 0.5 * (g_tilde(s, mu, 1) - g_tilde(s, mu, -1));
    cplx a2 = 0.5 * (g_tilde(s + 2.0, mu, 1) + g_tilde(s + 2.0, mu, -1));
    cplx ib2 = 0.5 * (g_tilde(s + 2.0, mu, 1) - g_tilde(s + 2.0, mu, -1));
    CHECK(close(a2, a * fa, 1e-11));
    CHECK(close(ib2, ib * fb, 1e-11));
    // conj G~^+(s, mu) = G~^-(conj s, -mu) on the imaginary axis
    CHECK(close(std::conj(g_tilde(s, mu, 1)), g_tilde(std::conj(s), -mu, -1), 1e-12));
    // G~^+- = A +- iB can cancel heavily; compare on the scale |A| + |B|
    const double scale = std::abs(a) + std::abs(ib);
    CHECK(std::abs(g_tilde(s, mu, 1) - g_tilde(s, permuted(mu, 2, 0, 1), 1)) <= 1e-12 * scale);
    CHECK(std::abs(g_tilde(s, mu, -1) - g_tilde(s, permuted(mu, 1, 0, 2), -1)) <= 1e-12 * scale);
  }
  auto mu = SpectralPoint::imaginary(2.0, 1.0);
  CHECK_THROWS_AS(g_tilde(mu.mu[0], mu, 1), PoleError);
  CHECK_THROWS_AS(g_tilde(mu.mu[1] - 3.0, mu, -1), PoleError);
  CHECK_THROWS_AS(g_tilde(0.5, mu, 0), std::invalid_argument);
}

TEST_CASE("G: reflection and recurrence") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int t = 0; t < 20; ++t) {
    auto mu = SpectralPoint::imaginary(u(rng), u(rng));
    cplx s1(0.4, u(rng)), s2(0.7, u(rng));
    CHECK(close(g_big(s1, s2, mu), g_big(s2, s1, -mu), 1e-12));
    cplx f = 1.0 / (s1 + s2);
    for (auto& m : mu.mu) f *= s1 - m;
    CHECK(close(g_big(s1 + 1.0, s2, mu), g_big(s1, s2, mu) * f, 1e-11));
  }
}

TEST_CASE("S: direct trigonometric forms") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double c = 1.0 / (32.0 * kPi * kPi);
  for (int t = 0; t < 20; ++t) {
    auto mu = SpectralPoint::imaginary(u(rng), u(rng));
    auto nu = mu.nu();
    cplx x[3];
    for (int k = 0; k < 3; ++k) x[k] = 1.5 * kPi * nu[k];
    auto& m = mu.mu;
    cplx s1(0.2, u(rng)), s2(0.1, u(rng));
    auto sp = [](cplx z) { return std::sin(kPi * z); };
    cplx pp = std::cos(x[0]) * std::cos(x[1]) * std::cos(x[2]) / (24.0 * kPi * kPi);
    cplx pm = -c * std::cos(x[1]) * sp(s1 - m[0]) * sp(s2 + m[1]) * sp(s2 + m[2]) /
              (std::sin(x[0]) * std::sin(x[2]) * sp(s1 + s2));
    cplx mp = -c * std::cos(x[0]) * sp(s1 - m[0]) * sp(s1 - m[1]) * sp(s2 + m[2]) /
              (std::sin(x[1]) * std::sin(x[2]) * sp(s1 + s2));
    cplx mm = c * std::cos(x[2]) * sp(s1 - m[1]) * sp(s2 + m[1]) / (std::sin(x[1]) * std::sin(x[0]));
    CHECK(close(s_trig(1, 1, s1, s2, mu), pp, 1e-11));
    CHECK(close(s_trig(1, 1, s1 + 0.7, s2 - 2.0, mu), pp, 1e-11));
    CHECK(close(s_trig(1, -1, s1, s2, mu), pm, 1e-10));
    CHECK(close(s_trig(-1, 1, s1, s2, mu), mp, 1e-10));
    CHECK(close(s_trig(-1, -1, s1, s2, mu), mm, 1e-10));
  }
  auto mu = SpectralPoint::imaginary(1.0, 2.0);
  CHECK_THROWS_AS(s_trig(1, -1, 0.25, 0.75, mu), PoleError);
}

TEST_CASE("K_w4: contour shift, permutation, truncated line") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-8.0, 8.0), ly(-2.0, 8.0);
  for (int t = 0; t < 6; ++t) {
    auto mu = SpectralPoint::imaginary(u(rng), u(rng));
    double y = std::exp(ly(rng)) * (t % 2 ? -1.0 : 1.0);
    auto a = kernel_w4(y, mu, ContourSpec::vertical(0.0, 1e-14));
    auto b = kernel_w4(y, mu, ContourSpec::vertical(0.25, 1e-14));
    auto c = kernel_w4(y, permuted(mu, 2, 1, 0), ContourSpec::vertical(0.25, 1e-14));
    CHECK(a.converged);
    CHECK(std::abs(a.value - b.value) <= a.error_estimate + b.error_estimate + 1e-13);
    CHECK(std::abs(b.value - c.value) <= b.error_estimate + c.error_estimate + 1e-13);
  }
  // straight line at sigma = -1/4 (alpha = 9/4), cut at H; tail bound covers the gap
  auto mu = SpectralPoint::imaginary(1.5, -0.5);
  auto ref = kernel_w4(3.0, mu, ContourSpec::vertical(-0.25, 1e-14));
  for (double H : {200.0, 800.0}) {
    auto c = ContourSpec::vertical(-0.25, 1e-14);
    c.truncation_height = H;
    auto r = kernel_w4(3.0, mu, c);
    CHECK(std::abs(r.value - ref.value) <= r.error_estimate + ref.error_estimate);
  }
  auto c = ContourSpec::vertical(0.25, 1e-14);
  c.truncation_height = 100.0;
  CHECK_FALSE(kernel_w4(3.0, mu, c).converged);  // alpha <= 1: no tail bound
  CHECK_THROWS_AS(kernel_w4(0.0, mu, ContourSpec::vertical(0.0)), std::invalid_argument);
}

TEST_CASE("K_w6: residue series, routing, large y") {
  for (auto mu : {SpectralPoint::imaginary(1.0, 0.5), SpectralPoint::imaginary(5.0, 2.0)})
    for (double y : {0.01, 0.1}) {
      cplx ref = w6_residue_series(y, mu, 60);
      for (double sg : {0.5, 1.0, 2.0}) {
        auto k = kernel_w6(y, y, mu, ContourSpec::vertical(sg, 1e-30));
        CHECK(std::abs(k.value - ref) <= 1e-9 * std::abs(ref) + k.error_estimate);
      }
    }
  auto mu = SpectralPoint::imaginary(0.7, 0.3);
  auto spec = ContourSpec::vertical(0.125, 1e-12);
  spec.truncation_height = 30.0;
  auto a = kernel_w6(-0.5, 0.5, mu, spec);
  auto b = kernel_w6_variant(-1, 1, -0.5, 0.5, mu, spec);
  auto c = kernel_w6_variant(1, -1, -0.5, 0.5, mu, spec);
  CHECK(a.value == b.value);
  CHECK(std::abs(a.value - c.value) > 1e-6 * std::abs(a.value));
  CHECK_THROWS_AS(kernel_w6(-0.5, 0.5, mu, ContourSpec::vertical(0.75)), std::invalid_argument);
  CHECK_THROWS_AS(kernel_w6(0.5, 0.5, mu, ContourSpec::vertical(0.0)), std::invalid_argument);

  auto big = kernel_w6(1e4, 1e4, SpectralPoint::imaginary(5.0, 2.0), ContourSpec::vertical(1.0, 1e-30));
  CHECK(std::isfinite(big.value.real()));
  CHECK(std::isfinite(big.value.imag()));
  CHECK(std::isfinite(big.error_estimate));
}

TEST_CASE("Phi: reflection, Weyl invariance, cost guard") {
  auto p = TestFunctionParams::make(8.0, 0.7, 3.0, 1.0, 0);
  PhiOptions o;
  o.tol = 1e-6;
  o.sigma = 4.0;
  auto w4 = phi_transform(PhiKind::W4, -40.0, 0.0, p, o);
  CHECK(w4.quadrature_error <= 1e-6 * std::abs(w4.value));

  // Phi_w5(y; mu0) = Phi_w4(-y; -mu0)
  auto q = p;
  q.mu0 = -p.mu0;
  auto w5 = phi_transform(PhiKind::W5, 40.0, 0.0, q, o);
  CHECK(std::abs(w5.value - w4.value) <= 1e-10 * std::abs(w4.value) + w4.error_estimate);

  auto r = p;
  r.mu0 = permuted(p.mu0, 1, 2, 0);
  auto w4r = phi_transform(PhiKind::W4, -40.0, 0.0, r, o);
  CHECK(std::abs(w4r.value - w4.value) <= 1e-9 * std::abs(w4.value));

  PhiOptions tiny = o;
  tiny.budget = 1e3;
  CHECK_THROWS_AS(phi_transform(PhiKind::W4, 10.0, 0.0, p, tiny), CostGuardError);
  CHECK_THROWS_AS(phi_transform(PhiKind::W6, 10.0, 10.0, p, tiny), CostGuardError);
  CHECK_THROWS_AS(phi_transform(PhiKind::W6, 10.0, 0.0, p, o), std::invalid_argument);
}
