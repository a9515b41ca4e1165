#include <cmath>

#include "doctest.h"
#include "gl3/moments.hpp"

using namespace gl3;

namespace {

const double kC3 = kEulerGamma - 1.5 * std::log(kPi);

}  // namespace

TEST_CASE("mollifier: closed form and contour") {
  CHECK(mollifier_x(1, 16.0) == doctest::Approx(1.0));
  CHECK(mollifier_x(17, 16.0) == 0.0);
  CHECK(mollifier_x(2, 4.0) == doctest::Approx(-0.5));
  CHECK(mollifier_x(4, 16.0) == 0.0);
  CHECK(mollifier_x(1, 1.0) == 1.0);
  CHECK_THROWS_AS(mollifier_x(2, 1.0), std::invalid_argument);
  for (double L : {16.0, 64.0})
    for (i64 l = 1; l <= static_cast<i64>(L); ++l) {
      auto r = mollifier_x_contour(l, L, ContourSpec::vertical(3.0, 1e-12));
      CHECK(std::abs(r.value - mollifier_x(l, L)) < 1e-8);
    }
  auto a = mollifier_x_contour(6, 32.0, ContourSpec::vertical(3.0, 1e-12));
  auto b = mollifier_x_contour(6, 32.0, ContourSpec::vertical(1.0, 1e-12));
  CHECK(std::abs(a.value - b.value) < 1e-10);
  CHECK(std::abs(mollifier_x_contour(32, 32.0, ContourSpec::vertical(3.0, 1e-12)).value) < 1e-8);
  CHECK(std::abs(mollifier_x_contour(40, 32.0, ContourSpec::vertical(3.0, 1e-12)).value) < 1e-8);
  CHECK_THROWS_AS(mollifier_x_contour(2, 32.0, ContourSpec::vertical(-1.0)), std::invalid_argument);
}

TEST_CASE("mollifier params") {
  auto m = MollifierParams::from_T(16.0, 0.1);
  CHECK(m.L == doctest::Approx(std::pow(16.0, 0.1)));
  CHECK_THROWS_AS(MollifierParams::from_T(16.0, 0.2), std::invalid_argument);
  AfeParams a;
  a.N = 9;
  CHECK_THROWS_AS(a.validate(), std::invalid_argument);
}

TEST_CASE("l1-sum identity") {
  auto key = ContourSpec::keyhole(0.1, 1e-10);
  for (i64 d : {1, 6, 37}) {
    auto r = ell1_sum_identity(d, 64, 32.0, key);
    CHECK(std::abs(r.lhs - r.rhs) < 1e-6);
  }
  auto r6 = ell1_sum_identity(6, 64, 32.0, key);
  CHECK(r6.main_term == doctest::Approx(3.0 / std::log(32.0)));
  CHECK_THROWS_AS(ell1_sum_identity(4, 64, 32.0, key), std::invalid_argument);
  CHECK_THROWS_AS(ell1_sum_identity(1, 64, 32.0, ContourSpec::vertical(1.0)), std::invalid_argument);
}

TEST_CASE("typical d-sum") {
  CHECK(typical_d_sum(2.0) == doctest::Approx(3.0));
  double prev = 0.0;
  for (double L : {2.0, 3.0, 10.0, 100.0, 1e4, 1e6}) {
    double v = typical_d_sum(L);
    CHECK(v >= prev);
    CHECK(v / std::log(L) <= 10.0);
    prev = v;
  }
}

TEST_CASE("first-moment weights V and V_j") {
  AfeParams a;
  auto v = first_moment_V(1.0, 10.0, a, ContourSpec::vertical(0.5, 1e-14));
  CHECK(std::abs(v.value - 1.0) < 1e-8);
  auto left = first_moment_V(1.0, 10.0, a, ContourSpec::vertical(-0.5, 1e-14));
  CHECK(std::abs(v.value - left.value - 1.0) < v.error_estimate + left.error_estimate + 1e-12);
  auto far = first_moment_V(1e6, 10.0, a, ContourSpec::vertical(3.0, 1e-14));
  CHECK(std::abs(far.value) < 1e-6);

  SpectralPoint mu{{cplx(0, 10), cplx(0, 3), cplx(0, -13)}};
  auto v1 = first_moment_Vj(1.0, mu, 10.0, a, ContourSpec::vertical(3.0, 1e-14));
  CHECK(std::abs(v1.value) < 1e-6);
  auto v5 = first_moment_Vj(1.0, mu, 10.0, a, ContourSpec::vertical(5.0, 1e-14));
  CHECK(std::abs(v1.value - v5.value) < v1.error_estimate + v5.error_estimate + 1e-14);
  // small values need a contour far to the right to be resolved
  double prev = 1e300;
  for (double y : {1.0, 10.0, 100.0}) {
    auto c = ContourSpec::vertical(15.0, 1e-300);
    c.rel_tolerance = 1e-8;
    auto r = first_moment_Vj(y, mu, 10.0, a, c);
    CHECK(r.converged);
    CHECK(std::abs(r.value) < prev);
    prev = std::abs(r.value);
  }
  CHECK_THROWS_AS(first_moment_Vj(0.5, mu, 10.0, a, ContourSpec::vertical(3.0)), std::invalid_argument);
}

TEST_CASE("AFE weight W and its Stirling form") {
  AfeParams a;
  SpectralPoint mu{{cplx(0, 50), cplx(0, 20), cplx(0, -70)}};
  for (double y : {1.0, 10.0}) {
    auto w3 = afe_weight_W(y, mu, a, ContourSpec::vertical(3.0, 1e-13));
    auto w2 = afe_weight_W(y, mu, a, ContourSpec::vertical(2.0, 1e-13));
    CHECK(std::abs(w3.value - w2.value) <= w3.error_estimate + w2.error_estimate + 1e-12);
    auto wn = afe_weight_W_N(y, mu, a, ContourSpec::vertical(3.0, 1e-13));
    CHECK(std::abs(wn.value - w3.value) <= 1e-4 * std::abs(w3.value));
  }
  // the N = 0 truncation error falls off with |mu|
  auto diff = [&](double scale) {
    SpectralPoint m{{cplx(0, 5 * scale), cplx(0, 2 * scale), cplx(0, -7 * scale)}};
    AfeParams a0 = a, a3 = a;
    a0.N = 0;
    auto c = ContourSpec::vertical(2.0, 1e-13);
    auto r0 = afe_weight_W_N(1.0, m, a0, c), r3 = afe_weight_W_N(1.0, m, a3, c);
    return std::abs(r0.value - r3.value) / std::abs(r3.value);
  };
  double d4 = diff(4.0), d16 = diff(16.0);
  CHECK(d16 < d4 / 2.0);
}

TEST_CASE("script W: residue constants, keyhole, substitution") {
  AfeParams a;
  std::vector<double> ys{1, 2, 4, 8, 16};
  std::vector<SpectralPoint> mus{SpectralPoint::imaginary(100, 40), SpectralPoint::imaginary(120, 50),
                                 SpectralPoint::imaginary(150, 30), SpectralPoint::imaginary(90, 80),
                                 SpectralPoint::imaginary(200, 60)};
  auto f = fit_script_W(ys, mus, a, 1e-11);
  CHECK(f.points == 25);
  CHECK(std::abs(f.c1 - 0.5) < 1e-5);
  CHECK(std::abs(f.c2 + 0.5) < 1e-5);
  CHECK(std::abs(f.c3 - kC3) < 1e-5);
  CHECK(f.residual < 1e-6);

  auto mu = SpectralPoint::imaginary(120, 50);
  double prod = 120.0 * 50.0 * 170.0;
  // log y and log|mu1 mu2 mu3| cancel to c3 at y = |mu1 mu2 mu3|; at
  // y = |mu1 mu2 mu3| / pi^3 the 3/2 log pi is absorbed as well.
  CHECK(std::abs(script_W_residue(prod, mu) - kC3) < 1e-12);
  CHECK(std::abs(script_W_residue(prod / std::pow(kPi, 3), mu) - kEulerGamma) < 1e-12);

  auto vert = script_W(3.0, mu, a, ContourSpec::vertical(0.5, 1e-13));
  auto key = script_W(3.0, mu, a, ContourSpec::keyhole(0.1, 1e-12));
  CHECK(std::abs(vert.value - script_W_residue(3.0, mu) - key.value) <
        vert.error_estimate + key.error_estimate + 1e-12);
  CHECK_THROWS_AS(script_W(1.0, SpectralPoint::imaginary(0.0, 1.0), a, ContourSpec::vertical(0.5)), PoleError);
}

TEST_CASE("dyadic bump and phase derivative") {
  auto r = integrate_real([](double x) -> cplx { return dyadic_bump(x); }, 1.0, 2.0, 1e-14, 1e-13, 2000);
  CHECK(r.value.real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dyadic_bump(1.0) == 0.0);
  CHECK(dyadic_bump(2.5) == 0.0);
  CHECK(dyadic_bump(1.5) > 0.0);

  auto pc = phase_derivative_check(16.0, 0.1, 9);
  CHECK(pc.samples == 243);
  CHECK(pc.min_derivative > 0.1);
  CHECK(pc.max_deviation < 1e-6);
}

TEST_CASE("second-moment diagonal") {
  auto p = TestFunctionParams::make(8.0, 0.7, 3.0, 1.0, 0);
  AfeParams a;
  MollifierParams one;
  one.L = 1.0;
  auto d1 = second_moment_diagonal(p, one, a, 1e-4);
  CHECK(d1.tuples == 1);
  const double pref = 1.0 / (96.0 * std::pow(kPi, 5));
  CHECK(d1.value == doctest::Approx(pref * (0.5 * d1.integral_h_log + kC3 * d1.integral_h)).epsilon(1e-13));

  MollifierParams m;
  m.L = 6.0;
  auto d = second_moment_diagonal(p, m, a, 1e-4);
  CHECK(d.tuples > 1);
  CHECK(std::isfinite(d.value));
  CHECK(d.ratio_T3M2 == doctest::Approx(d.value / (512.0 * p.window() * p.window())));

  // The residue form of the inner weight, pointwise where X is small.
  SpectralPoint mu{{cplx(0, 60), cplx(0, 45), cplx(0, -105)}};
  for (double y : {1.0, 2.0, 6.0}) {
    auto r = script_W(y, mu, a, ContourSpec::vertical(0.5, 1e-13));
    CHECK(std::abs(r.value.real() - script_W_residue(y, mu)) <= 1e-5 * std::abs(script_W_residue(y, mu)));
  }
}
