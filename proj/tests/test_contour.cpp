#include <cmath>

#include "doctest.h"
#include "gl3/contour.hpp"

using namespace gl3;

namespace {
cplx mellin_gamma(cplx s, double y) { return std::exp(log_gamma(s) - s * std::log(y)); }
}  // namespace

TEST_CASE("Mellin pair Gamma(s) y^{-s} on Re s = 2") {
  auto r = contour_integrate([](cplx s) { return mellin_gamma(s, 1.5); }, ContourSpec::vertical(2.0, 1e-12));
  CHECK(r.converged);
  CHECK(std::abs(r.value - std::exp(-1.5)) < 1e-10);
  CHECK(r.error_estimate <= 1e-12);
}

TEST_CASE("contour-shift invariance for Gamma(s) y^{-s}") {
  for (double y : {0.3, 1.5, 7.0}) {
    QuadratureResult r[3];
    for (int i = 0; i < 3; ++i)
      r[i] = contour_integrate([y](cplx s) { return mellin_gamma(s, y); }, ContourSpec::vertical(1.0 + i, 1e-11));
    for (int i = 1; i < 3; ++i)
      CHECK(std::abs(r[i].value - r[0].value) <= r[i].error_estimate + r[0].error_estimate + 1e-15);
    CHECK(std::abs(r[0].value - std::exp(-y)) < 1e-10);
  }
}

TEST_CASE("zero integrand") {
  auto r = contour_integrate([](cplx) { return cplx(0.0); }, ContourSpec::vertical(1.0));
  CHECK(r.value == cplx(0.0));
  CHECK(r.error_estimate == 0.0);
  CHECK(r.converged);
}

TEST_CASE("keyhole picks up the residue at the origin") {
  auto f = [](cplx s) { return std::exp(s * s) / s; };
  auto v = contour_integrate(f, ContourSpec::vertical(1.0, 1e-12));
  auto k = contour_integrate(f, ContourSpec::keyhole(0.05, 1e-12));
  CHECK(std::abs(v.value - 1.0 - k.value) < 1e-11);
  // f is odd, so the two vertical lines Re s = +-1 carry +-1/2
  CHECK(std::abs(v.value - 0.5) < 1e-11);
}

TEST_CASE("indented and bent vertical contours") {
  auto f = [](cplx s) { return mellin_gamma(s, 2.0); };
  ContourSpec c = ContourSpec::vertical(0.0, 1e-11);
  c.indent = {cplx(0.0, 0.0)};
  c.indent_radius = 0.1;
  auto r = contour_integrate(f, c);
  CHECK(std::abs(r.value - std::exp(-2.0)) < 1e-10);
  ContourSpec b = ContourSpec::vertical(0.5, 1e-11);
  b.bend_height = 3.0;
  b.bend_angle = 0.6;
  auto rb = contour_integrate(f, b);
  CHECK(std::abs(rb.value - std::exp(-2.0)) < 1e-10);
}

TEST_CASE("explicit truncation height") {
  ContourSpec c = ContourSpec::vertical(2.0, 1e-12);
  c.truncation_height = 60.0;
  auto r = contour_integrate([](cplx s) { return mellin_gamma(s, 1.5); }, c);
  CHECK(std::abs(r.value - std::exp(-1.5)) < 1e-10);
}

TEST_CASE("panel budget exhaustion is reported") {
  ContourSpec c = ContourSpec::vertical(2.0, 1e-15);
  c.max_panels = 8;
  auto r = contour_integrate([](cplx s) { return std::exp(s * s + 40.0 * kI * s); }, c);
  CHECK_FALSE(r.converged);
}

TEST_CASE("invalid specs are rejected") {
  ContourSpec c;
  c.tolerance = 0.0;
  CHECK_THROWS(c.validate());
  ContourSpec k = ContourSpec::keyhole(0.0);
  CHECK_THROWS(k.validate());
}

TEST_CASE("integrate_real") {
  auto r = integrate_real([](double x) { return cplx(std::exp(-x * x)); }, -10, 10, 1e-13, 0, 1000);
  CHECK(std::abs(r.value.real() - std::sqrt(kPi)) < 1e-12);
}
