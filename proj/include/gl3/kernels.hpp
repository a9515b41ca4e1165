// kernels.hpp
//
// Mellin-Barnes kernels of the GL(3) Kuznetsov formula and their spectral
// averages.
//
//   G~^{+-}(s, mu) = pi^{-3s} / (12288 pi^{7/2}) *
//                    ( prod_k G((s-mu_k)/2)/G((1-s+mu_k)/2)
//                      +- i prod_k G((1+s-mu_k)/2)/G((2-s+mu_k)/2) )
//   G(s, mu)       = prod_k G(s1 - mu_k) G(s2 + mu_k) / G(s1 + s2)
//   K_w4(y; mu)    = (1/2 pi i) int |y|^{-s} G~^{sgn y}(s, mu) ds
//   K_w6(y; mu)    = (1/2 pi i)^2 iint |4 pi^2 y1|^{-s1} |4 pi^2 y2|^{-s2}
//                                      G(s, mu) S^{sgn y1, sgn y2}(s, mu) ds1 ds2
//   Phi_w4(y)      = int h(mu) K_w4(y; mu) spec(mu) dmu
//   Phi_w5(y)      = int h(mu) K_w4(-y; -mu) spec(mu) dmu
//   Phi_w6(y1, y2) = int h(mu) K_w6(y1, y2; mu) spec(mu) dmu
//
// (G above is the gamma function.)  The spectral integrals run over
// mu = (i t1, i t2, -i(t1+t2)) with dmu = dt1 dt2 and the signed density
// spec(mu) = prod 3 nu_k tan(3 pi nu_k / 2).
//
// The Phi transforms swap the order of integration: the mu integral is taken
// inside the Mellin-Barnes integral, on a lattice in (t1, t2).  Every gamma
// factor depends on a single mu_k, so for each s only a one-dimensional table
// of gamma values along the lattice is needed.

#pragma once

#include <functional>
#include <stdexcept>

#include "gl3/contour.hpp"
#include "gl3/spectral.hpp"

namespace gl3 {

class CostGuardError : public std::runtime_error {
 public:
  explicit CostGuardError(const std::string& what) : std::runtime_error(what) {}
};

// Throws PoleError within 1e-8 of a pole of a numerator gamma factor.
cplx g_tilde(cplx s, const SpectralPoint& mu, int sign);
cplx g_big(cplx s1, cplx s2, const SpectralPoint& mu);
// Throws PoleError when a denominator of the chosen variant is below 1e-12.
cplx s_trig(int eps1, int eps2, cplx s1, cplx s2, const SpectralPoint& mu);

// Contour used by kernel_w4 when the caller leaves bend_height and
// truncation_height at 0: Re s = sigma, indented to the right around the
// poles mu_k - 2n, mu_k - 1 - 2n lying on the line, and bent to the left
// beyond |Im s| = H with H >= 2 pi e (|y|)^{1/3} and above every pole.
ContourSpec kernel_w4_contour(double y, const SpectralPoint& mu, double sigma, double tol);

// K_w4(y; mu).  With truncation_height > 0 and no bend the straight
// contour is cut at |Im s| = H and the tail bound 2 H |f(sigma + iH)| is
// added to the error estimate.
QuadratureResult kernel_w4(double y, const SpectralPoint& mu, const ContourSpec& contour);

// K_w6 with the variant routed from sgn(y1), sgn(y2).  Product trapezoid rule
// on Re s1 = Re s2 = contour.sigma (> 0; below 1/2 for the variants with
// sin(pi(s1+s2)) in the denominator).  The step is set
// from the distance to the nearest singularity and log|4 pi^2 y|; the error
// estimate combines the step-doubling difference and a truncation estimate.
// Mixed-sign variants decay only polynomially on vertical lines; they are cut
// at contour.truncation_height (default 60 above the largest |Im mu_k|).
QuadratureResult kernel_w6(double y1, double y2, const SpectralPoint& mu, const ContourSpec& contour);
QuadratureResult kernel_w6_variant(int eps1, int eps2, double y1, double y2, const SpectralPoint& mu,
                                   const ContourSpec& contour);

enum class PhiKind { W4, W5, W6 };

struct PhiOptions {
  double tol = 1e-8;        // relative
  double abs_tol = 0.0;
  int max_panels = 20000;   // per contour run (w4, w5)
  int threads = 1;
  double budget = 4e10;     // complex multiply-adds; above it CostGuardError
  // Extra factor multiplying h (e.g. W_{mu,N}(m1 m2) for h_2).
  std::function<cplx(const SpectralPoint&)> weight;
  bool signed_density = true;
  double sigma = 0.0;       // 0 selects 1 for w4/w5 and 3 for w6 (++); mixed w6 uses 1/8
};

struct PhiResult {
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;
  double quadrature_error = 0.0;
  double lattice_error = 0.0;
  long panels_used = 0;
  long lattice_points = 0;
  double lattice_step = 0.0;
  double work = 0.0;
  bool converged = false;
};

// y2 is ignored for w4 and w5.
PhiResult phi_transform(PhiKind which, double y1, double y2, const TestFunctionParams& p,
                        const PhiOptions& opt = {});

}  // namespace gl3
