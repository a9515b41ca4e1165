// moments.hpp
//
// Mollifier coefficients, approximate-functional-equation weights and the
// diagonal term of the mollified second moment.
//
//   x_l          = mobius(l) log(L/l) / log L   (l <= L), 0 otherwise
//   G(s)         = cos(pi s / A)^{-100 A}
//   W(y; mu)     = (1/2 pi i) int_(3) zeta(1+2s) (pi^3 y)^{-s}
//                    prod_k prod_+- G((s + 1/2 +- mu_k)/2) / G((1/2 +- mu_k)/2) G(s) ds/s
//   W_N(y; mu)   = same with each gamma ratio replaced by its Stirling
//                  expansion z^{s/2} (1 + sum_{n<=N} P_n(s/2) z^{-n}), z = (1/2 +- mu_k)/2
//   SW_mu(y)     = (1/2 pi i) int_(3) zeta(1+2s) (pi^3 y / |mu1 mu2 mu3|)^{-s} G(s) ds/s
//                = c1 log|mu1 mu2 mu3| + c2 log y + c3 + (integral further left)
//                  with c1 = 1/2, c2 = -1/2, c3 = gamma - (3/2) log pi
//   V(y, T0)     = (1/2 pi i) int_(3) G(s) (y / T0^3)^{-s} ds/s
//   V_j(y, mu)   = (1/2 pi i) int_(3) G(s) (y T0^3)^{-s}
//                    prod_k G((s + 1/2 + mu_k)/2) / G((-s + 1/2 - mu_k)/2) ds/s
//
// (Inside the integrals G(.) of a shifted argument is the gamma function.)

#pragma once

#include <array>
#include <string>
#include <vector>

#include "gl3/arith.hpp"
#include "gl3/contour.hpp"
#include "gl3/spectral.hpp"

namespace gl3 {

struct MollifierParams {
  double L = 16.0;
  double delta_exp = 0.1;
  // L = T^delta with delta below 11/78.
  static MollifierParams from_T(double T, double delta);
  void validate() const;
};

struct AfeParams {
  int A_G = 8000;
  double T0 = 10.0;
  int N = 3;
  void validate() const;
};

// log G(s) and G(s) for the cutoff cos(pi s / A)^{-100 A}.
cplx afe_log_G(cplx s, int A);
cplx afe_G(cplx s, int A);

// Requires L > 1 (L = 1 is accepted for l = 1, where x_1 = 1).
double mollifier_x(i64 l, double L);
// mobius(l) (1/2 pi i) int_(sigma) (L/l)^s / s^2 ds / log L.  The path leaves
// the line at |Im s| = max(1, sigma) along rays tilted by pi/4 towards the
// side where (L/l)^s decays.
QuadratureResult mollifier_x_contour(i64 l, double L, const ContourSpec& contour);

QuadratureResult afe_weight_W(double y, const SpectralPoint& mu, const AfeParams& params, const ContourSpec& contour);
QuadratureResult afe_weight_W_N(double y, const SpectralPoint& mu, const AfeParams& params, const ContourSpec& contour);

// Vertical contours use Re s = contour.sigma; keyhole contours give the
// integral with the double pole at s = 0 excluded.
QuadratureResult script_W(double y, const SpectralPoint& mu, const AfeParams& params, const ContourSpec& contour);
// Residue of the integrand of script_W at s = 0.
double script_W_residue(double y, const SpectralPoint& mu);

struct ScriptWFit {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double residual = 0.0;       // max |fit - data| over the grid
  double max_quad_error = 0.0;
  int points = 0;
};
// Least-squares fit of script_W against (log|mu1 mu2 mu3|, log y, 1).
ScriptWFit fit_script_W(const std::vector<double>& ys, const std::vector<SpectralPoint>& mus,
                        const AfeParams& params, double tol);

struct Ell1Identity {
  double lhs = 0.0;
  cplx rhs{0.0, 0.0};
  double main_term = 0.0;
  cplx remainder{0.0, 0.0};
  double error_estimate = 0.0;  // of the remainder
};
// lhs: direct sum over l1 <= l_max with (l1, d) = 1 of mobius(l1) a_{d l1} / l1.
// rhs: (1/log L) prod_{p|d} p/(p-1) plus the keyhole integral of
//   prod_{p|d} (1 - p^{-1-s})^{-1} (L/d)^s / (s^2 zeta(1+s) log L).
// The keyhole is cut at |Im s| = contour.truncation_height (default 40); the
// tails are moved to Re s = 2 and summed from the Dirichlet series of
// 1/zeta with the exponential integral.
Ell1Identity ell1_sum_identity(i64 d, i64 l_max, double L, const ContourSpec& contour);

double typical_d_sum(double L);

QuadratureResult first_moment_V(double y, double T0, const AfeParams& params, const ContourSpec& contour);
QuadratureResult first_moment_Vj(double y, const SpectralPoint& mu, double T0, const AfeParams& params,
                                 const ContourSpec& contour);

// Smooth bump on [1, 2] with unit integral: c exp(-1/(1 - (2x-3)^2)).
double dyadic_bump(double x);

struct PhaseCheck {
  double min_derivative = 0.0;   // min over samples of phi'(t1)
  double max_deviation = 0.0;    // closed form vs central difference
  int samples = 0;
};
// phi(t1) = (t - t1) log(t1 - t) + (t1 + t2 + t) log(t1 + t2 + t) on
// t1, t2 in [T/2, 2T], |t| <= T^eps.
PhaseCheck phase_derivative_check(double T, double eps, int n);

struct DiagonalResult {
  double value = 0.0;
  double error_estimate = 0.0;
  double ratio_T3M2 = 0.0;
  double integral_h = 0.0;       // int h |spec|
  double integral_h_log = 0.0;   // int h log|mu1 mu2 mu3| |spec|
  long tuples = 0;               // (d, l1, l2) terms with nonzero weight
};
// (1/96 pi^5) sum_d (1/d) sum_{l1, l2} x_{d l1} x_{d l2} / (l1 l2) int h SW_mu(l1 l2) dspec,
// with SW replaced by its residue form.
DiagonalResult second_moment_diagonal(const TestFunctionParams& p, const MollifierParams& m, const AfeParams& a,
                                      double tol, int threads = 1);

struct InnerWeightCheck {
  double residue_form = 0.0;  // int h (c1 log|mu1 mu2 mu3| + c2 log y + c3) |spec|
  double direct = 0.0;        // int h SW_mu(y) |spec|, SW by quadrature at each lattice point
  double error_estimate = 0.0;  // lattice error, scaled from the plain h integral
  double relative = 0.0;
};
// Same spectral lattice for both routes (the one weyl_integral_h settles on
// for h alone); points with some mu_k = 0 are dropped.
InnerWeightCheck diagonal_inner_weight_check(const TestFunctionParams& p, double y, const AfeParams& a, double tol,
                                             int threads = 1);

}  // namespace gl3
