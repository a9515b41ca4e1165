// special.hpp
//
// Complex special functions used throughout the library: log-gamma,
// log-trigonometric helpers that stay finite for large imaginary parts,
// the Riemann zeta function, the exponential integral E1, and the
// Stirling expansion of gamma ratios
//
//   Gamma(z+s)/Gamma(z) = z^s (1 + sum_{n=1}^N P_n(s) z^{-n} + ...)
//
// All routines are double precision.  Accuracy targets are ~1e-12 relative
// for |z|, |Im s| <= 1e3.

#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gl3 {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr cplx kI{0.0, 1.0};

// Raised when an argument sits on (or numerically at) a pole.
class PoleError : public std::domain_error {
 public:
  explicit PoleError(const std::string& what) : std::domain_error(what) {}
};

// Principal-branch log Gamma for Re z >= 1/2 (analytic continuation of the
// real log Gamma); for Re z < 1/2 the reflection formula is used and only
// exp(log_gamma(z)) is meaningful.  Throws PoleError at z = 0, -1, -2, ...
cplx log_gamma(cplx z);

inline cplx gamma(cplx z) { return std::exp(log_gamma(z)); }

// log(1 + x) without cancellation for small |x|.
cplx log1p(cplx x);

// log(sin(pi z)) and log(cos(w)), finite for |Im| up to the double range.
// The imaginary part is determined modulo 2 pi.
cplx log_sin_pi(cplx z);
cplx log_cos(cplx w);

// Riemann zeta via Euler-Maclaurin summation. Supported for Re s > -2.
// Throws PoleError at s = 1.
cplx zeta(cplx s);

// Exponential integral E1(z) = int_z^inf e^{-t}/t dt, principal branch
// (cut along the negative real axis).
cplx expint_e1(cplx z);

// Bernoulli number B_n (B_1 = -1/2), 0 <= n <= 30.
double bernoulli(int n);

// Polynomial with real coefficients, coeffs[k] multiplies s^k.
struct RealPoly {
  std::vector<double> coeffs;
  cplx operator()(cplx s) const;
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

inline constexpr int kMaxStirlingOrder = 8;

// P_0..P_8 of the gamma-ratio expansion; P_n has degree 2n.
std::span<const RealPoly> stirling_polynomials();

// z^s (1 + sum_{n<=N} P_n(s)/z^n).  Requires |s| <= |z|^{1/2} and z off the
// negative real axis; throws std::domain_error otherwise.
cplx stirling_ratio(cplx z, cplx s, int order);

// Same expansion with no validity check; used inside contour integrals that
// sweep s beyond the asymptotic range.
cplx stirling_ratio_unchecked(cplx z, cplx s, int order);

}  // namespace gl3
