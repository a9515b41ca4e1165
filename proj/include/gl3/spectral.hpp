// spectral.hpp
//
// Langlands parameters mu = (mu1, mu2, mu3), mu1 + mu2 + mu3 = 0, their
// difference coordinates
//
//   nu = ((mu1 - mu2)/3, (mu2 - mu3)/3, (mu3 - mu1)/3),
//   mu = (2 nu1 + nu2, nu2 - nu1, -nu1 - 2 nu2),
//
// the Weyl group acting by permutation, the localized test function
//
//   h(mu) = P(mu)^2 (sum_w psi((w mu - mu0)/M))^2,   psi(x) = exp(x1^2 + x2^2 + x3^2),
//   P(mu) = prod_{0<=n<=A} prod_k (nu_k - (1+2n)/3)(nu_k + (1+2n)/3) / |nu0_k|^2,
//
// and the spectral density spec(mu) = prod_k 3 nu_k tan(3 pi nu_k / 2).

#pragma once

#include <array>
#include <functional>
#include <string>

#include "gl3/special.hpp"

namespace gl3 {

using Triple3 = std::array<cplx, 3>;

inline constexpr double kTraceTol = 1e-12;

Triple3 nu_from_mu(const Triple3& mu);
Triple3 mu_from_nu(const Triple3& nu);

struct SpectralPoint {
  Triple3 mu{};

  // Throws std::invalid_argument unless the entries sum to zero.
  static SpectralPoint from_mu(const Triple3& mu);
  static SpectralPoint from_nu(const Triple3& nu);
  // mu = (i t1, i t2, -i (t1 + t2))
  static SpectralPoint imaginary(double t1, double t2);

  Triple3 nu() const { return nu_from_mu(mu); }
  SpectralPoint operator-() const { return {{-mu[0], -mu[1], -mu[2]}}; }
};

// w maps mu to (mu[perm[0]], mu[perm[1]], mu[perm[2]]).
struct WeylElement {
  std::array<int, 3> perm{0, 1, 2};

  static const std::array<WeylElement, 6>& all();
  static WeylElement identity() { return {}; }
  // (a * b)(mu) = a(b(mu))
  WeylElement operator*(const WeylElement& b) const;
  bool operator==(const WeylElement&) const = default;
  bool is_involution() const;
  std::string name() const;
};

SpectralPoint weyl_apply(const WeylElement& w, const SpectralPoint& mu);

// Lambda_c: |Re mu_k| <= c.  strict_dual adds {-mu_k} = {conj mu_k} as multisets.
bool in_lambda(const SpectralPoint& mu, double c, bool strict_dual);

struct TestFunctionParams {
  double T = 16.0;
  double M = 0.0;       // 0 means T^theta
  double theta = 0.7;
  SpectralPoint mu0{};
  int poly_order = 4;

  // mu0 = i T (a, b, -(a+b)) / |(a, b, -(a+b))|
  static TestFunctionParams make(double T, double theta, double a = 3.0, double b = 1.0, int poly_order = 4);
  double window() const;
  // Throws std::invalid_argument on bad fields.
  void validate() const;

  std::string to_json() const;
  static TestFunctionParams from_json(const std::string& text);
};

cplx test_function_h(const SpectralPoint& mu, const TestFunctionParams& p);

// The two factors of h separately (h = P^2 * S^2).
cplx test_function_P(const SpectralPoint& mu, const TestFunctionParams& p);
cplx test_function_weyl_sum(const SpectralPoint& mu, const TestFunctionParams& p);

// Literal product; throws PoleError when |cos(3 pi nu_k / 2)| < 1e-12.
cplx spec_density(const SpectralPoint& mu);

struct WeylIntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
  double radius = 0.0;   // localization radius used, in units of M
  double step = 0.0;     // final grid step in (t1, t2)
  long points = 0;       // integrand evaluations on the final grid
  int refinements = 0;
};

// integral over Re mu = 0 of h(mu) |spec(mu)| dt1 dt2, mu = (i t1, i t2, -i(t1+t2)).
// tol is relative.  With signed = true the literal (signed) density is used.
// An optional weight multiplies the integrand.
WeylIntegralResult weyl_integral_h(const TestFunctionParams& p, double tol, int threads = 1,
                                   bool signed_density = false,
                                   const std::function<double(const SpectralPoint&)>& weight = {});
// One trapezoid sum of the same integrand on a fixed lattice: balls of
// radius radius*M around the Weyl images of mu0, grid step `step` in (t1, t2).
double weyl_lattice_sum(const TestFunctionParams& p, double radius, double step, int threads = 1,
                        bool signed_density = false, const std::function<double(const SpectralPoint&)>& weight = {});

}  // namespace gl3
