#include "gl3/special.hpp"

#include <array>
#include <cmath>

#include "gl3/numeric.hpp"

namespace gl3 {

namespace {

// Even Bernoulli numbers B_0, B_2, ..., B_30.
constexpr std::array<double, 16> kEvenBernoulli = {
    1.0,
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
};

constexpr double kHalfLog2Pi = 0.91893853320467274178032973640561764;

bool is_nonpositive_integer(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real());
}

cplx log_gamma_stirling(cplx z) {
  // Re z >= 1/2 and |z| >= 15: eight correction terms give < 1e-17.
  cplx res = (z - 0.5) * std::log(z) - z + kHalfLog2Pi;
  cplx inv = 1.0 / z;
  cplx inv2 = inv * inv;
  cplx p = inv;
  for (int k = 1; k <= 8; ++k) {
    res += kEvenBernoulli[k] / (2.0 * k * (2.0 * k - 1.0)) * p;
    p *= inv2;
  }
  return res;
}

}  // namespace

double bernoulli(int n) {
  if (n < 0 || n > 30) throw std::out_of_range("bernoulli: index out of range");
  if (n == 1) return -0.5;
  if (n % 2 == 1) return 0.0;
  return kEvenBernoulli[n / 2];
}

cplx log_gamma(cplx z) {
  if (is_nonpositive_integer(z)) throw PoleError("log_gamma: pole at non-positive integer");
  if (z.real() < 0.5) {
    // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
    return std::log(kPi) - log_sin_pi(z) - log_gamma(1.0 - z);
  }
  cplx shift = 0.0;
  while (std::abs(z) < 15.0) {
    shift += std::log(z);
    z += 1.0;
  }
  return log_gamma_stirling(z) - shift;
}

cplx log1p(cplx x) {
  if (std::abs(x) > 0.5) return std::log(1.0 + x);
  double a = x.real(), b = x.imag();
  double re = 0.5 * std::log1p(2.0 * a + a * a + b * b);
  double im = std::atan2(b, 1.0 + a);
  return {re, im};
}

cplx log_sin_pi(cplx z) {
  double y = z.imag();
  if (std::abs(y) < 1.0) {
    // sin(pi z) has period 2; reduce exactly before the direct evaluation.
    double x = z.real() - 2.0 * std::round(0.5 * z.real());
    if (y == 0.0 && x == std::round(x)) throw PoleError("log_sin_pi: zero of sin");
    cplx v = std::sin(kPi * cplx(x, y));
    if (v == 0.0) throw PoleError("log_sin_pi: zero of sin");
    return std::log(v);
  }
  if (y > 0) {
    // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 pi i z})
    cplx e = std::exp(2.0 * kPi * kI * z);
    return -kI * kPi * z + cplx(-std::log(2.0), kPi / 2) + log1p(-e);
  }
  cplx e = std::exp(-2.0 * kPi * kI * z);
  return kI * kPi * z + cplx(-std::log(2.0), -kPi / 2) + log1p(-e);
}

cplx log_cos(cplx w) { return log_sin_pi(w / kPi + 0.5); }

cplx zeta(cplx s) {
  if (s == cplx(1.0, 0.0)) throw PoleError("zeta: pole at s = 1");
  if (s.real() <= -2.0) throw std::domain_error("zeta: Re s <= -2 unsupported");
  // Euler-Maclaurin with K correction terms; N chosen so successive
  // correction terms shrink by roughly a factor 25.
  constexpr int K = 12;
  int N = static_cast<int>((std::abs(s) + 2 * K) / 1.257) + 10;
  Accumulator<cplx> acc;
  for (int n = N - 1; n >= 1; --n) acc.add(std::exp(-s * std::log(static_cast<double>(n))));
  double logN = std::log(static_cast<double>(N));
  cplx Ns = std::exp(-s * logN);  // N^{-s}
  acc.add(Ns * static_cast<double>(N) / (s - 1.0));
  acc.add(0.5 * Ns);
  // term_k = B_{2k}/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
  cplx poch = s;  // s(s+1)...(s+2k-2)
  cplx power = Ns / static_cast<double>(N);
  double fact = 2.0;  // (2k)!
  for (int k = 1; k <= K; ++k) {
    acc.add(kEvenBernoulli[k] / fact * poch * power);
    poch *= (s + (2.0 * k - 1.0)) * (s + 2.0 * k);
    power /= static_cast<double>(N) * N;
    fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
  }
  return acc.value();
}

cplx expint_e1(cplx z) {
  if (z == 0.0) throw PoleError("expint_e1: singular at 0");
  if (std::abs(z) <= 4.0) {
    // -gamma - log z - sum_{k>=1} (-z)^k / (k k!)
    Accumulator<cplx> acc;
    cplx term = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= -z / static_cast<double>(k);
      cplx t = term / static_cast<double>(k);
      acc.add(t);
      if (std::abs(t) < 1e-18 * (1.0 + std::abs(acc.value()))) break;
    }
    return -kEulerGamma - std::log(z) - acc.value();
  }
  // Continued fraction e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...))),
  // modified Lentz.
  constexpr double tiny = 1e-300;
  cplx b = z + 1.0;
  cplx c = 1.0 / tiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i < 100000; ++i) {
    double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    cplx del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-z);
}

cplx RealPoly::operator()(cplx s) const {
  cplx r = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * s + *it;
  return r;
}

namespace {

RealPoly poly_mul(const RealPoly& a, const RealPoly& b) {
  RealPoly r;
  r.coeffs.assign(a.coeffs.size() + b.coeffs.size() - 1, 0.0);
  for (size_t i = 0; i < a.coeffs.size(); ++i)
    for (size_t j = 0; j < b.coeffs.size(); ++j) r.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
  return r;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Bernoulli polynomial B_m(x) minus its constant term.
RealPoly bernoulli_poly_shifted(int m) {
  RealPoly p;
  p.coeffs.assign(m + 1, 0.0);
  for (int j = 0; j < m; ++j) p.coeffs[m - j] = binom(m, j) * bernoulli(j);
  return p;
}

std::vector<RealPoly> build_stirling() {
  // log(Gamma(z+s)/Gamma(z)) - s log z = sum_k c_k(s) z^{-k},
  // c_k = (-1)^{k+1} (B_{k+1}(s) - B_{k+1}) / (k(k+1)); then exponentiate
  // via n P_n = sum_{k=1}^n k c_k P_{n-k}.
  const int N = kMaxStirlingOrder;
  std::vector<RealPoly> c(N + 1);
  for (int k = 1; k <= N; ++k) {
    c[k] = bernoulli_poly_shifted(k + 1);
    double f = ((k % 2 == 1) ? 1.0 : -1.0) / (k * (k + 1.0));
    for (double& v : c[k].coeffs) v *= f;
  }
  std::vector<RealPoly> P(N + 1);
  P[0].coeffs = {1.0};
  for (int n = 1; n <= N; ++n) {
    RealPoly acc;
    acc.coeffs.assign(2 * n + 1, 0.0);
    for (int k = 1; k <= n; ++k) {
      RealPoly t = poly_mul(c[k], P[n - k]);
      for (size_t i = 0; i < t.coeffs.size(); ++i) acc.coeffs[i] += k * t.coeffs[i] / n;
    }
    while (acc.coeffs.size() > 1 && acc.coeffs.back() == 0.0) acc.coeffs.pop_back();
    P[n] = std::move(acc);
  }
  return P;
}

}  // namespace

std::span<const RealPoly> stirling_polynomials() {
  static const std::vector<RealPoly> table = build_stirling();
  return table;
}

cplx stirling_ratio_unchecked(cplx z, cplx s, int order) {
  if (order < 0 || order > kMaxStirlingOrder) throw std::domain_error("stirling_ratio: order out of range");
  if (s == 0.0) return 1.0;
  auto P = stirling_polynomials();
  cplx inv = 1.0 / z;
  cplx sum = 1.0, p = 1.0;
  for (int n = 1; n <= order; ++n) {
    p *= inv;
    sum += P[n](s) * p;
  }
  return std::exp(s * std::log(z)) * sum;
}

cplx stirling_ratio(cplx z, cplx s, int order) {
  if (std::abs(s) > std::sqrt(std::abs(z)))
    throw std::domain_error("stirling_ratio: |s| exceeds |z|^{1/2}");
  if (z.real() <= 0.0 && std::abs(z.imag()) < 1e-12 * (1.0 + std::abs(z)))
    throw std::domain_error("stirling_ratio: z on the negative real axis");
  return stirling_ratio_unchecked(z, s, order);
}

}  // namespace gl3
