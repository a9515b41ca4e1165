#include "gl3/moments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gl3/numeric.hpp"

namespace gl3 {

namespace {

const double kLogPi = std::log(kPi);

cplx rgamma(cplx z) {
  double n = std::round(z.real());
  if (n <= 0.0 && std::abs(z - n) < 1e-13) return 0.0;
  return std::exp(-log_gamma(z));
}

// prod_{p | d} (1 - p^{-1-s})^{-1}
cplx euler_factor(i64 d, cplx s) {
  cplx r = 1.0;
  for (auto& [p, e] : factorize(d)) r /= 1.0 - std::exp(-(1.0 + s) * std::log(double(p)));
  return r;
}

// Vertical line Re s = sigma for |Im s| <= H, continued by rays tilted by
// pi/4 to the left (dir = -1) or right (dir = +1).
std::vector<PathPiece> tilted_path(double sigma, double H, int dir) {
  const double b = kPi / 4.0;
  std::vector<PathPiece> out(3);
  out[0].type = PathPiece::Type::Ray;
  out[0].a = cplx(sigma, -H);
  out[0].b = cplx(dir * std::sin(b), -std::cos(b));
  out[0].incoming = true;
  out[1].type = PathPiece::Type::Line;
  out[1].a = cplx(sigma, -H);
  out[1].b = cplx(sigma, H);
  out[2].type = PathPiece::Type::Ray;
  out[2].a = cplx(sigma, H);
  out[2].b = cplx(dir * std::sin(b), std::cos(b));
  return out;
}

double log_abs_mu_product(const SpectralPoint& mu) {
  double r = 0.0;
  for (auto& m : mu.mu) {
    if (std::abs(m) == 0.0) throw PoleError("script_W: mu_k = 0");
    r += std::log(std::abs(m));
  }
  return r;
}

double dyadic_norm() {
  static const double c = [] {
    auto r = integrate_real([](double x) -> cplx {
      double u = 2.0 * x - 3.0;
      return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
    }, 1.0, 2.0, 1e-15, 1e-14, 2000);
    return 1.0 / r.value.real();
  }();
  return c;
}

}  // namespace

MollifierParams MollifierParams::from_T(double T, double delta) {
  MollifierParams m;
  m.delta_exp = delta;
  m.L = std::pow(T, delta);
  m.validate();
  return m;
}

void MollifierParams::validate() const {
  if (!(L >= 1.0)) throw std::invalid_argument("MollifierParams: L must be >= 1");
  if (!(delta_exp > 0.0 && delta_exp < 11.0 / 78.0))
    throw std::invalid_argument("MollifierParams: delta_exp must lie in (0, 11/78)");
}

void AfeParams::validate() const {
  if (A_G < 1) throw std::invalid_argument("AfeParams: A_G must be >= 1");
  if (!(T0 > 0.0)) throw std::invalid_argument("AfeParams: T0 must be > 0");
  if (N < 0 || N > kMaxStirlingOrder) throw std::invalid_argument("AfeParams: N must lie in [0, 8]");
}

cplx afe_log_G(cplx s, int A) {
  cplx w = kPi * s / double(A);
  // cos w is close to 1 for large A and the factor 100 A magnifies rounding
  if (std::abs(w) < 0.5) {
    cplx h = std::sin(0.5 * w);
    return -100.0 * A * log1p(-2.0 * h * h);
  }
  return -100.0 * A * log_cos(w);
}
cplx afe_G(cplx s, int A) { return std::exp(afe_log_G(s, A)); }

double mollifier_x(i64 l, double L) {
  if (l < 1) throw std::invalid_argument("mollifier_x: l must be >= 1");
  if (L == 1.0 && l == 1) return 1.0;
  if (!(L > 1.0)) throw std::invalid_argument("mollifier_x: L must be > 1");
  if (double(l) > L) return 0.0;
  return mobius(l) * std::log(L / double(l)) / std::log(L);
}

QuadratureResult mollifier_x_contour(i64 l, double L, const ContourSpec& contour) {
  if (l < 1) throw std::invalid_argument("mollifier_x_contour: l must be >= 1");
  if (!(L > 1.0)) throw std::invalid_argument("mollifier_x_contour: L must be > 1");
  if (contour.kind != ContourKind::Vertical || !(contour.sigma > 0.0))
    throw std::invalid_argument("mollifier_x_contour: needs a vertical contour with sigma > 0");
  const double lx = std::log(L / double(l)), lL = std::log(L);
  auto f = [&](cplx s) { return std::exp(s * lx) / (s * s * lL); };
  auto path = tilted_path(contour.sigma, std::max(1.0, contour.sigma), double(l) <= L ? -1 : 1);
  QuadratureResult r = integrate_path(f, path, contour);
  r.value *= double(mobius(l));
  return r;
}

QuadratureResult afe_weight_W(double y, const SpectralPoint& mu, const AfeParams& params, const ContourSpec& contour) {
  params.validate();
  if (!(y > 0.0)) throw std::invalid_argument("afe_weight_W: y must be > 0");
  cplx base = 0.0;
  for (auto& m : mu.mu)
    for (double sg : {1.0, -1.0}) base += log_gamma(0.5 * (0.5 + sg * m));
  const double ly = 3.0 * kLogPi + std::log(y);
  auto f = [&](cplx s) {
    cplx l = -s * ly + afe_log_G(s, params.A_G) - base;
    for (auto& m : mu.mu)
      for (double sg : {1.0, -1.0}) l += log_gamma(0.5 * (s + 0.5 + sg * m));
    return zeta(1.0 + 2.0 * s) * std::exp(l) / s;
  };
  return contour_integrate(f, contour);
}

QuadratureResult afe_weight_W_N(double y, const SpectralPoint& mu, const AfeParams& params, const ContourSpec& contour) {
  params.validate();
  if (!(y > 0.0)) throw std::invalid_argument("afe_weight_W_N: y must be > 0");
  const double ly = 3.0 * kLogPi + std::log(y);
  auto f = [&](cplx s) {
    cplx r = zeta(1.0 + 2.0 * s) * std::exp(-s * ly + afe_log_G(s, params.A_G)) / s;
    for (auto& m : mu.mu)
      for (double sg : {1.0, -1.0}) r *= stirling_ratio_unchecked(0.5 * (0.5 + sg * m), 0.5 * s, params.N);
    return r;
  };
  return contour_integrate(f, contour);
}

QuadratureResult script_W(double y, const SpectralPoint& mu, const AfeParams& params, const ContourSpec& contour) {
  params.validate();
  if (!(y > 0.0)) throw std::invalid_argument("script_W: y must be > 0");
  const double lX = 3.0 * kLogPi + std::log(y) - log_abs_mu_product(mu);
  auto f = [&](cplx s) { return zeta(1.0 + 2.0 * s) * std::exp(-s * lX + afe_log_G(s, params.A_G)) / s; };
  return contour_integrate(f, contour);
}

double script_W_residue(double y, const SpectralPoint& mu) {
  // zeta(1+2s) = 1/(2s) + gamma + O(s), G(s) = 1 + O(s^2)
  const double lX = 3.0 * kLogPi + std::log(y) - log_abs_mu_product(mu);
  return kEulerGamma - 0.5 * lX;
}

ScriptWFit fit_script_W(const std::vector<double>& ys, const std::vector<SpectralPoint>& mus, const AfeParams& params,
                        double tol) {
  const int n = static_cast<int>(ys.size() * mus.size());
  if (n < 3) throw std::invalid_argument("fit_script_W: need at least 3 grid points");
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  ScriptWFit fit;
  int i = 0;
  for (auto& mu : mus)
    for (double y : ys) {
      // Re s = 1/2: on (3) the factor X^{-3} is huge for small X and the
      // integral cancels to a few digits.
      auto r = script_W(y, mu, params, ContourSpec::vertical(0.5, tol));
      if (!r.converged) throw std::runtime_error("fit_script_W: quadrature did not converge");
      fit.max_quad_error = std::max(fit.max_quad_error, r.error_estimate);
      A(i, 0) = log_abs_mu_product(mu);
      A(i, 1) = std::log(y);
      A(i, 2) = 1.0;
      b(i) = r.value.real();
      ++i;
    }
  Eigen::Vector3d c = A.colPivHouseholderQr().solve(b);
  fit.c1 = c(0);
  fit.c2 = c(1);
  fit.c3 = c(2);
  fit.residual = (A * c - b).cwiseAbs().maxCoeff();
  fit.points = n;
  return fit;
}

Ell1Identity ell1_sum_identity(i64 d, i64 l_max, double L, const ContourSpec& contour) {
  if (d < 1 || !is_squarefree(d)) throw std::invalid_argument("ell1_sum_identity: d must be squarefree");
  if (!(L > 1.0)) throw std::invalid_argument("ell1_sum_identity: L must be > 1");
  if (double(l_max) < L) throw std::invalid_argument("ell1_sum_identity: l_max must be >= L");
  if (contour.kind != ContourKind::Keyhole) throw std::invalid_argument("ell1_sum_identity: needs a keyhole contour");
  const double lL = std::log(L);
  Ell1Identity out;

  Accumulator<double> lhs;
  for (i64 l = 1; l <= l_max; ++l) {
    if (gcd(l, d) != 1) continue;
    int m = mobius(l);
    if (m == 0) continue;
    double dl = double(d) * double(l);
    if (dl > L) continue;
    lhs.add(m * std::log(L / dl) / lL / double(l));
  }
  out.lhs = lhs.value();

  double main = 1.0 / lL;
  for (auto& [p, e] : factorize(d)) main *= double(p) / double(p - 1);
  out.main_term = main;

  const double lx = std::log(L / double(d));
  auto F = [&](cplx s) { return euler_factor(d, s) * std::exp(s * lx) / (s * s * zeta(1.0 + s) * lL); };
  ContourSpec c = contour;
  const double H = c.truncation_height > 0.0 ? c.truncation_height : 40.0;
  c.truncation_height = H;
  auto core = contour_integrate(F, c);

  // Tails |Im s| >= H moved to Re s = sigma1 through horizontal connectors.
  const double sigma1 = 2.0;
  std::vector<PathPiece> conn(2);
  conn[0].a = cplx(0.0, H);
  conn[0].b = cplx(sigma1, H);
  conn[1].a = cplx(sigma1, -H);
  conn[1].b = cplx(0.0, -H);
  auto side = integrate_path(F, conn, c);

  // (1/2 pi i) over both vertical tails = Im(J)/pi with
  // J = int_{a}^{a + i inf} F ds, a = sigma1 + iH, summed termwise from
  // E(s)/zeta(1+s) = sum_{(n, d) = 1} mobius(n) n^{-1-s}.
  const cplx a(sigma1, H);
  const i64 nmax = 20000;
  Accumulator<cplx> J;
  for (i64 n = 1; n <= nmax; ++n) {
    if (gcd(n, d) != 1) continue;
    int m = mobius(n);
    if (m == 0) continue;
    double lam = lx - std::log(double(n));
    cplx t = lam == 0.0 ? 1.0 / a : std::exp(lam * a) / a + lam * expint_e1(-lam * a);
    J.add(double(m) / double(n) / lL * t);
  }
  double tail_bound = std::exp(sigma1 * lx) / (kPi * lL * H) / (sigma1 * std::pow(double(nmax), sigma1));

  out.remainder = core.value + side.value + J.value().imag() / kPi;
  out.error_estimate = core.error_estimate + side.error_estimate + tail_bound;
  out.rhs = out.main_term + out.remainder;
  return out;
}

double typical_d_sum(double L) {
  if (!(L >= 2.0)) throw std::invalid_argument("typical_d_sum: L must be >= 2");
  Accumulator<double> acc;
  for (i64 d = 1; double(d) <= L; ++d) {
    if (!is_squarefree(d)) continue;
    double t = 1.0 / double(d);
    for (auto& [p, e] : factorize(d)) t *= std::pow(double(p) / double(p - 1), 2);
    acc.add(t);
  }
  return acc.value();
}

QuadratureResult first_moment_V(double y, double T0, const AfeParams& params, const ContourSpec& contour) {
  params.validate();
  if (!(y > 0.0) || !(T0 > 0.0)) throw std::invalid_argument("first_moment_V: y and T0 must be > 0");
  const double lX = std::log(y) - 3.0 * std::log(T0);
  auto f = [&](cplx s) { return std::exp(-s * lX + afe_log_G(s, params.A_G)) / s; };
  return contour_integrate(f, contour);
}

QuadratureResult first_moment_Vj(double y, const SpectralPoint& mu, double T0, const AfeParams& params,
                                 const ContourSpec& contour) {
  params.validate();
  if (!(y >= 1.0) || !(T0 > 0.0)) throw std::invalid_argument("first_moment_Vj: needs y >= 1 and T0 > 0");
  const double lX = std::log(y) + 3.0 * std::log(T0);
  auto f = [&](cplx s) {
    cplx r = std::exp(-s * lX + afe_log_G(s, params.A_G)) / s;
    for (auto& m : mu.mu) r *= gamma(0.5 * (s + 0.5 + m)) * rgamma(0.5 * (-s + 0.5 - m));
    return r;
  };
  return contour_integrate(f, contour);
}

double dyadic_bump(double x) {
  double u = 2.0 * x - 3.0;
  if (!(std::abs(u) < 1.0)) return 0.0;
  return dyadic_norm() * std::exp(-1.0 / (1.0 - u * u));
}

PhaseCheck phase_derivative_check(double T, double eps, int n) {
  if (!(T > 0.0) || n < 2) throw std::invalid_argument("phase_derivative_check: bad arguments");
  PhaseCheck pc;
  pc.min_derivative = 1e300;
  const double tmax = std::pow(T, eps);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (double t : {-tmax, 0.0, tmax}) {
        double t1 = T / 2.0 + 1.5 * T * i / (n - 1), t2 = T / 2.0 + 1.5 * T * j / (n - 1);
        auto phi = [&](double a) { return (t - a) * std::log(a - t) + (a + t2 + t) * std::log(a + t2 + t); };
        double closed = std::log((t1 + t2 + t) / (t1 - t));
        double hstep = 1e-4 * T;
        double numeric = (phi(t1 + hstep) - phi(t1 - hstep)) / (2.0 * hstep);
        pc.min_derivative = std::min(pc.min_derivative, closed);
        pc.max_deviation = std::max(pc.max_deviation, std::abs(closed - numeric));
        ++pc.samples;
      }
  return pc;
}

DiagonalResult second_moment_diagonal(const TestFunctionParams& p, const MollifierParams& m, const AfeParams& a,
                                      double tol, int threads) {
  p.validate();
  a.validate();
  if (!(m.L >= 1.0)) throw std::invalid_argument("second_moment_diagonal: L must be >= 1");
  DiagonalResult res;
  auto I0 = weyl_integral_h(p, tol, threads, false);
  // log|mu1 mu2 mu3| has a log singularity where some mu_k = 0; lattice
  // points exactly there are dropped.
  auto Ilog = weyl_integral_h(p, tol, threads, false, [](const SpectralPoint& mu) {
    double r = 0.0;
    for (auto& x : mu.mu) {
      if (std::abs(x) == 0.0) return 0.0;
      r += std::log(std::abs(x));
    }
    return r;
  });
  res.integral_h = I0.value;
  res.integral_h_log = Ilog.value;

  const double c1 = 0.5, c2 = -0.5, c3 = kEulerGamma - 1.5 * kLogPi;
  const i64 lmax = static_cast<i64>(std::floor(m.L + 1e-9));
  std::vector<double> x(static_cast<size_t>(lmax + 1), 0.0);
  for (i64 l = 1; l <= lmax; ++l) x[l] = mollifier_x(l, m.L);

  Accumulator<double> s0, slog;  // coefficient sums of (c1 Ilog + c3 I0) and of c2 log(l1 l2) I0
  for (i64 d = 1; d <= lmax; ++d)
    for (i64 l1 = 1; d * l1 <= lmax; ++l1) {
      if (x[d * l1] == 0.0) continue;
      for (i64 l2 = 1; d * l2 <= lmax; ++l2) {
        if (x[d * l2] == 0.0) continue;
        double w = x[d * l1] * x[d * l2] / (double(d) * double(l1) * double(l2));
        s0.add(w);
        slog.add(w * std::log(double(l1) * double(l2)));
        ++res.tuples;
      }
    }
  const double pref = 1.0 / (96.0 * std::pow(kPi, 5));
  res.value = pref * (s0.value() * (c1 * Ilog.value + c3 * I0.value) + c2 * slog.value() * I0.value);
  res.error_estimate = pref * (std::abs(s0.value()) * (c1 * Ilog.error_estimate + std::abs(c3) * I0.error_estimate) +
                               std::abs(c2 * slog.value()) * I0.error_estimate);
  const double M = p.window();
  res.ratio_T3M2 = res.value / (p.T * p.T * p.T * M * M);
  return res;
}

InnerWeightCheck diagonal_inner_weight_check(const TestFunctionParams& p, double y, const AfeParams& a, double tol,
                                             int threads) {
  p.validate();
  a.validate();
  if (!(y > 0.0)) throw std::invalid_argument("diagonal_inner_weight_check: y must be > 0");
  auto off_axis = [](const SpectralPoint& mu) {
    for (auto& x : mu.mu)
      if (std::abs(x) == 0.0) return false;
    return true;
  };
  // Both routes use the lattice on which the plain h integral converged; the
  // comparison isolates the inner weight, not the lattice error.
  auto base = weyl_integral_h(p, tol, threads, false);
  double res = weyl_lattice_sum(p, base.radius, base.step, threads, false,
                                [&](const SpectralPoint& mu) { return off_axis(mu) ? script_W_residue(y, mu) : 0.0; });
  double dir = weyl_lattice_sum(p, base.radius, base.step, threads, false, [&](const SpectralPoint& mu) {
    if (!off_axis(mu)) return 0.0;
    return script_W(y, mu, a, ContourSpec::vertical(0.5, 1e-13)).value.real();
  });
  InnerWeightCheck out;
  out.residue_form = res;
  out.direct = dir;
  out.error_estimate = base.error_estimate * std::abs(res) / std::abs(base.value);
  out.relative = std::abs(out.direct - out.residue_form) / std::abs(out.residue_form);
  return out;
}

}  // namespace gl3
