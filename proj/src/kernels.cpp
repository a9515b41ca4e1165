#include "gl3/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gl3/numeric.hpp"

namespace gl3 {

namespace {

constexpr double kPoleTol = 1e-8;
const double kGtConst = 1.0 / (12288.0 * std::pow(kPi, 3.5));
const double kLogPi = std::log(kPi);

bool near_nonpositive_integer(cplx z, double tol) {
  double n = std::round(z.real());
  return n <= 0.0 && std::abs(z - n) < tol;
}

cplx lg_num(cplx z) {
  if (near_nonpositive_integer(z, kPoleTol)) throw PoleError("gamma argument within 1e-8 of a pole");
  return log_gamma(z);
}

// log(1/Gamma(z)); false where 1/Gamma vanishes.
bool log_rgamma(cplx z, cplx& out) {
  if (near_nonpositive_integer(z, 1e-14)) return false;
  out = -log_gamma(z);
  return true;
}

// C pi^{-3s} |y|^{-s} (prod_1 +- i prod_2), log|y| = ly.
cplx g_tilde_scaled(cplx s, const SpectralPoint& mu, int sign, double ly) {
  cplx l1 = 0.0, l2 = 0.0;
  for (auto& m : mu.mu) {
    l1 += lg_num(0.5 * (s - m));
    l2 += lg_num(0.5 * (1.0 + s - m));
  }
  bool z1 = false, z2 = false;
  for (auto& m : mu.mu) {
    cplx r;
    if (log_rgamma(0.5 * (1.0 - s + m), r)) l1 += r; else z1 = true;
    if (log_rgamma(0.5 * (2.0 - s + m), r)) l2 += r; else z2 = true;
  }
  cplx pre = -s * (3.0 * kLogPi + ly);
  cplx v = (z1 ? cplx(0.0) : std::exp(l1 + pre)) + static_cast<double>(sign) * kI * (z2 ? cplx(0.0) : std::exp(l2 + pre));
  return kGtConst * v;
}

void check_sign(int e, const char* what) {
  if (e != 1 && e != -1) throw std::invalid_argument(std::string(what) + ": sign must be +1 or -1");
}

double max_abs_imag(const SpectralPoint& mu) {
  double m = 0.0;
  for (auto& x : mu.mu) m = std::max(m, std::abs(x.imag()));
  return m;
}

// Which sine factors of S^{e1 e2} attach to each position k.
struct Variant {
  int e1 = 1, e2 = 1;
  bool sin1[3] = {false, false, false};  // sin(pi (s1 - mu_k))
  bool sin2[3] = {false, false, false};  // sin(pi (s2 + mu_k))
  bool den = false;                      // 1 / sin(pi (s1 + s2))
};

Variant make_variant(int e1, int e2) {
  Variant v;
  v.e1 = e1;
  v.e2 = e2;
  if (e1 == 1 && e2 == -1) {
    v.sin1[0] = true;
    v.sin2[1] = v.sin2[2] = true;
    v.den = true;
  } else if (e1 == -1 && e2 == 1) {
    v.sin1[0] = v.sin1[1] = true;
    v.sin2[2] = true;
    v.den = true;
  } else if (e1 == -1 && e2 == -1) {
    v.sin1[1] = true;
    v.sin2[1] = true;
  }
  return v;
}

// The mu-only factor of S^{e1 e2}, i.e. S with the s-dependent sines removed.
cplx s_mu_part(int e1, int e2, const SpectralPoint& mu) {
  auto nu = mu.nu();
  cplx lc[3], ls[3];
  for (int k = 0; k < 3; ++k) {
    lc[k] = log_cos(1.5 * kPi * nu[k]);
    ls[k] = log_sin_pi(1.5 * nu[k]);
  }
  auto guard = [](cplx l) {
    if (std::exp(l.real()) < 1e-12) throw PoleError("s_trig: denominator sin(3 pi nu / 2) vanishes");
  };
  if (e1 == 1 && e2 == 1) return std::exp(lc[0] + lc[1] + lc[2]) / (24.0 * kPi * kPi);
  if (e1 == 1 && e2 == -1) {
    guard(ls[0]);
    guard(ls[2]);
    return -std::exp(lc[1] - ls[0] - ls[2]) / (32.0 * kPi * kPi);
  }
  if (e1 == -1 && e2 == 1) {
    guard(ls[1]);
    guard(ls[2]);
    return -std::exp(lc[0] - ls[1] - ls[2]) / (32.0 * kPi * kPi);
  }
  guard(ls[1]);
  guard(ls[0]);
  return std::exp(lc[2] - ls[1] - ls[0]) / (32.0 * kPi * kPi);
}

// spec(mu) times the mu-only factor of S, simplified so that the removable
// singularities at nu_k = 0 cause no trouble.  x_k = 3 pi nu_k / 2.
cplx spec_times_s_mu(int e1, int e2, const SpectralPoint& mu) {
  auto nu = mu.nu();
  cplx x[3];
  for (int k = 0; k < 3; ++k) x[k] = 1.5 * kPi * nu[k];
  cplx pre = 27.0 * nu[0] * nu[1] * nu[2];
  if (e1 == 1 && e2 == 1) return pre * std::sin(x[0]) * std::sin(x[1]) * std::sin(x[2]) / (24.0 * kPi * kPi);
  double c = 1.0 / (32.0 * kPi * kPi);
  if (e1 == 1 && e2 == -1) return -c * pre * std::sin(x[1]) / (std::cos(x[0]) * std::cos(x[2]));
  if (e1 == -1 && e2 == 1) return -c * pre * std::sin(x[0]) / (std::cos(x[1]) * std::cos(x[2]));
  return c * pre * std::sin(x[2]) / (std::cos(x[0]) * std::cos(x[1]));
}

// ---------------------------------------------------------------------------
// Spectral point sets.  Positions k = 0, 1, 2 of each point index into a
// shared table of Im mu values.

struct PointSet {
  std::vector<double> taus;
  struct Pt {
    int k[3];
    cplx w;
  };
  std::vector<Pt> pts;
  size_t n_coarse = 0;  // leading points forming the 2h sub-lattice (weight x4)
  double step = 0.0;
  double max_tau = 0.0;
  double abs_weight = 0.0;
};

PointSet single_point(const SpectralPoint& mu) {
  PointSet ps;
  for (int k = 0; k < 3; ++k) {
    ps.taus.push_back(mu.mu[k].imag());
    ps.max_tau = std::max(ps.max_tau, std::abs(mu.mu[k].imag()));
  }
  ps.pts.push_back({{0, 1, 2}, 1.0});
  ps.abs_weight = 1.0;
  return ps;
}

// Trapezoid lattice t = (i h, j h) over the union of balls of radius R M
// around the Weyl images of mu0 (C^3 distance), weights
// h(mu) density(mu) weight(mu) h^2.  The radius grows until the weights on
// the outer shell are below 1e-3 tol of the peak.
PointSet build_lattice(const TestFunctionParams& p, double step, double tol,
                       const std::function<cplx(const SpectralPoint&)>& density,
                       const std::function<cplx(const SpectralPoint&)>& weight) {
  const double M = p.window();
  std::vector<std::array<double, 2>> centres;
  for (const auto& w : WeylElement::all()) {
    auto c = weyl_apply(w, p.mu0);
    std::array<double, 2> t{c.mu[0].imag(), c.mu[1].imag()};
    bool dup = false;
    for (auto& e : centres) dup = dup || (std::abs(e[0] - t[0]) + std::abs(e[1] - t[1]) < 1e-12);
    if (!dup) centres.push_back(t);
  }
  double R = std::sqrt(0.5 * std::log(1e3 / std::min(tol, 0.5))) + 2.0;
  for (;;) {
    double rho = R * M, rho2 = rho * rho, shell2 = (rho - 1.5 * step) * (rho - 1.5 * step);
    double lo1 = 1e300, hi1 = -1e300, lo2 = 1e300, hi2 = -1e300;
    for (auto& c : centres) {
      lo1 = std::min(lo1, c[0] - rho);
      hi1 = std::max(hi1, c[0] + rho);
      lo2 = std::min(lo2, c[1] - rho);
      hi2 = std::max(hi2, c[1] + rho);
    }
    long i0 = static_cast<long>(std::floor(lo1 / step)), i1 = static_cast<long>(std::ceil(hi1 / step));
    long j0 = static_cast<long>(std::floor(lo2 / step)), j1 = static_cast<long>(std::ceil(hi2 / step));
    std::vector<PointSet::Pt> even, odd;
    std::vector<std::array<long, 3>> idx_even, idx_odd;
    double peak = 0.0, shell = 0.0, absw = 0.0;
    long kmax = 0;
    for (long i = i0; i <= i1; ++i)
      for (long j = j0; j <= j1; ++j) {
        double t1 = i * step, t2 = j * step;
        double dmin = 1e300;
        for (auto& c : centres) {
          double a = t1 - c[0], b = t2 - c[1];
          dmin = std::min(dmin, a * a + b * b + (a + b) * (a + b));
        }
        if (dmin > rho2) continue;
        auto mu = SpectralPoint::imaginary(t1, t2);
        cplx w = test_function_h(mu, p) * density(mu) * step * step;
        if (weight) w *= weight(mu);
        double aw = std::abs(w);
        peak = std::max(peak, aw);
        if (dmin >= shell2) shell = std::max(shell, aw);
        absw += aw;
        long m = -i - j;
        kmax = std::max({kmax, std::abs(i), std::abs(j), std::abs(m)});
        bool ev = (i % 2 == 0) && (j % 2 == 0);
        (ev ? even : odd).push_back({{0, 0, 0}, w});
        (ev ? idx_even : idx_odd).push_back({i, j, m});
      }
    if (shell <= 1e-3 * tol * peak || R > 30.0) {
      PointSet ps;
      ps.step = step;
      ps.abs_weight = absw;
      for (long k = -kmax; k <= kmax; ++k) ps.taus.push_back(k * step);
      ps.max_tau = kmax * step;
      auto put = [&](std::vector<PointSet::Pt>& v, std::vector<std::array<long, 3>>& ix) {
        for (size_t n = 0; n < v.size(); ++n) {
          for (int k = 0; k < 3; ++k) v[n].k[k] = static_cast<int>(ix[n][k] + kmax);
          ps.pts.push_back(v[n]);
        }
      };
      put(even, idx_even);
      ps.n_coarse = ps.pts.size();
      put(odd, idx_odd);
      return ps;
    }
    R += 1.0;
  }
}

// ---------------------------------------------------------------------------
// Product trapezoid rule for
//   (1/2 pi i)^2 iint Y1^{-s1} Y2^{-s2} sum_p w_p G(s, mu_p) S_s(s, mu_p) ds1 ds2
// on Re s1 = Re s2 = sigma, where S_s carries the s-dependent sines of the
// variant (the mu-only part is already in w_p).

struct ProductSums {
  cplx full{0.0, 0.0};
  cplx coarse_step{0.0, 0.0};
  cplx coarse_lattice{0.0, 0.0};
  cplx inner{0.0, 0.0};        // |t1|, |t2| <= 3/4 of the range
  double boundary = 0.0;        // largest |term| on the outer ring
  double peak = 0.0;
  double work = 0.0;
  double step = 0.0;
  double range = 0.0;
};

double product_step(const Variant& v, double sigma, double Y1, double Y2) {
  double a = sigma;
  if (v.den) {
    double two = 2.0 * sigma;
    a = std::min(a, std::abs(two - std::round(two)));
  }
  a *= 0.9;
  double growth = std::max(std::abs(std::log(Y1)), std::abs(std::log(Y2)));
  double sines = 0.0;
  for (int k = 0; k < 3; ++k) sines += (v.sin1[k] ? 1.0 : 0.0) + (v.sin2[k] ? 1.0 : 0.0);
  return 2.0 * kPi * a / (34.0 + a * (growth + kPi * sines));
}

ProductSums product_trapezoid(const Variant& v, double Y1, double Y2, double sigma, double step, double range,
                              const PointSet& ps, int threads, double budget) {
  const long N = static_cast<long>(std::ceil(range / step));
  const long n = 2 * N + 1;
  const size_t nt = ps.taus.size();
  // Distinct (sin1, sin2) patterns share tables.
  int table_of[3];
  std::vector<std::pair<bool, bool>> pats;
  for (int k = 0; k < 3; ++k) {
    std::pair<bool, bool> pk{v.sin1[k], v.sin2[k]};
    auto it = std::find(pats.begin(), pats.end(), pk);
    table_of[k] = static_cast<int>(it - pats.begin());
    if (it == pats.end()) pats.push_back(pk);
  }
  const size_t ntab = pats.size();
  ProductSums out;
  out.step = step;
  out.range = N * step;
  out.work = static_cast<double>(n) * n * (static_cast<double>(ps.pts.size()) + 4.0 * ntab * nt);
  if (out.work > budget)
    throw CostGuardError("product quadrature needs " + std::to_string(out.work) + " operations, budget " +
                         std::to_string(budget));
  auto sval = [&](long a) { return cplx(sigma, a * step); };
  // la[tab][a][tau], lb[tab][b][tau]
  std::vector<cplx> la(ntab * n * nt), lb(ntab * n * nt);
  for (size_t t = 0; t < ntab; ++t)
    for (long a = 0; a < n; ++a) {
      cplx s = sval(a - N);
      for (size_t q = 0; q < nt; ++q) {
        cplx z1 = s - kI * ps.taus[q], z2 = s + kI * ps.taus[q];
        cplx x = lg_num(z1), y = lg_num(z2);
        if (pats[t].first) x += log_sin_pi(z1);
        if (pats[t].second) y += log_sin_pi(z2);
        la[(t * n + a) * nt + q] = x;
        lb[(t * n + a) * nt + q] = y;
      }
    }
  // common[a + b] = -log Gamma(s1 + s2) [- log sin(pi (s1 + s2))]
  std::vector<cplx> common(2 * n - 1);
  std::vector<char> zero(2 * n - 1, 0);
  for (long c = 0; c < 2 * n - 1; ++c) {
    cplx z = cplx(2.0 * sigma, (c - 2 * N) * step);
    cplx r;
    if (!log_rgamma(z, r)) {
      zero[c] = 1;
      continue;
    }
    if (v.den) r -= log_sin_pi(z);
    common[c] = r;
  }
  // A single spectral point needs one exponential per node.
  const bool single = ps.pts.size() == 1;
  std::vector<cplx> sa, sb;
  if (single) {
    sa.assign(n, 0.0);
    sb.assign(n, 0.0);
    for (long a = 0; a < n; ++a)
      for (int k = 0; k < 3; ++k) {
        sa[a] += la[(table_of[k] * n + a) * nt + ps.pts[0].k[k]];
        sb[a] += lb[(table_of[k] * n + a) * nt + ps.pts[0].k[k]];
      }
  }
  const double l1 = std::log(Y1), l2 = std::log(Y2);
  const long inner = static_cast<long>(std::floor(0.75 * N));
  struct Row {
    cplx full{0.0, 0.0}, cstep{0.0, 0.0}, clat{0.0, 0.0}, inner{0.0, 0.0};
    double boundary = 0.0, peak = 0.0;
  };
  auto rows = parallel_map<Row>(static_cast<size_t>(n), threads, [&](size_t ra) {
    Row row;
    long a = static_cast<long>(ra);
    cplx s1 = sval(a - N);
    std::vector<cplx> U(ntab * nt);
    Accumulator<cplx> af, ac, al, ai;
    for (long b = 0; b < n; ++b) {
      long c = a + b;
      if (zero[c]) continue;
      cplx s2 = sval(b - N);
      cplx L = (-s1 * l1 - s2 * l2 + common[c]) / 3.0;
      if (single) {
        cplx h = ps.pts[0].w * std::exp(sa[a] + sb[b] + 3.0 * L);
        af.add(h);
        al.add(4.0 * h);
        if ((a - N) % 2 == 0 && (b - N) % 2 == 0) ac.add(4.0 * h);
        if (std::abs(a - N) <= inner && std::abs(b - N) <= inner) ai.add(h);
        double m = std::abs(h);
        row.peak = std::max(row.peak, m);
        if (a <= 1 || a >= n - 2 || b <= 1 || b >= n - 2) row.boundary = std::max(row.boundary, m);
        continue;
      }
      for (size_t t = 0; t < ntab; ++t) {
        const cplx* pa = &la[(t * n + a) * nt];
        const cplx* pb = &lb[(t * n + b) * nt];
        cplx* u = &U[t * nt];
        for (size_t q = 0; q < nt; ++q) u[q] = std::exp(pa[q] + pb[q] + L);
      }
      const cplx* u0 = &U[table_of[0] * nt];
      const cplx* u1 = &U[table_of[1] * nt];
      const cplx* u2 = &U[table_of[2] * nt];
      cplx hc = 0.0, h = 0.0;
      for (size_t p = 0; p < ps.pts.size(); ++p) {
        if (p == ps.n_coarse) hc = h;
        const auto& pt = ps.pts[p];
        h += pt.w * (u0[pt.k[0]] * u1[pt.k[1]] * u2[pt.k[2]]);
      }
      if (ps.n_coarse == ps.pts.size()) hc = h;
      af.add(h);
      al.add(4.0 * hc);
      if ((a - N) % 2 == 0 && (b - N) % 2 == 0) ac.add(4.0 * h);
      if (std::abs(a - N) <= inner && std::abs(b - N) <= inner) ai.add(h);
      double m = std::abs(h);
      row.peak = std::max(row.peak, m);
      if (a <= 1 || a >= n - 2 || b <= 1 || b >= n - 2) row.boundary = std::max(row.boundary, m);
    }
    row.full = af.value();
    row.cstep = ac.value();
    row.clat = al.value();
    row.inner = ai.value();
    return row;
  });
  Accumulator<cplx> af, ac, al, ai;
  for (auto& r : rows) {
    af.add(r.full);
    ac.add(r.cstep);
    al.add(r.clat);
    ai.add(r.inner);
    out.boundary = std::max(out.boundary, r.boundary);
    out.peak = std::max(out.peak, r.peak);
  }
  const double f = step * step / (4.0 * kPi * kPi);
  out.full = af.value() * f;
  out.coarse_step = ac.value() * f;
  out.coarse_lattice = al.value() * f;
  out.inner = ai.value() * f;
  return out;
}

double product_range(const Variant& v, double sigma, double max_tau, double truncation) {
  bool mixed = v.den || v.e1 != 1 || v.e2 != 1;
  if (mixed) return truncation > 0.0 ? truncation : max_tau + 60.0;
  if (truncation > 0.0) return truncation;
  return max_tau + 40.0 + 4.0 * sigma;
}

}  // namespace

cplx g_tilde(cplx s, const SpectralPoint& mu, int sign) {
  check_sign(sign, "g_tilde");
  return g_tilde_scaled(s, mu, sign, 0.0);
}

cplx g_big(cplx s1, cplx s2, const SpectralPoint& mu) {
  cplx l = 0.0;
  for (auto& m : mu.mu) l += lg_num(s1 - m) + lg_num(s2 + m);
  cplx r;
  if (!log_rgamma(s1 + s2, r)) return 0.0;
  return std::exp(l + r);
}

cplx s_trig(int eps1, int eps2, cplx s1, cplx s2, const SpectralPoint& mu) {
  check_sign(eps1, "s_trig");
  check_sign(eps2, "s_trig");
  Variant v = make_variant(eps1, eps2);
  cplx l = 0.0;
  for (int k = 0; k < 3; ++k) {
    if (v.sin1[k]) l += log_sin_pi(s1 - mu.mu[k]);
    if (v.sin2[k]) l += log_sin_pi(s2 + mu.mu[k]);
  }
  if (v.den) {
    cplx d = log_sin_pi(s1 + s2);
    if (std::exp(d.real()) < 1e-12) throw PoleError("s_trig: sin(pi (s1 + s2)) vanishes");
    l -= d;
  }
  return s_mu_part(eps1, eps2, mu) * std::exp(l);
}

ContourSpec kernel_w4_contour(double y, const SpectralPoint& mu, double sigma, double tol) {
  if (y == 0.0) throw std::invalid_argument("kernel_w4: y must be nonzero");
  ContourSpec c = ContourSpec::vertical(sigma, tol);
  std::vector<double> on_line;
  double off = 1e300;
  for (auto& m : mu.mu)
    for (int n = 0; n < 64; ++n)
      for (double shift : {0.0, 1.0}) {
        cplx p = m - shift - 2.0 * n;
        double d = std::abs(p.real() - sigma);
        if (d < 1e-12)
          on_line.push_back(p.imag());
        else
          off = std::min(off, d);
      }
  std::sort(on_line.begin(), on_line.end());
  on_line.erase(std::unique(on_line.begin(), on_line.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                on_line.end());
  double rho = std::min(0.1, 0.5 * off);
  for (size_t i = 1; i < on_line.size(); ++i) rho = std::min(rho, 0.4 * (on_line[i] - on_line[i - 1]));
  if (!on_line.empty() && rho < 1e-6) throw PoleError("kernel_w4: poles too close to the contour");
  for (double t : on_line) c.indent.push_back(cplx(sigma, t));
  c.indent_radius = rho;
  const double rstar = 2.0 * kPi * std::exp(1.0) * std::cbrt(std::abs(y));
  c.bend_height = std::max({1.25 * rstar, max_abs_imag(mu) + 3.0, 4.0});
  c.bend_angle = kPi / 4.0;
  return c;
}

QuadratureResult kernel_w4(double y, const SpectralPoint& mu, const ContourSpec& contour) {
  if (y == 0.0) throw std::invalid_argument("kernel_w4: y must be nonzero");
  const int eps = y > 0.0 ? 1 : -1;
  const double ly = std::log(std::abs(y));
  ContourSpec c = contour;
  if (c.bend_height == 0.0 && c.truncation_height == 0.0) {
    ContourSpec a = kernel_w4_contour(y, mu, c.sigma, c.tolerance);
    c.bend_height = a.bend_height;
    c.bend_angle = a.bend_angle;
    if (c.indent.empty()) {
      c.indent = a.indent;
      c.indent_radius = a.indent_radius;
    }
  } else if (c.indent.empty()) {
    ContourSpec a = kernel_w4_contour(y, mu, c.sigma, c.tolerance);
    c.indent = a.indent;
    c.indent_radius = a.indent_radius;
  }
  auto f = [&](cplx s) { return g_tilde_scaled(s, mu, eps, ly); };
  QuadratureResult r = contour_integrate(f, c);
  if (c.truncation_height > 0.0 && c.bend_height == 0.0) {
    // |f| ~ C |t|^{3 sigma - 3/2}: tail bound H |f(H)| / (alpha - 1).
    const double H = c.truncation_height;
    const double alpha = 1.5 - 3.0 * c.sigma;
    double fh = std::max(std::abs(f(cplx(c.sigma, H))), std::abs(f(cplx(c.sigma, -H))));
    if (alpha <= 1.0) {
      r.error_estimate = std::numeric_limits<double>::infinity();
      r.converged = false;
    } else {
      r.error_estimate += 2.0 * H * fh / (alpha - 1.0) / (2.0 * kPi);
      if (r.error_estimate > std::max(c.tolerance, c.rel_tolerance * std::abs(r.value))) r.converged = false;
    }
  }
  return r;
}

QuadratureResult kernel_w6_variant(int eps1, int eps2, double y1, double y2, const SpectralPoint& mu,
                                   const ContourSpec& contour) {
  check_sign(eps1, "kernel_w6");
  check_sign(eps2, "kernel_w6");
  if (y1 == 0.0 || y2 == 0.0) throw std::invalid_argument("kernel_w6: y1, y2 must be nonzero");
  const double sigma = contour.sigma;
  Variant v = make_variant(eps1, eps2);
  if (!(sigma > 0.0)) throw std::invalid_argument("kernel_w6: contour sigma must be > 0");
  if (v.den && !(sigma < 0.5))
    throw std::invalid_argument("kernel_w6: mixed-sign variants need sigma in (0, 1/2)");
  PointSet ps = single_point(mu);
  ps.pts[0].w = s_mu_part(eps1, eps2, mu);
  const double Y1 = 4.0 * kPi * kPi * std::abs(y1), Y2 = 4.0 * kPi * kPi * std::abs(y2);
  double step = product_step(v, sigma, Y1, Y2);
  double range = product_range(v, sigma, ps.max_tau, contour.truncation_height);
  auto s = product_trapezoid(v, Y1, Y2, sigma, step, range, ps, 1, 1e12);
  QuadratureResult r;
  r.value = s.full;
  r.error_estimate = std::abs(s.full - s.coarse_step) + std::abs(s.full - s.inner);
  long n = 2 * static_cast<long>(std::ceil(range / step)) + 1;
  r.panels_used = n * n;
  r.converged = r.error_estimate <= std::max(contour.tolerance, contour.rel_tolerance * std::abs(r.value));
  return r;
}

QuadratureResult kernel_w6(double y1, double y2, const SpectralPoint& mu, const ContourSpec& contour) {
  return kernel_w6_variant(y1 > 0.0 ? 1 : -1, y2 > 0.0 ? 1 : -1, y1, y2, mu, contour);
}

PhiResult phi_transform(PhiKind which, double y1, double y2, const TestFunctionParams& p, const PhiOptions& opt) {
  p.validate();
  if (!(opt.tol > 0.0)) throw std::invalid_argument("phi_transform: tol must be > 0");
  if (y1 == 0.0 || (which == PhiKind::W6 && y2 == 0.0)) throw std::invalid_argument("phi_transform: y must be nonzero");
  const double dsign = opt.signed_density ? 1.0 : -1.0;  // spec <= 0 on the imaginary axis
  PhiResult res;

  if (which == PhiKind::W6) {
    const int e1 = y1 > 0.0 ? 1 : -1, e2 = y2 > 0.0 ? 1 : -1;
    Variant v = make_variant(e1, e2);
    const bool mixed = !(e1 == 1 && e2 == 1);
    const double sigma = mixed ? 0.125 : (opt.sigma > 0.0 ? opt.sigma : 3.0);
    const double hstep = sigma / 4.0;
    auto dens = [&](const SpectralPoint& mu) { return dsign * spec_times_s_mu(e1, e2, mu); };
    PointSet ps = build_lattice(p, hstep, opt.tol, dens, opt.weight);
    const double Y1 = 4.0 * kPi * kPi * std::abs(y1), Y2 = 4.0 * kPi * kPi * std::abs(y2);
    double step = product_step(v, sigma, Y1, Y2);
    double range = product_range(v, sigma, ps.max_tau, 0.0);
    auto s = product_trapezoid(v, Y1, Y2, sigma, step, range, ps, opt.threads, opt.budget);
    res.value = s.full;
    res.quadrature_error = std::abs(s.full - s.coarse_step) + std::abs(s.full - s.inner);
    res.lattice_error = std::abs(s.full - s.coarse_lattice);
    res.error_estimate = res.quadrature_error + res.lattice_error;
    long n = 2 * static_cast<long>(std::ceil(range / step)) + 1;
    res.panels_used = n * n;
    res.lattice_points = static_cast<long>(ps.pts.size());
    res.lattice_step = hstep;
    res.work = s.work;
    res.converged = res.error_estimate <= opt.tol * std::abs(res.value);
    return res;
  }

  // w4 / w5: K_w4(+-y; +-mu), sign of G~ from the first argument.
  const bool w5 = which == PhiKind::W5;
  const double yy = w5 ? -y1 : y1;
  const int eps = yy > 0.0 ? 1 : -1;
  const double sigma = opt.sigma > 0.0 ? opt.sigma : 1.0;
  const double hstep = sigma / 4.0;
  auto dens = [&](const SpectralPoint& mu) { return dsign * spec_density(mu); };
  PointSet ps = build_lattice(p, hstep, opt.tol, dens, opt.weight);
  const size_t nt = ps.taus.size();
  const double lscale = 3.0 * kLogPi + std::log(std::abs(yy));
  const double mflip = w5 ? -1.0 : 1.0;
  const size_t nchunks = 16;

  auto make_integrand = [&](size_t npts, double mult) {
    return [&, npts, mult](cplx s) -> cplx {
      std::vector<cplx> A(nt), B(nt);
      cplx pre = -s * lscale / 3.0;
      for (size_t q = 0; q < nt; ++q) {
        cplx m = kI * (mflip * ps.taus[q]);
        cplx l1 = lg_num(0.5 * (s - m)) + pre, l2 = lg_num(0.5 * (1.0 + s - m)) + pre, r;
        A[q] = log_rgamma(0.5 * (1.0 - s + m), r) ? std::exp(l1 + r) : cplx(0.0);
        B[q] = log_rgamma(0.5 * (2.0 - s + m), r) ? std::exp(l2 + r) : cplx(0.0);
      }
      auto parts = parallel_map<cplx>(nchunks, opt.threads, [&](size_t c) {
        size_t lo = npts * c / nchunks, hi = npts * (c + 1) / nchunks;
        cplx sa = 0.0, sb = 0.0;
        for (size_t i = lo; i < hi; ++i) {
          const auto& pt = ps.pts[i];
          sa += pt.w * (A[pt.k[0]] * A[pt.k[1]] * A[pt.k[2]]);
          sb += pt.w * (B[pt.k[0]] * B[pt.k[1]] * B[pt.k[2]]);
        }
        return sa + static_cast<double>(eps) * kI * sb;
      });
      Accumulator<cplx> acc;
      for (auto& x : parts) acc.add(x);
      return kGtConst * mult * acc.value();
    };
  };

  ContourSpec c = ContourSpec::vertical(sigma, 0.0);
  const double rstar = 2.0 * kPi * std::exp(1.0) * std::cbrt(std::abs(yy));
  c.bend_height = std::max({1.25 * rstar, ps.max_tau + 3.0, 4.0});
  c.bend_angle = kPi / 4.0;
  c.tolerance = std::max(opt.abs_tol, 1e-300);
  c.rel_tolerance = opt.tol;
  c.max_panels = opt.max_panels;
  const double per_eval = static_cast<double>(ps.pts.size()) * 2.0 + 8.0 * nt;
  res.work = per_eval * 15.0 * c.max_panels * 1.25;
  if (res.work > opt.budget)
    throw CostGuardError("phi_transform: worst-case work " + std::to_string(res.work) + " exceeds budget " +
                         std::to_string(opt.budget));

  auto fine = contour_integrate(make_integrand(ps.pts.size(), 1.0), c);
  ContourSpec cc = c;
  cc.rel_tolerance = std::max(opt.tol, 1e-3 * opt.tol);
  auto coarse = contour_integrate(make_integrand(ps.n_coarse, 4.0), cc);
  res.value = fine.value;
  res.quadrature_error = fine.error_estimate;
  res.lattice_error = std::abs(fine.value - coarse.value);
  res.error_estimate = res.quadrature_error + res.lattice_error;
  res.panels_used = fine.panels_used + coarse.panels_used;
  res.lattice_points = static_cast<long>(ps.pts.size());
  res.lattice_step = hstep;
  res.converged = fine.converged && res.error_estimate <= std::max(opt.abs_tol, opt.tol * std::abs(res.value));
  return res;
}

}  // namespace gl3
