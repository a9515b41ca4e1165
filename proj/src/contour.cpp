#include "gl3/contour.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "gl3/numeric.hpp"

namespace gl3 {

namespace {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

using Mapped = std::function<cplx(double)>;  // u -> f(s(u)) * s'(u)

struct Panel {
  int piece;
  double u0, u1;
  cplx value;
  double error;
  double maxabs;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const Mapped& g, int piece, double u0, double u1) {
  double c = 0.5 * (u0 + u1), h = 0.5 * (u1 - u0);
  cplx fc = g(c);
  cplx resk = fc * kWgk[7];
  cplx resg = fc * kWg[3];
  double mx = std::abs(fc);
  for (int j = 0; j < 7; ++j) {
    double dx = h * kXgk[j];
    cplx f1 = g(c - dx), f2 = g(c + dx);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    mx = std::max({mx, std::abs(f1), std::abs(f2)});
  }
  Panel p{piece, u0, u1, resk * h, std::abs((resk - resg) * h), mx};
  if (!std::isfinite(p.value.real()) || !std::isfinite(p.value.imag()))
    throw std::runtime_error("contour quadrature: non-finite integrand");
  return p;
}

struct Interval {
  Mapped g;
  double u0, u1;
  int initial;
};

QuadratureResult adaptive(const std::vector<Interval>& ivs, double abs_tol, double rel_tol, int max_panels,
                          double extra_error) {
  std::priority_queue<Panel> queue;
  long used = 0;
  for (size_t i = 0; i < ivs.size(); ++i) {
    int n = std::max(1, ivs[i].initial);
    double w = (ivs[i].u1 - ivs[i].u0) / n;
    for (int k = 0; k < n; ++k) {
      double a = ivs[i].u0 + k * w;
      double b = (k == n - 1) ? ivs[i].u1 : a + w;
      queue.push(gk15(ivs[i].g, static_cast<int>(i), a, b));
      ++used;
    }
  }
  auto totals = [&](std::priority_queue<Panel> q, cplx& val, double& err) {
    // Deterministic ordering: sort panels by (piece, u0) before summing.
    std::vector<Panel> v;
    v.reserve(q.size());
    while (!q.empty()) {
      v.push_back(q.top());
      q.pop();
    }
    std::sort(v.begin(), v.end(), [](const Panel& x, const Panel& y) {
      return x.piece != y.piece ? x.piece < y.piece : x.u0 < y.u0;
    });
    Accumulator<cplx> acc;
    Accumulator<double> e;
    for (const auto& p : v) {
      acc.add(p.value);
      e.add(p.error);
    }
    val = acc.value();
    err = e.value();
  };
  // Running sums to avoid an O(n) recount on every split.
  cplx val = 0.0;
  double err = 0.0;
  totals(queue, val, err);
  bool converged = true;
  while (err + extra_error > std::max(abs_tol, rel_tol * std::abs(val))) {
    if (used + 2 > max_panels) {
      converged = false;
      break;
    }
    Panel worst = queue.top();
    queue.pop();
    double mid = 0.5 * (worst.u0 + worst.u1);
    if (mid == worst.u0 || mid == worst.u1) {
      converged = false;
      queue.push(worst);
      break;
    }
    Panel l = gk15(ivs[worst.piece].g, worst.piece, worst.u0, mid);
    Panel r = gk15(ivs[worst.piece].g, worst.piece, mid, worst.u1);
    val += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    queue.push(l);
    queue.push(r);
    used += 1;
    if (used % 256 == 0) totals(queue, val, err);
  }
  QuadratureResult res;
  totals(queue, res.value, res.error_estimate);
  res.error_estimate += extra_error;
  res.panels_used = used;
  res.converged = converged && res.error_estimate <= std::max(abs_tol, rel_tol * std::abs(res.value));
  return res;
}

int initial_panels(double length) { return std::clamp(static_cast<int>(std::ceil(length / 4.0)), 1, 64); }

}  // namespace

void ContourSpec::validate() const {
  if (!(tolerance > 0.0)) throw std::invalid_argument("ContourSpec: tolerance must be > 0");
  if (rel_tolerance < 0.0) throw std::invalid_argument("ContourSpec: rel_tolerance must be >= 0");
  if (max_panels < 1) throw std::invalid_argument("ContourSpec: max_panels must be >= 1");
  if (kind == ContourKind::Keyhole && !(epsilon > 0.0))
    throw std::invalid_argument("ContourSpec: keyhole radius must be > 0");
  if (truncation_height < 0.0) throw std::invalid_argument("ContourSpec: truncation_height must be >= 0");
  if (bend_angle < 0.0 || bend_angle >= kPi / 2) throw std::invalid_argument("ContourSpec: bend_angle in [0, pi/2)");
  if (!indent.empty() && !(indent_radius > 0.0)) throw std::invalid_argument("ContourSpec: indent_radius must be > 0");
}

std::vector<PathPiece> build_path(const ContourSpec& spec) {
  spec.validate();
  std::vector<PathPiece> out;
  auto line = [&](cplx a, cplx b) {
    if (a == b) return;
    PathPiece p;
    p.type = PathPiece::Type::Line;
    p.a = a;
    p.b = b;
    out.push_back(p);
  };
  auto ray = [&](cplx anchor, cplx dir, bool incoming) {
    PathPiece p;
    p.type = PathPiece::Type::Ray;
    p.a = anchor;
    p.b = dir / std::abs(dir);
    p.incoming = incoming;
    out.push_back(p);
  };
  const double H = spec.truncation_height;
  if (spec.kind == ContourKind::Keyhole) {
    const double e = spec.epsilon;
    if (H > 0.0) {
      line(cplx(0, -H), cplx(0, -e));
    } else {
      ray(cplx(0, -e), cplx(0, -1), true);
    }
    PathPiece arc;
    arc.type = PathPiece::Type::Arc;
    arc.a = 0.0;
    arc.radius = e;
    arc.theta0 = 1.5 * kPi;
    arc.theta1 = 0.5 * kPi;
    out.push_back(arc);
    if (H > 0.0) {
      line(cplx(0, e), cplx(0, H));
    } else {
      ray(cplx(0, e), cplx(0, 1), false);
    }
    return out;
  }
  const double s = spec.sigma;
  const double rho = spec.indent_radius;
  std::vector<double> pts;
  for (cplx p : spec.indent) {
    if (std::abs(p.real() - s) > 1e-12) throw std::invalid_argument("ContourSpec: indent point off the line");
    pts.push_back(p.imag());
  }
  std::sort(pts.begin(), pts.end());
  for (size_t i = 1; i < pts.size(); ++i)
    if (pts[i] - pts[i - 1] < 2.0 * rho) throw std::invalid_argument("ContourSpec: indent points closer than 2*radius");
  double T0 = 1.0;
  for (double t : pts) T0 = std::max(T0, std::abs(t) + 2.0 * rho + 1.0);
  if (spec.bend_height > 0.0) T0 = std::max(T0, spec.bend_height);
  if (H > 0.0 && spec.bend_height <= 0.0) T0 = std::max(T0, H);
  // Middle part from sigma - i T0 to sigma + i T0 with right semicircles.
  cplx cur(s, -T0);
  for (double t : pts) {
    line(cur, cplx(s, t - rho));
    PathPiece arc;
    arc.type = PathPiece::Type::Arc;
    arc.a = cplx(s, t);
    arc.radius = rho;
    arc.theta0 = -0.5 * kPi;
    arc.theta1 = 0.5 * kPi;
    out.push_back(arc);
    cur = cplx(s, t + rho);
  }
  line(cur, cplx(s, T0));
  const double beta = spec.bend_angle;
  cplx up = std::polar(1.0, 0.5 * kPi + beta);
  cplx down = std::polar(1.0, -0.5 * kPi - beta);
  if (H > 0.0 && spec.bend_height > 0.0) {
    // Truncated bent contour: finite ray pieces of length H - T0 (if any).
    double len = std::max(0.0, H - T0);
    if (len > 0.0) {
      std::vector<PathPiece> mid = std::move(out);
      out.clear();
      line(cplx(s, -T0) + down * len, cplx(s, -T0));
      out.insert(out.end(), mid.begin(), mid.end());
      line(cplx(s, T0), cplx(s, T0) + up * len);
    }
    return out;
  }
  if (H > 0.0) return out;
  std::vector<PathPiece> mid = std::move(out);
  out.clear();
  ray(cplx(s, -T0), down, true);
  out.insert(out.end(), mid.begin(), mid.end());
  ray(cplx(s, T0), up, false);
  return out;
}

QuadratureResult integrate_path(const Integrand& f, const std::vector<PathPiece>& path, const ContourSpec& spec) {
  spec.validate();
  // Work in units of the raw integral; the 1/(2 pi i) factor comes last.
  const double raw_tol = 2.0 * kPi * spec.tolerance;
  std::vector<Interval> ivs;
  double tail_error = 0.0;
  bool tails_ok = true;
  for (const PathPiece& p : path) {
    switch (p.type) {
      case PathPiece::Type::Line: {
        cplx a = p.a, d = p.b - p.a;
        ivs.push_back({[&f, a, d](double u) { return f(a + u * d) * d; }, 0.0, 1.0, initial_panels(std::abs(d))});
        break;
      }
      case PathPiece::Type::Arc: {
        cplx c = p.a;
        double r = p.radius;
        ivs.push_back({[&f, c, r](double th) {
                         cplx e = std::polar(1.0, th);
                         return f(c + r * e) * (kI * r * e);
                       },
                       p.theta0, p.theta1, 4});
        break;
      }
      case PathPiece::Type::Ray: {
        cplx a = p.a, d = p.b;
        double sign = p.incoming ? -1.0 : 1.0;
        Mapped g = [&f, a, d, sign](double r) { return sign * f(a + r * d) * d; };
        // Decay scan: double R until max|f| * R on [R, 2R] < tol/10.
        double R = 4.0;
        double bound = 0.0;
        bool ok = false;
        while (R <= 1e7) {
          Panel probe = gk15(g, 0, R, 2.0 * R);
          bound = probe.maxabs * R;
          if (bound < raw_tol / 10.0) {
            ok = true;
            break;
          }
          R *= 2.0;
        }
        if (!ok) tails_ok = false;
        tail_error += bound;
        double lo = 0.0, hi = R;
        if (p.incoming) {
          // Traverse from R down to 0 so panel order follows the path.
          ivs.push_back({[g](double u) { return g(-u); }, -hi, -lo, initial_panels(hi)});
        } else {
          ivs.push_back({g, lo, hi, initial_panels(hi)});
        }
        break;
      }
    }
  }
  QuadratureResult res = adaptive(ivs, raw_tol, spec.rel_tolerance, spec.max_panels, tail_error);
  res.value /= 2.0 * kPi * kI;
  res.error_estimate /= 2.0 * kPi;
  if (!tails_ok) res.converged = false;
  return res;
}

QuadratureResult contour_integrate(const Integrand& f, const ContourSpec& spec) {
  return integrate_path(f, build_path(spec), spec);
}

QuadratureResult integrate_real(const std::function<cplx(double)>& f, double a, double b, double abs_tol,
                                double rel_tol, int max_panels) {
  if (a == b) return {};
  std::vector<Interval> ivs{{[&f](double u) { return f(u); }, a, b, initial_panels(std::abs(b - a))}};
  return adaptive(ivs, abs_tol, rel_tol, max_panels, 0.0);
}

}  // namespace gl3
