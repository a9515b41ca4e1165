// contour.hpp
//
// Adaptive quadrature of (1/2 pi i) * integral f(s) ds along piecewise
// contours in the complex plane.
//
// A contour is assembled from line segments, circular arcs and rays.  The
// finite pieces are integrated with globally adaptive Gauss-Kronrod (7/15)
// panels; rays are truncated by a decay scan (the ray length doubles until
// max|f| times the next panel width drops below tol/10) and the neglected
// bound is folded into the error estimate.
//
// Supported contour kinds:
//   Vertical  Re s = sigma, optionally indented to the right around listed
//             points on the line and optionally bent: beyond |Im s| = H the
//             path leaves along rays tilted left by an angle beta.
//   Keyhole   the imaginary axis with |Im s| >= eps joined by the left
//             semicircle eps*e^{i theta}, pi/2 <= theta <= 3 pi/2.
//   Segment   a user polyline (for finite pieces).

#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "gl3/special.hpp"

namespace gl3 {

struct QuadratureResult {
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;
  long panels_used = 0;
  bool converged = true;
};

enum class ContourKind { Vertical, Keyhole };

struct ContourSpec {
  ContourKind kind = ContourKind::Vertical;
  double sigma = 3.0;
  double epsilon = 0.1;
  // 0 selects the decay scan; > 0 truncates straight pieces at |Im s| = H.
  double truncation_height = 0.0;
  double tolerance = 1e-10;      // absolute
  double rel_tolerance = 0.0;    // relative to |value|; the larger bound wins
  int max_panels = 20000;
  // Bending (Vertical only): 0 disables.
  double bend_height = 0.0;
  double bend_angle = 0.0;
  // Right-hand semicircular indentations around points on Re s = sigma.
  std::vector<cplx> indent;
  double indent_radius = 0.05;

  static ContourSpec vertical(double sigma, double tol = 1e-10) {
    ContourSpec c;
    c.sigma = sigma;
    c.tolerance = tol;
    return c;
  }
  static ContourSpec keyhole(double eps, double tol = 1e-10) {
    ContourSpec c;
    c.kind = ContourKind::Keyhole;
    c.sigma = 0.0;
    c.epsilon = eps;
    c.tolerance = tol;
    return c;
  }
  void validate() const;
};

using Integrand = std::function<cplx(cplx)>;

// Path primitives, exposed for callers that build custom contours.
struct PathPiece {
  enum class Type { Line, Arc, Ray } type = Type::Line;
  cplx a{0.0, 0.0};      // Line: start; Arc: centre; Ray: anchor point
  cplx b{0.0, 0.0};      // Line: end; Ray: unit direction
  double radius = 0.0;   // Arc
  double theta0 = 0.0;   // Arc start angle
  double theta1 = 0.0;   // Arc end angle
  bool incoming = false; // Ray traversed from infinity towards the anchor
};

std::vector<PathPiece> build_path(const ContourSpec& spec);

// (1/2 pi i) * integral over the path, tolerance semantics from `spec`.
QuadratureResult integrate_path(const Integrand& f, const std::vector<PathPiece>& path,
                                const ContourSpec& spec);

QuadratureResult contour_integrate(const Integrand& f, const ContourSpec& spec);

// Plain adaptive GK15 on a real interval, used by the 1-D and 2-D real
// integrals elsewhere.  Returns the integral (no 2 pi i factor).
QuadratureResult integrate_real(const std::function<cplx(double)>& f, double a, double b,
                                double abs_tol, double rel_tol, int max_panels);

}  // namespace gl3
