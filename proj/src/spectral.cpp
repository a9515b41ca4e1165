#include "gl3/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gl3/numeric.hpp"
#include "json.hpp"

namespace gl3 {

namespace {

void check_trace(const Triple3& v, const char* what) {
  if (std::abs(v[0] + v[1] + v[2]) >= kTraceTol)
    throw std::invalid_argument(std::string(what) + ": entries must sum to zero");
}

}  // namespace

Triple3 nu_from_mu(const Triple3& mu) {
  check_trace(mu, "nu_from_mu");
  return {(mu[0] - mu[1]) / 3.0, (mu[1] - mu[2]) / 3.0, (mu[2] - mu[0]) / 3.0};
}

Triple3 mu_from_nu(const Triple3& nu) {
  check_trace(nu, "mu_from_nu");
  return {2.0 * nu[0] + nu[1], nu[1] - nu[0], -nu[0] - 2.0 * nu[1]};
}

SpectralPoint SpectralPoint::from_mu(const Triple3& mu) {
  check_trace(mu, "SpectralPoint");
  return {mu};
}

SpectralPoint SpectralPoint::from_nu(const Triple3& nu) { return {mu_from_nu(nu)}; }

SpectralPoint SpectralPoint::imaginary(double t1, double t2) {
  return {{cplx(0.0, t1), cplx(0.0, t2), cplx(0.0, -(t1 + t2))}};
}

const std::array<WeylElement, 6>& WeylElement::all() {
  static const std::array<WeylElement, 6> els = {{
      {{0, 1, 2}},
      {{1, 0, 2}},
      {{0, 2, 1}},
      {{2, 1, 0}},
      {{1, 2, 0}},
      {{2, 0, 1}},
  }};
  return els;
}

WeylElement WeylElement::operator*(const WeylElement& b) const {
  // a(b(mu))[i] = b(mu)[a[i]] = mu[b[a[i]]]
  WeylElement r;
  for (int i = 0; i < 3; ++i) r.perm[i] = b.perm[perm[i]];
  return r;
}

bool WeylElement::is_involution() const { return (*this) * (*this) == identity(); }

std::string WeylElement::name() const {
  std::string s = "(";
  for (int i = 0; i < 3; ++i) s += char('1' + perm[i]);
  return s + ")";
}

SpectralPoint weyl_apply(const WeylElement& w, const SpectralPoint& mu) {
  return {{mu.mu[w.perm[0]], mu.mu[w.perm[1]], mu.mu[w.perm[2]]}};
}

bool in_lambda(const SpectralPoint& mu, double c, bool strict_dual) {
  for (auto& m : mu.mu)
    if (std::abs(m.real()) > c) return false;
  if (!strict_dual) return true;
  // {-mu_k} = {conj mu_k}: try the six matchings
  for (const auto& w : WeylElement::all()) {
    bool ok = true;
    for (int k = 0; k < 3 && ok; ++k) ok = std::abs(-mu.mu[k] - std::conj(mu.mu[w.perm[k]])) < 1e-12;
    if (ok) return true;
  }
  return false;
}

TestFunctionParams TestFunctionParams::make(double T, double theta, double a, double b, int poly_order) {
  TestFunctionParams p;
  p.T = T;
  p.theta = theta;
  p.M = std::pow(T, theta);
  double c = -(a + b);
  double n = std::sqrt(a * a + b * b + c * c);
  p.mu0 = {{cplx(0.0, T * a / n), cplx(0.0, T * b / n), cplx(0.0, T * c / n)}};
  p.poly_order = poly_order;
  return p;
}

double TestFunctionParams::window() const { return M > 0.0 ? M : std::pow(T, theta); }

void TestFunctionParams::validate() const {
  if (!(T > 0.0)) throw std::invalid_argument("TestFunctionParams: T must be > 0");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("TestFunctionParams: theta must lie in (0, 1)");
  double m = window();
  if (!(m > 0.0) || !(m < T)) throw std::invalid_argument("TestFunctionParams: need 0 < M < T");
  if (poly_order < 0) throw std::invalid_argument("TestFunctionParams: poly_order must be >= 0");
  for (auto& x : mu0.mu)
    if (std::abs(x.real()) > 1e-12) throw std::invalid_argument("TestFunctionParams: mu0 must be purely imaginary");
  check_trace(mu0.mu, "TestFunctionParams mu0");
  for (auto& v : mu0.nu())
    if (std::abs(v) == 0.0) throw std::invalid_argument("TestFunctionParams: mu0 has a vanishing nu entry");
}

std::string TestFunctionParams::to_json() const {
  nlohmann::json j;
  j["T"] = T;
  j["M"] = window();
  j["theta"] = theta;
  j["poly_order"] = poly_order;
  j["mu0"] = nlohmann::json::array();
  for (auto& x : mu0.mu) j["mu0"].push_back({x.real(), x.imag()});
  return j.dump();
}

TestFunctionParams TestFunctionParams::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("TestFunctionParams: expected a JSON object");
  for (auto& [k, v] : j.items()) {
    (void)v;
    if (k != "T" && k != "M" && k != "theta" && k != "mu0" && k != "poly_order")
      throw std::invalid_argument("TestFunctionParams: unknown key '" + k + "'");
  }
  TestFunctionParams p;
  p.T = j.at("T").get<double>();
  p.theta = j.value("theta", 0.7);
  p.M = j.value("M", 0.0);
  p.poly_order = j.value("poly_order", 4);
  if (j.contains("mu0")) {
    auto& a = j.at("mu0");
    if (!a.is_array() || a.size() != 3) throw std::invalid_argument("TestFunctionParams: mu0 must hold 3 entries");
    for (int k = 0; k < 3; ++k) p.mu0.mu[k] = {a[k].at(0).get<double>(), a[k].at(1).get<double>()};
  } else {
    p.mu0 = make(p.T, p.theta).mu0;
  }
  p.validate();
  return p;
}

cplx test_function_P(const SpectralPoint& mu, const TestFunctionParams& p) {
  auto nu = mu.nu();
  auto nu0 = p.mu0.nu();
  cplx P = 1.0;
  for (int n = 0; n <= p.poly_order; ++n) {
    double c = (1.0 + 2.0 * n) / 3.0;
    for (int k = 0; k < 3; ++k) P *= (nu[k] - c) * (nu[k] + c) / std::norm(nu0[k]);
  }
  return P;
}

cplx test_function_weyl_sum(const SpectralPoint& mu, const TestFunctionParams& p) {
  double M = p.window();
  cplx s = 0.0;
  for (const auto& w : WeylElement::all()) {
    auto wm = weyl_apply(w, mu);
    cplx e = 0.0;
    for (int k = 0; k < 3; ++k) {
      cplx x = (wm.mu[k] - p.mu0.mu[k]) / M;
      e += x * x;
    }
    s += std::exp(e);
  }
  return s;
}

cplx test_function_h(const SpectralPoint& mu, const TestFunctionParams& p) {
  cplx P = test_function_P(mu, p);
  cplx S = test_function_weyl_sum(mu, p);
  return P * P * S * S;
}

cplx spec_density(const SpectralPoint& mu) {
  cplx r = 1.0;
  for (auto& v : mu.nu()) {
    cplx a = 1.5 * kPi * v;
    if (std::abs(std::cos(a)) < 1e-12) throw PoleError("spec_density: nu_k at a pole of tan(3 pi nu / 2)");
    r *= 3.0 * v * std::tan(a);
  }
  return r;
}

namespace {

struct GridResult {
  double value = 0.0;
  double peak = 0.0;
  double shell_peak = 0.0;
  long points = 0;
};

// Trapezoid sum on the lattice h Z^2 restricted to the union of balls of
// radius rho around the centres (distance in C^3 of mu, not of t).
GridResult grid_sum(const TestFunctionParams& p, const std::vector<std::array<double, 2>>& centres,
                    double rho, double h, int threads, bool signed_density,
                    const std::function<double(const SpectralPoint&)>& weight) {
  double lo1 = 1e300, hi1 = -1e300, lo2 = 1e300, hi2 = -1e300;
  for (auto& c : centres) {
    lo1 = std::min(lo1, c[0] - rho);
    hi1 = std::max(hi1, c[0] + rho);
    lo2 = std::min(lo2, c[1] - rho);
    hi2 = std::max(hi2, c[1] + rho);
  }
  long i0 = static_cast<long>(std::floor(lo1 / h)), i1 = static_cast<long>(std::ceil(hi1 / h));
  long j0 = static_cast<long>(std::floor(lo2 / h)), j1 = static_cast<long>(std::ceil(hi2 / h));
  const double rho2 = rho * rho;
  const double shell2 = (rho - 1.5 * h) * (rho - 1.5 * h);
  struct Row {
    double sum = 0.0, peak = 0.0, shell = 0.0;
    long n = 0;
  };
  auto rows = parallel_map<Row>(static_cast<size_t>(i1 - i0 + 1), threads, [&](size_t r) {
    Row row;
    Accumulator<double> acc;
    double t1 = (i0 + static_cast<long>(r)) * h;
    for (long j = j0; j <= j1; ++j) {
      double t2 = j * h;
      double dmin = 1e300;
      for (auto& c : centres) {
        double a = t1 - c[0], b = t2 - c[1];
        dmin = std::min(dmin, a * a + b * b + (a + b) * (a + b));
      }
      if (dmin > rho2) continue;
      auto mu = SpectralPoint::imaginary(t1, t2);
      double hv = test_function_h(mu, p).real();
      double sp = spec_density(mu).real();
      double f = hv * (signed_density ? sp : std::abs(sp));
      if (weight) f *= weight(mu);
      acc.add(f);
      row.peak = std::max(row.peak, std::abs(f));
      if (dmin >= shell2) row.shell = std::max(row.shell, std::abs(f));
      ++row.n;
    }
    row.sum = acc.value();
    return row;
  });
  GridResult g;
  Accumulator<double> acc;
  for (auto& r : rows) {
    acc.add(r.sum);
    g.peak = std::max(g.peak, r.peak);
    g.shell_peak = std::max(g.shell_peak, r.shell);
    g.points += r.n;
  }
  g.value = acc.value() * h * h;
  return g;
}

std::vector<std::array<double, 2>> weyl_centres(const TestFunctionParams& p) {
  std::vector<std::array<double, 2>> centres;
  for (const auto& w : WeylElement::all()) {
    auto c = weyl_apply(w, p.mu0);
    std::array<double, 2> t{c.mu[0].imag(), c.mu[1].imag()};
    bool dup = false;
    for (auto& e : centres) dup = dup || (std::abs(e[0] - t[0]) + std::abs(e[1] - t[1]) < 1e-12);
    if (!dup) centres.push_back(t);
  }
  return centres;
}

}  // namespace

double weyl_lattice_sum(const TestFunctionParams& p, double radius, double step, int threads, bool signed_density,
                        const std::function<double(const SpectralPoint&)>& weight) {
  p.validate();
  if (!(radius > 0.0) || !(step > 0.0)) throw std::invalid_argument("weyl_lattice_sum: radius and step must be > 0");
  const double M = p.window();
  return grid_sum(p, weyl_centres(p), radius * M, step, threads, signed_density, weight).value;
}

WeylIntegralResult weyl_integral_h(const TestFunctionParams& p, double tol, int threads, bool signed_density,
                                   const std::function<double(const SpectralPoint&)>& weight) {
  p.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("weyl_integral_h: tol must be > 0");
  const double M = p.window();
  const auto centres = weyl_centres(p);
  WeylIntegralResult res;
  double R = std::sqrt(std::log(1.0 / std::min(tol, 0.5))) + 2.0;
  // Widen until the integrand on the outer shell is negligible; P^2 grows
  // polynomially, so the Gaussian radius alone is not always enough.
  double h = M / 2.0;
  GridResult g;
  for (;;) {
    g = grid_sum(p, centres, R * M, h, threads, signed_density, weight);
    if (g.shell_peak <= 1e-3 * tol * g.peak || R > 30.0) break;
    R += 1.0;
  }
  for (int it = 0; it < 6; ++it) {
    GridResult f = grid_sum(p, centres, R * M, h / 2.0, threads, signed_density, weight);
    ++res.refinements;
    double diff = std::abs(f.value - g.value);
    h /= 2.0;
    g = f;
    res.error_estimate = diff;
    if (diff <= tol * std::abs(g.value)) {
      res.converged = true;
      break;
    }
  }
  res.value = g.value;
  res.radius = R;
  res.step = h;
  res.points = g.points;
  return res;
}

}  // namespace gl3
