#include "gl3/trace_terms.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gl3/kloosterman.hpp"
#include "gl3/numeric.hpp"

namespace gl3 {

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  s.erase(std::remove(s.begin(), s.end(), '_'), s.end());
  return s;
}

// h or h_2 at mu.
double test_weight(const TraceTermRequest& r, const SpectralPoint& mu) {
  double h = test_function_h(mu, r.test).real();
  if (r.moment == Moment::Second && h != 0.0) {
    auto w = afe_weight_W_N(double(r.m1) * double(r.m2), mu, r.afe, ContourSpec::vertical(1.0, 1e-12));
    h *= w.value.real();
  }
  return h;
}

PhiOptions phi_options(const TraceTermRequest& r) {
  PhiOptions o;
  o.tol = r.tol;
  o.threads = r.threads;
  o.budget = r.budget;
  if (r.moment == Moment::Second) {
    const double y = double(r.m1) * double(r.m2);
    AfeParams a = r.afe;
    o.weight = [y, a](const SpectralPoint& mu) {
      return afe_weight_W_N(y, mu, a, ContourSpec::vertical(1.0, 1e-12)).value;
    };
  }
  return o;
}

void guard_tuples(const TraceTermRequest& r, long n, const char* term) {
  if (n > r.max_tuples) {
    std::ostringstream os;
    os << term << ": " << n << " Phi evaluations exceed max_tuples = " << r.max_tuples;
    throw CostGuardError(os.str());
  }
}

TraceTermResult assemble_delta(const TraceTermRequest& r) {
  TraceTermResult out;
  if (r.n1 != r.m1 || r.n2 != r.m2) {
    out.log.push_back("index mismatch: Delta vanishes");
    return out;
  }
  std::function<double(const SpectralPoint&)> w;
  if (r.moment == Moment::Second) {
    const double y = double(r.m1) * double(r.m2);
    AfeParams a = r.afe;
    w = [y, a](const SpectralPoint& mu) {
      return afe_weight_W_N(y, mu, a, ContourSpec::vertical(1.0, 1e-12)).value.real();
    };
  }
  auto I = weyl_integral_h(r.test, r.tol, r.threads, false, w);
  const double pref = 1.0 / (192.0 * std::pow(kPi, 5));
  out.value = pref * I.value;
  out.error_estimate = pref * I.error_estimate;
  out.tuples = I.points;
  std::ostringstream os;
  os << "weyl integral " << I.value << " on " << I.points << " points, converged " << I.converged;
  out.log.push_back(os.str());
  return out;
}

TraceTermResult assemble_sigma45(const TraceTermRequest& r, bool four) {
  TraceTermResult out;
  auto pairs = four ? sigma4_moduli(r.m2, r.n1, r.d_max) : sigma5_moduli(r.m1, r.n2, r.d_max);
  {
    std::ostringstream os;
    os << pairs.size() << " moduli pairs with max(D1, D2) <= " << r.d_max;
    out.log.push_back(os.str());
  }
  guard_tuples(r, 2 * static_cast<long>(pairs.size()), four ? "Sigma4" : "Sigma5");
  const PhiOptions opt = phi_options(r);
  Accumulator<cplx> acc;
  for (auto& pr : pairs)
    for (int eps : {1, -1}) {
      KloostermanQuery q;
      double y;
      if (four) {
        q.n1 = -eps * r.n2, q.n2 = r.m2, q.m1 = r.m1, q.D1 = pr.D2, q.D2 = pr.D1;
        y = eps * double(r.m1) * double(r.m2) * double(r.n2) / (double(pr.D1) * double(pr.D2));
      } else {
        q.n1 = eps * r.n1, q.n2 = r.m1, q.m1 = r.m2, q.D1 = pr.D1, q.D2 = pr.D2;
        y = eps * double(r.n1) * double(r.m1) * double(r.m2) / (double(pr.D1) * double(pr.D2));
      }
      cplx S = kloosterman_tilde_value(q);
      ++out.tuples;
      std::ostringstream os;
      os << "eps " << eps << " D1 " << pr.D1 << " D2 " << pr.D2 << " S " << S.real() << "+" << S.imag() << "i";
      if (std::abs(S) < 1e-9) {
        os << " (zero, Phi skipped)";
        out.log.push_back(os.str());
        continue;
      }
      auto phi = phi_transform(four ? PhiKind::W4 : PhiKind::W5, y, 0.0, r.test, opt);
      const double dd = double(pr.D1) * double(pr.D2);
      acc.add(S * phi.value / dd);
      out.error_estimate += std::abs(S) * phi.error_estimate / dd;
      out.panels += phi.panels_used;
      os << " y " << y << " Phi " << phi.value.real() << "+" << phi.value.imag() << "i";
      out.log.push_back(os.str());
    }
  out.value = acc.value();
  return out;
}

TraceTermResult assemble_sigma6(const TraceTermRequest& r) {
  TraceTermResult out;
  const double a = double(r.m1) * double(r.n2), b = double(r.m2) * double(r.n1);
  const i64 c1 = std::min(sigma6_d1_bound(a, b, r.test.T, r.eps), r.d_max);
  const i64 c2 = std::min(sigma6_d2_bound(a, b, r.test.T, r.eps), r.d_max);
  {
    std::ostringstream os;
    os << "survival: D1 <= " << c1 << ", D2 <= " << c2 << " (a = " << a << ", b = " << b << ", T^{1-eps} = "
       << std::pow(r.test.T, 1.0 - r.eps) << ")";
    out.log.push_back(os.str());
  }
  const long n = 4 * static_cast<long>(c1) * static_cast<long>(c2);
  if (n == 0) {
    out.log.push_back("admissible moduli set is empty");
    return out;
  }
  guard_tuples(r, n, "Sigma6");
  const PhiOptions opt = phi_options(r);
  Accumulator<cplx> acc;
  for (i64 D1 = 1; D1 <= c1; ++D1)
    for (i64 D2 = 1; D2 <= c2; ++D2)
      for (int e1 : {1, -1})
        for (int e2 : {1, -1}) {
          KloostermanQuery q;
          q.n1 = e2 * r.n2, q.m2 = e1 * r.n1, q.m1 = r.m1, q.n2 = r.m2, q.D1 = D1, q.D2 = D2;
          cplx S = kloosterman_long_value(q);
          ++out.tuples;
          if (std::abs(S) < 1e-9) continue;
          double y1 = -e2 * double(r.m1) * double(r.n2) * double(D2) / (double(D1) * double(D1));
          double y2 = -e1 * double(r.m2) * double(r.n1) * double(D1) / (double(D2) * double(D2));
          auto phi = phi_transform(PhiKind::W6, y1, y2, r.test, opt);
          const double dd = double(D1) * double(D2);
          acc.add(S * phi.value / dd);
          out.error_estimate += std::abs(S) * phi.error_estimate / dd;
          out.panels += phi.panels_used;
        }
  out.value = acc.value();
  return out;
}

// Trapezoid on a (t1, t2) box around the Weyl images of mu0, halved until
// two successive sums agree to tol.
TraceTermResult assemble_emin(const TraceTermRequest& r) {
  TraceTermResult out;
  auto base = weyl_integral_h(r.test, std::max(r.tol, 1e-8), 1);
  const double rho = base.radius * r.test.window();
  double lo1 = 1e300, hi1 = -1e300, lo2 = 1e300, hi2 = -1e300;
  for (const auto& w : WeylElement::all()) {
    auto c = weyl_apply(w, r.test.mu0);
    lo1 = std::min(lo1, c.mu[0].imag() - rho);
    hi1 = std::max(hi1, c.mu[0].imag() + rho);
    lo2 = std::min(lo2, c.mu[1].imag() - rho);
    hi2 = std::max(hi2, c.mu[1].imag() + rho);
  }
  auto f = [&](double t1, double t2) -> cplx {
    auto mu = SpectralPoint::imaginary(t1, t2);
    double h = test_weight(r, mu);
    if (h == 0.0) return 0.0;
    double N;
    try {
      N = norm_minimal(mu);
    } catch (const PoleError&) {
      return 0.0;  // 1/N_mu vanishes where some nu_k = 0
    }
    return h / N * std::conj(coeff_minimal(mu, r.m1, r.m2)) * coeff_minimal(mu, r.n1, r.n2);
  };
  auto sum = [&](double h) {
    long i0 = static_cast<long>(std::floor(lo1 / h)), i1 = static_cast<long>(std::ceil(hi1 / h));
    long j0 = static_cast<long>(std::floor(lo2 / h)), j1 = static_cast<long>(std::ceil(hi2 / h));
    auto rows = parallel_map<cplx>(static_cast<size_t>(i1 - i0 + 1), r.threads, [&](size_t k) {
      Accumulator<cplx> acc;
      for (long j = j0; j <= j1; ++j) acc.add(f((i0 + static_cast<long>(k)) * h, j * h));
      return acc.value();
    });
    Accumulator<cplx> acc;
    for (auto& v : rows) acc.add(v);
    out.tuples = (i1 - i0 + 1) * (j1 - j0 + 1);
    return acc.value() * h * h;
  };
  double h = base.step * 2.0;
  cplx prev = sum(h);
  for (int it = 0; it < 4; ++it) {
    h /= 2.0;
    cplx cur = sum(h);
    out.error_estimate = std::abs(cur - prev);
    prev = cur;
    if (out.error_estimate <= r.tol * std::abs(cur)) break;
  }
  const double pref = 1.0 / (96.0 * kPi * kPi);
  out.value = pref * prev;
  out.error_estimate *= pref;
  std::ostringstream os;
  os << "box [" << lo1 << ", " << hi1 << "] x [" << lo2 << ", " << hi2 << "], step " << h;
  out.log.push_back(os.str());
  return out;
}

TraceTermResult assemble_emax(const TraceTermRequest& r) {
  TraceTermResult out;
  if (r.gl2.empty()) throw InsufficientData("E_max: no GL(2) coefficient sources");
  double tmax = 0.0;
  for (auto& m : r.test.mu0.mu) tmax = std::max(tmax, std::abs(m));
  auto base = weyl_integral_h(r.test, std::max(r.tol, 1e-8), 1);
  tmax += base.radius * r.test.window();
  Accumulator<cplx> total;
  for (size_t gi = 0; gi < r.gl2.size(); ++gi) {
    const auto& g = r.gl2[gi];
    const cplx mg = g.mu_g();
    auto f = [&](double t) -> cplx {
      cplx mu(0.0, t);
      SpectralPoint sp{{mu + mg, mu - mg, -2.0 * mu}};
      double h = test_weight(r, sp);
      if (h == 0.0) return 0.0;
      auto N = norm_maximal(mu, g);
      return h / N.value * std::conj(coeff_maximal(mu, g, r.m1, r.m2)) * coeff_maximal(mu, g, r.n1, r.n2);
    };
    auto sum = [&](double h) {
      long k0 = static_cast<long>(std::floor(-tmax / h)), k1 = static_cast<long>(std::ceil(tmax / h));
      auto vals = parallel_map<cplx>(static_cast<size_t>(k1 - k0 + 1), r.threads,
                                     [&](size_t k) { return f((k0 + static_cast<long>(k)) * h); });
      Accumulator<cplx> acc;
      for (auto& v : vals) acc.add(v);
      out.tuples += k1 - k0 + 1;
      return acc.value() * h;
    };
    double h = base.step * 2.0;
    cplx prev = sum(h);
    double err = 0.0;
    for (int it = 0; it < 5; ++it) {
      h /= 2.0;
      cplx cur = sum(h);
      err = std::abs(cur - prev);
      prev = cur;
      if (err <= r.tol * std::abs(cur)) break;
    }
    total.add(prev / (2.0 * kPi));
    out.error_estimate += err / (2.0 * kPi);
    std::ostringstream os;
    os << "source " << gi << ": mu_g " << mg.imag() << "i, |t| <= " << tmax << ", step " << h;
    out.log.push_back(os.str());
  }
  out.value = total.value();
  return out;
}

}  // namespace

std::string to_string(Moment m) { return m == Moment::First ? "first" : "second"; }

std::string to_string(TermKind t) {
  switch (t) {
    case TermKind::Delta: return "Delta";
    case TermKind::Sigma4: return "Sigma4";
    case TermKind::Sigma5: return "Sigma5";
    case TermKind::Sigma6: return "Sigma6";
    case TermKind::EMin: return "E_min";
    case TermKind::EMax: return "E_max";
  }
  return "?";
}

Moment moment_from_string(const std::string& s) {
  auto l = lower(s);
  if (l == "first" || l == "1") return Moment::First;
  if (l == "second" || l == "2") return Moment::Second;
  throw std::invalid_argument("unknown moment: " + s);
}

TermKind term_from_string(const std::string& s) {
  auto l = lower(s);
  if (l == "delta") return TermKind::Delta;
  if (l == "sigma4") return TermKind::Sigma4;
  if (l == "sigma5") return TermKind::Sigma5;
  if (l == "sigma6") return TermKind::Sigma6;
  if (l == "emin") return TermKind::EMin;
  if (l == "emax") return TermKind::EMax;
  throw std::invalid_argument("unknown term: " + s);
}

std::vector<ModuliPair> sigma4_moduli(i64 m2, i64 n1, i64 d_max) {
  if (m2 < 1 || n1 < 1 || d_max < 1) throw std::invalid_argument("sigma4_moduli: arguments must be positive");
  std::vector<ModuliPair> out;
  for (i64 D2 = 1; D2 <= d_max; ++D2) {
    i64 num = n1 * D2 * D2;
    if (num / m2 > d_max) break;
    if (num % m2) continue;
    i64 D1 = num / m2;
    if (D1 % D2) continue;
    out.push_back({D1, D2});
  }
  return out;
}

std::vector<ModuliPair> sigma5_moduli(i64 m1, i64 n2, i64 d_max) {
  auto p = sigma4_moduli(m1, n2, d_max);
  for (auto& x : p) std::swap(x.D1, x.D2);
  return p;
}

std::vector<ModuliPair> sigma4_moduli_brute(i64 m2, i64 n1, i64 d_max) {
  std::vector<ModuliPair> out;
  for (i64 D2 = 1; D2 <= d_max; ++D2)
    for (i64 D1 = 1; D1 <= d_max; ++D1)
      if (D1 % D2 == 0 && m2 * D1 == n1 * D2 * D2) out.push_back({D1, D2});
  return out;
}

std::vector<ModuliPair> sigma5_moduli_brute(i64 m1, i64 n2, i64 d_max) {
  std::vector<ModuliPair> out;
  for (i64 D1 = 1; D1 <= d_max; ++D1)
    for (i64 D2 = 1; D2 <= d_max; ++D2)
      if (D2 % D1 == 0 && m1 * D2 == n2 * D1 * D1) out.push_back({D1, D2});
  return out;
}

i64 sigma6_d1_bound(double a, double b, double T, double eps) {
  double v = std::pow(a, 2.0 / 3.0) * std::pow(b, 1.0 / 3.0) / std::pow(T, 2.0 - 2.0 * eps);
  return static_cast<i64>(std::floor(v * (1.0 + 1e-12)));
}

i64 sigma6_d2_bound(double a, double b, double T, double eps) { return sigma6_d1_bound(b, a, T, eps); }

Sigma6Survival sigma6_survival(double T, double L, double eps, double product_max) {
  if (!(T > 1.0) || !(L >= 1.0) || !(eps > 0.0 && eps < 1.0) || !(product_max >= 1.0))
    throw std::invalid_argument("sigma6_survival: bad arguments");
  Sigma6Survival s;
  s.T = T, s.L = L, s.eps = eps, s.product_max = product_max;
  const double target = std::pow(T, 1.0 - eps);
  const i64 lmax = static_cast<i64>(std::floor(L + 1e-9));
  const i64 P = static_cast<i64>(std::floor(product_max + 1e-9));
  for (i64 l1 = 1; l1 <= lmax; ++l1)
    for (i64 l2 = 1; l2 <= lmax; ++l2)
      for (i64 m1 = 1; m1 * l1 * l2 <= P; ++m1)
        for (i64 m2 = 1; m1 * m2 * l1 * l2 <= P; ++m2) {
          ++s.tuples;
          const double a = double(m1 * l2), b = double(m2 * l1);
          double margin = std::min(std::cbrt(a) * std::pow(b, 1.0 / 6.0), std::pow(a, 1.0 / 6.0) * std::cbrt(b)) / target;
          s.best_margin = std::max(s.best_margin, margin);
          i64 c1 = sigma6_d1_bound(a, b, T, eps), c2 = sigma6_d2_bound(a, b, T, eps);
          if (c1 > 0 && c2 > 0) {
            ++s.admissible_tuples;
            s.admissible_pairs += static_cast<long>(c1 * c2);
            if (s.log.size() < 20) {
              std::ostringstream os;
              os << "survivor l1 " << l1 << " l2 " << l2 << " m1 " << m1 << " m2 " << m2 << ": D1 <= " << c1
                 << ", D2 <= " << c2;
              s.log.push_back(os.str());
            }
          }
        }
  std::ostringstream os;
  os << s.tuples << " tuples (l1, l2 <= " << lmax << ", m1 m2 l1 l2 <= " << P << "), " << s.admissible_tuples
     << " admissible, " << s.admissible_pairs << " moduli pairs; best margin " << s.best_margin
     << " of T^{1-eps} = " << target << " at D1 = D2 = 1";
  s.log.insert(s.log.begin(), os.str());
  return s;
}

TraceTermRequest TraceTermRequest::first(i64 l, i64 m, const TestFunctionParams& p) {
  TraceTermRequest r;
  r.moment = Moment::First;
  r.n1 = l, r.n2 = 1, r.m1 = 1, r.m2 = m;
  r.test = p;
  return r;
}

TraceTermRequest TraceTermRequest::second(i64 l1, i64 l2, i64 m1, i64 m2, const TestFunctionParams& p) {
  TraceTermRequest r;
  r.moment = Moment::Second;
  r.n1 = l1, r.n2 = l2, r.m1 = m1, r.m2 = m2;
  r.test = p;
  return r;
}

void TraceTermRequest::validate() const {
  if (n1 < 1 || n2 < 1 || m1 < 1 || m2 < 1) throw std::invalid_argument("TraceTermRequest: indices must be positive");
  if (d_max < 1) throw std::invalid_argument("TraceTermRequest: d_max must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("TraceTermRequest: tol must be > 0");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("TraceTermRequest: eps must lie in (0, 1)");
  test.validate();
  afe.validate();
}

TraceTermResult trace_term(const TraceTermRequest& request, TermKind term) {
  request.validate();
  TraceTermResult out;
  switch (term) {
    case TermKind::Delta: out = assemble_delta(request); break;
    case TermKind::Sigma4: out = assemble_sigma45(request, true); break;
    case TermKind::Sigma5: out = assemble_sigma45(request, false); break;
    case TermKind::Sigma6: out = assemble_sigma6(request); break;
    case TermKind::EMin: out = assemble_emin(request); break;
    case TermKind::EMax: out = assemble_emax(request); break;
  }
  const double M = request.test.window(), T = request.test.T;
  out.ratio_T3M2 = std::abs(out.value) / (T * T * T * M * M);
  return out;
}

}  // namespace gl3
