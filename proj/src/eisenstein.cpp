#include "gl3/eisenstein.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace gl3 {

namespace {

cplx dpow(i64 d, cplx e) { return std::exp(e * std::log(static_cast<double>(d))); }

cplx minimal_m1(const SpectralPoint& mu, i64 m) {
  cplx s = 0.0;
  for (const auto& t : divisor_triples(m)) s += dpow(t.d1, mu.mu[0]) * dpow(t.d2, mu.mu[1]) * dpow(t.d3, mu.mu[2]);
  return s;
}

// Smallest-prime-factor sieve up to n.
std::vector<i64> spf_sieve(i64 n) {
  std::vector<i64> spf(static_cast<size_t>(n + 1), 0);
  for (i64 i = 2; i <= n; ++i)
    if (spf[i] == 0)
      for (i64 j = i; j <= n; j += i)
        if (spf[j] == 0) spf[j] = i;
  return spf;
}

// Fills a multiplicative table from prime-power values pp(p, k).
template <typename F>
std::vector<cplx> multiplicative_table(i64 max_n, F&& pp) {
  std::vector<cplx> t(static_cast<size_t>(max_n + 1), 0.0);
  if (max_n >= 1) t[1] = 1.0;
  auto spf = spf_sieve(max_n);
  for (i64 n = 2; n <= max_n; ++n) {
    i64 p = spf[n], q = n, k = 0;
    while (q % p == 0) {
      q /= p;
      ++k;
    }
    t[n] = pp(p, k) * t[q];
  }
  return t;
}

}  // namespace

TableFormatError::TableFormatError(int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

CoefficientSource CoefficientSource::from_stream(std::istream& in) {
  CoefficientSource src;
  src.kind_ = Kind::FileTable;
  src.lambda_.assign(1, 0.0);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream ss(line);
    if (line[0] == '#') {
      std::string hash, key;
      ss >> hash >> key;
      if (hash != "#") continue;
      if (key == "mu_g") {
        double re, im;
        if (!(ss >> re >> im)) throw TableFormatError(lineno, "mu_g needs two numbers");
        src.mu_g_ = {re, im};
      } else if (key == "L_ad") {
        if (!(ss >> src.L_ad_) || !(src.L_ad_ > 0.0)) throw TableFormatError(lineno, "L_ad needs a positive number");
        src.has_L_ad_ = true;
      } else if (key == "norm") {
        if (!(ss >> src.norm_) || !(src.norm_ > 0.0)) throw TableFormatError(lineno, "norm needs a positive number");
      } else {
        continue;
      }
      std::string extra;
      if (ss >> extra) throw TableFormatError(lineno, "trailing text after header '" + key + "'");
      continue;
    }
    if (line.find('\t') == std::string::npos) throw TableFormatError(lineno, "expected tab-separated n, re, im");
    i64 n;
    double re, im;
    if (!(ss >> n >> re >> im)) throw TableFormatError(lineno, "expected n, re, im");
    std::string extra;
    if (ss >> extra) throw TableFormatError(lineno, "trailing text");
    if (n != src.max_n() + 1)
      throw TableFormatError(lineno, "index " + std::to_string(n) + " out of sequence (expected " +
                                         std::to_string(src.max_n() + 1) + ")");
    if (!std::isfinite(re) || !std::isfinite(im)) throw TableFormatError(lineno, "non-finite value");
    if (n == 1 && (re != 1.0 || im != 0.0)) throw TableFormatError(lineno, "lambda(1) must be 1");
    src.lambda_.push_back({re, im});
    double bound = static_cast<double>(divisors(n).size()) * std::pow(static_cast<double>(n), kKimSarnak + 0.01);
    if (std::abs(cplx(re, im)) > bound) throw TableFormatError(lineno, "value violates the Kim-Sarnak bound");
  }
  if (src.max_n() < 1) throw TableFormatError(lineno, "table has no rows");
  return src;
}

CoefficientSource CoefficientSource::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open coefficient table '" + path + "'");
  return from_stream(f);
}

CoefficientSource CoefficientSource::synthetic(std::uint64_t seed, i64 max_n, double mu_g_imag) {
  if (max_n < 1) throw std::invalid_argument("synthetic source: max_n must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  // One draw per prime in increasing order keeps tables of different length consistent.
  std::vector<double> cos_theta(static_cast<size_t>(max_n + 1), 0.0);
  auto spf = spf_sieve(max_n);
  for (i64 p = 2; p <= max_n; ++p)
    if (spf[p] == p) {
      double dp = static_cast<double>(p);
      double c = std::min({1.0, 0.5 * std::pow(dp, kKimSarnak), std::sqrt(1.0 - std::pow(dp, -4.0 * kKimSarnak))});
      cos_theta[p] = c * u(rng);
    }
  CoefficientSource src;
  src.kind_ = Kind::Synthetic;
  src.mu_g_ = {0.0, mu_g_imag};
  src.L_ad_ = 1.0;
  src.has_L_ad_ = true;
  src.lambda_ = multiplicative_table(max_n, [&](i64 p, i64 k) {
    // lambda(p^k) = U_k(cos theta)
    double x = cos_theta[p];
    double a = 1.0, b = 2.0 * x;
    for (i64 j = 1; j < k; ++j) {
      double c = 2.0 * x * b - a;
      a = b;
      b = c;
    }
    return cplx(b, 0.0);
  });
  return src;
}

cplx CoefficientSource::lambda(i64 n) const {
  if (n < 1) throw std::invalid_argument("lambda: n must be >= 1");
  if (n > max_n())
    throw InsufficientData("insufficient coefficient data: lambda(" + std::to_string(n) + ") requested, table ends at " +
                           std::to_string(max_n()));
  return lambda_[n];
}

double CoefficientSource::kim_sarnak_ratio(double slack) const {
  double worst = 0.0;
  for (i64 n = 1; n <= max_n(); ++n) {
    double b = static_cast<double>(divisors(n).size()) * std::pow(static_cast<double>(n), kKimSarnak + slack);
    worst = std::max(worst, std::abs(lambda_[n]) / b);
  }
  return worst;
}

cplx coeff_minimal(const SpectralPoint& mu, i64 m, i64 n) {
  if (m < 1 || n < 1) throw std::invalid_argument("coeff_minimal: indices must be >= 1");
  const SpectralPoint dual = -mu;
  cplx s = 0.0;
  for (i64 d : divisors(gcd(m, n))) {
    int md = mobius(d);
    if (md == 0) continue;
    s += static_cast<double>(md) * minimal_m1(mu, m / d) * minimal_m1(dual, n / d);
  }
  return s;
}

cplx coeff_maximal(cplx mu, const CoefficientSource& g, i64 m, i64 n) {
  if (m < 1 || n < 1) throw std::invalid_argument("coeff_maximal: indices must be >= 1");
  auto b_m1 = [&](i64 k) {
    cplx s = 0.0;
    for (i64 d1 : divisors(k)) s += g.lambda(d1) * dpow(d1, mu) * dpow(k / d1, -2.0 * mu);
    return s;
  };
  auto b_1n = [&](i64 k) {
    cplx s = 0.0;
    for (i64 d1 : divisors(k)) s += std::conj(g.lambda(d1)) * dpow(d1, -mu) * dpow(k / d1, 2.0 * mu);
    return s;
  };
  cplx s = 0.0;
  for (i64 d : divisors(gcd(m, n))) {
    int md = mobius(d);
    if (md == 0) continue;
    s += static_cast<double>(md) * b_m1(m / d) * b_1n(n / d);
  }
  return s;
}

double norm_minimal(const SpectralPoint& mu) {
  double r = 1.0 / 16.0;
  for (auto& v : mu.nu()) {
    if (std::abs(v) == 0.0) throw PoleError("norm_minimal: nu_k = 0 puts zeta at its pole");
    r *= std::norm(zeta(1.0 + 3.0 * v));
  }
  return r;
}

NormResult norm_maximal(cplx mu, const CoefficientSource& g, double L_ad, i64 cutoff, double tol) {
  if (L_ad <= 0.0) L_ad = g.L_ad();
  if (!(L_ad > 0.0)) throw std::invalid_argument("norm_maximal: L(1, Ad^2 g) must be positive");
  i64 X = cutoff > 0 ? cutoff : g.max_n();
  if (X > g.max_n()) g.lambda(X);  // throws InsufficientData
  if (X < 2) throw InsufficientData("insufficient coefficient data: need at least two coefficients");
  const cplx e = -1.0 - 3.0 * mu;
  cplx half = 0.0, full = 0.0;
  // plain running sum in increasing n; the terms are O(n^{-1+7/64}) with no
  // large cancellation, so compensation buys nothing here
  for (i64 n = 1; n <= X; ++n) {
    full += g.lambda(n) * dpow(n, e);
    if (n == X / 2) half = full;
  }
  NormResult r;
  r.cutoff = X;
  r.L_value = full;
  r.value = 8.0 * L_ad * std::norm(full);
  double dL = std::abs(full - half);
  r.error_estimate = 8.0 * L_ad * (2.0 * std::abs(full) * dL + dL * dL);
  if (r.error_estimate > tol * r.value)
    throw InsufficientData("insufficient coefficient data: partial sums of L(1+3mu, g) not settled at X = " +
                           std::to_string(X));
  return r;
}

SyntheticGl3Source::SyntheticGl3Source(std::uint64_t seed, i64 max_n) {
  if (max_n < 1) throw std::invalid_argument("SyntheticGl3Source: max_n must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  auto spf = spf_sieve(max_n);
  std::vector<std::array<cplx, 3>> alpha(static_cast<size_t>(max_n + 1));
  for (i64 p = 2; p <= max_n; ++p)
    if (spf[p] == p) {
      double a = u(rng), b = u(rng);
      alpha[p] = {std::polar(1.0, a), std::polar(1.0, b), std::polar(1.0, -a - b)};
    }
  a_ = multiplicative_table(max_n, [&](i64 p, i64 k) {
    // h_k(x, y, z) = sum_{i + j <= k} x^i y^j z^{k-i-j}
    auto& al = alpha[p];
    cplx s = 0.0;
    for (i64 i = 0; i <= k; ++i)
      for (i64 j = 0; i + j <= k; ++j)
        s += std::pow(al[0], static_cast<double>(i)) * std::pow(al[1], static_cast<double>(j)) *
             std::pow(al[2], static_cast<double>(k - i - j));
    return s;
  });
}

cplx SyntheticGl3Source::A(i64 m, i64 n) const {
  if (m < 1 || n < 1) throw std::invalid_argument("SyntheticGl3Source: indices must be >= 1");
  if (m > max_n() || n > max_n())
    throw InsufficientData("insufficient coefficient data: synthetic GL(3) table ends at " + std::to_string(max_n()));
  cplx s = 0.0;
  for (i64 d : divisors(gcd(m, n))) {
    int md = mobius(d);
    if (md == 0) continue;
    s += static_cast<double>(md) * a_[m / d] * std::conj(a_[n / d]);
  }
  return s;
}

}  // namespace gl3
