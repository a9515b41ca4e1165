#include "gl3/arith.hpp"

#include <cmath>
#include <algorithm>
#include <cstdlib>
#include <numbers>

#include "gl3/numeric.hpp"

namespace gl3 {

i64 gcd(i64 a, i64 b) {
  a = std::llabs(a);
  b = std::llabs(b);
  while (b) {
    i64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

i64 lcm(i64 a, i64 b) {
  if (a == 0 || b == 0) return 0;
  return std::llabs(a / gcd(a, b) * b);
}

std::vector<std::pair<i64, int>> factorize(i64 n) {
  if (n < 1) throw std::domain_error("factorize: n must be positive");
  std::vector<std::pair<i64, int>> f;
  auto take = [&](i64 p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) f.emplace_back(p, e);
  };
  take(2);
  take(3);
  for (i64 p = 5; p * p <= n; p += 6) {
    take(p);
    take(p + 2);
  }
  if (n > 1) f.emplace_back(n, 1);
  return f;
}

int mobius(i64 n) {
  if (n < 1) throw std::domain_error("mobius: n must be positive");
  int s = 1;
  for (auto [p, e] : factorize(n)) {
    if (e > 1) return 0;
    s = -s;
  }
  return s;
}

bool is_squarefree(i64 n) { return mobius(n) != 0; }

i64 euler_phi(i64 n) {
  i64 r = n;
  for (auto [p, e] : factorize(n)) r = r / p * (p - 1);
  return r;
}

std::vector<i64> divisors(i64 n) {
  std::vector<i64> d{1};
  for (auto [p, e] : factorize(n)) {
    size_t sz = d.size();
    i64 pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (size_t i = 0; i < sz; ++i) d.push_back(d[i] * pk);
    }
  }
  std::sort(d.begin(), d.end());
  return d;
}

std::vector<Triple> divisor_triples(i64 m) {
  if (m < 1) throw std::domain_error("divisor_triples: m must be positive");
  std::vector<Triple> out;
  auto ds = divisors(m);
  for (i64 a : ds)
    for (i64 b : divisors(m / a)) out.push_back({a, b, m / a / b});
  return out;
}

i64 tau3(i64 m) {
  i64 t = 1;
  for (auto [p, e] : factorize(m)) t *= (static_cast<i64>(e) + 1) * (e + 2) / 2;
  return t;
}

i64 ext_gcd(i64 a, i64 b, i64& x, i64& y) {
  i64 x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    i64 q = a / b;
    i64 t = a - q * b;
    a = b;
    b = t;
    t = x0 - q * x1;
    x0 = x1;
    x1 = t;
    t = y0 - q * y1;
    y0 = y1;
    y1 = t;
  }
  if (a < 0) {
    a = -a;
    x0 = -x0;
    y0 = -y0;
  }
  x = x0;
  y = y0;
  return a;
}

i64 mod_inverse(i64 a, i64 q) {
  if (q < 1) throw std::domain_error("mod_inverse: modulus must be positive");
  if (q == 1) return 0;
  i64 x, y;
  i64 g = ext_gcd(mod(a, q), q, x, y);
  if (g != 1) throw NotInvertible("mod_inverse: gcd(a, q) > 1");
  return mod(x, q);
}

RationalPhase::RationalPhase(i64 num, i64 den) {
  if (den < 1) throw std::domain_error("RationalPhase: denominator must be positive");
  num = mod(num, den);
  i64 g = gcd(num, den);
  if (num == 0) {
    numerator = 0;
    denominator = 1;
  } else {
    numerator = num / g;
    denominator = den / g;
  }
}

std::complex<double> RationalPhase::value() const {
  double a = 2.0 * std::numbers::pi * static_cast<double>(numerator) / static_cast<double>(denominator);
  return {std::cos(a), std::sin(a)};
}

ExactSum::ExactSum(i64 modulus) : q_(modulus) {
  if (modulus < 1) throw std::domain_error("ExactSum: modulus must be positive");
  c_.assign(static_cast<size_t>(modulus), 0);
}

void ExactSum::add(const RationalPhase& phase, i64 multiplicity) {
  if (q_ % phase.denominator != 0) throw std::domain_error("ExactSum: phase denominator does not divide modulus");
  add_index(phase.numerator * (q_ / phase.denominator), multiplicity);
}

void ExactSum::add(const ExactSum& other) {
  if (q_ % other.q_ != 0) throw std::domain_error("ExactSum: incompatible moduli");
  i64 step = q_ / other.q_;
  for (i64 k = 0; k < other.q_; ++k)
    if (other.c_[k]) c_[k * step] += other.c_[k];
}

std::vector<std::pair<RationalPhase, i64>> ExactSum::terms() const {
  std::vector<std::pair<RationalPhase, i64>> t;
  for (i64 k = 0; k < q_; ++k)
    if (c_[k]) t.emplace_back(RationalPhase(k, q_), c_[k]);
  return t;
}

i64 ExactSum::term_count() const {
  i64 n = 0;
  for (i64 v : c_) n += std::llabs(v);
  return n;
}

std::vector<i64> ExactSum::reduced() const {
  std::vector<i64> c = c_;
  const i64 Q = q_;
  for (auto [p, e] : factorize(Q)) {
    i64 qi = 1;
    for (int j = 0; j < e; ++j) qi *= p;
    // Component exponent of k along this factor is k * a mod qi with
    // a = (Q/qi)^{-1} mod qi; its top base-p digit must stay <= p-2.
    i64 a = mod_inverse(Q / qi, qi);
    i64 block = qi / p;
    i64 shift = Q / p;
    for (i64 k = 0; k < Q; ++k) {
      if (c[k] == 0) continue;
      i64 comp = (k % qi) * a % qi;
      if (comp / block != p - 1) continue;
      i64 v = c[k];
      c[k] = 0;
      for (i64 j = 1; j < p; ++j) c[(k + j * shift) % Q] -= v;
    }
  }
  return c;
}

bool ExactSum::is_zero() const {
  for (i64 v : reduced())
    if (v) return false;
  return true;
}

std::optional<i64> ExactSum::as_integer() const {
  auto r = reduced();
  for (size_t k = 1; k < r.size(); ++k)
    if (r[k]) return std::nullopt;
  return r[0];
}

std::complex<double> ExactSum::evaluate() const {
  Accumulator<std::complex<double>> acc;
  for (i64 k = 0; k < q_; ++k) {
    if (!c_[k]) continue;
    double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(q_);
    acc.add(static_cast<double>(c_[k]) * std::complex<double>(std::cos(ang), std::sin(ang)));
  }
  return acc.value();
}

}  // namespace gl3
