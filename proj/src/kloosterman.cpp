#include "gl3/kloosterman.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gl3/numeric.hpp"

namespace gl3 {

namespace {

std::complex<double> e_frac(i64 num, i64 den) {
  double a = 2.0 * std::numbers::pi * static_cast<double>(mod(num, den)) / static_cast<double>(den);
  return {std::cos(a), std::sin(a)};
}

void check_moduli(const KloostermanQuery& q) {
  if (q.D1 < 1 || q.D2 < 1) throw std::invalid_argument("Kloosterman: moduli must be >= 1");
}

// Inverse table mod n for units, 0 elsewhere.
std::vector<i64> inverse_table(i64 n) {
  std::vector<i64> inv(static_cast<size_t>(n), 0);
  for (i64 a = 0; a < n; ++a)
    if (gcd(a, n) == 1) inv[a] = mod_inverse(a, n);
  return inv;
}

}  // namespace

std::pair<i64, i64> solve_yz(i64 B, i64 C, i64 D, YZPolicy policy) {
  if (D == 1) return {0, 0};
  B = mod(B, D);
  C = mod(C, D);
  if (gcd(gcd(B, C), D) != 1) throw std::logic_error("solve_yz: (B, C, D) != 1");
  if (policy == YZPolicy::UnitFirst) {
    if (gcd(C, D) == 1) return {0, mod_inverse(C, D)};
    if (gcd(B, D) == 1) return {mod_inverse(B, D), 0};
  }
  if (policy != YZPolicy::Search) {
    i64 u, v;
    i64 g = ext_gcd(B, C, u, v);  // g = gcd(B, C), coprime to D
    i64 w = mod_inverse(g, D);
    return {mod(mod(u, D) * w, D), mod(mod(v, D) * w, D)};
  }
  i64 g = gcd(C, D);
  i64 Dg = D / g;
  i64 Cinv = mod_inverse(C / g, Dg);
  for (i64 Y = D - 1; Y >= 0; --Y) {
    i64 rhs = mod(1 - Y * B, D);
    if (rhs % g) continue;
    i64 Z = mod((rhs / g) % Dg * Cinv, Dg);
    return {Y, Z};
  }
  throw std::logic_error("solve_yz: no solution");
}

ExactSum kloosterman_tilde(const KloostermanQuery& q) {
  check_moduli(q);
  const i64 D1 = q.D1, D2 = q.D2;
  if (D2 % D1 != 0) throw std::invalid_argument("kloosterman_tilde: requires D1 | D2");
  const i64 r = D2 / D1;
  ExactSum sum(D2);
  auto inv1 = inverse_table(D1);
  auto inv2 = inverse_table(r);
  const i64 n1 = mod(q.n1, D1), n2 = mod(q.n2, D1), m1 = mod(q.m1, r);
  for (i64 C1 = 0; C1 < D1; ++C1) {
    if (D1 > 1 && inv1[C1] == 0) continue;
    const i64 a = n2 * inv1[C1] % D1;    // coefficient of C2 / D1
    const i64 base = n1 * C1 % D1 * r;   // n1 C1 / D1 in units of 1/D2
    for (i64 C2 = 0; C2 < D2; ++C2) {
      const i64 c2r = C2 % r;
      if (r > 1 && inv2[c2r] == 0) continue;
      i64 k = base + a * (C2 % D1) % D1 * r + m1 * inv2[c2r] % r * D1;
      sum.add_index(k);
    }
  }
  return sum;
}

std::complex<double> kloosterman_tilde_value(const KloostermanQuery& q) { return kloosterman_tilde(q).evaluate(); }

std::complex<double> naive_kloosterman_tilde(const KloostermanQuery& q) {
  check_moduli(q);
  const i64 D1 = q.D1, D2 = q.D2;
  if (D2 % D1 != 0) throw std::invalid_argument("naive_kloosterman_tilde: requires D1 | D2");
  const i64 r = D2 / D1;
  Accumulator<std::complex<double>> acc;
  for (i64 C1 = 0; C1 < D1; ++C1) {
    if (gcd(C1, D1) != 1) continue;
    i64 C1b = mod_inverse(C1, D1);
    for (i64 C2 = 0; C2 < D2; ++C2) {
      if (gcd(C2, r) != 1) continue;
      i64 C2b = mod_inverse(C2, r);
      acc.add(e_frac(q.n2 * C1b * C2, D1) * e_frac(q.m1 * C2b, r) * e_frac(q.n1 * C1, D1));
    }
  }
  return acc.value();
}

namespace {

// Enumerates admissible (B1, C1, B2, C2), representatives in [0, Dj),
// calling f(B1, C1, B2, C2).  The loop runs over the smaller modulus side;
// the other side's B is an arithmetic progression and its C is solved.
template <typename F>
void enumerate_long(i64 D1, i64 D2, F&& f) {
  const bool swap = D2 < D1;
  const i64 Da = swap ? D2 : D1;  // looped side
  const i64 Db = swap ? D1 : D2;  // solved side
  // Condition is symmetric: Da Cb + Ba Bb + Db Ca = 0 (mod Da Db).
  for (i64 Ba = 0; Ba < Da; ++Ba) {
    const i64 g = gcd(Ba, Da);  // gcd(0, Da) = Da
    const i64 step = Da / g;
    const i64 inv = (step == 1) ? 0 : mod_inverse(Ba / g, step);
    for (i64 Ca = 0; Ca < Da; ++Ca) {
      if (gcd(gcd(Ba, Ca), Da) != 1) continue;
      // Ba Bb = -Db Ca (mod Da)
      const i64 rhs = mod(-(Db % Da) * Ca, Da);
      if (rhs % g) continue;
      const i64 b0 = (step == 1) ? 0 : (rhs / g) % step * inv % step;
      for (i64 Bb = b0; Bb < Db; Bb += step) {
        const i64 R = Ba * Bb + Db * Ca;  // divisible by Da
        const i64 Cb = mod(-(R / Da), Db);
        if (gcd(gcd(Bb, Cb), Db) != 1) continue;
        if (swap)
          f(Bb, Cb, Ba, Ca);
        else
          f(Ba, Ca, Bb, Cb);
      }
    }
  }
}

}  // namespace

ExactSum kloosterman_long(const KloostermanQuery& q, YZPolicy policy) {
  check_moduli(q);
  const i64 D1 = q.D1, D2 = q.D2;
  const i64 Q = lcm(D1, D2);
  const i64 s1 = Q / D1, s2 = Q / D2;
  ExactSum sum(Q);
  const i64 n1 = mod(q.n1, D1), m1 = mod(q.m1, D1), m2 = mod(q.m2, D2), n2 = mod(q.n2, D2);
  const i64 D2m = D2 % D1, D1m = D1 % D2;
  // Unit-first solutions come straight from inverse tables.
  std::vector<i64> inv1, inv2;
  if (policy == YZPolicy::UnitFirst) {
    inv1 = inverse_table(D1);
    inv2 = inverse_table(D2);
  }
  auto yz = [&](i64 B, i64 C, i64 D, const std::vector<i64>& inv) -> std::pair<i64, i64> {
    if (policy == YZPolicy::UnitFirst && D > 1) {
      if (inv[C]) return {0, inv[C]};
      if (inv[B]) return {inv[B], 0};
    }
    return solve_yz(B, C, D, policy);
  };
  enumerate_long(D1, D2, [&](i64 B1, i64 C1, i64 B2, i64 C2) {
    auto [Y1, Z1] = yz(B1, C1, D1, inv1);
    auto [Y2, Z2] = yz(B2, C2, D2, inv2);
    i64 num1 = (n1 * B1 + m1 * mod(Y1 * D2m - Z1 * (B2 % D1), D1)) % D1;
    i64 num2 = (m2 * B2 + n2 * mod(Y2 * D1m - Z2 * (B1 % D2), D2)) % D2;
    sum.add_index(num1 * s1 + num2 * s2);
  });
  return sum;
}

std::complex<double> kloosterman_long_value(const KloostermanQuery& q) { return kloosterman_long(q).evaluate(); }

i64 kloosterman_long_terms(i64 D1, i64 D2) {
  i64 n = 0;
  enumerate_long(D1, D2, [&](i64, i64, i64, i64) { ++n; });
  return n;
}

std::complex<double> naive_kloosterman_long(const KloostermanQuery& q) {
  check_moduli(q);
  const i64 D1 = q.D1, D2 = q.D2, D12 = D1 * D2;
  Accumulator<std::complex<double>> acc;
  for (i64 B1 = 0; B1 < D1; ++B1)
    for (i64 C1 = 0; C1 < D1; ++C1) {
      if (gcd(gcd(B1, C1), D1) != 1) continue;
      auto [Y1, Z1] = solve_yz(B1, C1, D1, YZPolicy::ExtendedGcd);
      for (i64 B2 = 0; B2 < D2; ++B2)
        for (i64 C2 = 0; C2 < D2; ++C2) {
          if ((D1 * C2 + B1 * B2 + D2 * C1) % D12 != 0) continue;
          if (gcd(gcd(B2, C2), D2) != 1) continue;
          auto [Y2, Z2] = solve_yz(B2, C2, D2, YZPolicy::ExtendedGcd);
          acc.add(e_frac(q.n1 * B1 + q.m1 * (Y1 * D2 - Z1 * B2), D1) *
                  e_frac(q.m2 * B2 + q.n2 * (Y2 * D1 - Z2 * B1), D2));
        }
    }
  return acc.value();
}

ExactSum averaged_tilde_sum(int eps, i64 l2, i64 m2, i64 D, i64 delta) {
  if (D < 1 || delta < 1) throw std::invalid_argument("averaged_tilde_sum: D, delta must be >= 1");
  if (eps != 1 && eps != -1) throw std::invalid_argument("averaged_tilde_sum: eps must be +-1");
  ExactSum total(D * delta);
  for (i64 a = 0; a < delta; ++a) {
    KloostermanQuery q;
    q.n1 = -eps * l2;
    q.n2 = m2;
    q.m1 = a;
    q.D1 = D;
    q.D2 = D * delta;
    total.add(kloosterman_tilde(q));
  }
  return total;
}

}  // namespace gl3
