// kloosterman.hpp
//
// The two GL(3) Kloosterman sums attached to the Weyl elements w4/w5 and w6.
//
//   S~(n1, n2, m1; D1, D2) = sum_{C1 mod D1, (C1,D1)=1}
//                            sum_{C2 mod D2, (C2,D2/D1)=1}
//                            e(n2 C1^-1 C2 / D1 + m1 C2^-1 / (D2/D1) + n1 C1 / D1),
//   requiring D1 | D2 (C1^-1 mod D1, C2^-1 mod D2/D1).
//
//   S(n1, m2, m1, n2; D1, D2) = sum over B1, C1 mod D1 and B2, C2 mod D2 with
//     D1 C2 + B1 B2 + D2 C1 = 0 (mod D1 D2),  (Bj, Cj, Dj) = 1,
//   of e((n1 B1 + m1 (Y1 D2 - Z1 B2)) / D1 + (m2 B2 + n2 (Y2 D1 - Z2 B1)) / D2)
//   where Yj Bj + Zj Cj = 1 (mod Dj).
//
// Both sums are returned as ExactSum objects over the common denominator
// (D2 for S~, lcm(D1, D2) for S).  The naive_* functions are the literal
// nested loops, kept as reference implementations.

#pragma once

#include <complex>

#include "gl3/arith.hpp"

namespace gl3 {

struct KloostermanQuery {
  i64 n1 = 0, n2 = 0, m1 = 0, m2 = 0;
  i64 D1 = 1, D2 = 1;
};

// How (Yj, Zj) is picked for the long sum.
enum class YZPolicy {
  UnitFirst,    // (0, C^-1) if C is a unit, else (B^-1, 0) if B is, else Bezout
  ExtendedGcd,  // Bezout coefficients scaled by gcd(B,C)^-1 mod D
  Search,       // largest Y in [0, D) admitting a solution, then smallest Z
};

// S~(n1, n2, m1; D1, D2); m2 is ignored.
ExactSum kloosterman_tilde(const KloostermanQuery& q);
std::complex<double> kloosterman_tilde_value(const KloostermanQuery& q);

// S(n1, m2, m1, n2; D1, D2).
ExactSum kloosterman_long(const KloostermanQuery& q, YZPolicy policy = YZPolicy::UnitFirst);
std::complex<double> kloosterman_long_value(const KloostermanQuery& q);

// Floating-point evaluation by the literal loops: C1, C2 scanned with gcd
// tests for S~; all four of B1, C1, B2, C2 scanned for S.
std::complex<double> naive_kloosterman_tilde(const KloostermanQuery& q);
std::complex<double> naive_kloosterman_long(const KloostermanQuery& q);

// Admissible tuple count of the long sum (number of terms).
i64 kloosterman_long_terms(i64 D1, i64 D2);

// sum_{a mod delta} S~(-eps l2, m2, a; D, D delta).
ExactSum averaged_tilde_sum(int eps, i64 l2, i64 m2, i64 D, i64 delta);

// Solve Y B + Z C = 1 (mod D) under a policy; throws std::logic_error when
// (B, C, D) != 1.
std::pair<i64, i64> solve_yz(i64 B, i64 C, i64 D, YZPolicy policy);

}  // namespace gl3
