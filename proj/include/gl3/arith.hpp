// arith.hpp
//
// Elementary integer arithmetic (factorization, Moebius, divisors, modular
// inverses) and exact sums of roots of unity.
//
// ExactSum stores sum_k c_k e(k/Q) for a fixed modulus Q as an integer
// coefficient vector.  Reducing the vector to the standard integral basis of
// Z[zeta_Q] (tensor product over the prime-power factors of Q, with the top
// digit p-1 eliminated through 1 + x^{q/p} + ... + x^{(p-1)q/p} = 0) decides
// exactly whether the sum vanishes or is a rational integer.

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gl3 {

using i64 = std::int64_t;

i64 gcd(i64 a, i64 b);
i64 lcm(i64 a, i64 b);

// Reduce x into [0, q).
inline i64 mod(i64 x, i64 q) {
  i64 r = x % q;
  return r < 0 ? r + q : r;
}

// Prime factorization by trial division (n <= ~1e12), ascending primes.
std::vector<std::pair<i64, int>> factorize(i64 n);

int mobius(i64 n);
bool is_squarefree(i64 n);
i64 euler_phi(i64 n);
std::vector<i64> divisors(i64 n);  // ascending

struct Triple {
  i64 d1, d2, d3;
  bool operator==(const Triple&) const = default;
};
// All ordered (d1, d2, d3) with d1 d2 d3 = m, lexicographic order.
std::vector<Triple> divisor_triples(i64 m);
i64 tau3(i64 m);

class NotInvertible : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// x in [0, q) with a x = 1 (mod q).  q = 1 returns 0.
i64 mod_inverse(i64 a, i64 q);

// Extended Euclid: returns g = gcd(a, b) >= 0 and sets x, y with a x + b y = g.
i64 ext_gcd(i64 a, i64 b, i64& x, i64& y);

// A rational number modulo 1, stored reduced.
struct RationalPhase {
  i64 numerator = 0;
  i64 denominator = 1;
  RationalPhase() = default;
  RationalPhase(i64 num, i64 den);
  bool operator==(const RationalPhase&) const = default;
  std::complex<double> value() const;  // e(numerator/denominator)
};

class ExactSum {
 public:
  explicit ExactSum(i64 modulus = 1);

  i64 modulus() const { return q_; }
  // Adds multiplicity * e(k/Q).
  void add_index(i64 k, i64 multiplicity = 1) { c_[mod(k, q_)] += multiplicity; }
  // Adds multiplicity * e(phase); the phase denominator must divide Q.
  void add(const RationalPhase& phase, i64 multiplicity = 1);
  void add(const ExactSum& other);

  const std::vector<i64>& coefficients() const { return c_; }
  // Nonzero terms as reduced phases with multiplicities.
  std::vector<std::pair<RationalPhase, i64>> terms() const;
  i64 term_count() const;  // sum of |multiplicities|

  // Coefficients in the integral basis; indexed like coefficients().
  std::vector<i64> reduced() const;
  bool is_zero() const;
  std::optional<i64> as_integer() const;

  // Compensated floating evaluation.
  std::complex<double> evaluate() const;

 private:
  i64 q_;
  std::vector<i64> c_;
};

}  // namespace gl3
