// trace_terms.hpp
//
// Desk-scale assembly of the geometric side of the Kuznetsov formula for
// indices (n1, n2), (m1, m2):
//
//   Delta  = d(n1,m1) d(n2,m2) (1/192 pi^5) int h dspec
//   Sigma4 = sum_eps sum_{D2|D1, m2 D1 = n1 D2^2} S~(-eps n2, m2, m1; D2, D1)/(D1 D2) Phi_w4(eps m1 m2 n2/(D1 D2))
//   Sigma5 = sum_eps sum_{D1|D2, m1 D2 = n2 D1^2} S~(eps n1, m1, m2; D1, D2)/(D1 D2) Phi_w5(eps n1 m1 m2/(D1 D2))
//   Sigma6 = sum_{eps1,eps2} sum_{D1,D2} S(eps2 n2, eps1 n1, m1, m2; D1, D2)/(D1 D2)
//              Phi_w6(-eps2 m1 n2 D2/D1^2, -eps1 m2 n1 D1/D2^2)
//   E_min  = (1/96 pi^2) int int h(mu)/N_mu conj(A_mu(m1,m2)) A_mu(n1,n2) dt1 dt2
//   E_max  = sum_g (1/2 pi) int h(it+mu_g, it-mu_g, -2it)/N_{mu,g} conj(B(m1,m2)) B(n1,n2) dt
//
// The first moment uses n = (l, 1), m = (1, m) and h = h_{T,M}; the second
// uses n = (l1, l2), m = (m1, m2) and h_2 = h_{T,M} W_{mu,N}(m1 m2).

#pragma once

#include <string>
#include <vector>

#include "gl3/eisenstein.hpp"
#include "gl3/kernels.hpp"
#include "gl3/moments.hpp"

namespace gl3 {

enum class Moment { First, Second };
enum class TermKind { Delta, Sigma4, Sigma5, Sigma6, EMin, EMax };

std::string to_string(Moment m);
std::string to_string(TermKind t);
// Accepts "first"/"second" and "Delta", "Sigma4", ..., "E_min", "E_max"
// (case-insensitive); throws std::invalid_argument otherwise.
Moment moment_from_string(const std::string& s);
TermKind term_from_string(const std::string& s);

struct ModuliPair {
  i64 D1 = 1, D2 = 1;
  bool operator==(const ModuliPair&) const = default;
};

// D2 | D1, m2 D1 = n1 D2^2, D1 <= d_max; ascending in D2.
std::vector<ModuliPair> sigma4_moduli(i64 m2, i64 n1, i64 d_max);
// D1 | D2, m1 D2 = n2 D1^2, D2 <= d_max; the mirror of sigma4_moduli.
std::vector<ModuliPair> sigma5_moduli(i64 m1, i64 n2, i64 d_max);
// Scan of all D1, D2 <= d_max against the same conditions.
std::vector<ModuliPair> sigma4_moduli_brute(i64 m2, i64 n1, i64 d_max);
std::vector<ModuliPair> sigma5_moduli_brute(i64 m1, i64 n2, i64 d_max);

// Survival of (D1, D2) in Sigma6 for a = m1 n2, b = m2 n1:
//   a^{1/3} b^{1/6} / D1^{1/2} >= T^{1-eps}  and  a^{1/6} b^{1/3} / D2^{1/2} >= T^{1-eps}.
// Returns the number of surviving D1 (resp. D2), i.e. the floor of the bound.
i64 sigma6_d1_bound(double a, double b, double T, double eps);
i64 sigma6_d2_bound(double a, double b, double T, double eps);

struct Sigma6Survival {
  double T = 0.0, L = 0.0, eps = 0.0, product_max = 0.0;
  long tuples = 0;             // (l1, l2, m1, m2) with l1, l2 <= L, m1 m2 l1 l2 <= product_max
  long admissible_tuples = 0;  // tuples with at least one surviving (D1, D2)
  long admissible_pairs = 0;
  double best_margin = 0.0;    // max over tuples of min(a^{1/3} b^{1/6}, a^{1/6} b^{1/3}) / T^{1-eps}
  std::vector<std::string> log;
};
Sigma6Survival sigma6_survival(double T, double L, double eps, double product_max);

struct TraceTermRequest {
  Moment moment = Moment::First;
  i64 n1 = 1, n2 = 1, m1 = 1, m2 = 1;
  TestFunctionParams test;
  AfeParams afe;
  double tol = 1e-6;
  int threads = 1;
  i64 d_max = 64;            // moduli cutoff for Sigma4/5/6
  double eps = 0.1;          // survival exponent for Sigma6
  double budget = 4e10;      // per Phi evaluation, see PhiOptions
  long max_tuples = 64;      // Phi evaluations allowed per term
  std::vector<CoefficientSource> gl2;  // E_max

  static TraceTermRequest first(i64 l, i64 m, const TestFunctionParams& p);
  static TraceTermRequest second(i64 l1, i64 l2, i64 m1, i64 m2, const TestFunctionParams& p);
  void validate() const;
};

struct TraceTermResult {
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;
  long panels = 0;
  long tuples = 0;           // (eps, D1, D2) terms assembled, or quadrature nodes for E terms
  double ratio_T3M2 = 0.0;   // |value| / (T^3 M^2)
  std::vector<std::string> log;
};

// Throws CostGuardError when the Phi evaluations exceed max_tuples or a
// single evaluation exceeds the budget; InsufficientData for E_max without
// sources or with tables too short for the normalizer.
TraceTermResult trace_term(const TraceTermRequest& request, TermKind term);

}  // namespace gl3
